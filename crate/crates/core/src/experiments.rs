//! Experiment presets and file emission.
//!
//! Every preset computes its complete output in memory first and only then
//! touches the filesystem, so a failing run leaves no partial files. Data
//! files are byte-identical across reruns with the same config; the
//! manifest carries the only varying fields (timing).

use std::fs;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thiserror::Error;

use crate::closed_form::{barrier_value, BarrierValueFn, ClosedFormError};
use crate::config::{ExperimentPreset, RuleSettings, RunConfig};
use crate::model::{ModelParams, ModelError};
use crate::sim::{run_batch, PathResult, SeedSpec, SimError, SimSpec, StoppingRules};
use crate::stats::{
    barrier_sweep, histogram_csv, moment_table, moments_csv, probabilities_csv,
    terminal_histogram, ExperimentReport, StatsError, TerminalStatistic,
};
use crate::strategies::{
    ac_inventory, ac_rate, p1_inventory, p1_rate, AcCoefficients, Strategy, StrategyError,
};
use crate::model::MarketState;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

/// A file scheduled for emission.
#[derive(Debug, Clone, PartialEq)]
pub struct EmittedFile {
    pub name: String,
    pub contents: String,
}

/// Distinct, order-independent seed for a named batch within a preset.
fn batch_seed(master: u64, label: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ master.rotate_left(17);
    for byte in label.bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn stopping_rules(params: &ModelParams, rules: &RuleSettings) -> StoppingRules {
    let mut r = StoppingRules::horizon(params.t_max);
    if rules.double_barrier {
        r = r.with_double_barrier(params.k_lower, params.h_upper);
    }
    if let Some(floor) = rules.price_floor {
        r = r.with_price_floor(floor);
    }
    if rules.depletion {
        r = r.with_depletion(rules.inventory_epsilon_frac * params.q0);
    }
    r
}

/// The one-at-a-time parameter variations shared by the trajectory and
/// grid presets.
const VARIATIONS: [(&str, f64); 8] = [
    ("b", 0.001),
    ("b", 0.002),
    ("l", 0.001),
    ("l", 0.002),
    ("gamma", 0.05),
    ("gamma", 0.1),
    ("sigma", 0.1),
    ("sigma", 0.2),
];

fn apply_variation(base: &ModelParams, name: &str, value: f64) -> ModelParams {
    let mut p = *base;
    match name {
        "b" => p.b = value,
        "l" => p.l = value,
        "gamma" => {
            // Keep the initial mark (and with it the barrier geometry)
            // unchanged: the baseline normalization sets s0 = y0 + gamma*q0
            // for unit inventory, so the slippage variation moves s0 too.
            let y0 = base.initial_performance();
            p.gamma = value;
            p.s0 = (y0 - p.x0) / p.q0 + value * p.q0;
        }
        "sigma" => p.sigma = value,
        _ => unreachable!("variation over unknown parameter {name}"),
    }
    p
}

fn grid(start: f64, end: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            if i == n {
                end
            } else {
                start + (end - start) * i as f64 / n as f64
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Preset builders

/// Success-probability curves `J(y)` for the three reference exponents.
fn fig1_files(cfg: &RunConfig) -> Result<Vec<EmittedFile>, ExperimentError> {
    const LAMBDAS: [(f64, &str); 3] = [
        (1.98, "fig1_lambda_1.98.csv"),
        (19.80, "fig1_lambda_19.80.csv"),
        (1980.05, "fig1_lambda_1980.05.csv"),
    ];
    let (k, h) = (cfg.params.k_lower, cfg.params.h_upper);
    let mut files = Vec::new();
    for (lambda, name) in LAMBDAS {
        let f = BarrierValueFn::new(lambda, k, h)?;
        let mut csv = String::from("y,J\n");
        for y in grid(k, h, 200) {
            csv.push_str(&format!("{},{}\n", y, barrier_value(y, &f)?));
        }
        files.push(EmittedFile {
            name: name.to_string(),
            contents: csv,
        });
    }
    Ok(files)
}

/// Surrogate test mode: barrier estimators on the constant-coefficient
/// process, emitted in the standard file shapes.
fn surrogate_run_files(cfg: &RunConfig) -> Result<Vec<EmittedFile>, ExperimentError> {
    let sur = cfg.surrogate.expect("caller checked");
    let spec = crate::sim::SurrogateSpec {
        mu: sur.mu,
        s: sur.s,
        y0: sur.y0,
        rules: StoppingRules::horizon(cfg.params.t_max)
            .with_double_barrier(cfg.params.k_lower, cfg.params.h_upper),
        dt: cfg.dt,
        sample_times: cfg.sample_times.clone(),
    };
    let seed = SeedSpec::new(cfg.master_seed);
    let results = crate::sim::run_surrogate_batch(&spec, &seed, cfg.n_paths)?;
    let rows = moment_table(&results, &cfg.sample_times)?;
    let hits = cfg
        .sample_times
        .iter()
        .filter(|&&t| t > 0.0)
        .map(|&t| crate::stats::hitting_probabilities(&results, t))
        .collect::<Result<Vec<_>, _>>()?;
    let hist = terminal_histogram(&results, TerminalStatistic::Performance, 50)?;
    Ok(vec![
        EmittedFile {
            name: "moments.csv".into(),
            contents: moments_csv(&rows),
        },
        EmittedFile {
            name: "probabilities.csv".into(),
            contents: probabilities_csv(&hits),
        },
        EmittedFile {
            name: "histogram.csv".into(),
            contents: histogram_csv(&hist),
        },
    ])
}

/// One batch with the configured strategy; the standard report file set.
fn single_run_files(cfg: &RunConfig) -> Result<Vec<EmittedFile>, ExperimentError> {
    if cfg.surrogate.is_some() {
        return surrogate_run_files(cfg);
    }
    let strategy = Strategy::from_label(&cfg.strategy_label, &cfg.params)?;
    let rules = stopping_rules(&cfg.params, &cfg.rules);
    let spec = SimSpec::new(
        &strategy,
        cfg.params,
        rules,
        cfg.dt,
        cfg.sample_times.clone(),
    );
    let seed = SeedSpec::new(cfg.master_seed);
    let results = run_batch(&spec, &seed, cfg.n_paths)?;
    let stat = if cfg.params.phi > 0.0 {
        TerminalStatistic::Objective
    } else {
        TerminalStatistic::Performance
    };
    let hist = terminal_histogram(&results, stat, 50)?;
    let report = ExperimentReport::build(&spec, &seed, cfg.n_paths, &results, Some(hist.clone()))?;
    Ok(vec![
        EmittedFile {
            name: "report.json".into(),
            contents: report.to_json(),
        },
        EmittedFile {
            name: "moments.csv".into(),
            contents: moments_csv(&report.moments),
        },
        EmittedFile {
            name: "probabilities.csv".into(),
            contents: probabilities_csv(&report.hit_probabilities),
        },
        EmittedFile {
            name: "histogram.csv".into(),
            contents: histogram_csv(&hist),
        },
    ])
}

/// Target-strategy trajectories under the one-at-a-time variations:
/// analytic rate/inventory curves plus simulated mark bands.
fn fig2_files(cfg: &RunConfig) -> Result<Vec<EmittedFile>, ExperimentError> {
    let sample_times: Vec<f64> = (0..=100)
        .map(|i| i as f64 * cfg.params.t_max / 100.0)
        .collect();
    let mut files = Vec::new();
    for (name, value) in VARIATIONS {
        let params = apply_variation(&cfg.params, name, value);
        params.validate()?;
        let tag = format!("fig2_{name}_{value}");

        let mut analytic = String::from("t,rate,inventory\n");
        for &t in &sample_times {
            let q = p1_inventory(t, &params);
            let st = MarketState { t, x: 0.0, q, s: params.s0 };
            analytic.push_str(&format!("{},{},{}\n", t, p1_rate(t, &st, &params), q));
        }
        files.push(EmittedFile {
            name: format!("{tag}_analytic.csv"),
            contents: analytic,
        });

        let strategy = Strategy::from_label("p1", &params)?;
        let rules = stopping_rules(&params, &cfg.rules);
        let spec = SimSpec::new(&strategy, params, rules, cfg.dt, sample_times.clone());
        let seed = SeedSpec::new(batch_seed(cfg.master_seed, &tag));
        let results = run_batch(&spec, &seed, cfg.n_paths)?;
        let rows = moment_table(&results, &sample_times)?;
        files.push(EmittedFile {
            name: format!("{tag}_moments.csv"),
            contents: moments_csv(&rows),
        });
    }
    Ok(files)
}

/// Target-strategy mark bands under the configured barriers and a tenfold
/// widening around the initial mark.
fn fig2b_files(cfg: &RunConfig) -> Result<Vec<EmittedFile>, ExperimentError> {
    let y0 = cfg.params.initial_performance();
    let wide = {
        let mut p = cfg.params;
        p.k_lower = y0 - 0.5;
        p.h_upper = y0 + 0.5;
        p
    };
    let sample_times: Vec<f64> = (0..=100)
        .map(|i| i as f64 * cfg.params.t_max / 100.0)
        .collect();
    let mut files = Vec::new();
    for (params, tag) in [(cfg.params, "fig2b_narrow"), (wide, "fig2b_wide")] {
        params.validate()?;
        let strategy = Strategy::from_label("p1", &params)?;
        let rules = stopping_rules(&params, &cfg.rules);
        let spec = SimSpec::new(&strategy, params, rules, cfg.dt, sample_times.clone());
        let seed = SeedSpec::new(batch_seed(cfg.master_seed, tag));
        let results = run_batch(&spec, &seed, cfg.n_paths)?;
        let rows = moment_table(&results, &sample_times)?;
        files.push(EmittedFile {
            name: format!("{tag}_moments.csv"),
            contents: moments_csv(&rows),
        });
    }
    Ok(files)
}

/// Hitting-probability sweeps over the lower and the upper barrier for both
/// strategies.
fn fig3_files(cfg: &RunConfig) -> Result<Vec<EmittedFile>, ExperimentError> {
    let y0 = cfg.params.initial_performance();
    let lower_grid: Vec<(f64, f64)> = [0.95, 0.96, 0.97, 0.98, 0.99, 0.999]
        .iter()
        .map(|&k| (y0 - 1.0 + k, cfg.params.h_upper))
        .collect();
    let upper_grid: Vec<(f64, f64)> = [1.005, 1.01, 1.02, 1.03, 1.04, 1.05]
        .iter()
        .map(|&h| (cfg.params.k_lower, y0 - 1.0 + h))
        .collect();

    let mut files = Vec::new();
    for (grid, tag) in [(lower_grid, "fig3_lower_sweep"), (upper_grid, "fig3_upper_sweep")] {
        let mut csv = String::from(
            "strategy,k,h,p_upper,p_lower,p_neither,difference,se_upper,se_lower\n",
        );
        for label in ["p1", "p0"] {
            let strategy = Strategy::from_label(label, &cfg.params)?;
            let seed = SeedSpec::new(batch_seed(cfg.master_seed, &format!("{tag}_{label}")));
            let points = barrier_sweep(&strategy, &cfg.params, &grid, cfg.dt, cfg.n_paths, &seed)?;
            for p in points {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    label,
                    p.k_lower,
                    p.h_upper,
                    p.probs.p_upper,
                    p.probs.p_lower,
                    p.probs.p_neither,
                    p.difference,
                    p.probs.se_upper,
                    p.probs.se_lower
                ));
            }
        }
        files.push(EmittedFile {
            name: format!("{tag}.csv"),
            contents: csv,
        });
    }
    Ok(files)
}

/// Sample times of the mean/variance comparison grid.
pub const TABLE2_TIMES: [f64; 3] = [0.02, 0.06, 0.10];

/// Horizon of the comparison window. The classical strategy is run with its
/// terminal date at the end of the observation window, which is what makes
/// its mark saturate near the upper barrier within the sampled times.
pub const TABLE2_HORIZON: f64 = 0.1;

/// Mean/variance rows for both strategies under the one-at-a-time
/// variations. Also returned in-memory for the acceptance suite.
pub fn table2_rows(cfg: &RunConfig) -> Result<Vec<Table2Row>, ExperimentError> {
    let mut rows = Vec::new();
    for (name, value) in VARIATIONS {
        let mut params = apply_variation(&cfg.params, name, value);
        params.t_max = TABLE2_HORIZON;
        params.validate()?;
        let rules = stopping_rules(&params, &cfg.rules);
        let mut per_strategy = Vec::new();
        for label in ["p1", "p0"] {
            let strategy = Strategy::from_label(label, &params)?;
            let spec = SimSpec::new(
                &strategy,
                params,
                rules,
                cfg.dt,
                TABLE2_TIMES.to_vec(),
            );
            let seed = SeedSpec::new(batch_seed(
                cfg.master_seed,
                &format!("table2_{name}_{value}_{label}"),
            ));
            let results = run_batch(&spec, &seed, cfg.n_paths)?;
            per_strategy.push(moment_table(&results, &TABLE2_TIMES)?);
        }
        for (i, &t) in TABLE2_TIMES.iter().enumerate() {
            rows.push(Table2Row {
                parameter: name,
                value,
                t,
                p1_mean: per_strategy[0][i].mean,
                p1_variance: per_strategy[0][i].variance,
                p0_mean: per_strategy[1][i].mean,
                p0_variance: per_strategy[1][i].variance,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table2Row {
    pub parameter: &'static str,
    pub value: f64,
    pub t: f64,
    pub p1_mean: f64,
    pub p1_variance: f64,
    pub p0_mean: f64,
    pub p0_variance: f64,
}

fn table2_files(cfg: &RunConfig) -> Result<Vec<EmittedFile>, ExperimentError> {
    let rows = table2_rows(cfg)?;
    let mut csv = String::from("parameter,value,t,p1_mean,p1_var,p0_mean,p0_var\n");
    for r in rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.parameter, r.value, r.t, r.p1_mean, r.p1_variance, r.p0_mean, r.p0_variance
        ));
    }
    Ok(vec![EmittedFile {
        name: "table2.csv".into(),
        contents: csv,
    }])
}

/// Analytic schedule comparison on the running-penalty parameter set:
/// inventory and rate curves for the target and penalty schedules.
fn fig4_files(cfg: &RunConfig) -> Result<Vec<EmittedFile>, ExperimentError> {
    let params = cfg.params;
    let coeffs = AcCoefficients::new(&params)?;
    let mut inv = String::from("t,q_target,q_ac\n");
    let mut rate = String::from("t,v_target,v_ac\n");
    for t in grid(0.0, params.t_max, 1000) {
        let q_t = p1_inventory(t, &params);
        let q_a = ac_inventory(t, &params, &coeffs)?;
        inv.push_str(&format!("{},{},{}\n", t, q_t, q_a));
        let st_t = MarketState { t, x: 0.0, q: q_t, s: params.s0 };
        let st_a = MarketState { t, x: 0.0, q: q_a, s: params.s0 };
        rate.push_str(&format!(
            "{},{},{}\n",
            t,
            p1_rate(t, &st_t, &params),
            ac_rate(t, &st_a, &params, &coeffs)?
        ));
    }
    Ok(vec![
        EmittedFile {
            name: "fig4_inventory.csv".into(),
            contents: inv,
        },
        EmittedFile {
            name: "fig4_rate.csv".into(),
            contents: rate,
        },
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveSummary {
    pub strategy_mean: f64,
    pub strategy_variance: f64,
    pub n_paths: usize,
}

fn objective_summary(results: &[PathResult]) -> ObjectiveSummary {
    let n = results.len();
    let values: Vec<f64> = results.iter().map(|r| r.objective_value()).collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    ObjectiveSummary {
        strategy_mean: mean,
        strategy_variance: variance,
        n_paths: n,
    }
}

/// Simulated liquidation-objective histograms for the target strategy and
/// the running-penalty schedule, stopped at the price floor, depletion, or
/// the horizon.
pub fn fig5_batches(
    cfg: &RunConfig,
) -> Result<Vec<(&'static str, Vec<PathResult>)>, ExperimentError> {
    let mut out = Vec::new();
    for label in ["p1", "ac"] {
        let strategy = Strategy::from_label(label, &cfg.params)?;
        let rules = stopping_rules(&cfg.params, &cfg.rules);
        let spec = SimSpec::new(
            &strategy,
            cfg.params,
            rules,
            cfg.dt,
            vec![0.0, cfg.params.t_max],
        );
        let seed = SeedSpec::new(batch_seed(cfg.master_seed, &format!("fig5_{label}")));
        let results = run_batch(&spec, &seed, cfg.n_paths)?;
        out.push((if label == "p1" { "target" } else { "ac" }, results));
    }
    Ok(out)
}

fn fig5_files(cfg: &RunConfig) -> Result<Vec<EmittedFile>, ExperimentError> {
    let batches = fig5_batches(cfg)?;
    let mut files = Vec::new();
    let mut summary = serde_json::Map::new();
    for (tag, results) in &batches {
        let hist = terminal_histogram(results, TerminalStatistic::Objective, 50)?;
        files.push(EmittedFile {
            name: format!("fig5_hist_{tag}.csv"),
            contents: histogram_csv(&hist),
        });
        summary.insert(
            tag.to_string(),
            serde_json::to_value(objective_summary(results)).expect("summary serializes"),
        );
    }
    files.push(EmittedFile {
        name: "fig5_summary.json".into(),
        contents: serde_json::to_string_pretty(&serde_json::Value::Object(summary))
            .expect("summary serializes"),
    });
    Ok(files)
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    preset: &'static str,
    strategy: &'a str,
    master_seed: u64,
    n_paths: usize,
    dt: f64,
    params: ModelParams,
    rules: RuleSettings,
    files: Vec<String>,
    wall_time_ms: u128,
    created_unix_ms: u128,
}

/// Runs a preset and writes its file set plus `manifest.json` into the
/// configured output directory. On any error the partial outputs written by
/// this invocation are removed.
pub fn run_experiment(cfg: &RunConfig) -> Result<Vec<PathBuf>, ExperimentError> {
    cfg.validate()?;
    let started = Instant::now();
    let files = match cfg.preset {
        ExperimentPreset::Fig1 => fig1_files(cfg)?,
        ExperimentPreset::Baseline | ExperimentPreset::Section5 => single_run_files(cfg)?,
        ExperimentPreset::Fig2 => fig2_files(cfg)?,
        ExperimentPreset::Fig2b => fig2b_files(cfg)?,
        ExperimentPreset::Fig3 => fig3_files(cfg)?,
        ExperimentPreset::Table2 => table2_files(cfg)?,
        ExperimentPreset::Fig4 => fig4_files(cfg)?,
        ExperimentPreset::Fig5 => fig5_files(cfg)?,
    };

    fs::create_dir_all(&cfg.out_dir)?;
    let mut written: Vec<PathBuf> = Vec::with_capacity(files.len() + 1);
    let write = |name: &str, contents: &str, written: &mut Vec<PathBuf>| {
        let path = cfg.out_dir.join(name);
        match fs::write(&path, contents) {
            Ok(()) => {
                written.push(path);
                Ok(())
            }
            Err(e) => Err(e),
        }
    };
    let cleanup = |written: &[PathBuf]| {
        for p in written {
            let _ = fs::remove_file(p);
        }
    };
    for f in &files {
        if let Err(e) = write(&f.name, &f.contents, &mut written) {
            cleanup(&written);
            return Err(e.into());
        }
    }
    let manifest = Manifest {
        tool: "execsim",
        version: env!("CARGO_PKG_VERSION"),
        preset: cfg.preset.name(),
        strategy: &cfg.strategy_label,
        master_seed: cfg.master_seed,
        n_paths: cfg.n_paths,
        dt: cfg.dt,
        params: cfg.params,
        rules: cfg.rules,
        files: files.iter().map(|f| f.name.clone()).collect(),
        wall_time_ms: started.elapsed().as_millis(),
        created_unix_ms: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    if let Err(e) = write("manifest.json", &manifest_json, &mut written) {
        cleanup(&written);
        return Err(e.into());
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn tmp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("execsim_test_{tag}_{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn fig1_endpoints_exact() {
        let mut cfg = RunConfig::preset_defaults(ExperimentPreset::Fig1);
        cfg.out_dir = tmp_dir("fig1");
        let files = fig1_files(&cfg).unwrap();
        assert_eq!(files.len(), 3);
        for f in &files {
            let lines: Vec<&str> = f.contents.lines().collect();
            assert_eq!(lines.len(), 202);
            assert_eq!(lines[1], "0.95,0");
            assert_eq!(*lines.last().unwrap(), "1.05,1");
        }
    }

    #[test]
    fn single_run_emits_standard_files_and_manifest() {
        let mut cfg = parse_config("[run]\nn_paths = 64\ndt = 0.001\n").unwrap();
        cfg.out_dir = tmp_dir("single");
        let written = run_experiment(&cfg).unwrap();
        let names: Vec<String> = written
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        for expected in [
            "report.json",
            "moments.csv",
            "probabilities.csv",
            "histogram.csv",
            "manifest.json",
        ] {
            assert!(names.contains(&expected.to_string()), "missing {expected}");
        }
        let _ = fs::remove_dir_all(&cfg.out_dir);
    }

    #[test]
    fn rerun_with_same_config_is_byte_identical_except_manifest() {
        let mut cfg = parse_config("[run]\nn_paths = 32\ndt = 0.001\n").unwrap();
        cfg.out_dir = tmp_dir("rerun_a");
        let first = run_experiment(&cfg).unwrap();
        let snap: Vec<(String, Vec<u8>)> = first
            .iter()
            .filter(|p| !p.ends_with("manifest.json"))
            .map(|p| {
                (
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    fs::read(p).unwrap(),
                )
            })
            .collect();
        cfg.out_dir = tmp_dir("rerun_b");
        let second = run_experiment(&cfg).unwrap();
        for p in second.iter().filter(|p| !p.ends_with("manifest.json")) {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let bytes = fs::read(p).unwrap();
            let reference = &snap.iter().find(|(n, _)| *n == name).unwrap().1;
            assert_eq!(&bytes, reference, "file {name} differs between reruns");
        }
        let _ = fs::remove_dir_all(&cfg.out_dir);
    }

    #[test]
    fn batch_seed_depends_on_label_and_master() {
        let a = batch_seed(42, "table2_b_0.001_p1");
        let b = batch_seed(42, "table2_b_0.001_p0");
        let c = batch_seed(43, "table2_b_0.001_p1");
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, batch_seed(42, "table2_b_0.001_p1"));
    }

    #[test]
    fn fig4_curves_are_analytic_and_cheap() {
        let cfg = RunConfig::preset_defaults(ExperimentPreset::Fig4);
        let files = fig4_files(&cfg).unwrap();
        assert_eq!(files.len(), 2);
        let inv = &files[0].contents;
        let first_row = inv.lines().nth(1).unwrap();
        // both schedules start from the full inventory
        assert_eq!(first_row, "0,1,1");
    }
}
