//! Estimators over path batches: hitting probabilities, moment tables,
//! quantile bands, histograms, and barrier sweeps.
//!
//! Conventions, fixed for reproducibility:
//! * paths stopped early contribute their frozen stop values at later
//!   sample times (the book as a continuing observer sees it);
//! * quantiles use the nearest-rank rule, no interpolation;
//! * aggregations consume results in path-index order.

use serde::Serialize;
use thiserror::Error;

use crate::model::ModelParams;
use crate::sim::{
    run_batch, PathResult, SeedSpec, SimError, SimSpec, StopCause, StoppingRules,
};
use crate::strategies::Strategy;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty result collection")]
    EmptyCollection,
    #[error("time {0} is not among the sampled times")]
    TimeNotSampled(f64),
    #[error("quantile levels must satisfy 0 <= lo < hi <= 1")]
    BadQuantiles,
    #[error("histogram needs at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("query time {0} beyond the batch horizon {1}")]
    BeyondHorizon(f64, f64),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Mean, unbiased variance, and nearest-rank quantile band at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentRow {
    pub t: f64,
    pub mean: f64,
    pub variance: f64,
    pub q05: f64,
    pub q95: f64,
}

/// Barrier-hit fractions by a given time, with binomial standard errors.
/// `p_neither` is defined as `1 - (p_upper + p_lower)`, which keeps the
/// three-way partition summing to one exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HitRow {
    pub by_time: f64,
    pub p_upper: f64,
    pub p_lower: f64,
    pub p_neither: f64,
    pub se_upper: f64,
    pub se_lower: f64,
}

/// Equal-width histogram of a terminal statistic. A degenerate sample
/// (all values equal) collapses to a single occupied bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub statistic: String,
    /// `counts.len() + 1` edges; the last edge is the sample maximum.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Sample variance (unbiased) of the underlying values is not
    /// reconstructible from bins; it is computed at build time.
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }
}

/// Which per-path scalar the terminal histogram bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatistic {
    /// Mark at the end of the path (frozen at the stop).
    Performance,
    /// Liquidation objective: revenue + terminal inventory value - penalty.
    Objective,
}

impl TerminalStatistic {
    pub fn of(&self, r: &PathResult) -> f64 {
        match self {
            TerminalStatistic::Performance => r.terminal_performance(),
            TerminalStatistic::Objective => r.objective_value(),
        }
    }

    pub fn parse(label: &str) -> Option<Self> {
        match label {
            "performance" => Some(TerminalStatistic::Performance),
            "p5_objective" | "objective" => Some(TerminalStatistic::Objective),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TerminalStatistic::Performance => "performance",
            TerminalStatistic::Objective => "p5_objective",
        }
    }
}

pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Fractions of paths absorbed at the upper/lower barrier at or before
/// `by_time`; everything else counts as neither.
pub fn hitting_probabilities(
    results: &[PathResult],
    by_time: f64,
) -> Result<HitRow, StatsError> {
    if results.is_empty() {
        return Err(StatsError::EmptyCollection);
    }
    let n = results.len();
    let mut n_upper = 0usize;
    let mut n_lower = 0usize;
    for r in results {
        if r.stop_time <= by_time + 1e-12 {
            match r.stop_cause {
                StopCause::UpperBarrier => n_upper += 1,
                StopCause::LowerBarrier => n_lower += 1,
                _ => {}
            }
        }
    }
    let p_upper = n_upper as f64 / n as f64;
    let p_lower = n_lower as f64 / n as f64;
    Ok(HitRow {
        by_time,
        p_upper,
        p_lower,
        p_neither: 1.0 - (p_upper + p_lower),
        se_upper: binomial_se(p_upper, n),
        se_lower: binomial_se(p_lower, n),
    })
}

fn sample_index(results: &[PathResult], t: f64) -> Result<usize, StatsError> {
    results[0]
        .samples
        .iter()
        .position(|s| (s.t - t).abs() <= 1e-9)
        .ok_or(StatsError::TimeNotSampled(t))
}

/// Nearest-rank quantile of a sorted slice.
fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if p <= 0.0 {
        return sorted[0];
    }
    let rank = (p * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

fn values_at(results: &[PathResult], idx: usize) -> Vec<f64> {
    results.iter().map(|r| r.samples[idx].y).collect()
}

/// Mean and unbiased variance of the mark at each requested time, plus the
/// 5-95% nearest-rank band.
pub fn moment_table(
    results: &[PathResult],
    sample_times: &[f64],
) -> Result<Vec<MomentRow>, StatsError> {
    band_table(results, sample_times, 0.05, 0.95)
}

/// As [`moment_table`] with configurable quantile levels.
pub fn band_table(
    results: &[PathResult],
    sample_times: &[f64],
    lo: f64,
    hi: f64,
) -> Result<Vec<MomentRow>, StatsError> {
    if results.is_empty() {
        return Err(StatsError::EmptyCollection);
    }
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
        return Err(StatsError::BadQuantiles);
    }
    let n = results.len();
    let mut rows = Vec::with_capacity(sample_times.len());
    for &t in sample_times {
        let idx = sample_index(results, t)?;
        let mut values = values_at(results, idx);
        let mean = values.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite mark"));
        rows.push(MomentRow {
            t,
            mean,
            variance,
            q05: nearest_rank(&values, lo),
            q95: nearest_rank(&values, hi),
        });
    }
    Ok(rows)
}

/// Empirical `(lo, hi)` quantile band of the mark at each requested time.
pub fn quantile_band(
    results: &[PathResult],
    sample_times: &[f64],
    lo: f64,
    hi: f64,
) -> Result<Vec<(f64, f64, f64)>, StatsError> {
    Ok(band_table(results, sample_times, lo, hi)?
        .into_iter()
        .map(|r| (r.t, r.q05, r.q95))
        .collect())
}

/// Equal-width histogram of a terminal statistic over the batch.
pub fn terminal_histogram(
    results: &[PathResult],
    statistic: TerminalStatistic,
    n_bins: usize,
) -> Result<Histogram, StatsError> {
    if results.is_empty() {
        return Err(StatsError::EmptyCollection);
    }
    if n_bins < 2 {
        return Err(StatsError::TooFewBins(n_bins));
    }
    let values: Vec<f64> = results.iter().map(|r| statistic.of(r)).collect();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Ok(Histogram {
            statistic: statistic.label().to_string(),
            edges: vec![min, max],
            counts: vec![values.len() as u64],
        });
    }
    let width = (max - min) / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for v in &values {
        let idx = (((v - min) / width) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let mut edges: Vec<f64> = (0..n_bins).map(|i| min + i as f64 * width).collect();
    edges.push(max);
    Ok(Histogram {
        statistic: statistic.label().to_string(),
        edges,
        counts,
    })
}

/// One barrier pair of a sweep, with the success/ruin difference curve value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub k_lower: f64,
    pub h_upper: f64,
    pub probs: HitRow,
    pub difference: f64,
}

/// Hitting probabilities at the horizon for each barrier pair of a grid.
/// Grid points that do not bracket the initial mark are skipped with a
/// logged diagnostic.
pub fn barrier_sweep(
    strategy: &Strategy,
    params: &ModelParams,
    barrier_grid: &[(f64, f64)],
    dt: f64,
    n_paths: usize,
    seed: &SeedSpec,
) -> Result<Vec<SweepPoint>, StatsError> {
    let y0 = params.initial_performance();
    let mut points = Vec::with_capacity(barrier_grid.len());
    for &(k, h) in barrier_grid {
        if !(k < y0 && y0 < h) {
            log::warn!("skipping barrier pair (k={k}, h={h}): initial mark {y0} not inside");
            continue;
        }
        let mut p = *params;
        p.k_lower = k;
        p.h_upper = h;
        let rules = StoppingRules::horizon(p.t_max).with_double_barrier(k, h);
        let spec = SimSpec::new(strategy, p, rules, dt, vec![]);
        let results = run_batch(&spec, seed, n_paths)?;
        let probs = hitting_probabilities(&results, p.t_max)?;
        points.push(SweepPoint {
            k_lower: k,
            h_upper: h,
            probs,
            difference: probs.p_upper - probs.p_lower,
        });
    }
    Ok(points)
}

/// Report metadata: everything needed to rerun the batch plus the fixed
/// estimator conventions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub strategy: String,
    pub n_paths: usize,
    pub dt: f64,
    pub master_seed: u64,
    pub params: ModelParams,
    pub rules: StoppingRules,
    pub include_running_penalty: bool,
    pub post_stop_sampling: &'static str,
    pub quantile_rule: &'static str,
    pub tool_version: &'static str,
}

/// Aggregated estimators for one batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub metadata: ReportMetadata,
    pub moments: Vec<MomentRow>,
    pub hit_probabilities: Vec<HitRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Histogram>,
}

impl ExperimentReport {
    pub fn build(
        spec: &SimSpec,
        seed: &SeedSpec,
        n_paths: usize,
        results: &[PathResult],
        histogram: Option<Histogram>,
    ) -> Result<Self, StatsError> {
        let moments = moment_table(results, &spec.sample_times)?;
        let hit_probabilities = spec
            .sample_times
            .iter()
            .filter(|&&t| t > 0.0)
            .map(|&t| hitting_probabilities(results, t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            metadata: ReportMetadata {
                strategy: spec.strategy.label().to_string(),
                n_paths,
                dt: spec.dt,
                master_seed: seed.master_seed,
                params: spec.params,
                rules: spec.rules,
                include_running_penalty: spec.include_running_penalty,
                post_stop_sampling: "frozen-at-stop",
                quantile_rule: "nearest-rank",
                tool_version: env!("CARGO_PKG_VERSION"),
            },
            moments,
            hit_probabilities,
            histogram,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// CSV with columns `t,mean,var,q05,q95`.
pub fn moments_csv(rows: &[MomentRow]) -> String {
    let mut out = String::from("t,mean,var,q05,q95\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.t, r.mean, r.variance, r.q05, r.q95
        ));
    }
    out
}

/// CSV with columns `by_time,p_upper,p_lower,p_neither,se_upper,se_lower`.
pub fn probabilities_csv(rows: &[HitRow]) -> String {
    let mut out = String::from("by_time,p_upper,p_lower,p_neither,se_upper,se_lower\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.by_time, r.p_upper, r.p_lower, r.p_neither, r.se_upper, r.se_lower
        ));
    }
    out
}

/// CSV with columns `bin_lo,bin_hi,count`.
pub fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for (i, c) in h.counts.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", h.edges[i], h.edges[i + 1], c));
    }
    out
}
