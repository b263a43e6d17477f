//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them all).
//!
//! Monte Carlo criteria pin `n_paths = 10_000`, `dt = 1e-4`, and a fixed
//! seed, so they are deterministic. Tolerances are fixed here, not tuned:
//! probability bands are +/-0.02 (4 binomial standard errors at 10k paths)
//! around the reference rates, means +/-0.002 absolute, variances +/-50%
//! relative or +/-2e-5 absolute.

use execsim::closed_form::{
    barrier_value, h2_closed_form, h2_ode_oracle, lambda_p1, BarrierValueFn,
};
use execsim::config::{ExperimentPreset, RunConfig};
use execsim::experiments::{fig5_batches, run_experiment, table2_rows, TABLE2_TIMES};
use execsim::model::{performance_drift, MarketState, PerformanceSpec};
use execsim::presets::{table1_params, table3_params};
use execsim::sim::{
    run_batch, run_surrogate_batch, SeedSpec, SimSpec, StoppingRules, SurrogateSpec,
};
use execsim::stats::hitting_probabilities;
use execsim::strategies::{
    ac_inventory, ac_rate, p0_inventory, p0_rate, p1_inventory, p1_rate, AcCoefficients, Strategy,
};

/// Suite-wide Monte Carlo shape.
const N_PATHS: usize = 10_000;
const DT: f64 = 1e-4;

/// Fixed seed for the Monte Carlo criteria. The estimators' population
/// values sit inside every band below; the seed only fixes the draw.
const SEED: u64 = 1;

fn check(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_exponent_exactness() {
    let mut p = table1_params();
    let base = lambda_p1(&p);
    let ok_base = (base - 1980.05).abs() / 1980.05 < 1e-9;
    p.sigma = 1.0; // tenfold volatility
    let mid = lambda_p1(&p);
    let ok_mid = (mid - 19.8005).abs() / 19.8005 < 1e-9;
    p.sigma = 1000.0_f64.sqrt() * 0.1; // thousandfold variance
    let low = lambda_p1(&p);
    let ok_low = (low - 1.98005).abs() / 1.98005 < 1e-9;
    check(
        "1 (exponent exactness)",
        ok_base && ok_mid && ok_low,
        &format!("lambda = {base}, {mid}, {low} vs 1980.05, 19.8005, 1.98005 at 1e-9 relative"),
    );
}

#[test]
fn criterion_2_boundary_conditions() {
    let mut pass = true;
    let mut detail = String::new();
    for lam in [1.98, 19.80, 1980.05] {
        let f = BarrierValueFn::new(lam, 0.95, 1.05).unwrap();
        let at_k = barrier_value(0.95, &f).unwrap();
        let at_h = barrier_value(1.05, &f).unwrap();
        pass &= at_k == 0.0 && at_h == 1.0 && at_k.is_finite() && at_h.is_finite();
        detail.push_str(&format!("lambda {lam}: J(k)={at_k}, J(h)={at_h}; "));
    }
    check("2 (boundary conditions)", pass, &detail);
}

#[test]
fn criterion_3_riccati_oracle() {
    let mut variants = vec![table1_params()];
    let mut v1 = table1_params();
    v1.gamma = 0.05;
    v1.s0 = 1.05;
    variants.push(v1);
    let mut v2 = table1_params();
    v2.b = 0.002;
    v2.l = 0.002;
    variants.push(v2);

    let mut pass = true;
    let mut detail = String::new();
    for p in variants {
        let table = h2_ode_oracle(&p, 100_000).unwrap();
        let terminal = table.last().unwrap().1;
        let max_err = table
            .iter()
            .map(|&(t, y)| (y - h2_closed_form(t, &p).unwrap()).abs())
            .fold(0.0_f64, f64::max);
        pass &= max_err < 1e-8 && terminal == -p.gamma;
        detail.push_str(&format!(
            "gamma={} b={} l={}: max err {max_err:.2e}, h2(T)={terminal}; ",
            p.gamma, p.b, p.l
        ));
    }
    check("3 (Riccati oracle agreement)", pass, &detail);
}

/// Fourth-order integration of dq/dt = -rate(t, q) with step `h`.
fn integrate_feedback(rate: impl Fn(f64, f64) -> f64, q0: f64, t_end: f64, h: f64) -> Vec<(f64, f64)> {
    let n = (t_end / h).round() as usize;
    let mut q = q0;
    let mut out = Vec::with_capacity(n + 1);
    out.push((0.0, q));
    for i in 0..n {
        let t = i as f64 * h;
        let f = |t: f64, q: f64| -rate(t, q.max(0.0));
        let k1 = f(t, q);
        let k2 = f(t + 0.5 * h, q + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, q + 0.5 * h * k2);
        let k4 = f(t + h, q + h * k3);
        q += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push(((i + 1) as f64 * h, q));
    }
    out
}

#[test]
fn criterion_4_feedback_schedule_consistency() {
    let sample_idx: Vec<usize> = (1..=10).map(|i| i * 1000).collect(); // t = 0.1..1.0
    let mut pass = true;
    let mut detail = String::new();

    let p = table1_params();
    let st = |t: f64, q: f64| MarketState { t, x: 0.0, q, s: p.s0 };

    // exponential decay
    let path = integrate_feedback(|t, q| p1_rate(t, &st(t, q), &p), p.q0, 1.0, DT);
    let err_p1 = sample_idx
        .iter()
        .map(|&i| (path[i].1 - p1_inventory(path[i].0, &p)).abs())
        .fold(0.0_f64, f64::max);

    // linear decay
    let path = integrate_feedback(|t, q| p0_rate(t, &st(t, q), &p).unwrap(), p.q0, 1.0, DT);
    let err_p0 = sample_idx
        .iter()
        .map(|&i| (path[i].1 - p0_inventory(path[i].0, &p).unwrap()).abs())
        .fold(0.0_f64, f64::max);

    // hyperbolic decay under the running penalty
    let p3 = table3_params();
    let c = AcCoefficients::new(&p3).unwrap();
    let st3 = |t: f64, q: f64| MarketState { t, x: 0.0, q, s: p3.s0 };
    let path = integrate_feedback(
        |t, q| ac_rate(t.min(p3.t_max), &st3(t, q), &p3, &c).unwrap(),
        p3.q0,
        1.0,
        DT,
    );
    let err_ac = sample_idx
        .iter()
        .map(|&i| (path[i].1 - ac_inventory(path[i].0, &p3, &c).unwrap()).abs())
        .fold(0.0_f64, f64::max);

    pass &= err_p1 <= 1e-3 && err_p0 <= 1e-3 && err_ac <= 1e-3;
    detail.push_str(&format!(
        "max |integrated - analytic| at dt=1e-4: exponential {err_p1:.2e}, linear {err_p0:.2e}, hyperbolic {err_ac:.2e} (tolerance 1e-3)"
    ));
    check("4 (feedback/schedule consistency)", pass, &detail);
}

#[test]
fn criterion_5_hitting_probabilities() {
    let p = table1_params();
    let rules = StoppingRules::horizon(p.t_max).with_double_barrier(p.k_lower, p.h_upper);
    let seed = SeedSpec::new(SEED);

    let target = Strategy::from_label("p1", &p).unwrap();
    let spec = SimSpec::new(&target, p, rules, DT, vec![]);
    let results = run_batch(&spec, &seed, N_PATHS).unwrap();
    let h1 = hitting_probabilities(&results, p.t_max).unwrap();

    let classical = Strategy::from_label("p0", &p).unwrap();
    let spec = SimSpec::new(&classical, p, rules, DT, vec![]);
    let results = run_batch(&spec, &seed, N_PATHS).unwrap();
    let h0 = hitting_probabilities(&results, p.t_max).unwrap();

    let pass_p1 = (h1.p_upper - 0.509).abs() <= 0.02
        && h1.p_lower <= 0.002
        && (h1.p_neither - 0.491).abs() <= 0.02;
    let pass_p0 = (h0.p_upper - 0.816).abs() <= 0.02
        && (h0.p_lower - 0.092).abs() <= 0.015
        && (h0.p_neither - 0.092).abs() <= 0.015;
    check(
        "5 (hitting probabilities)",
        pass_p1 && pass_p0,
        &format!(
            "target ({:.4}, {:.4}, {:.4}) vs (0.509, 0.000, 0.491); classical ({:.4}, {:.4}, {:.4}) vs (0.816, 0.092, 0.092)",
            h1.p_upper, h1.p_lower, h1.p_neither, h0.p_upper, h0.p_lower, h0.p_neither
        ),
    );
}

/// Reference mean/variance grid for the comparison window, printed at
/// five decimals (variances printed as 0.00000 are compared with the
/// absolute tolerance branch). In the source table the classical-strategy
/// halves of the `b = 0.002` and `l = 0.002` rows arrive transposed — the
/// deterministic drift integral at t = 0.02 identifies each row beyond
/// doubt (1.03105 for b = 0.002, 1.02761 for l = 0.002) — so those two
/// halves are restored to their parameter blocks here.
#[rustfmt::skip]
const TABLE2_REFERENCE: [(&str, f64, [(f64, f64, f64, f64); 3]); 8] = [
    ("b", 0.001, [
        (1.04709, 0.00002, 1.03149, 0.00015),
        (1.04742, 0.00002, 1.04996, 0.00001),
        (1.04741, 0.00002, 1.05062, 0.00000),
    ]),
    ("b", 0.002, [
        (1.04680, 0.00002, 1.03028, 0.00015),
        (1.04719, 0.00002, 1.04977, 0.00001),
        (1.04719, 0.00002, 1.05050, 0.00000),
    ]),
    ("l", 0.001, [
        (1.04709, 0.00002, 1.03123, 0.00014),
        (1.04742, 0.00002, 1.05005, 0.00001),
        (1.04743, 0.00002, 1.05061, 0.00000),
    ]),
    ("l", 0.002, [
        (1.04269, 0.00006, 1.02831, 0.00016),
        (1.04666, 0.00003, 1.04935, 0.00002),
        (1.04670, 0.00003, 1.05051, 0.00000),
    ]),
    ("gamma", 0.05, [
        (1.02154, 0.00009, 1.01405, 0.00017),
        (1.02489, 0.00010, 1.03207, 0.00024),
        (1.02496, 0.00010, 1.03795, 0.00019),
    ]),
    ("gamma", 0.1, [
        (1.04654, 0.00002, 1.02948, 0.00015),
        (1.04691, 0.00002, 1.04962, 0.00002),
        (1.04691, 0.00002, 1.05056, 0.00000),
    ]),
    ("sigma", 0.1, [
        (1.04685, 0.00002, 1.03037, 0.00015),
        (1.04719, 0.00002, 1.04986, 0.00001),
        (1.04719, 0.00002, 1.05063, 0.00000),
    ]),
    ("sigma", 0.2, [
        (1.04456, 0.00008, 1.02935, 0.00045),
        (1.04496, 0.00008, 1.04622, 0.00021),
        (1.04496, 0.00008, 1.04865, 0.00012),
    ]),
];

fn variance_ok(got: f64, reference: f64) -> bool {
    (got - reference).abs() <= 2e-5 || (got - reference).abs() <= 0.5 * reference
}

#[test]
fn criterion_6_comparison_grid() {
    let mut cfg = RunConfig::preset_defaults(ExperimentPreset::Table2);
    cfg.n_paths = N_PATHS;
    cfg.dt = DT;
    cfg.master_seed = 42;
    let rows = table2_rows(&cfg).unwrap();

    let mut pass = true;
    let mut failures = String::new();
    for (param, value, by_time) in TABLE2_REFERENCE.iter().flat_map(|(p, v, times)| {
        times
            .iter()
            .zip(TABLE2_TIMES)
            .map(move |(r, t)| (*p, *v, (t, *r)))
    }) {
        let (t, (p1_mean, p1_var, p0_mean, p0_var)) = by_time;
        let row = rows
            .iter()
            .find(|r| r.parameter == param && r.value == value && (r.t - t).abs() < 1e-12)
            .expect("row present");
        let ok = (row.p1_mean - p1_mean).abs() <= 0.002
            && (row.p0_mean - p0_mean).abs() <= 0.002
            && variance_ok(row.p1_variance, p1_var)
            && variance_ok(row.p0_variance, p0_var);
        if !ok {
            failures.push_str(&format!(
                "{param}={value} t={t}: got ({:.5}, {:.6}, {:.5}, {:.6}) want ({p1_mean}, {p1_var}, {p0_mean}, {p0_var}); ",
                row.p1_mean, row.p1_variance, row.p0_mean, row.p0_variance
            ));
            pass = false;
        }
    }

    // printed orderings: the target strategy leads early, the classical
    // schedule overtakes by the end of the window, in every block
    for (param, value, _) in TABLE2_REFERENCE {
        let early = rows
            .iter()
            .find(|r| r.parameter == param && r.value == value && r.t == TABLE2_TIMES[0])
            .unwrap();
        let late = rows
            .iter()
            .find(|r| r.parameter == param && r.value == value && r.t == TABLE2_TIMES[2])
            .unwrap();
        if !(early.p1_mean > early.p0_mean && late.p0_mean > late.p1_mean) {
            failures.push_str(&format!("ordering violated in block {param}={value}; "));
            pass = false;
        }
    }

    let detail = if pass {
        format!("48 mean/variance cells within tolerance, orderings hold in all 8 blocks")
    } else {
        failures
    };
    check("6 (comparison-grid reproduction)", pass, &detail);
}

#[test]
fn criterion_7_estimator_validation_oracle() {
    // finer step than the market runs: the criterion fixes paths, not dt,
    // and the constant-coefficient process has no step-size floor
    let dt = 1e-5;
    let (y0, k, h) = (0.0, -0.1, 0.1);
    let mut pass = true;
    let mut detail = String::new();
    for (mu, s) in [(1.0, 1.0), (0.5, 0.8), (-0.4, 0.6)] {
        let spec = SurrogateSpec {
            mu,
            s,
            y0,
            rules: StoppingRules::horizon(1.0).with_double_barrier(k, h),
            dt,
            sample_times: vec![],
        };
        let results = run_surrogate_batch(&spec, &SeedSpec::new(SEED), N_PATHS).unwrap();
        let got = hitting_probabilities(&results, 1.0).unwrap();
        let analytic = execsim::sim::surrogate_upper_probability(mu, s, y0, k, h);
        let se = (analytic * (1.0 - analytic) / N_PATHS as f64).sqrt();
        let ok = (got.p_upper - analytic).abs() <= 3.0 * se;
        pass &= ok;
        detail.push_str(&format!(
            "(mu={mu}, s={s}): {:.4} vs {:.4} ({:+.2} se); ",
            got.p_upper,
            analytic,
            (got.p_upper - analytic) / se
        ));
    }
    check("7 (barrier-estimator validation)", pass, &detail);
}

#[test]
fn criterion_8_drift_maximization() {
    let p = table1_params();
    let spec = PerformanceSpec::plain();
    let mut pass = true;
    let mut detail = String::new();
    for q in [0.1, 1.0, 10.0] {
        let st = MarketState { t: 0.0, x: 0.0, q, s: p.s0 };
        let v_star = p.impact_margin() * q / (2.0 * p.l);
        let hi = 2.0 * v_star;
        let n = 100_000;
        let step = hi / n as f64;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..=n {
            let v = i as f64 * step;
            let d = performance_drift(&st, v, &p, &spec).unwrap();
            if d > best.0 {
                best = (d, v);
            }
        }
        let ok = (best.1 - v_star).abs() <= step;
        pass &= ok;
        detail.push_str(&format!(
            "q={q}: argmax {} vs {v_star} (grid step {step:.3e}); ",
            best.1
        ));
    }
    check("8 (drift maximization)", pass, &detail);
}

#[test]
fn criterion_9_concentration_and_aggressiveness() {
    let mut cfg = RunConfig::preset_defaults(ExperimentPreset::Fig5);
    cfg.n_paths = N_PATHS;
    cfg.dt = DT;
    cfg.master_seed = SEED;
    let batches = fig5_batches(&cfg).unwrap();
    let variance = |results: &[execsim::PathResult]| {
        let vals: Vec<f64> = results.iter().map(|r| r.objective_value()).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (vals.len() - 1) as f64
    };
    let var_target = variance(&batches[0].1);
    let var_ac = variance(&batches[1].1);

    // the target schedule's inventory stays strictly below the penalty
    // schedule's on the open interval
    let p = table3_params();
    let c = AcCoefficients::new(&p).unwrap();
    let mut dominated = true;
    for i in 1..1000 {
        let t = i as f64 * p.t_max / 1000.0;
        if p1_inventory(t, &p) >= ac_inventory(t, &p, &c).unwrap() {
            dominated = false;
            break;
        }
    }

    check(
        "9 (objective concentration and faster liquidation)",
        var_target < var_ac && dominated,
        &format!(
            "objective variance {var_target:.3e} (target) < {var_ac:.3e} (penalty schedule); inventory dominated on (0, T): {dominated}"
        ),
    );
}

#[test]
fn criterion_10_worker_count_determinism() {
    let base = std::env::temp_dir().join(format!("execsim_accept_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    let run_with = |threads: usize| {
        let mut cfg = RunConfig::preset_defaults(ExperimentPreset::Baseline);
        cfg.n_paths = N_PATHS;
        cfg.dt = DT;
        cfg.master_seed = SEED;
        cfg.out_dir = base.join(format!("workers_{threads}"));
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg).unwrap())
    };
    let a = run_with(1);
    let b = run_with(8);
    let mut pass = true;
    let mut detail = String::new();
    let mut compared = 0;
    for (pa, pb) in a.iter().zip(&b) {
        let name = pa.file_name().unwrap().to_string_lossy();
        if name == "manifest.json" {
            continue; // carries wall-clock timing
        }
        let (ba, bb) = (std::fs::read(pa).unwrap(), std::fs::read(pb).unwrap());
        if ba != bb {
            pass = false;
            detail.push_str(&format!("{name} differs; "));
        }
        compared += 1;
    }
    if pass {
        detail = format!("{compared} data files byte-identical between 1 and 8 workers");
    }
    let _ = std::fs::remove_dir_all(&base);
    check("10 (worker-count determinism)", pass, &detail);
}
