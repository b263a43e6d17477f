//! Monte Carlo path generation with composable stopping rules and
//! deterministic parallel seeding.
//!
//! Path `i` of a batch draws its Gaussian increments from a counter-based
//! stream that is a pure function of `(master_seed, i)`, so batches are
//! bit-for-bit reproducible for any worker count. Aggregations consume
//! results in path-index order.
//!
//! Barrier detection is discrete: a path stops at the first grid time whose
//! mark lies at or beyond a barrier. No continuous-crossing correction is
//! applied; the bias is bounded by the dt-refinement checks in the tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    performance, step_dynamics, MarketState, ModelError, ModelParams, PerformanceSpec,
};
use crate::strategies::{Strategy, StrategyError};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("time increment must be positive and finite, got {0}")]
    BadDt(f64),
    #[error("horizon must be positive and finite, got {0}")]
    BadHorizon(f64),
    #[error("sample time {0} is not on the dt grid")]
    MisalignedSample(f64),
    #[error("sample times must be strictly increasing and within [0, horizon]")]
    BadSampleTimes,
    #[error("batch needs at least one path")]
    EmptyBatch,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Which rule ended a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopCause {
    /// Mark reached the upper barrier.
    UpperBarrier,
    /// Mark reached the lower barrier.
    LowerBarrier,
    /// Price reached the lower limit price.
    PriceFloor,
    /// Inventory fell to the depletion threshold.
    InventoryDepleted,
    /// Horizon reached without any other rule firing.
    Horizon,
    /// The strategy emitted a non-finite or negative rate; see `diagnostic`.
    InvalidRate,
}

/// First-to-trigger stopping rules. The horizon is always present; the
/// others are optional. At most one double barrier can be set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRules {
    pub t_max: f64,
    pub double_barrier: Option<(f64, f64)>,
    pub price_floor: Option<f64>,
    pub inventory_epsilon: Option<f64>,
}

impl StoppingRules {
    pub fn horizon(t_max: f64) -> Self {
        Self {
            t_max,
            double_barrier: None,
            price_floor: None,
            inventory_epsilon: None,
        }
    }

    /// Absorbing barriers `(k, h)` on the performance mark.
    pub fn with_double_barrier(mut self, k: f64, h: f64) -> Self {
        self.double_barrier = Some((k, h));
        self
    }

    /// Stop when the market price reaches `floor`.
    pub fn with_price_floor(mut self, floor: f64) -> Self {
        self.price_floor = Some(floor);
        self
    }

    /// Stop when the inventory falls to `epsilon` (absolute shares).
    pub fn with_depletion(mut self, epsilon: f64) -> Self {
        self.inventory_epsilon = Some(epsilon);
        self
    }

    /// Rule check after a step. Precedence when several fire on the same
    /// step: barriers, then price floor, then depletion.
    fn check(&self, y: f64, q: f64, s: f64) -> Option<StopCause> {
        if let Some((k, h)) = self.double_barrier {
            if y >= h {
                return Some(StopCause::UpperBarrier);
            }
            if y <= k {
                return Some(StopCause::LowerBarrier);
            }
        }
        if let Some(floor) = self.price_floor {
            if s <= floor {
                return Some(StopCause::PriceFloor);
            }
        }
        if let Some(eps) = self.inventory_epsilon {
            if q <= eps {
                return Some(StopCause::InventoryDepleted);
            }
        }
        None
    }
}

/// Master seed for a batch. Path `i` draws from stream `i` of a ChaCha
/// generator seeded with `master_seed`; the mapping is independent of
/// execution order and worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn stream(&self, path_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(path_index);
        rng
    }
}

/// State snapshot at one configured sample time. After a stop the snapshot
/// repeats the frozen stop-time values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub t: f64,
    pub x: f64,
    pub q: f64,
    pub s: f64,
    pub y: f64,
}

/// Pieces of the liquidation objective accumulated along a path:
/// trading revenue, the terminal inventory mark, and the running penalty
/// integral. The objective value is `revenue + terminal - penalty`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ObjectiveTerms {
    pub trading_revenue: f64,
    pub terminal_inventory_value: f64,
    pub running_penalty: f64,
}

/// One simulated trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub path_index: u64,
    pub stop_cause: StopCause,
    pub stop_time: f64,
    pub samples: Vec<SamplePoint>,
    /// Steps at which the inventory clamp reduced the executed rate.
    pub clamp_events: u32,
    /// Steps at which the strategy's uniform cap bound the rate.
    pub cap_events: u32,
    pub objective: ObjectiveTerms,
    pub diagnostic: Option<String>,
}

impl PathResult {
    pub fn objective_value(&self) -> f64 {
        self.objective.trading_revenue + self.objective.terminal_inventory_value
            - self.objective.running_penalty
    }

    /// Mark at the end of the path (last sample, which is frozen from the
    /// stop onward).
    pub fn terminal_performance(&self) -> f64 {
        self.samples.last().map(|p| p.y).unwrap_or(f64::NAN)
    }
}

/// Everything a batch needs besides the seed: strategy, parameters, rules,
/// step size, and the times at which states are recorded.
#[derive(Debug, Clone)]
pub struct SimSpec<'a> {
    pub strategy: &'a Strategy,
    pub params: ModelParams,
    pub rules: StoppingRules,
    pub dt: f64,
    pub sample_times: Vec<f64>,
    /// Whether the mark subtracts the running penalty integral (the
    /// penalty-adjusted performance criterion). Defaults to `phi > 0`.
    pub include_running_penalty: bool,
}

impl<'a> SimSpec<'a> {
    pub fn new(
        strategy: &'a Strategy,
        params: ModelParams,
        rules: StoppingRules,
        dt: f64,
        sample_times: Vec<f64>,
    ) -> Self {
        Self {
            strategy,
            params,
            rules,
            dt,
            sample_times,
            include_running_penalty: params.phi > 0.0,
        }
    }
}

/// Step grid shared by every path of a batch.
struct Plan {
    n_steps: usize,
    sqrt_dt: f64,
    /// Step index at which each sample time falls.
    sample_steps: Vec<usize>,
}

const GRID_TOL: f64 = 1e-12;

fn build_plan(dt: f64, t_max: f64, sample_times: &[f64]) -> Result<Plan, SimError> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(SimError::BadDt(dt));
    }
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(SimError::BadHorizon(t_max));
    }
    let n_steps = (t_max / dt).round() as usize;
    if n_steps == 0 || ((n_steps as f64) * dt - t_max).abs() > GRID_TOL.max(1e-9 * t_max) {
        return Err(SimError::MisalignedSample(t_max));
    }
    let mut sample_steps = Vec::with_capacity(sample_times.len());
    let mut prev = f64::NEG_INFINITY;
    for &st in sample_times {
        if !(st >= 0.0 && st <= t_max + GRID_TOL && st > prev) {
            return Err(SimError::BadSampleTimes);
        }
        prev = st;
        let idx = (st / dt).round() as usize;
        if (idx as f64 * dt - st).abs() > GRID_TOL {
            return Err(SimError::MisalignedSample(st));
        }
        sample_steps.push(idx.min(n_steps));
    }
    Ok(Plan {
        n_steps,
        sqrt_dt: dt.sqrt(),
        sample_steps,
    })
}

/// Simulates one path. Deterministic in `(seed, path_index)`.
pub fn simulate_path(
    spec: &SimSpec,
    seed: &SeedSpec,
    path_index: u64,
) -> Result<PathResult, SimError> {
    let plan = build_plan(spec.dt, spec.rules.t_max, &spec.sample_times)?;
    Ok(market_path(spec, &plan, seed, path_index))
}

/// Simulates `n_paths` paths; result `i` depends only on `(seed, i)` and the
/// list is ordered by path index regardless of worker count. Per-path
/// strategy faults are reported in the affected `PathResult`, never abort
/// the batch.
pub fn run_batch(
    spec: &SimSpec,
    seed: &SeedSpec,
    n_paths: usize,
) -> Result<Vec<PathResult>, SimError> {
    if n_paths == 0 {
        return Err(SimError::EmptyBatch);
    }
    let plan = build_plan(spec.dt, spec.rules.t_max, &spec.sample_times)?;
    Ok((0..n_paths as u64)
        .into_par_iter()
        .map(|i| market_path(spec, &plan, seed, i))
        .collect())
}

fn market_path(spec: &SimSpec, plan: &Plan, seed: &SeedSpec, path_index: u64) -> PathResult {
    let params = &spec.params;
    let mut rng = seed.stream(path_index);
    let mut state = MarketState::initial(params);
    let mut pen = PerformanceSpec {
        include_running_penalty: spec.include_running_penalty,
        accumulated_penalty: 0.0,
    };
    let mut y = performance(&state, params, &pen);

    let mut samples = Vec::with_capacity(plan.sample_steps.len());
    let mut cursor = 0usize;
    let mut record = |step: usize, state: &MarketState, y: f64, cursor: &mut usize| {
        while *cursor < plan.sample_steps.len() && plan.sample_steps[*cursor] == step {
            samples.push(SamplePoint {
                t: plan.sample_steps[*cursor] as f64 * spec.dt,
                x: state.x,
                q: state.q,
                s: state.s,
                y,
            });
            *cursor += 1;
        }
    };
    record(0, &state, y, &mut cursor);

    let mut clamp_events = 0u32;
    let mut cap_events = 0u32;
    let mut outcome: Option<(StopCause, f64, Option<String>)> = None;

    for step in 0..plan.n_steps {
        let t = step as f64 * spec.dt;
        let mut v = match spec.strategy.rate(t, &state, params) {
            Ok(v) if v.is_finite() && v >= 0.0 => v,
            Ok(v) => {
                outcome = Some((
                    StopCause::InvalidRate,
                    t,
                    Some(format!("strategy '{}' emitted rate {v} at t = {t}", spec.strategy.label())),
                ));
                break;
            }
            Err(e) => {
                outcome = Some((
                    StopCause::InvalidRate,
                    t,
                    Some(format!("strategy '{}' failed at t = {t}: {e}", spec.strategy.label())),
                ));
                break;
            }
        };
        if let Some(cap) = spec.strategy.v_max() {
            if v > cap {
                v = cap;
                cap_events += 1;
            }
        }
        pen.accumulate(state.q, spec.dt, params);
        let dw: f64 = plan.sqrt_dt * rng.sample::<f64, _>(StandardNormal);
        // dt and v are validated above, so this cannot fail
        let out = step_dynamics(&state, v, spec.dt, dw, params).expect("validated step");
        if out.clamped {
            clamp_events += 1;
        }
        state = out.state;
        y = performance(&state, params, &pen);
        let t_next = (step + 1) as f64 * spec.dt;
        record(step + 1, &state, y, &mut cursor);
        if let Some(cause) = spec.rules.check(y, state.q, state.s) {
            outcome = Some((cause, t_next, None));
            break;
        }
    }

    let (stop_cause, stop_time, diagnostic) = outcome.unwrap_or((
        StopCause::Horizon,
        plan.n_steps as f64 * spec.dt,
        None,
    ));

    // Remaining sample slots hold the frozen post-stop values.
    while cursor < plan.sample_steps.len() {
        samples.push(SamplePoint {
            t: plan.sample_steps[cursor] as f64 * spec.dt,
            x: state.x,
            q: state.q,
            s: state.s,
            y,
        });
        cursor += 1;
    }

    PathResult {
        path_index,
        stop_cause,
        stop_time,
        samples,
        clamp_events,
        cap_events,
        objective: ObjectiveTerms {
            trading_revenue: state.x - params.x0,
            terminal_inventory_value: state.q * (state.s - params.gamma * state.q),
            running_penalty: pen.accumulated_penalty,
        },
        diagnostic,
    }
}

/// Constant-coefficient test process `dY = mu dt + s dW` used to validate
/// the barrier estimators against the analytic two-barrier formula.
/// Enabled from the config under a test flag; not part of the market model.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateSpec {
    pub mu: f64,
    pub s: f64,
    pub y0: f64,
    pub rules: StoppingRules,
    pub dt: f64,
    pub sample_times: Vec<f64>,
}

/// Analytic probability that the surrogate process hits `h` before `k`.
pub fn surrogate_upper_probability(mu: f64, s: f64, y0: f64, k: f64, h: f64) -> f64 {
    let theta = 2.0 * mu / (s * s);
    if theta == 0.0 {
        return (y0 - k) / (h - k);
    }
    f64::exp_m1(-theta * (y0 - k)) / f64::exp_m1(-theta * (h - k))
}

pub fn run_surrogate_batch(
    spec: &SurrogateSpec,
    seed: &SeedSpec,
    n_paths: usize,
) -> Result<Vec<PathResult>, SimError> {
    if n_paths == 0 {
        return Err(SimError::EmptyBatch);
    }
    let plan = build_plan(spec.dt, spec.rules.t_max, &spec.sample_times)?;
    Ok((0..n_paths as u64)
        .into_par_iter()
        .map(|i| surrogate_path(spec, &plan, seed, i))
        .collect())
}

fn surrogate_path(spec: &SurrogateSpec, plan: &Plan, seed: &SeedSpec, path_index: u64) -> PathResult {
    let mut rng = seed.stream(path_index);
    let mut y = spec.y0;
    let mut samples = Vec::with_capacity(plan.sample_steps.len());
    let mut cursor = 0usize;
    let mut push = |step: usize, y: f64, cursor: &mut usize| {
        while *cursor < plan.sample_steps.len() && plan.sample_steps[*cursor] == step {
            samples.push(SamplePoint {
                t: plan.sample_steps[*cursor] as f64 * spec.dt,
                x: 0.0,
                q: 0.0,
                s: 0.0,
                y,
            });
            *cursor += 1;
        }
    };
    push(0, y, &mut cursor);

    let mut outcome = None;
    for step in 0..plan.n_steps {
        let dw: f64 = plan.sqrt_dt * rng.sample::<f64, _>(StandardNormal);
        y += spec.mu * spec.dt + spec.s * dw;
        push(step + 1, y, &mut cursor);
        if let Some(cause) = spec.rules.check(y, f64::INFINITY, f64::INFINITY) {
            outcome = Some((cause, (step + 1) as f64 * spec.dt));
            break;
        }
    }
    let (stop_cause, stop_time) =
        outcome.unwrap_or((StopCause::Horizon, plan.n_steps as f64 * spec.dt));
    while cursor < plan.sample_steps.len() {
        samples.push(SamplePoint {
            t: plan.sample_steps[cursor] as f64 * spec.dt,
            x: 0.0,
            q: 0.0,
            s: 0.0,
            y,
        });
        cursor += 1;
    }
    PathResult {
        path_index,
        stop_cause,
        stop_time,
        samples,
        clamp_events: 0,
        cap_events: 0,
        objective: ObjectiveTerms::default(),
        diagnostic: None,
    }
}
