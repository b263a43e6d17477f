//! Market dynamics and the performance mark.
//!
//! The broker sells inventory `q` at rate `v >= 0`. One Euler step updates
//!
//! ```text
//! q' = q - v dt                    (clamped at zero)
//! s' = s - b v dt + sigma dw       (permanent impact + noise)
//! x' = x + (s - l v) v dt          (revenue at the impacted execution price)
//! ```
//!
//! and the performance mark is `Y = x + q (s - gamma q)`, optionally reduced
//! by an accumulated running inventory penalty `phi * integral(q^2)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("time increment must be positive and finite, got {0}")]
    DegenerateDt(f64),
    #[error("selling rate must be non-negative and finite, got {0}")]
    InvalidRate(f64),
}

/// Market-impact and cost coefficients plus initial conditions and barriers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Permanent price impact per unit selling rate.
    pub b: f64,
    /// Temporary (execution-price) impact per unit selling rate.
    pub l: f64,
    /// Slippage cost coefficient of the quadratic inventory term.
    pub gamma: f64,
    /// Price volatility.
    pub sigma: f64,
    /// Running inventory penalty rate; zero disables the penalty.
    pub phi: f64,
    /// Initial share count.
    pub q0: f64,
    /// Initial market price.
    pub s0: f64,
    /// Initial cash.
    pub x0: f64,
    /// Lower performance barrier.
    pub k_lower: f64,
    /// Upper performance barrier.
    pub h_upper: f64,
    /// Simulation horizon; also the terminal date of the classical strategy.
    pub t_max: f64,
}

impl ModelParams {
    /// Net slippage-versus-permanent-impact margin `2*gamma - b`.
    ///
    /// Every strategy gain in this crate is proportional to it; the standing
    /// assumption is that it is strictly positive.
    pub fn impact_margin(&self) -> f64 {
        2.0 * self.gamma - self.b
    }

    /// Performance mark at the initial state.
    pub fn initial_performance(&self) -> f64 {
        self.x0 + self.q0 * (self.s0 - self.gamma * self.q0)
    }

    /// Checks the standing assumptions. Error messages name the violated
    /// invariant so config errors stay actionable.
    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            self.b, self.l, self.gamma, self.sigma, self.phi, self.q0, self.s0, self.x0,
            self.k_lower, self.h_upper, self.t_max,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidParams(
                "all parameters must be finite".into(),
            ));
        }
        if self.impact_margin() <= 0.0 {
            return Err(ModelError::InvalidParams(format!(
                "2*gamma - b must be positive, got {}",
                self.impact_margin()
            )));
        }
        if self.l <= 0.0 {
            return Err(ModelError::InvalidParams(
                "temporary impact l must be positive".into(),
            ));
        }
        if self.sigma <= 0.0 {
            return Err(ModelError::InvalidParams(
                "volatility sigma must be positive".into(),
            ));
        }
        if self.q0 <= 0.0 {
            return Err(ModelError::InvalidParams(
                "initial inventory q0 must be positive".into(),
            ));
        }
        if self.phi < 0.0 {
            return Err(ModelError::InvalidParams(
                "running penalty phi must be non-negative".into(),
            ));
        }
        if self.t_max <= 0.0 {
            return Err(ModelError::InvalidParams(
                "horizon t_max must be positive".into(),
            ));
        }
        let y0 = self.initial_performance();
        if self.k_lower >= y0 {
            return Err(ModelError::InvalidParams(format!(
                "lower barrier above initial performance ({} >= {y0})",
                self.k_lower
            )));
        }
        if self.h_upper <= y0 {
            return Err(ModelError::InvalidParams(format!(
                "upper barrier below initial performance ({} <= {y0})",
                self.h_upper
            )));
        }
        Ok(())
    }
}

/// Instantaneous market tuple `(t, x, q, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    /// Elapsed time.
    pub t: f64,
    /// Cash wealth.
    pub x: f64,
    /// Remaining shares; never negative.
    pub q: f64,
    /// Market price.
    pub s: f64,
}

impl MarketState {
    pub fn initial(params: &ModelParams) -> Self {
        Self {
            t: 0.0,
            x: params.x0,
            q: params.q0,
            s: params.s0,
        }
    }
}

/// Whether the performance mark subtracts the accumulated running penalty,
/// and the penalty integral accumulated so far along the path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceSpec {
    pub include_running_penalty: bool,
    pub accumulated_penalty: f64,
}

impl PerformanceSpec {
    /// Plain mark `Y = x + q (s - gamma q)`, no running penalty.
    pub fn plain() -> Self {
        Self {
            include_running_penalty: false,
            accumulated_penalty: 0.0,
        }
    }

    pub fn with_penalty(accumulated: f64) -> Self {
        debug_assert!(accumulated >= 0.0);
        Self {
            include_running_penalty: true,
            accumulated_penalty: accumulated,
        }
    }

    /// Advances the penalty integral by one left-endpoint rectangle,
    /// matching the Euler scheme's order. Whether the integral enters the
    /// mark is decided by `include_running_penalty` at evaluation time.
    pub fn accumulate(&mut self, q: f64, dt: f64, params: &ModelParams) {
        self.accumulated_penalty += params.phi * q * q * dt;
    }
}

/// Performance mark `Y`: cash plus inventory at the slippage-adjusted price,
/// minus the running penalty when the spec includes it.
pub fn performance(state: &MarketState, params: &ModelParams, spec: &PerformanceSpec) -> f64 {
    let mark = state.x + state.q * (state.s - params.gamma * state.q);
    if spec.include_running_penalty {
        mark - spec.accumulated_penalty
    } else {
        mark
    }
}

/// Drift of the performance mark at selling rate `v`:
/// `-l v^2 + (2*gamma - b) q v`, minus `phi q^2` when the running penalty
/// is active. Quadratic in `v`, maximized at `v = (2*gamma - b) q / (2 l)`.
pub fn performance_drift(
    state: &MarketState,
    v: f64,
    params: &ModelParams,
    spec: &PerformanceSpec,
) -> Result<f64, ModelError> {
    if !v.is_finite() || v < 0.0 {
        return Err(ModelError::InvalidRate(v));
    }
    let mut drift = -params.l * v * v + params.impact_margin() * state.q * v;
    if spec.include_running_penalty {
        drift -= params.phi * state.q * state.q;
    }
    Ok(drift)
}

/// Diffusion coefficient of the performance mark: `sigma * q`.
pub fn performance_diffusion(state: &MarketState, params: &ModelParams) -> f64 {
    params.sigma * state.q
}

/// Result of one Euler step: the new state, the rate actually executed, and
/// whether the rate was reduced to keep the inventory non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: MarketState,
    pub executed_rate: f64,
    pub clamped: bool,
}

/// One Euler step of the market dynamics with noise increment `dw`.
///
/// If `v * dt` exceeds the remaining inventory the executed rate is reduced
/// to `q / dt` so that `q` lands exactly on zero.
pub fn step_dynamics(
    state: &MarketState,
    v: f64,
    dt: f64,
    dw: f64,
    params: &ModelParams,
) -> Result<StepOutcome, ModelError> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(ModelError::DegenerateDt(dt));
    }
    if !v.is_finite() || v < 0.0 {
        return Err(ModelError::InvalidRate(v));
    }
    let (executed_rate, clamped) = if v * dt > state.q {
        (state.q / dt, true)
    } else {
        (v, false)
    };
    let q_next = if clamped { 0.0 } else { state.q - executed_rate * dt };
    let state = MarketState {
        t: state.t + dt,
        x: state.x + (state.s - params.l * executed_rate) * executed_rate * dt,
        q: q_next,
        s: state.s - params.b * executed_rate * dt + params.sigma * dw,
    };
    Ok(StepOutcome {
        state,
        executed_rate,
        clamped,
    })
}
