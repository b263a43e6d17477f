//! Closed-form value functions and coefficients.
//!
//! * `lambda_p1` / `lambda_p1prime`: exponent of the double-barrier success
//!   probability, without and with the running inventory penalty.
//! * [`BarrierValueFn`]: the success probability `J(y)` between two
//!   absorbing performance barriers, evaluated in a shifted exponential form
//!   that stays in [0, 1] even at exponents around 2000.
//! * `h2_closed_form` / `p0_value`: the quadratic coefficient and value
//!   function of the classical finite-horizon problem, with an independent
//!   Runge-Kutta oracle for testing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MarketState, ModelParams};

#[derive(Debug, Error, PartialEq)]
pub enum ClosedFormError {
    #[error("performance {y} outside the barrier interval [{k}, {h}]")]
    OutsideBarriers { y: f64, k: f64, h: f64 },
    #[error("time {t} outside [0, {t_max}]")]
    OutsideHorizon { t: f64, t_max: f64 },
    #[error("barriers must satisfy k < h, got k = {k}, h = {h}")]
    BadBarriers { k: f64, h: f64 },
    #[error("oracle needs at least {min} steps, got {got}")]
    TooFewSteps { min: usize, got: usize },
}

/// Success-probability exponent `(2*gamma - b)^2 / (2 l sigma^2)`.
pub fn lambda_p1(params: &ModelParams) -> f64 {
    let m = params.impact_margin();
    m * m / (2.0 * params.l * params.sigma * params.sigma)
}

/// Exponent with the running penalty,
/// `((2*gamma - b)^2 - 4 l phi) / (2 l sigma^2)`; equals [`lambda_p1`]
/// when `phi = 0`. May be negative for large `phi`.
pub fn lambda_p1prime(params: &ModelParams) -> f64 {
    let m = params.impact_margin();
    (m * m - 4.0 * params.l * params.phi) / (2.0 * params.l * params.sigma * params.sigma)
}

/// Double-barrier success probability
/// `J(y) = (e^{-lambda y} - e^{-lambda k}) / (e^{-lambda h} - e^{-lambda k})`
/// with `J(k) = 0`, `J(h) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierValueFn {
    pub lambda: f64,
    pub k_lower: f64,
    pub h_upper: f64,
}

impl BarrierValueFn {
    /// A non-positive `lambda` (possible under a heavy running penalty) is
    /// accepted but logged: the formula stays a valid increasing function,
    /// while the drift argument behind it no longer applies.
    pub fn new(lambda: f64, k_lower: f64, h_upper: f64) -> Result<Self, ClosedFormError> {
        if !(k_lower < h_upper) {
            return Err(ClosedFormError::BadBarriers {
                k: k_lower,
                h: h_upper,
            });
        }
        if lambda <= 0.0 {
            log::warn!(
                "barrier value function with lambda = {lambda} <= 0: \
                 evaluating the same formula outside its derivation regime"
            );
        }
        Ok(Self {
            lambda,
            k_lower,
            h_upper,
        })
    }

    pub fn for_params(params: &ModelParams) -> Result<Self, ClosedFormError> {
        let lambda = if params.phi > 0.0 {
            lambda_p1prime(params)
        } else {
            lambda_p1(params)
        };
        Self::new(lambda, params.k_lower, params.h_upper)
    }
}

/// Evaluates the barrier value function at `y` in overflow-safe shifted form
/// `expm1(-lambda (y - k)) / expm1(-lambda (h - k))`; the `lambda = 0` limit
/// is the linear ramp `(y - k) / (h - k)`.
pub fn barrier_value(y: f64, f: &BarrierValueFn) -> Result<f64, ClosedFormError> {
    let (k, h) = (f.k_lower, f.h_upper);
    if !(k..=h).contains(&y) {
        return Err(ClosedFormError::OutsideBarriers { y, k, h });
    }
    if f.lambda == 0.0 {
        return Ok((y - k) / (h - k));
    }
    let value = if f.lambda > 0.0 || f.lambda * (h - k) > -30.0 {
        // expm1 keeps precision for small |lambda| and cannot overflow for
        // lambda > 0 (both exponents are non-positive).
        f64::exp_m1(-f.lambda * (y - k)) / f64::exp_m1(-f.lambda * (h - k))
    } else {
        // Large negative lambda: multiply through by e^{lambda (h - k)} so
        // every exponent is non-positive.
        let num = (f.lambda * (h - y)).exp() - (f.lambda * (h - k)).exp();
        let den = 1.0 - (f.lambda * (h - k)).exp();
        num / den
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Quadratic coefficient of the classical value function
/// `J(t, x, q, s) = x + q s + h2(t) q^2`, the Riccati solution
/// `h2(t) = -((T - t)/l + 2/(2*gamma - b))^{-1} - b/2` with `h2(T) = -gamma`.
pub fn h2_closed_form(t: f64, params: &ModelParams) -> Result<f64, ClosedFormError> {
    if t < 0.0 || t > params.t_max {
        return Err(ClosedFormError::OutsideHorizon {
            t,
            t_max: params.t_max,
        });
    }
    Ok(-1.0 / ((params.t_max - t) / params.l + 2.0 / params.impact_margin()) - 0.5 * params.b)
}

/// Independent oracle for [`h2_closed_form`]: classical fourth-order
/// Runge-Kutta integration of `h2'(t) = -(b + 2 h2)^2 / (4 l)` backward from
/// `h2(T) = -gamma`. Returns `(t, h2)` rows from `t = 0` to `t = T`.
///
/// Used by the test suite only; it shares no code with the closed form.
pub fn h2_ode_oracle(
    params: &ModelParams,
    n_steps: usize,
) -> Result<Vec<(f64, f64)>, ClosedFormError> {
    const MIN_STEPS: usize = 1000;
    if n_steps < MIN_STEPS {
        return Err(ClosedFormError::TooFewSteps {
            min: MIN_STEPS,
            got: n_steps,
        });
    }
    let h = params.t_max / n_steps as f64;
    let f = |y: f64| -(params.b + 2.0 * y).powi(2) / (4.0 * params.l);
    let mut y = -params.gamma;
    let mut rows = Vec::with_capacity(n_steps + 1);
    rows.push((params.t_max, y));
    for i in 0..n_steps {
        let k1 = f(y);
        let k2 = f(y - 0.5 * h * k1);
        let k3 = f(y - 0.5 * h * k2);
        let k4 = f(y - h * k3);
        y -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rows.push((params.t_max - (i + 1) as f64 * h, y));
    }
    rows.reverse();
    Ok(rows)
}

/// Classical value function `x + q s + h2(t) q^2`.
pub fn p0_value(
    t: f64,
    state: &MarketState,
    params: &ModelParams,
) -> Result<f64, ClosedFormError> {
    let h2 = h2_closed_form(t, params)?;
    Ok(state.x + state.q * state.s + h2 * state.q * state.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{table1_params, table3_params};
    use crate::strategies::p0_rate;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const FIG1_LAMBDAS: [f64; 3] = [1.98, 19.80, 1980.05];

    #[test]
    fn lambda_on_baseline_and_volatility_variants() {
        let mut p = table1_params();
        assert_relative_eq!(lambda_p1(&p), 1980.05, max_relative = 1e-12);
        p.sigma = 1.0;
        assert_relative_eq!(lambda_p1(&p), 19.8005, max_relative = 1e-12);
        p.sigma = 10.0_f64.sqrt();
        assert_relative_eq!(lambda_p1(&p), 1.98005, max_relative = 1e-12);
    }

    #[test]
    fn lambda_vanishes_when_margin_vanishes() {
        let mut p = table1_params();
        p.b = 2.0 * p.gamma;
        assert_eq!(lambda_p1(&p), 0.0);
    }

    #[test]
    fn penalty_lambda_reduces_to_plain_at_zero_phi() {
        let p = table1_params();
        assert_eq!(lambda_p1prime(&p), lambda_p1(&p));
        assert_relative_eq!(
            lambda_p1prime(&table3_params()),
            19999.8,
            max_relative = 1e-12
        );
        // exact cancellation
        let mut p = table1_params();
        p.phi = p.impact_margin().powi(2) / (4.0 * p.l);
        assert_relative_eq!(lambda_p1prime(&p), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn barrier_value_boundary_conditions_exact() {
        for lam in FIG1_LAMBDAS {
            let f = BarrierValueFn::new(lam, 0.95, 1.05).unwrap();
            assert_eq!(barrier_value(0.95, &f).unwrap(), 0.0);
            assert_eq!(barrier_value(1.05, &f).unwrap(), 1.0);
        }
    }

    #[test]
    fn barrier_value_midpoint_at_small_lambda() {
        let f = BarrierValueFn::new(1.98, 0.95, 1.05).unwrap();
        assert_relative_eq!(
            barrier_value(1.0, &f).unwrap(),
            0.524729805230163,
            epsilon = 1e-12
        );
    }

    #[test]
    fn barrier_value_linear_limit() {
        let f = BarrierValueFn::new(0.0, 0.95, 1.05).unwrap();
        assert_relative_eq!(barrier_value(1.0, &f).unwrap(), 0.5, epsilon = 1e-12);
        // tiny lambda degrades gracefully to the same ramp
        let f = BarrierValueFn::new(1e-300, 0.95, 1.05).unwrap();
        assert_relative_eq!(barrier_value(1.0, &f).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn barrier_value_rejects_outside_domain() {
        let f = BarrierValueFn::new(1.98, 0.95, 1.05).unwrap();
        assert!(barrier_value(0.9, &f).is_err());
        assert!(barrier_value(1.1, &f).is_err());
        assert!(BarrierValueFn::new(1.0, 1.05, 0.95).is_err());
    }

    #[test]
    fn barrier_value_stable_at_large_lambda_both_signs() {
        for lam in [1980.05, -1980.05] {
            let f = BarrierValueFn::new(lam, 0.95, 1.05).unwrap();
            let mut last = 0.0;
            for i in 0..=1000 {
                let y = 0.95 + 0.1 * i as f64 / 1000.0;
                let v = barrier_value(y, &f).unwrap();
                assert!(v.is_finite() && (0.0..=1.0).contains(&v), "J({y}) = {v}");
                assert!(v >= last, "not monotone at y = {y}");
                last = v;
            }
        }
    }

    #[test]
    fn h2_terminal_condition_is_minus_gamma() {
        let p = table1_params();
        assert_relative_eq!(h2_closed_form(1.0, &p).unwrap(), -0.1, epsilon = 1e-15);
        // A factor-of-two rearrangement of the same expression,
        // (1/(2l) (T-t) + 1/(b - 2 gamma))^{-1} - b/2, misses the terminal
        // condition; kept here as a guard against regressing to it.
        let alt = |t: f64| 1.0 / ((p.t_max - t) / (2.0 * p.l) + 1.0 / (p.b - 2.0 * p.gamma)) - 0.5 * p.b;
        assert_relative_eq!(alt(1.0), 0.5 * p.b - 2.0 * p.gamma, epsilon = 1e-15);
        assert!((alt(1.0) - (-p.gamma)).abs() > 0.09);
    }

    #[test]
    fn h2_at_start_matches_oracle_value() {
        let p = table1_params();
        assert_relative_eq!(
            h2_closed_form(0.0, &p).unwrap(),
            -0.0014900497512437812,
            epsilon = 1e-15
        );
        assert!(h2_closed_form(1.5, &p).is_err());
        assert!(h2_closed_form(-0.1, &p).is_err());
    }

    #[test]
    fn h2_matches_runge_kutta_oracle() {
        let mut variants = vec![table1_params()];
        let mut low_gamma = table1_params();
        low_gamma.gamma = 0.05;
        variants.push(low_gamma);
        let mut heavy_impact = table1_params();
        heavy_impact.b = 0.002;
        heavy_impact.l = 0.002;
        variants.push(heavy_impact);

        for p in variants {
            let table = h2_ode_oracle(&p, 100_000).unwrap();
            assert_eq!(table.last().unwrap().1, -p.gamma);
            let max_err = table
                .iter()
                .map(|&(t, y)| (y - h2_closed_form(t, &p).unwrap()).abs())
                .fold(0.0_f64, f64::max);
            assert!(max_err < 1e-8, "max |oracle - closed form| = {max_err}");
        }
    }

    #[test]
    fn oracle_rejects_coarse_grids() {
        assert!(matches!(
            h2_ode_oracle(&table1_params(), 10),
            Err(ClosedFormError::TooFewSteps { .. })
        ));
    }

    #[test]
    fn h2_gain_identity_matches_classical_rate() {
        let p = table1_params();
        let st = MarketState {
            t: 0.0,
            x: 0.0,
            q: 1.0,
            s: 1.1,
        };
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let gain_h2 = -(p.b + 2.0 * h2_closed_form(t, &p).unwrap()) / (2.0 * p.l);
            let gain_rate = p0_rate(t, &st, &p).unwrap();
            assert_relative_eq!(gain_h2, gain_rate, max_relative = 1e-12);
        }
    }

    #[test]
    fn p0_value_cases() {
        let p = table1_params();
        let st = |x: f64, q: f64, s: f64| MarketState { t: 0.0, x, q, s };
        assert_relative_eq!(p0_value(0.3, &st(2.0, 0.0, 5.0), &p).unwrap(), 2.0);
        // at T the value is the terminal mark x + q s - gamma q^2
        assert_relative_eq!(
            p0_value(1.0, &st(0.0, 1.0, 1.1), &p).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            p0_value(0.0, &st(0.0, 1.0, 1.1), &p).unwrap(),
            1.0985099502487563,
            epsilon = 1e-12
        );
    }

    proptest! {
        // J is increasing in y for any lambda sign, and increasing in lambda
        // above the midpoint.
        #[test]
        fn barrier_value_monotonicity(
            lam in -50.0_f64..2500.0,
            a in 0.001_f64..0.999,
        ) {
            let f = BarrierValueFn::new(lam, 0.95, 1.05).unwrap();
            let y = 0.95 + 0.1 * a;
            let y2 = (y + 0.01).min(1.05);
            let (v1, v2) = (barrier_value(y, &f).unwrap(), barrier_value(y2, &f).unwrap());
            prop_assert!(v2 >= v1);

            let mid = 1.0;
            if y > mid && lam > 0.0 {
                let f_hi = BarrierValueFn::new(lam * 1.5 + 1.0, 0.95, 1.05).unwrap();
                prop_assert!(barrier_value(y, &f_hi).unwrap() >= v1 - 1e-12);
            }
        }
    }
}
