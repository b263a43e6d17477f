//! Selling strategies: the barrier-target feedback rule, the classical
//! finite-horizon schedule, the running-penalty (Almgren-Chriss style)
//! schedule, and trivial controls for testing.
//!
//! Every strategy is expressed in state-feedback form, a rate proportional
//! to the *current* inventory. On noiseless paths this coincides with the
//! analytic deterministic schedule; under clamping and early stopping the
//! feedback form remains well defined.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MarketState, ModelParams};

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("unknown strategy label '{0}' (expected p0|p1|ac|zero|constant:<v>|external:<path>)")]
    UnknownLabel(String),
    #[error("time {t} outside the strategy's domain [0, {t_max}]")]
    OutsideHorizon { t: f64, t_max: f64 },
    #[error("schedule coefficients undefined: {0}")]
    DegenerateCoefficients(String),
    #[error("bad rate table: {0}")]
    BadRateTable(String),
}

/// Coefficients of the running-penalty schedule: decay rate
/// `big_gamma = sqrt(phi / l)` and the dimensionless ratio
/// `zeta = (gamma - b/2 + sqrt(l phi)) / (gamma - b/2 - sqrt(l phi))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcCoefficients {
    pub big_gamma: f64,
    pub zeta: f64,
}

impl AcCoefficients {
    pub fn new(params: &ModelParams) -> Result<Self, StrategyError> {
        if params.phi <= 0.0 {
            return Err(StrategyError::DegenerateCoefficients(
                "running penalty phi must be positive; with phi = 0 the schedule \
                 degenerates to the classical one (use label 'p0')"
                    .into(),
            ));
        }
        let root = (params.l * params.phi).sqrt();
        let denom = params.gamma - 0.5 * params.b - root;
        if denom <= 0.0 {
            return Err(StrategyError::DegenerateCoefficients(format!(
                "gamma - b/2 - sqrt(l*phi) must be positive, got {denom}"
            )));
        }
        Ok(Self {
            big_gamma: (params.phi / params.l).sqrt(),
            zeta: (params.gamma - 0.5 * params.b + root) / denom,
        })
    }
}

/// Barrier-target feedback rate `(2*gamma - b) / (2 l) * q`.
///
/// Independent of time, price, volatility, and the barriers; it maximizes
/// the drift of the performance mark at every state.
pub fn p1_rate(_t: f64, state: &MarketState, params: &ModelParams) -> f64 {
    params.impact_margin() / (2.0 * params.l) * state.q
}

/// Analytic inventory under [`p1_rate`]: exponential decay from `q0`.
pub fn p1_inventory(t: f64, params: &ModelParams) -> f64 {
    params.q0 * (-params.impact_margin() / (2.0 * params.l) * t).exp()
}

/// Classical finite-horizon feedback rate
/// `(2*gamma - b) / (2 l + (2*gamma - b)(T - t)) * q` with `T = params.t_max`.
pub fn p0_rate(t: f64, state: &MarketState, params: &ModelParams) -> Result<f64, StrategyError> {
    if t > params.t_max || t < 0.0 {
        return Err(StrategyError::OutsideHorizon {
            t,
            t_max: params.t_max,
        });
    }
    let m = params.impact_margin();
    Ok(m / (2.0 * params.l + m * (params.t_max - t)) * state.q)
}

/// Analytic inventory under [`p0_rate`]: linear decay from `q0` to
/// `2 l q0 / (2 l + (2*gamma - b) T)`.
pub fn p0_inventory(t: f64, params: &ModelParams) -> Result<f64, StrategyError> {
    if t > params.t_max || t < 0.0 {
        return Err(StrategyError::OutsideHorizon {
            t,
            t_max: params.t_max,
        });
    }
    let m = params.impact_margin();
    let den = 2.0 * params.l + m * params.t_max;
    Ok((2.0 * params.l + m * (params.t_max - t)) / den * params.q0)
}

/// Running-penalty feedback rate: `big_gamma * coth-like factor * q`.
pub fn ac_rate(
    t: f64,
    state: &MarketState,
    params: &ModelParams,
    coeffs: &AcCoefficients,
) -> Result<f64, StrategyError> {
    if t > params.t_max || t < 0.0 {
        return Err(StrategyError::OutsideHorizon {
            t,
            t_max: params.t_max,
        });
    }
    let g = coeffs.big_gamma;
    let rem = params.t_max - t;
    let (ep, em) = ((g * rem).exp(), (-g * rem).exp());
    Ok(g * (coeffs.zeta * ep + em) / (coeffs.zeta * ep - em) * state.q)
}

/// Analytic inventory under [`ac_rate`], a ratio of hyperbolic terms equal
/// to `q0` at `t = 0`.
pub fn ac_inventory(
    t: f64,
    params: &ModelParams,
    coeffs: &AcCoefficients,
) -> Result<f64, StrategyError> {
    if t > params.t_max || t < 0.0 {
        return Err(StrategyError::OutsideHorizon {
            t,
            t_max: params.t_max,
        });
    }
    let g = coeffs.big_gamma;
    let rem = params.t_max - t;
    let num = coeffs.zeta * (g * rem).exp() - (-g * rem).exp();
    let den = coeffs.zeta * (g * params.t_max).exp() - (-g * params.t_max).exp();
    Ok(num / den * params.q0)
}

/// An externally supplied rate table `(t, v)`, linearly interpolated in `t`
/// and held constant beyond its endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    times: Vec<f64>,
    rates: Vec<f64>,
}

impl RateTable {
    pub fn new(times: Vec<f64>, rates: Vec<f64>) -> Result<Self, StrategyError> {
        if times.len() != rates.len() || times.is_empty() {
            return Err(StrategyError::BadRateTable(
                "need equally many times and rates, at least one row".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(StrategyError::BadRateTable(
                "times must be strictly increasing".into(),
            ));
        }
        if rates.iter().chain(times.iter()).any(|v| !v.is_finite()) {
            return Err(StrategyError::BadRateTable("non-finite entry".into()));
        }
        if rates.iter().any(|&v| v < 0.0) {
            return Err(StrategyError::BadRateTable("negative rate".into()));
        }
        Ok(Self { times, rates })
    }

    /// Reads a two-column CSV `t,v`; a header line is allowed.
    pub fn from_csv_path(path: &Path) -> Result<Self, StrategyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| StrategyError::BadRateTable(format!("{}: {e}", path.display())))?;
        let mut times = Vec::new();
        let mut rates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, b) = (cols.next().unwrap_or(""), cols.next().unwrap_or(""));
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(t), Ok(v)) => {
                    times.push(t);
                    rates.push(v);
                }
                _ if i == 0 => continue, // header
                _ => {
                    return Err(StrategyError::BadRateTable(format!(
                        "line {}: expected 't,v', got '{line}'",
                        i + 1
                    )))
                }
            }
        }
        Self::new(times, rates)
    }

    pub fn interpolate(&self, t: f64) -> f64 {
        let ts = &self.times;
        if t <= ts[0] {
            return self.rates[0];
        }
        if t >= *ts.last().unwrap() {
            return *self.rates.last().unwrap();
        }
        let j = ts.partition_point(|&x| x <= t);
        let (t0, t1) = (ts[j - 1], ts[j]);
        let (v0, v1) = (self.rates[j - 1], self.rates[j]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyKind {
    /// Never trades.
    Zero,
    /// Constant rate until the inventory is gone.
    Constant(f64),
    /// Classical finite-horizon schedule ("p0").
    ClassicalHorizon,
    /// Barrier-target drift-maximizing feedback ("p1").
    TargetFeedback,
    /// Running-penalty schedule ("ac").
    AlmgrenChriss(AcCoefficients),
    /// Externally supplied rate table ("external:<path>").
    External(RateTable),
}

/// A selling rule `(t, state) -> v >= 0` with an optional uniform cap and a
/// label used in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    kind: StrategyKind,
    v_max: Option<f64>,
    label: String,
}

impl Strategy {
    pub fn new(kind: StrategyKind, label: impl Into<String>) -> Self {
        Self {
            kind,
            v_max: None,
            label: label.into(),
        }
    }

    /// Builds a strategy from its config label: `p0`, `p1`, `ac`, `zero`,
    /// `constant:<value>`, or `external:<path>`.
    ///
    /// With `phi = 0` the label `ac` resolves to the classical schedule,
    /// which is its zero-penalty limit.
    pub fn from_label(label: &str, params: &ModelParams) -> Result<Self, StrategyError> {
        let kind = match label {
            "zero" => StrategyKind::Zero,
            "p0" => StrategyKind::ClassicalHorizon,
            "p1" => StrategyKind::TargetFeedback,
            "ac" => {
                if params.phi == 0.0 {
                    StrategyKind::ClassicalHorizon
                } else {
                    StrategyKind::AlmgrenChriss(AcCoefficients::new(params)?)
                }
            }
            _ => {
                if let Some(v) = label.strip_prefix("constant:") {
                    let v: f64 = v
                        .parse()
                        .map_err(|_| StrategyError::UnknownLabel(label.into()))?;
                    if !v.is_finite() || v < 0.0 {
                        return Err(StrategyError::UnknownLabel(label.into()));
                    }
                    StrategyKind::Constant(v)
                } else if let Some(path) = label.strip_prefix("external:") {
                    StrategyKind::External(RateTable::from_csv_path(Path::new(path))?)
                } else {
                    return Err(StrategyError::UnknownLabel(label.into()));
                }
            }
        };
        Ok(Self::new(kind, label))
    }

    /// Imposes a uniform upper bound on the emitted rate. The simulation
    /// counts every step at which the cap binds.
    pub fn with_cap(mut self, v_max: f64) -> Self {
        self.v_max = Some(v_max);
        self
    }

    pub fn v_max(&self) -> Option<f64> {
        self.v_max
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &StrategyKind {
        &self.kind
    }

    /// Uncapped rate at `(t, state)`. The cap, when set, is applied by the
    /// caller so that capping events can be recorded.
    pub fn rate(
        &self,
        t: f64,
        state: &MarketState,
        params: &ModelParams,
    ) -> Result<f64, StrategyError> {
        match &self.kind {
            StrategyKind::Zero => Ok(0.0),
            StrategyKind::Constant(v) => Ok(*v),
            StrategyKind::ClassicalHorizon => p0_rate(t, state, params),
            StrategyKind::TargetFeedback => Ok(p1_rate(t, state, params)),
            StrategyKind::AlmgrenChriss(c) => ac_rate(t, state, params, c),
            StrategyKind::External(table) => Ok(table.interpolate(t)),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}
