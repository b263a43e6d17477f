//! Run configuration: a flat TOML document with `params`, `run`, `rules`,
//! and `output` sections layered over a named preset's defaults. Unknown
//! keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, ModelParams};
use crate::presets::{table1_params, table3_params, PRICE_FLOOR_TABLE3};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error(transparent)]
    Params(#[from] ModelError),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Named experiment presets. `Baseline` and `Section5` run a single batch
/// with the configured strategy; the others emit one exhibit each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentPreset {
    Baseline,
    Section5,
    Fig1,
    Fig2,
    Fig2b,
    Fig3,
    Table2,
    Fig4,
    Fig5,
}

impl ExperimentPreset {
    pub const ALL: [ExperimentPreset; 9] = [
        ExperimentPreset::Baseline,
        ExperimentPreset::Section5,
        ExperimentPreset::Fig1,
        ExperimentPreset::Fig2,
        ExperimentPreset::Fig2b,
        ExperimentPreset::Fig3,
        ExperimentPreset::Table2,
        ExperimentPreset::Fig4,
        ExperimentPreset::Fig5,
    ];

    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        match name {
            "baseline" => Ok(Self::Baseline),
            "section5" => Ok(Self::Section5),
            "fig1" => Ok(Self::Fig1),
            "fig2" => Ok(Self::Fig2),
            "fig2b" => Ok(Self::Fig2b),
            "fig3" => Ok(Self::Fig3),
            "table2" => Ok(Self::Table2),
            "fig4" => Ok(Self::Fig4),
            "fig5" => Ok(Self::Fig5),
            other => Err(ConfigError::UnknownPreset(other.into())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Baseline => "baseline",
            Self::Section5 => "section5",
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig2b => "fig2b",
            Self::Fig3 => "fig3",
            Self::Table2 => "table2",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Self::Baseline => "single batch on the baseline parameter set",
            Self::Section5 => "single batch on the running-penalty parameter set",
            Self::Fig1 => "success-probability curves J(y) for three exponents",
            Self::Fig2 => "target-strategy trajectories and bands under parameter variations",
            Self::Fig2b => "target-strategy bands under widened barriers",
            Self::Fig3 => "hitting-probability sweeps over each barrier",
            Self::Table2 => "mean/variance grid for both strategies under parameter variations",
            Self::Fig4 => "target vs running-penalty schedule trajectories",
            Self::Fig5 => "liquidation-objective histograms, target vs running-penalty schedule",
        }
    }

    /// Parameter defaults backing the preset.
    fn base_params(&self) -> ModelParams {
        match self {
            Self::Section5 | Self::Fig4 | Self::Fig5 => table3_params(),
            _ => table1_params(),
        }
    }

    fn default_rules(&self) -> RuleSettings {
        match self {
            Self::Section5 | Self::Fig5 => RuleSettings {
                double_barrier: false,
                price_floor: Some(PRICE_FLOOR_TABLE3),
                depletion: true,
                inventory_epsilon_frac: 1e-8,
            },
            Self::Fig4 => RuleSettings {
                double_barrier: false,
                price_floor: Some(PRICE_FLOOR_TABLE3),
                depletion: true,
                inventory_epsilon_frac: 1e-8,
            },
            _ => RuleSettings::default(),
        }
    }
}

/// Stopping-rule switches; the horizon rule is always present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleSettings {
    /// Absorb at the performance barriers `(k_lower, h_upper)`.
    pub double_barrier: bool,
    /// Stop when the price reaches this floor.
    pub price_floor: Option<f64>,
    /// Stop when the inventory falls to `inventory_epsilon_frac * q0`.
    pub depletion: bool,
    pub inventory_epsilon_frac: f64,
}

impl Default for RuleSettings {
    fn default() -> Self {
        Self {
            double_barrier: true,
            price_floor: None,
            depletion: false,
            inventory_epsilon_frac: 1e-8,
        }
    }
}

/// Constant-coefficient test process `dY = mu dt + s dW` run in place of
/// the market dynamics; used to validate the barrier estimators against the
/// analytic two-barrier formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateSettings {
    pub mu: f64,
    pub s: f64,
    pub y0: f64,
}

/// Fully resolved configuration for one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: ExperimentPreset,
    pub params: ModelParams,
    pub strategy_label: String,
    pub n_paths: usize,
    pub dt: f64,
    pub sample_times: Vec<f64>,
    pub master_seed: u64,
    pub rules: RuleSettings,
    pub out_dir: PathBuf,
    /// Test mode: when set, single-run presets simulate the surrogate
    /// process between the configured barriers instead of the market.
    pub surrogate: Option<SurrogateSettings>,
}

impl RunConfig {
    /// Defaults for a preset with nothing overridden.
    pub fn preset_defaults(preset: ExperimentPreset) -> Self {
        let params = preset.base_params();
        // 0, 0.02, ..., 1.0 on the baseline horizon
        let sample_times = (0..=50).map(|i| i as f64 * 0.02 * params.t_max).collect();
        Self {
            preset,
            params,
            strategy_label: "p1".to_string(),
            n_paths: 10_000,
            dt: 1e-4,
            sample_times,
            master_seed: 42,
            rules: preset.default_rules(),
            out_dir: PathBuf::from("out"),
            surrogate: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match &self.surrogate {
            None => self.params.validate()?,
            Some(sur) => {
                // The barriers bracket the surrogate start instead of the
                // market's initial mark; the market params are unused.
                if !(sur.s.is_finite() && sur.s > 0.0 && sur.mu.is_finite()) {
                    return Err(ConfigError::Invalid(
                        "surrogate needs finite mu and positive s".into(),
                    ));
                }
                if !(self.params.k_lower < sur.y0 && sur.y0 < self.params.h_upper) {
                    return Err(ConfigError::Invalid(format!(
                        "surrogate start {} not inside the barriers ({}, {})",
                        sur.y0, self.params.k_lower, self.params.h_upper
                    )));
                }
                if !(self.params.t_max.is_finite() && self.params.t_max > 0.0) {
                    return Err(ConfigError::Invalid(
                        "horizon t_max must be positive".into(),
                    ));
                }
            }
        }
        if self.n_paths == 0 {
            return Err(ConfigError::Invalid("n_paths must be at least 1".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if let Some(floor) = self.rules.price_floor {
            if floor >= self.params.s0 {
                return Err(ConfigError::Invalid(format!(
                    "price floor {floor} not below the initial price {}",
                    self.params.s0
                )));
            }
        }
        if self.rules.inventory_epsilon_frac < 0.0 {
            return Err(ConfigError::Invalid(
                "inventory_epsilon_frac must be non-negative".into(),
            ));
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &self.sample_times {
            if !(t >= 0.0 && t <= self.params.t_max && t > prev) {
                return Err(ConfigError::Invalid(format!(
                    "sample times must be strictly increasing within [0, {}]",
                    self.params.t_max
                )));
            }
            prev = t;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// The TOML document shape. Every field is optional; omitted ones fall back
// to the preset defaults.

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    preset: Option<String>,
    params: Option<ParamsSection>,
    run: Option<RunSection>,
    rules: Option<RulesSection>,
    output: Option<OutputSection>,
    surrogate: Option<SurrogateSettings>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSection {
    b: Option<f64>,
    l: Option<f64>,
    gamma: Option<f64>,
    sigma: Option<f64>,
    phi: Option<f64>,
    q0: Option<f64>,
    s0: Option<f64>,
    x0: Option<f64>,
    k_lower: Option<f64>,
    h_upper: Option<f64>,
    t_max: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    strategy: Option<String>,
    n_paths: Option<usize>,
    dt: Option<f64>,
    sample_times: Option<Vec<f64>>,
    master_seed: Option<u64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RulesSection {
    double_barrier: Option<bool>,
    price_floor: Option<f64>,
    depletion: Option<bool>,
    inventory_epsilon_frac: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<String>,
}

/// Parses a TOML document into a fully validated [`RunConfig`], defaulting
/// every omitted key from the preset (`baseline` when the document names
/// none).
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let doc: ConfigDoc = toml::from_str(text)?;
    let preset = match &doc.preset {
        Some(name) => ExperimentPreset::parse(name)?,
        None => ExperimentPreset::Baseline,
    };
    let mut cfg = RunConfig::preset_defaults(preset);

    if let Some(p) = &doc.params {
        let m = &mut cfg.params;
        let mut horizon_changed = false;
        if let Some(v) = p.b {
            m.b = v;
        }
        if let Some(v) = p.l {
            m.l = v;
        }
        if let Some(v) = p.gamma {
            m.gamma = v;
        }
        if let Some(v) = p.sigma {
            m.sigma = v;
        }
        if let Some(v) = p.phi {
            m.phi = v;
        }
        if let Some(v) = p.q0 {
            m.q0 = v;
        }
        if let Some(v) = p.s0 {
            m.s0 = v;
        }
        if let Some(v) = p.x0 {
            m.x0 = v;
        }
        if let Some(v) = p.k_lower {
            m.k_lower = v;
        }
        if let Some(v) = p.h_upper {
            m.h_upper = v;
        }
        if let Some(v) = p.t_max {
            m.t_max = v;
            horizon_changed = true;
        }
        if horizon_changed {
            cfg.sample_times = (0..=50).map(|i| i as f64 * 0.02 * m.t_max).collect();
        }
    }
    if let Some(r) = &doc.run {
        if let Some(v) = &r.strategy {
            cfg.strategy_label = v.clone();
        }
        if let Some(v) = r.n_paths {
            cfg.n_paths = v;
        }
        if let Some(v) = r.dt {
            cfg.dt = v;
        }
        if let Some(v) = &r.sample_times {
            cfg.sample_times = v.clone();
        }
        if let Some(v) = r.master_seed {
            cfg.master_seed = v;
        }
    }
    if let Some(r) = &doc.rules {
        if let Some(v) = r.double_barrier {
            cfg.rules.double_barrier = v;
        }
        if r.price_floor.is_some() {
            cfg.rules.price_floor = r.price_floor;
        }
        if let Some(v) = r.depletion {
            cfg.rules.depletion = v;
        }
        if let Some(v) = r.inventory_epsilon_frac {
            cfg.rules.inventory_epsilon_frac = v;
        }
    }
    if let Some(o) = &doc.output {
        if let Some(dir) = &o.dir {
            cfg.out_dir = PathBuf::from(dir);
        }
    }
    cfg.surrogate = doc.surrogate;
    cfg.validate()?;
    Ok(cfg)
}

/// Serializes a config back to the TOML document shape accepted by
/// [`parse_config`]; `parse_config(emit_config(c)) == c` for valid `c`.
pub fn emit_config(cfg: &RunConfig) -> String {
    let doc = ConfigDoc {
        preset: Some(cfg.preset.name().to_string()),
        params: Some(ParamsSection {
            b: Some(cfg.params.b),
            l: Some(cfg.params.l),
            gamma: Some(cfg.params.gamma),
            sigma: Some(cfg.params.sigma),
            phi: Some(cfg.params.phi),
            q0: Some(cfg.params.q0),
            s0: Some(cfg.params.s0),
            x0: Some(cfg.params.x0),
            k_lower: Some(cfg.params.k_lower),
            h_upper: Some(cfg.params.h_upper),
            t_max: Some(cfg.params.t_max),
        }),
        run: Some(RunSection {
            strategy: Some(cfg.strategy_label.clone()),
            n_paths: Some(cfg.n_paths),
            dt: Some(cfg.dt),
            sample_times: Some(cfg.sample_times.clone()),
            master_seed: Some(cfg.master_seed),
        }),
        rules: Some(RulesSection {
            double_barrier: Some(cfg.rules.double_barrier),
            price_floor: cfg.rules.price_floor,
            depletion: Some(cfg.rules.depletion),
            inventory_epsilon_frac: Some(cfg.rules.inventory_epsilon_frac),
        }),
        output: Some(OutputSection {
            dir: Some(cfg.out_dir.display().to_string()),
        }),
        surrogate: cfg.surrogate,
    };
    toml::to_string_pretty(&doc).expect("config serializes")
}
