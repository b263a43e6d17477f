//! Canonical parameter sets used by the experiment presets and the tests.

use crate::model::ModelParams;

/// Baseline parameter set: unit inventory, initial mark 1, barriers at 1 +/- 0.05.
pub fn table1_params() -> ModelParams {
    ModelParams {
        b: 0.001,
        l: 0.001,
        gamma: 0.1,
        sigma: 0.1,
        phi: 0.0,
        q0: 1.0,
        s0: 1.1,
        x0: 0.0,
        k_lower: 0.95,
        h_upper: 1.05,
        t_max: 1.0,
    }
}

/// Running-penalty comparison set: no permanent impact, initial mark 19.9,
/// barriers at 19.9 +/- 0.05, price floor 19.9 (see [`PRICE_FLOOR_TABLE3`]).
pub fn table3_params() -> ModelParams {
    ModelParams {
        b: 0.0,
        l: 0.0001,
        gamma: 0.1,
        sigma: 0.1,
        phi: 0.001,
        q0: 1.0,
        s0: 20.0,
        x0: 0.0,
        k_lower: 19.85,
        h_upper: 19.95,
        t_max: 1.0,
    }
}

/// Lower limit price paired with [`table3_params`].
pub const PRICE_FLOOR_TABLE3: f64 = 19.9;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_parameter_sets_validate() {
        table1_params().validate().unwrap();
        table3_params().validate().unwrap();
    }

    #[test]
    fn initial_marks() {
        assert!((table1_params().initial_performance() - 1.0).abs() < 1e-15);
        assert!((table3_params().initial_performance() - 19.9).abs() < 1e-12);
    }
}
