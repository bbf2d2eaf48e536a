//! Expected lifted cycle counts from an expected candidate count.

use serde::{Deserialize, Serialize};

use super::dist::ProbDistMatrix;
use super::objective::{objective_value, Objective};
use crate::error::{Error, Result};
use crate::params::CodeParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub objective: Objective,
    /// Expected candidate count in the partitioned, relocated protograph.
    pub n_candidates: f64,
    /// Averaged estimate of the lifted count in the MD code.
    pub e_cycles: f64,
    /// Expected candidates that survive a random lifting.
    pub e_obj: f64,
    /// Estimates with every candidate spanning the most / fewest replicas.
    pub bounds: (f64, f64),
}

/// Forecast from an explicit candidate count.
pub fn forecast_from_candidates(n_candidates: f64, params: &CodeParams, objective: Objective) -> Result<Forecast> {
    let l = params.coupling_len as f64;
    let m = params.memory as f64;
    let copies = params.copies as f64;
    let widest = match objective {
        Objective::Cycle6 => params.memory + 1,
        Objective::Cycle8 => 2 * params.memory + 1,
    };
    if params.coupling_len <= widest {
        return Err(Error::InvalidParams(format!(
            "L = {} must exceed the widest candidate span {widest}",
            params.coupling_len
        )));
    }
    let e_cycles = match objective {
        Objective::Cycle6 => n_candidates * (2.0 * l - m) / 2.0 * copies,
        Objective::Cycle8 => n_candidates * (l - m) * copies,
    };
    Ok(Forecast {
        objective,
        n_candidates,
        e_cycles,
        e_obj: n_candidates / params.z as f64,
        bounds: (
            n_candidates * (l - widest as f64 + 1.0) * copies,
            n_candidates * l * copies,
        ),
    })
}

/// Forecast for distribution `p`; the cycle-8 count leaves out the
/// two-column repeated pattern unless `include_w1` is set.
pub fn forecast(p: &ProbDistMatrix, params: &CodeParams, objective: Objective, include_w1: bool) -> Result<Forecast> {
    if p.memory() != params.memory || p.copies() != params.copies {
        return Err(Error::Dimension {
            expected_rows: params.memory + 1,
            expected_cols: params.copies,
            rows: p.memory() + 1,
            cols: p.copies(),
        });
    }
    let n = objective_value(p, params.gamma, params.kappa, objective, include_w1);
    forecast_from_candidates(n, params, objective)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_copy_cycle6() {
        let params = CodeParams::new(3, 7, 11, 20, 1, 1).unwrap();
        let p = ProbDistMatrix::from_rows(&[vec![0.5], vec![0.5]], vec![0.5, 0.5]).unwrap();
        let f = forecast(&p, &params, Objective::Cycle6, false).unwrap();
        assert!((f.e_cycles - f.n_candidates * 39.0 / 2.0).abs() < 1e-9);
        assert!(f.bounds.0 <= f.e_cycles && f.e_cycles <= f.bounds.1);
        assert!((f.e_obj - f.n_candidates / 11.0).abs() < 1e-12);
    }

    #[test]
    fn cycle8_upper_bound_uses_full_length() {
        let params = CodeParams::new(3, 19, 23, 50, 19, 5).unwrap();
        let f = forecast_from_candidates(17_296.8, &params, Objective::Cycle8).unwrap();
        assert!((f.e_cycles - 17_296.8 * 155.0).abs() < 1e-6);
        assert!((f.bounds.1 - 17_296.8 * 250.0).abs() < 1e-6);
        // Published estimate / upper-bound pair for these parameters.
        assert!((f.bounds.1 / f.e_cycles - 4_324_208.0 / 2_681_009.0).abs() < 1e-6);
    }

    #[test]
    fn short_coupling_is_rejected() {
        let params = CodeParams::new(3, 7, 11, 5, 2, 1).unwrap();
        assert!(forecast_from_candidates(1.0, &params, Objective::Cycle8).is_err());
        assert!(forecast_from_candidates(1.0, &params, Objective::Cycle6).is_ok());
    }
}
