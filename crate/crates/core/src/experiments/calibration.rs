use rayon::prelude::*;
use serde::Serialize;

use super::{quantile, simulate, sub_seed, SignalModel};
use crate::decomposition::{decompose_capped, DEFAULT_RANK_TOL};
use crate::embed::embed_1d;
use crate::error::{param, Result, SsaError};
use crate::grouping::tau;

/// Monte-Carlo setup: the model (its `sigma` is replaced by each grid
/// value), window, replications per grid point and master seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub model: SignalModel,
    pub window: usize,
    pub n_sim: usize,
    pub seed: u64,
    pub sigma_grid: Vec<f64>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_grid.is_empty() {
            return param("noise grid is empty");
        }
        if self.n_sim == 0 {
            return param("number of simulations must be >= 1");
        }
        for &sigma in &self.sigma_grid {
            self.model.with_sigma(sigma).validate()?;
        }
        if self.window < 2 || self.window >= self.model.n {
            return param(format!(
                "window {} out of range [2, {}]",
                self.window,
                self.model.n - 1
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRow {
    pub sigma: f64,
    /// 95% quantile of `tau(U_1, U_2)`; `None` if every replication was
    /// dropped.
    pub q95: Option<f64>,
    pub used: usize,
    /// Replications where `tau` was undefined (rank below 2 or a point of the
    /// diagram at the origin).
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub config: SimulationConfig,
    pub rows: Vec<CalibrationRow>,
    /// `q95` at the largest grid value `sigma <= 1`.
    pub recommended_t0: Option<f64>,
}

/// `tau` of the two leading left singular vectors, or `None` when undefined.
fn leading_tau(series: Vec<f64>, window: usize) -> Result<Option<f64>> {
    let ts = crate::embed::TimeSeries::new(series)?;
    let dec = decompose_capped(&embed_1d(&ts, window)?, DEFAULT_RANK_TOL, Some(2))?;
    if dec.rank() < 2 {
        return Ok(None);
    }
    match tau(&dec.triple(0).u, &dec.triple(1).u) {
        Ok(t) => Ok(Some(t)),
        Err(SsaError::Degenerate(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Distribution of `tau(U_1, U_2)` under noise, per noise level.
pub fn calibrate_threshold(cfg: &SimulationConfig) -> Result<CalibrationResult> {
    cfg.validate()?;
    let rows = cfg
        .sigma_grid
        .iter()
        .enumerate()
        .map(|(si, &sigma)| {
            let model = cfg.model.with_sigma(sigma);
            let taus = (0..cfg.n_sim)
                .into_par_iter()
                .map(|rep| {
                    let sim = simulate(&model, sub_seed(cfg.seed, si, rep, 0))?;
                    leading_tau(sim.series, cfg.window)
                })
                .collect::<Result<Vec<_>>>()?;
            let values: Vec<f64> = taus.iter().flatten().copied().collect();
            Ok(CalibrationRow {
                sigma,
                q95: quantile(&values, 0.95),
                used: values.len(),
                dropped: taus.len() - values.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let recommended_t0 = rows
        .iter()
        .filter(|r| r.sigma <= 1.0)
        .max_by(|a, b| a.sigma.total_cmp(&b.sigma))
        .and_then(|r| r.q95);
    Ok(CalibrationResult {
        config: cfg.clone(),
        rows,
        recommended_t0,
    })
}
