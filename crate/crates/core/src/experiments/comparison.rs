use rayon::prelude::*;
use serde::Serialize;

use super::{mean, quantile, simulate, sub_seed, SignalModel};
use crate::decomposition::{
    decompose, elementary_component, Decomposition, Group, DEFAULT_RANK_TOL,
};
use crate::embed::{embed_1d, TimeSeries};
use crate::error::{param, Result};
use crate::grouping::{AngleRanking, FreqMeasures, Stopping};

/// `{0, 0.01, ..., 1}`.
pub fn threshold_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

/// Mean squared difference of two aligned series.
pub fn identification_error(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    if reference.len() != estimate.len() {
        return param(format!(
            "series lengths differ: {} and {}",
            reference.len(),
            estimate.len()
        ));
    }
    if reference.is_empty() {
        return param("identification error of empty series");
    }
    let sum: f64 = reference
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    Ok(sum / reference.len() as f64)
}

/// Reconstruction by the two leading eigentriples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisualIdentification {
    pub series: Vec<f64>,
    /// Number of components used (fewer than 2 only if the rank is lower).
    pub components: usize,
    pub flagged: bool,
}

pub fn visual_identification(x: &TimeSeries, window: usize) -> Result<VisualIdentification> {
    let sweep = ThresholdSweep::new(x, window, CompareMethod::Angle, 1)?;
    Ok(sweep.visual())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareMethod {
    /// Angle regularity with threshold `t0` on the normalized measure.
    Angle,
    /// Periodogram method with threshold `rho0`.
    Freq,
}

#[derive(Debug, Clone)]
enum Ranking {
    Angle(AngleRanking),
    Freq(FreqMeasures),
    /// Fewer than two components; nothing can be selected.
    Empty,
}

/// One decomposition prepared for evaluating many thresholds: the
/// elementary components of every eigentriple and the threshold-free part
/// of the chosen method, computed on all `d` left singular vectors.
#[derive(Debug, Clone)]
pub struct ThresholdSweep {
    components: Vec<Vec<f64>>,
    ranking: Ranking,
}

impl ThresholdSweep {
    pub fn new(x: &TimeSeries, window: usize, method: CompareMethod, s0: usize) -> Result<Self> {
        let dec = decompose(&embed_1d(x, window)?, DEFAULT_RANK_TOL)?;
        Self::from_decomposition(&dec, x.len(), method, s0)
    }

    /// Sweep over an existing decomposition of a series of length `len`.
    pub fn from_decomposition(
        dec: &Decomposition,
        len: usize,
        method: CompareMethod,
        s0: usize,
    ) -> Result<Self> {
        let components = (0..dec.rank())
            .map(|i| Ok(elementary_component(dec, i)?.flat()))
            .collect::<Result<Vec<_>>>()?;
        let vectors = dec.left_vectors();
        let ranking = if vectors.len() < 2 {
            Ranking::Empty
        } else {
            match method {
                CompareMethod::Angle => Ranking::Angle(AngleRanking::from_vectors(&vectors)?),
                CompareMethod::Freq => Ranking::Freq(FreqMeasures::from_vectors(&vectors, s0)?),
            }
        };
        Ok(Self {
            components: if components.is_empty() {
                vec![vec![0.0; len]]
            } else {
                components
            },
            ranking,
        })
    }

    pub fn rank(&self) -> usize {
        match self.ranking {
            Ranking::Empty if self.components[0].iter().all(|v| *v == 0.0) => 0,
            _ => self.components.len(),
        }
    }

    /// Components selected with threshold `t`.
    pub fn selection(&self, t: f64) -> Group {
        let selected = match &self.ranking {
            Ranking::Angle(r) => r.select(Stopping::Threshold(t)),
            Ranking::Freq(m) => m.select(t),
            Ranking::Empty => Vec::new(),
        };
        selected.iter().flat_map(|c| c.indices()).collect()
    }

    /// Sum of the elementary components of `group`, in index order.
    pub fn reconstruction(&self, group: &Group) -> Vec<f64> {
        let mut out = vec![0.0; self.components[0].len()];
        for &i in group.indices() {
            for (o, v) in out.iter_mut().zip(&self.components[i]) {
                *o += v;
            }
        }
        out
    }

    pub fn visual(&self) -> VisualIdentification {
        let components = self.rank().min(2);
        VisualIdentification {
            series: self.reconstruction(&Group::leading(components)),
            components,
            flagged: components < 2,
        }
    }

    /// Threshold in `grid` whose reconstruction is closest to `reference`;
    /// the smallest such threshold on ties.
    pub fn optimal(&self, reference: &[f64], grid: &[f64]) -> Result<ThresholdFit> {
        if grid.is_empty() {
            return param("threshold grid is empty");
        }
        let mut best: Option<ThresholdFit> = None;
        let mut last: Option<(Group, f64)> = None;
        for &t in grid {
            let group = self.selection(t);
            let error = match &last {
                Some((g, e)) if *g == group => *e,
                _ => identification_error(reference, &self.reconstruction(&group))?,
            };
            if best.as_ref().is_none_or(|b| error < b.error) {
                best = Some(ThresholdFit {
                    threshold: t,
                    error,
                });
            }
            last = Some((group, error));
        }
        Ok(best.expect("nonempty grid"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdFit {
    pub threshold: f64,
    pub error: f64,
}

/// Threshold of `method` that best reproduces the two-component
/// reconstruction of `x` itself.
pub fn optimal_threshold(
    x: &TimeSeries,
    method: CompareMethod,
    window: usize,
    grid: &[f64],
) -> Result<ThresholdFit> {
    let sweep = ThresholdSweep::new(x, window, method, 1)?;
    sweep.optimal(&sweep.visual().series, grid)
}

/// Setup of the comparison; the model's `sigma` is replaced by each grid
/// value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareConfig {
    pub model: SignalModel,
    pub window: usize,
    pub n_rep: usize,
    pub seed: u64,
    pub sigma_grid: Vec<f64>,
    /// Peak slack of the periodogram method.
    pub s0: usize,
    pub threshold_grid: Vec<f64>,
}

impl CompareConfig {
    pub fn new(model: SignalModel, window: usize, n_rep: usize, seed: u64) -> Self {
        Self {
            model,
            window,
            n_rep,
            seed,
            sigma_grid: vec![0.2, 0.4, 0.6, 0.8, 1.0],
            s0: 1,
            threshold_grid: threshold_grid(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rep == 0 {
            return param("number of replications must be >= 1");
        }
        if self.sigma_grid.is_empty() {
            return param("noise grid is empty");
        }
        if self.threshold_grid.is_empty() {
            return param("threshold grid is empty");
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

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Replication {
    pub index: usize,
    pub t0_opt: f64,
    pub rho0_opt: f64,
    pub e_tau: f64,
    pub e_rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub sigma: f64,
    pub mean_tau: Option<f64>,
    pub mean_rho: Option<f64>,
    pub median_tau: Option<f64>,
    pub median_rho: Option<f64>,
    pub used: usize,
    /// Replications where a realization had fewer than two components.
    pub excluded: usize,
    pub replications: Vec<Replication>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub config: CompareConfig,
    pub rows: Vec<ComparisonRow>,
}

fn replicate(cfg: &CompareConfig, si: usize, rep: usize) -> Result<Option<Replication>> {
    let model = cfg.model.with_sigma(cfg.sigma_grid[si]);
    let draw = |which| -> Result<TimeSeries> {
        simulate(&model, sub_seed(cfg.seed, si, rep, which))?.time_series()
    };
    let (x1, x2) = (draw(1)?, draw(2)?);
    let d1 = decompose(&embed_1d(&x1, cfg.window)?, DEFAULT_RANK_TOL)?;
    let d2 = decompose(&embed_1d(&x2, cfg.window)?, DEFAULT_RANK_TOL)?;
    let mut fits = [0.0; 2];
    let mut errors = [0.0; 2];
    for (slot, method) in [CompareMethod::Angle, CompareMethod::Freq].into_iter().enumerate() {
        let first = ThresholdSweep::from_decomposition(&d1, x1.len(), method, cfg.s0)?;
        let second = ThresholdSweep::from_decomposition(&d2, x2.len(), method, cfg.s0)?;
        let (v1, v2) = (first.visual(), second.visual());
        if v1.flagged || v2.flagged {
            return Ok(None);
        }
        let fit = first.optimal(&v1.series, &cfg.threshold_grid)?;
        fits[slot] = fit.threshold;
        errors[slot] =
            identification_error(&v2.series, &second.reconstruction(&second.selection(fit.threshold)))?;
    }
    Ok(Some(Replication {
        index: rep,
        t0_opt: fits[0],
        rho0_opt: fits[1],
        e_tau: errors[0],
        e_rho: errors[1],
    }))
}

/// Fits both thresholds on one realization, applies them to an independent
/// second realization and summarizes the errors against its two-component
/// reconstruction over `n_rep` replications per noise level.
pub fn compare_methods(cfg: &CompareConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    let rows = (0..cfg.sigma_grid.len())
        .map(|si| {
            let reps = (0..cfg.n_rep)
                .into_par_iter()
                .map(|rep| replicate(cfg, si, rep))
                .collect::<Result<Vec<_>>>()?;
            let excluded = reps.iter().filter(|r| r.is_none()).count();
            let replications: Vec<Replication> = reps.into_iter().flatten().collect();
            let e_tau: Vec<f64> = replications.iter().map(|r| r.e_tau).collect();
            let e_rho: Vec<f64> = replications.iter().map(|r| r.e_rho).collect();
            Ok(ComparisonRow {
                sigma: cfg.sigma_grid[si],
                mean_tau: mean(&e_tau),
                mean_rho: mean(&e_rho),
                median_tau: quantile(&e_tau, 0.5),
                median_rho: quantile(&e_rho, 0.5),
                used: replications.len(),
                excluded,
                replications,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport {
        config: cfg.clone(),
        rows,
    })
}
