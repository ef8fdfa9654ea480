//! Identification methods for multichannel SSA.
//!
//! Left singular vectors of a stacked trajectory matrix have the same
//! structure as in the single-channel case and go through the 1D methods
//! unchanged. Right singular vectors and elementary reconstructions consist
//! of one part per channel; each method is evaluated part by part and the
//! results are aggregated over channels (maximum for the trend and
//! periodogram measures, minimum for the angle measure).

use serde::Serialize;

use crate::decomposition::{
    elementary_component, split_factor_vector, Decomposition, FactorVectorParts, Group,
};
use crate::error::{param, Result, SsaError};
use crate::grouping::angle::{tau_norm, AngleIdConfig, AngleRanking};
use crate::grouping::freq::{FreqIdConfig, FreqMeasures};
use crate::grouping::trend::{bin_share, select_at_least, TrendIdConfig};
use crate::grouping::{
    candidates, identify_periodic_angle, identify_periodic_freq, identify_trend, GroupingResult,
    Method, SourceKind,
};

/// Candidate objects of a multichannel decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MssaCandidates {
    /// Left singular vectors, length `L`.
    Left(Vec<(usize, Vec<f64>)>),
    /// Right singular vectors split into channel parts of lengths `K_p`.
    Right(Vec<(usize, FactorVectorParts)>),
    /// Elementary reconstructions, one series of length `N_p` per channel.
    Recon(Vec<(usize, FactorVectorParts)>),
}

impl MssaCandidates {
    pub fn from_decomposition(
        dec: &Decomposition,
        source: SourceKind,
        group: &Group,
    ) -> Result<Self> {
        Ok(match source {
            SourceKind::Eigen => Self::Left(candidates(dec, SourceKind::Eigen, group)?),
            SourceKind::Factor => Self::Right(right_parts(dec, group)?),
            SourceKind::Recon => Self::Recon(elementary_parts(dec, group)?),
        })
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Left(v) => v.len(),
            Self::Right(v) | Self::Recon(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Right singular vectors of `group`, split by the channel widths `K_p`.
pub fn right_parts(dec: &Decomposition, group: &Group) -> Result<Vec<(usize, FactorVectorParts)>> {
    let widths = dec.column_blocks();
    candidates(dec, SourceKind::Factor, group)?
        .into_iter()
        .map(|(i, v)| Ok((i, split_factor_vector(&v, &widths)?)))
        .collect()
}

/// Elementary reconstructions of `group`, one part per channel.
pub fn elementary_parts(
    dec: &Decomposition,
    group: &Group,
) -> Result<Vec<(usize, FactorVectorParts)>> {
    group
        .indices()
        .iter()
        .map(|&i| {
            let channels = elementary_component(dec, i)?.into_channels();
            Ok((i, FactorVectorParts::from_parts(channels)))
        })
        .collect()
}

pub fn identify_trend_mssa_left<V: AsRef<[f64]>>(
    vectors: &[(usize, V)],
    cfg: &TrendIdConfig,
) -> Result<GroupingResult> {
    identify_trend(vectors, cfg)
}

/// `J = { i : max_p T(part_p) >= T0 }`; items without a usable part are
/// flagged degenerate.
pub fn identify_trend_mssa_right(
    items: &[(usize, FactorVectorParts)],
    cfg: &TrendIdConfig,
) -> Result<GroupingResult> {
    cfg.validate()?;
    let measured = items
        .iter()
        .map(|(i, parts)| {
            let mut best: Option<f64> = None;
            for (_, part) in parts.usable() {
                if let Some(t) = bin_share(part, cfg.omega1, cfg.omega2)? {
                    best = Some(best.map_or(t, |b| b.max(t)));
                }
            }
            Ok((*i, best))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(select_at_least(Method::LowFrequency, measured, cfg.threshold))
}

pub fn identify_periodic_freq_mssa_left<V: AsRef<[f64]>>(
    vectors: &[V],
    cfg: &FreqIdConfig,
) -> Result<GroupingResult> {
    identify_periodic_freq(vectors, cfg)
}

/// Periodogram method on split right vectors: stage-one sets are united
/// over channels, stage-two measures take the maximum over channels.
pub fn identify_periodic_freq_mssa_right(
    vectors: &[FactorVectorParts],
    cfg: &FreqIdConfig,
) -> Result<GroupingResult> {
    cfg.validate()?;
    Ok(FreqMeasures::from_parts(vectors, cfg.s0)?.into_result(cfg.rho0))
}

pub fn identify_periodic_angle_mssa_left<V: AsRef<[f64]>>(
    vectors: &[V],
    cfg: &AngleIdConfig,
) -> Result<GroupingResult> {
    identify_periodic_angle(vectors, cfg)
}

/// `min_p tau_norm(V_j(p), V_{j+1}(p))` for every consecutive pair; `+inf`
/// when no channel gives a defined value.
pub fn min_channel_tau(vectors: &[FactorVectorParts]) -> Result<Vec<f64>> {
    if vectors.len() < 2 {
        return param(format!(
            "angle method needs at least 2 vectors, got {}",
            vectors.len()
        ));
    }
    let channels = vectors[0].num_parts();
    if vectors.iter().any(|v| v.num_parts() != channels) {
        return param("all vectors must have the same number of channel parts");
    }
    vectors
        .windows(2)
        .map(|w| {
            let mut best = f64::INFINITY;
            for p in 0..channels {
                if w[0].is_degenerate(p) || w[1].is_degenerate(p) {
                    continue;
                }
                match tau_norm(&w[0].parts()[p], &w[1].parts()[p]) {
                    Ok(t) => best = best.min(t),
                    Err(SsaError::Degenerate(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(best)
        })
        .collect()
}

/// Angle method on split right vectors using the channel minimum of the
/// normalized angle measure.
pub fn identify_periodic_angle_mssa_right(
    vectors: &[FactorVectorParts],
    cfg: &AngleIdConfig,
) -> Result<GroupingResult> {
    cfg.validate(vectors.len())?;
    AngleRanking::from_values(&min_channel_tau(vectors)?).into_result(cfg)
}
