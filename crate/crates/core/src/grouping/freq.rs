//! Periodogram (frequency) method for oscillatory components.
//!
//! Stage one admits consecutive pairs `(i, i+1)` whose periodogram peaks
//! over `0 < k <= M/2` lie within `s0` grid steps of each other, and single
//! vectors whose peak lies within `s0` steps of frequency 1/2. Stage two
//! keeps admitted pairs with
//!
//! `rho_ij = max_k [rho(k) + rho(k+1)]`, `rho(k) = (I_i(k) + I_j(k)) / 2`,
//!
//! at least `rho0`, and admitted singles with `I(floor(M/2)/M) >= rho0`.
//! The neighbour of the last grid point contributes nothing.
//!
//! Multichannel inputs run the first stage per channel and take the union;
//! the second stage takes the maximum over channels.

use serde::Serialize;

use super::{Component, GroupingResult, Measured, Method};
use crate::decomposition::FactorVectorParts;
use crate::error::{param, Result};
use crate::spectral::{mean_at, Periodogram};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreqIdConfig {
    /// Allowed distance between peak grid indices.
    pub s0: usize,
    pub rho0: f64,
}

impl FreqIdConfig {
    /// `s0 = 1` with the given threshold.
    pub fn new(rho0: f64) -> Self {
        Self { s0: 1, rho0 }
    }

    pub fn validate(&self) -> Result<()> {
        super::trend::check_threshold(self.rho0)
    }
}

/// Threshold-independent part of the method: stage-one sets and the
/// stage-two measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreqMeasures {
    /// `peaks[i][p]`: peak frequency of vector `i` in channel `p`.
    pub peaks: Vec<Vec<Option<f64>>>,
    pub pairs: Vec<Measured>,
    pub singles: Vec<Measured>,
    pub degenerate: Vec<usize>,
}

impl FreqMeasures {
    /// Single-channel measures of a list of vectors.
    pub fn from_vectors<V: AsRef<[f64]>>(vectors: &[V], s0: usize) -> Result<Self> {
        let parts: Vec<FactorVectorParts> = vectors
            .iter()
            .map(|v| FactorVectorParts::from_parts(vec![v.as_ref().to_vec()]))
            .collect();
        Self::from_parts(&parts, s0)
    }

    /// Per-channel measures of split vectors (one part per channel).
    pub fn from_parts(vectors: &[FactorVectorParts], s0: usize) -> Result<Self> {
        if vectors.is_empty() {
            return param("periodogram method needs at least one vector");
        }
        let channels = vectors[0].num_parts();
        if vectors.iter().any(|v| v.num_parts() != channels) {
            return param("all vectors must have the same number of channel parts");
        }

        // pgrams[i][p]
        let pgrams = vectors
            .iter()
            .map(|v| {
                (0..channels)
                    .map(|p| {
                        if v.is_degenerate(p) {
                            Ok(None)
                        } else {
                            let pg = Periodogram::new(&v.parts()[p])?;
                            Ok((!pg.is_degenerate()).then_some(pg))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let peak_idx: Vec<Vec<Option<usize>>> = pgrams
            .iter()
            .map(|row| {
                row.iter()
                    .map(|pg| pg.as_ref().map(|p| p.peak_index().expect("non-degenerate")))
                    .collect()
            })
            .collect();

        let d = vectors.len();
        let mut pairs = Vec::new();
        for i in 0..d.saturating_sub(1) {
            let admitted = (0..channels).any(|p| match (peak_idx[i][p], peak_idx[i + 1][p]) {
                (Some(a), Some(b)) => a > 0 && b > 0 && a.abs_diff(b) <= s0,
                _ => false,
            });
            if !admitted {
                continue;
            }
            let rho = (0..channels)
                .filter_map(|p| match (&pgrams[i][p], &pgrams[i + 1][p]) {
                    (Some(a), Some(b)) => Some(pair_peak_mass(a, b)),
                    _ => None,
                })
                .fold(f64::NEG_INFINITY, f64::max);
            pairs.push(Measured {
                component: Component::Pair(i, i + 1),
                value: rho,
            });
        }

        let mut singles = Vec::new();
        for i in 0..d {
            let admitted = (0..channels).any(|p| match (&pgrams[i][p], peak_idx[i][p]) {
                (Some(pg), Some(k)) => (2 * k).abs_diff(pg.len()) <= 2 * s0,
                _ => false,
            });
            if !admitted {
                continue;
            }
            let rho = pgrams[i]
                .iter()
                .flatten()
                .map(|pg| {
                    let k = pg.len() / 2;
                    pg.at(k) + pg.at(k + 1)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            singles.push(Measured {
                component: Component::Single(i),
                value: rho,
            });
        }

        let peaks = pgrams
            .iter()
            .zip(&peak_idx)
            .map(|(row, ks)| {
                row.iter()
                    .zip(ks)
                    .map(|(pg, k)| pg.as_ref().zip(*k).map(|(pg, k)| k as f64 / pg.len() as f64))
                    .collect()
            })
            .collect();
        let degenerate = pgrams
            .iter()
            .enumerate()
            .filter(|(_, row)| row.iter().all(Option::is_none))
            .map(|(i, _)| i)
            .collect();
        Ok(Self {
            peaks,
            pairs,
            singles,
            degenerate,
        })
    }

    /// The identified set for threshold `rho0`: pairs first, then singles.
    pub fn select(&self, rho0: f64) -> Vec<Component> {
        self.pairs
            .iter()
            .chain(&self.singles)
            .filter(|m| m.value >= rho0)
            .map(|m| m.component)
            .collect()
    }

    pub fn into_result(self, rho0: f64) -> GroupingResult {
        let mut result = GroupingResult::new(Method::Periodogram);
        result.selected = self.select(rho0);
        result.threshold = Some(rho0);
        result.pair_stage = self
            .pairs
            .iter()
            .map(|m| match m.component {
                Component::Pair(i, j) => (i, j),
                Component::Single(i) => (i, i),
            })
            .collect();
        result.single_stage = self
            .singles
            .iter()
            .flat_map(|m| m.component.indices())
            .collect();
        result.measures = self.pairs.into_iter().chain(self.singles).collect();
        result.peaks = self.peaks;
        result.degenerate = self.degenerate;
        result
    }
}

/// `max over 0 < k <= M/2` of `rho(k) + rho(k+1)` for the pair `{a, b}`.
fn pair_peak_mass(a: &Periodogram, b: &Periodogram) -> f64 {
    let set = [a, b];
    (1..=a.last_index())
        .map(|k| mean_at(&set, k) + mean_at(&set, k + 1))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Periodogram identification of e-m harmonics among consecutive vectors.
///
/// Indices in the result are positions in `vectors`.
pub fn identify_periodic_freq<V: AsRef<[f64]>>(
    vectors: &[V],
    cfg: &FreqIdConfig,
) -> Result<GroupingResult> {
    cfg.validate()?;
    Ok(FreqMeasures::from_vectors(vectors, cfg.s0)?.into_result(cfg.rho0))
}
