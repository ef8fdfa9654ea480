//! Angle-regularity method for oscillatory components.
//!
//! For vectors `P`, `Q` of length `L`, the points `(p_k, q_k)` of an
//! e-m harmonic pair lie on a spiral and consecutive points are separated
//! by a constant angle. The measure `tau` is the variance of the `L - 1`
//! angles between consecutive points; `tau_norm` divides it by
//! `min(1, mean_angle^2)` so that slowly turning non-harmonic pairs are not
//! mistaken for harmonics.

use serde::Serialize;

use super::{Component, GroupingResult, Measured, Method};
use crate::error::{param, Result, SsaError};

/// Points closer to the origin than this fraction of the largest point norm
/// make the angle undefined.
pub const POINT_EPS: f64 = 1e-12;

/// Angles `theta_1 .. theta_{L-1}` between consecutive points, in `[0, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleSequence {
    pub angles: Vec<f64>,
    pub mean: f64,
    /// `(1 / (L-1)) sum (theta_k - mean)^2`.
    pub variance: f64,
}

pub fn angle_sequence(p: &[f64], q: &[f64]) -> Result<AngleSequence> {
    if p.len() != q.len() {
        return param(format!(
            "angle measure needs equal lengths, got {} and {}",
            p.len(),
            q.len()
        ));
    }
    if p.len() < 3 {
        return param(format!("angle measure needs length >= 3, got {}", p.len()));
    }
    let norms: Vec<f64> = p.iter().zip(q).map(|(a, b)| a.hypot(*b)).collect();
    let largest = norms.iter().copied().fold(0.0, f64::max);
    if let Some(k) = norms.iter().position(|&n| n.is_nan() || n < POINT_EPS * largest || n == 0.0) {
        return Err(SsaError::Degenerate(format!(
            "point {k} of the 2D diagram is at the origin"
        )));
    }
    let angles: Vec<f64> = (0..p.len() - 1)
        .map(|k| {
            let dot = p[k] * p[k + 1] + q[k] * q[k + 1];
            let cross = p[k] * q[k + 1] - q[k] * p[k + 1];
            cross.abs().atan2(dot)
        })
        .collect();
    let count = angles.len() as f64;
    let mean = angles.iter().sum::<f64>() / count;
    let variance = angles.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / count;
    Ok(AngleSequence {
        angles,
        mean,
        variance,
    })
}

/// Variance of the angles between consecutive points `(p_k, q_k)`.
pub fn tau(p: &[f64], q: &[f64]) -> Result<f64> {
    Ok(angle_sequence(p, q)?.variance)
}

/// `tau / min(1, mean_angle^2)`; zero when every angle is zero.
pub fn tau_norm(p: &[f64], q: &[f64]) -> Result<f64> {
    let seq = angle_sequence(p, q)?;
    let scale = seq.mean.powi(2).min(1.0);
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(seq.variance / scale)
}

/// Stopping rule of the selection step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stopping {
    /// Take the `m` best pairs.
    Count(usize),
    /// Take pairs while their measure is below `t0`.
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleIdConfig {
    pub stopping: Stopping,
}

impl AngleIdConfig {
    pub fn count(m: usize) -> Self {
        Self {
            stopping: Stopping::Count(m),
        }
    }

    pub fn threshold(t0: f64) -> Self {
        Self {
            stopping: Stopping::Threshold(t0),
        }
    }

    pub fn validate(&self, r: usize) -> Result<()> {
        match self.stopping {
            Stopping::Count(m) if m > r / 2 => {
                param(format!("cannot select {m} harmonics from {r} vectors"))
            }
            Stopping::Threshold(t0) if t0.is_nan() || t0 < 0.0 => {
                param(format!("angle threshold must be nonnegative, got {t0}"))
            }
            _ => Ok(()),
        }
    }
}

/// Pair measures of `r` consecutive vectors after overlap elimination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleRanking {
    /// Measure of every consecutive pair `(j, j+1)`; `+inf` if undefined.
    pub pairs: Vec<Measured>,
    /// Non-overlapping survivors, ascending by measure.
    pub survivors: Vec<Measured>,
    /// First index of pairs whose measure is undefined.
    pub degenerate: Vec<usize>,
}

impl AngleRanking {
    /// Ranks the pair values `values[j]` of pairs `(j, j+1)`.
    ///
    /// Scanning `j = 1 .. r-2`, the pair `j` is compared with pair `j - 1`
    /// while that one is still in play: the larger of the two is dropped
    /// (pair `j` on ties). A pair whose predecessor was already dropped
    /// stays in play without comparison. The survivors never overlap.
    pub fn from_values(values: &[f64]) -> Self {
        let mut alive = vec![true; values.len()];
        for j in 1..values.len() {
            if alive[j - 1] {
                if values[j] < values[j - 1] {
                    alive[j - 1] = false;
                } else {
                    alive[j] = false;
                }
            }
        }
        let pairs: Vec<Measured> = values
            .iter()
            .enumerate()
            .map(|(j, &value)| Measured {
                component: Component::Pair(j, j + 1),
                value,
            })
            .collect();
        let mut survivors: Vec<Measured> = pairs
            .iter()
            .zip(&alive)
            .filter(|(_, &a)| a)
            .map(|(m, _)| *m)
            .collect();
        survivors.sort_by(|a, b| a.value.total_cmp(&b.value));
        let degenerate = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_infinite())
            .map(|(j, _)| j)
            .collect();
        Self {
            pairs,
            survivors,
            degenerate,
        }
    }

    /// Normalized `tau` of each consecutive pair of `vectors`.
    pub fn from_vectors<V: AsRef<[f64]>>(vectors: &[V]) -> Result<Self> {
        if vectors.len() < 2 {
            return param(format!(
                "angle method needs at least 2 vectors, got {}",
                vectors.len()
            ));
        }
        let values = vectors
            .windows(2)
            .map(|w| match tau_norm(w[0].as_ref(), w[1].as_ref()) {
                Ok(v) => Ok(v),
                Err(SsaError::Degenerate(_)) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_values(&values))
    }

    /// Number of vectors `r`.
    pub fn num_vectors(&self) -> usize {
        self.pairs.len() + 1
    }

    /// Pairs taken by the stopping rule, best first.
    pub fn select(&self, stopping: Stopping) -> Vec<Component> {
        let finite = self.survivors.iter().filter(|m| m.value.is_finite());
        match stopping {
            Stopping::Count(m) => finite.take(m).map(|m| m.component).collect(),
            Stopping::Threshold(t0) => finite
                .take_while(|m| m.value < t0)
                .map(|m| m.component)
                .collect(),
        }
    }

    pub fn into_result(self, cfg: &AngleIdConfig) -> Result<GroupingResult> {
        cfg.validate(self.num_vectors())?;
        let mut result = GroupingResult::new(Method::AngleRegularity);
        result.selected = self.select(cfg.stopping);
        if let Stopping::Threshold(t0) = cfg.stopping {
            result.threshold = Some(t0);
        }
        result.measures = self.pairs;
        result.ordered = self.survivors;
        result.degenerate = self.degenerate;
        Ok(result)
    }
}

/// Angle-regularity identification among `r` consecutive vectors.
///
/// Indices in the result are positions in `vectors`.
pub fn identify_periodic_angle<V: AsRef<[f64]>>(
    vectors: &[V],
    cfg: &AngleIdConfig,
) -> Result<GroupingResult> {
    cfg.validate(vectors.len())?;
    AngleRanking::from_vectors(vectors)?.into_result(cfg)
}
