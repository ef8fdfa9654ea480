//! SVD of a trajectory matrix into eigentriples and grouped reconstruction.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, SVD};
use serde::Serialize;

use crate::embed::{hankelize, Field2D, Layout, MultiSeries, TimeSeries, TrajectoryMatrix};
use crate::error::{param, Result, SsaError};

/// Singular values at or below `DEFAULT_RANK_TOL * sigma_1` count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Parts of a factor vector whose norm is below this are flagged degenerate.
pub const DEGENERATE_PART_NORM: f64 = 1e-12;

/// One rank-one term `sigma * U * V^T` of the SVD.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigentriple {
    pub sigma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Eigentriple {
    /// Eigenvalue `lambda = sigma^2` of `X X^T`.
    pub fn lambda(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// Eigentriples of a trajectory matrix, sorted by nonincreasing singular value.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    triples: Vec<Eigentriple>,
    rank: usize,
    layout: Layout,
    window: usize,
}

impl Decomposition {
    pub fn triples(&self) -> &[Eigentriple] {
        &self.triples
    }

    pub fn triple(&self, i: usize) -> &Eigentriple {
        &self.triples[i]
    }

    /// Number of singular values above the rank tolerance.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.triples.iter().map(|t| t.sigma).collect()
    }

    /// Left singular vectors `U_0 .. U_{rank-1}`.
    pub fn left_vectors(&self) -> Vec<&[f64]> {
        self.triples[..self.rank].iter().map(|t| t.u.as_slice()).collect()
    }

    /// Right singular vectors `V_0 .. V_{rank-1}`.
    pub fn right_vectors(&self) -> Vec<&[f64]> {
        self.triples[..self.rank].iter().map(|t| t.v.as_slice()).collect()
    }

    /// Per-channel widths used to split right singular vectors.
    pub fn column_blocks(&self) -> Vec<usize> {
        self.layout.column_blocks(self.window)
    }

    /// `sum sigma_i U_i V_i^T` over the given components.
    pub fn matrix_of(&self, group: &Group) -> Result<DMatrix<f64>> {
        self.check_group(group)?;
        let k = self.triples.first().map_or(0, |t| t.v.len());
        let mut m = DMatrix::zeros(self.window, k);
        for &i in group.indices() {
            let t = &self.triples[i];
            for (j, vj) in t.v.iter().enumerate() {
                let scale = t.sigma * vj;
                for (r, ur) in t.u.iter().enumerate() {
                    m[(r, j)] += scale * ur;
                }
            }
        }
        Ok(m)
    }

    fn check_group(&self, group: &Group) -> Result<()> {
        match group.indices().iter().find(|&&i| i >= self.rank) {
            Some(i) => param(format!(
                "component {i} out of range, decomposition has {} components",
                self.rank
            )),
            None => Ok(()),
        }
    }
}

/// A set of component indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Group(BTreeSet<usize>);

impl Group {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        Self(indices.into_iter().collect())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// `{0, .., n-1}`.
    pub fn leading(n: usize) -> Self {
        Self::new(0..n)
    }

    pub fn indices(&self) -> &BTreeSet<usize> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &Group) -> Group {
        Group(self.0.union(&other.0).copied().collect())
    }
}

impl FromIterator<usize> for Group {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Self::new(iter)
    }
}

/// A reconstructed object in the shape of the decomposed input.
#[derive(Debug, Clone, PartialEq)]
pub enum Reconstruction {
    Series(Vec<f64>),
    Multi(Vec<Vec<f64>>),
    Field(DMatrix<f64>),
}

impl Reconstruction {
    /// All samples, channel after channel (column-major for fields).
    pub fn flat(&self) -> Vec<f64> {
        match self {
            Reconstruction::Series(v) => v.clone(),
            Reconstruction::Multi(c) => c.concat(),
            Reconstruction::Field(m) => m.as_slice().to_vec(),
        }
    }

    pub fn into_series(self) -> Option<Vec<f64>> {
        match self {
            Reconstruction::Series(v) => Some(v),
            _ => None,
        }
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        match self {
            Reconstruction::Series(v) => vec![v],
            Reconstruction::Multi(c) => c,
            Reconstruction::Field(m) => vec![m.as_slice().to_vec()],
        }
    }

    pub fn into_field(self) -> Option<DMatrix<f64>> {
        match self {
            Reconstruction::Field(m) => Some(m),
            _ => None,
        }
    }

    /// Builds the reconstruction object from hankelized channel data.
    fn from_channels(layout: &Layout, mut channels: Vec<Vec<f64>>) -> Self {
        match layout {
            Layout::Hankel { .. } => Reconstruction::Series(channels.remove(0)),
            Layout::StackedHankel { .. } => Reconstruction::Multi(channels),
            Layout::HankelBlockHankel { nx, ny, .. } => {
                Reconstruction::Field(DMatrix::from_vec(*nx, *ny, channels.remove(0)))
            }
        }
    }

    pub fn as_series(&self) -> Option<TimeSeries> {
        match self {
            Reconstruction::Series(v) => TimeSeries::new(v.clone()).ok(),
            _ => None,
        }
    }

    pub fn as_multi(&self) -> Option<MultiSeries> {
        match self {
            Reconstruction::Multi(c) => MultiSeries::from_vecs(c.clone()).ok(),
            _ => None,
        }
    }

    pub fn as_field(&self) -> Option<Field2D> {
        match self {
            Reconstruction::Field(m) => Field2D::new(m.clone()).ok(),
            _ => None,
        }
    }
}

/// Full dense SVD of the trajectory matrix.
///
/// Eigentriples are sorted by nonincreasing singular value (stable, so equal
/// values keep the backend order) and each `(U, V)` pair is signed so that
/// the entry of `U` with the largest magnitude is positive. `rank` counts the
/// singular values strictly above `rank_tol * sigma_1`.
pub fn decompose(tm: &TrajectoryMatrix, rank_tol: f64) -> Result<Decomposition> {
    decompose_capped(tm, rank_tol, None)
}

/// Like [`decompose`] but keeps at most `max_rank` eigentriples.
pub fn decompose_capped(
    tm: &TrajectoryMatrix,
    rank_tol: f64,
    max_rank: Option<usize>,
) -> Result<Decomposition> {
    let m = tm.matrix();
    if m.iter().any(|v| !v.is_finite()) {
        return Err(SsaError::Data("trajectory matrix has non-finite entries".into()));
    }
    if rank_tol.is_nan() || rank_tol < 0.0 {
        return param(format!("rank tolerance must be nonnegative, got {rank_tol}"));
    }
    let svd = SVD::try_new(m.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| SsaError::Data("SVD did not converge".into()))?;
    let u = svd.u.expect("left vectors requested");
    let v_t = svd.v_t.expect("right vectors requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("finite singular values")
    });
    if let Some(cap) = max_rank {
        order.truncate(cap);
    }

    let triples: Vec<Eigentriple> = order
        .into_iter()
        .map(|i| {
            let mut uu: Vec<f64> = u.column(i).iter().copied().collect();
            let mut vv: Vec<f64> = v_t.row(i).iter().copied().collect();
            let pivot = uu
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |best, (j, x)| {
                    if x.abs() > best.1 {
                        (j, x.abs())
                    } else {
                        best
                    }
                })
                .0;
            if uu[pivot] < 0.0 {
                uu.iter_mut().for_each(|x| *x = -*x);
                vv.iter_mut().for_each(|x| *x = -*x);
            }
            Eigentriple {
                sigma: svd.singular_values[i].max(0.0),
                u: uu,
                v: vv,
            }
        })
        .collect();

    let sigma_1 = triples.first().map_or(0.0, |t| t.sigma);
    let rank = triples
        .iter()
        .take_while(|t| t.sigma > rank_tol * sigma_1)
        .count();
    Ok(Decomposition {
        triples,
        rank,
        layout: tm.layout().clone(),
        window: tm.window(),
    })
}

/// Sum of the elementary matrices in `group`, diagonally averaged back to the
/// source shape. An empty group gives the zero object.
pub fn reconstruct(dec: &Decomposition, group: &Group) -> Result<Reconstruction> {
    let m = dec.matrix_of(group)?;
    Ok(Reconstruction::from_channels(
        dec.layout(),
        hankelize(&m, dec.layout()),
    ))
}

/// Reconstruction by the single component `i`.
pub fn elementary_component(dec: &Decomposition, i: usize) -> Result<Reconstruction> {
    reconstruct(dec, &Group::new([i]))
}

/// Per-channel parts of a right singular vector of a stacked trajectory matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorVectorParts {
    parts: Vec<Vec<f64>>,
    norms: Vec<f64>,
}

impl FactorVectorParts {
    /// Wraps already split parts (for instance the channels of an
    /// elementary multichannel reconstruction).
    pub fn from_parts(parts: Vec<Vec<f64>>) -> Self {
        let norms = parts
            .iter()
            .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect();
        Self { parts, norms }
    }

    pub fn parts(&self) -> &[Vec<f64>] {
        &self.parts
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn is_degenerate(&self, p: usize) -> bool {
        self.norms[p] < DEGENERATE_PART_NORM
    }

    /// `V(p) / |V(p)|`, or `None` for a degenerate part.
    pub fn normalized(&self, p: usize) -> Option<Vec<f64>> {
        if self.is_degenerate(p) {
            return None;
        }
        Some(self.parts[p].iter().map(|x| x / self.norms[p]).collect())
    }

    /// Non-degenerate parts together with their channel index.
    pub fn usable(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.parts
            .iter()
            .enumerate()
            .filter(|(p, _)| !self.is_degenerate(*p))
            .map(|(p, v)| (p, v.as_slice()))
    }

    pub fn concat(&self) -> Vec<f64> {
        self.parts.concat()
    }
}

/// Splits a right singular vector into consecutive parts of lengths `widths`.
pub fn split_factor_vector(v: &[f64], widths: &[usize]) -> Result<FactorVectorParts> {
    let total: usize = widths.iter().sum();
    if total != v.len() {
        return param(format!(
            "factor vector has length {} but channel widths sum to {total}",
            v.len()
        ));
    }
    let mut offset = 0;
    let parts = widths
        .iter()
        .map(|&k| {
            let part = v[offset..offset + k].to_vec();
            offset += k;
            part
        })
        .collect();
    Ok(FactorVectorParts::from_parts(parts))
}
