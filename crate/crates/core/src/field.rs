//! Low-frequency identification for 2D decompositions.
//!
//! Candidates are 2D arrays: elementary reconstructed fields, or left/right
//! singular vectors folded back to `Lx x Ly` / `Kx x Ky` with the same
//! column-major order the Hankel-block-Hankel embedding uses.

use nalgebra::DMatrix;

use crate::decomposition::{elementary_component, Decomposition, Group};
use crate::embed::Layout;
use crate::error::{param, Result};
use crate::grouping::trend::{check_threshold, select_at_least};
use crate::grouping::{GroupingResult, Method, SourceKind};
use crate::spectral::Periodogram2D;

/// Folds a vector of length `rows * cols` into a matrix, first index
/// fastest.
pub fn devectorize(v: &[f64], rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    if v.len() != rows * cols {
        return param(format!(
            "vector of length {} cannot be shaped {rows}x{cols}",
            v.len()
        ));
    }
    Ok(DMatrix::from_column_slice(rows, cols, v))
}

/// 2D candidates of the requested kind for every index of `group`.
pub fn candidates_2d(
    dec: &Decomposition,
    source: SourceKind,
    group: &Group,
) -> Result<Vec<(usize, DMatrix<f64>)>> {
    let Layout::HankelBlockHankel { nx, ny, lx, ly } = *dec.layout() else {
        return param("2D candidates need a decomposition of a field");
    };
    let (kx, ky) = (nx - lx + 1, ny - ly + 1);
    group
        .indices()
        .iter()
        .map(|&i| {
            if i >= dec.rank() {
                return param(format!(
                    "component {i} out of range, decomposition has {} components",
                    dec.rank()
                ));
            }
            let t = dec.triple(i);
            let y = match source {
                SourceKind::Eigen => devectorize(&t.u, lx, ly)?,
                SourceKind::Factor => devectorize(&t.v, kx, ky)?,
                SourceKind::Recon => elementary_component(dec, i)?
                    .into_field()
                    .expect("field layout reconstructs to a field"),
            };
            Ok((i, y))
        })
        .collect()
}

/// `J = { i : T(Y_i; w1, w2) >= T0 }` with `T` the normalized 2D periodogram
/// mass in the closed rectangle `[0, w1] x [0, w2]`.
pub fn identify_trend_2d(
    candidates: &[(usize, DMatrix<f64>)],
    omega1: f64,
    omega2: f64,
    threshold: f64,
) -> Result<GroupingResult> {
    for w in [omega1, omega2] {
        if !(0.0..=0.5).contains(&w) {
            return param(format!("2D frequency bound {w} outside [0, 0.5]"));
        }
    }
    check_threshold(threshold)?;
    let measured = candidates
        .iter()
        .map(|(i, y)| {
            let p = Periodogram2D::new(y)?;
            if p.is_degenerate() {
                return Ok((*i, None));
            }
            Ok((*i, Some(p.share(omega1, omega2)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(select_at_least(Method::LowFrequency, measured, threshold))
}
