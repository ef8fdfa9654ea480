//! Periodograms on the grid `k/M` and the frequency-share measures built on
//! them.
//!
//! For a series `y_1 .. y_M` with DFT `F_k = sum_n y_n exp(-2 pi i n k / M)`
//! the power is
//!
//! * `Pi(0) = |F_0|^2 / M`,
//! * `Pi(k/M) = 2 |F_k|^2 / M` for `0 < k < M/2`,
//! * `Pi(1/2) = |F_{M/2}|^2 / M` when `M` is even,
//!
//! which is the cosine/sine coefficient form `M/2 (C_k^2 + S_k^2)` written
//! through the DFT. With this split the powers sum to `|y|^2` exactly, and
//! the normalized periodogram `I = Pi / |y|^2` sums to one.

use std::cell::RefCell;

use nalgebra::DMatrix;
use num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{param, Result, SsaError};

/// Slack for comparing `k/M` against a frequency bound.
const GRID_EPS: f64 = 1e-9;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// `|F_k|^2` for `k = 0 .. M-1`.
fn dft_power(y: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = y.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(y.len()));
    fft.process(&mut buf);
    buf.iter().map(Complex::norm_sqr).collect()
}

fn fft_2d(y: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    let (mx, my) = y.shape();
    let mut out = y.map(|v| Complex::new(v, 0.0));
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        let fx = planner.plan_fft_forward(mx);
        for mut col in out.column_iter_mut() {
            let mut buf: Vec<Complex<f64>> = col.iter().copied().collect();
            fx.process(&mut buf);
            col.iter_mut().zip(buf).for_each(|(c, b)| *c = b);
        }
        let fy = planner.plan_fft_forward(my);
        for mut row in out.row_iter_mut() {
            let mut buf: Vec<Complex<f64>> = row.iter().copied().collect();
            fy.process(&mut buf);
            row.iter_mut().zip(buf).for_each(|(c, b)| *c = b);
        }
    });
    out
}

/// Normalized powers this close to the maximum are rounding-level ties.
pub const PEAK_TIE_EPS: f64 = 1e-12;

fn check_len(m: usize) -> Result<()> {
    if m < 2 {
        return param(format!("periodogram needs at least 2 samples, got {m}"));
    }
    Ok(())
}

fn is_zero_norm(norm_sq: f64) -> bool {
    norm_sq <= f64::MIN_POSITIVE
}

/// Periodogram of a real vector on `k/M`, `k = 0 .. floor(M/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Periodogram {
    len: usize,
    power: Vec<f64>,
    normalized: Vec<f64>,
    norm_sq: f64,
}

impl Periodogram {
    pub fn new(y: &[f64]) -> Result<Self> {
        check_len(y.len())?;
        if let Some(pos) = y.iter().position(|v| !v.is_finite()) {
            return Err(SsaError::Data(format!("non-finite value at position {pos}")));
        }
        let m = y.len();
        let dft = dft_power(y);
        let power: Vec<f64> = (0..=m / 2)
            .map(|k| {
                let p = dft[k] / m as f64;
                if k == 0 || 2 * k == m {
                    p
                } else {
                    2.0 * p
                }
            })
            .collect();
        let norm_sq: f64 = y.iter().map(|v| v * v).sum();
        let normalized = if is_zero_norm(norm_sq) {
            vec![0.0; power.len()]
        } else {
            power.iter().map(|p| p / norm_sq).collect()
        };
        Ok(Self {
            len: m,
            power,
            normalized,
            norm_sq,
        })
    }

    /// Source length `M`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `Pi(k/M)` for `k = 0 .. floor(M/2)`.
    pub fn power(&self) -> &[f64] {
        &self.power
    }

    /// `I(k/M)`; all zeros for a zero vector.
    pub fn normalized(&self) -> &[f64] {
        &self.normalized
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.power.len())
            .map(|k| k as f64 / self.len as f64)
            .collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// True when the source vector is zero and `I` is undefined.
    pub fn is_degenerate(&self) -> bool {
        is_zero_norm(self.norm_sq)
    }

    /// Largest grid index, `floor(M/2)`.
    pub fn last_index(&self) -> usize {
        self.power.len() - 1
    }

    /// `I(k/M)`, or zero for `k` past the end of the grid.
    pub fn at(&self, k: usize) -> f64 {
        self.normalized.get(k).copied().unwrap_or(0.0)
    }

    /// Sum of `I(k/M)` over `w1 <= k/M < w2`.
    pub fn share(&self, w1: f64, w2: f64) -> Result<f64> {
        check_bin(w1, w2)?;
        let m = self.len as f64;
        Ok(self
            .normalized
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let k = *k as f64;
                k >= w1 * m - GRID_EPS && k < w2 * m - GRID_EPS
            })
            .map(|(_, v)| v)
            .sum())
    }

    /// Grid index of the largest `I(k/M)` over `0 < k <= M/2`, smallest `k`
    /// on ties (values within `PEAK_TIE_EPS` of the maximum count as tied).
    pub fn peak_index(&self) -> Result<usize> {
        if self.is_degenerate() {
            return Err(SsaError::Degenerate("periodogram of a zero vector".into()));
        }
        let tail = &self.normalized[1..];
        let top = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let k = tail
            .iter()
            .position(|&v| v >= top - PEAK_TIE_EPS)
            .expect("grid has a point past zero");
        Ok(k + 1)
    }
}

fn check_bin(w1: f64, w2: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&w1) || w2.is_nan() || w2 < w1 || !w2.is_finite() {
        return param(format!(
            "frequency bin [{w1}, {w2}) must satisfy 0 <= w1 <= w2, w1 <= 0.5"
        ));
    }
    Ok(())
}

/// Periodogram of `y`.
pub fn periodogram_1d(y: &[f64]) -> Result<Periodogram> {
    Periodogram::new(y)
}

/// Share of the normalized periodogram inside `[w1, w2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Contribution {
    pub value: f64,
    /// Set when the input was the zero vector; `value` is then 0.
    pub degenerate: bool,
}

/// `T(y; w1, w2)`: the sum of `I(k/M)` over `w1 <= k/M < w2`.
///
/// A bound `w2 > 0.5` is accepted and simply admits the point `1/2`.
pub fn freq_contribution(y: &[f64], w1: f64, w2: f64) -> Result<Contribution> {
    let p = Periodogram::new(y)?;
    Ok(Contribution {
        value: p.share(w1, w2)?,
        degenerate: p.is_degenerate(),
    })
}

/// Frequency of the periodogram maximum over `0 < k <= M/2` and its value.
pub fn argmax_frequency(y: &[f64]) -> Result<(f64, f64)> {
    let p = Periodogram::new(y)?;
    let k = p.peak_index()?;
    Ok((k as f64 / p.len() as f64, p.at(k)))
}

/// Mean of `I_W(k/L)` over the vectors `W` of the set.
pub fn rho_mean<V: AsRef<[f64]>>(vectors: &[V], k: usize) -> Result<f64> {
    if vectors.is_empty() {
        return param("rho needs a nonempty set of vectors");
    }
    let len = vectors[0].as_ref().len();
    if vectors.iter().any(|v| v.as_ref().len() != len) {
        return param("rho needs vectors of equal length");
    }
    let pgrams = vectors
        .iter()
        .map(|v| Periodogram::new(v.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Periodogram> = pgrams.iter().collect();
    Ok(mean_at(&refs, k))
}

pub(crate) fn mean_at(pgrams: &[&Periodogram], k: usize) -> f64 {
    pgrams.iter().map(|p| p.at(k)).sum::<f64>() / pgrams.len() as f64
}

/// 2D periodogram folded onto nonnegative frequencies.
///
/// With `G_kl = (Mx My)^{-1} sum y_nm exp(-2 pi i (n k / Mx + m l / My))` the
/// power at `(k, l)` is `Mx My |G_kl|^2`. The four cells `(+-k, +-l)`
/// describe the same absolute frequency pair and are added together, so
/// `power` is indexed by `0 <= k <= Mx/2`, `0 <= l <= My/2` and sums to
/// `|y|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram2D {
    shape: (usize, usize),
    coefficients: DMatrix<Complex<f64>>,
    power: DMatrix<f64>,
    normalized: DMatrix<f64>,
    norm_sq: f64,
}

impl Periodogram2D {
    pub fn new(y: &DMatrix<f64>) -> Result<Self> {
        let (mx, my) = y.shape();
        if mx < 2 || my < 2 {
            return param(format!("2D periodogram needs at least 2x2, got {mx}x{my}"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(SsaError::Data("field has non-finite values".into()));
        }
        let total = (mx * my) as f64;
        let coefficients = fft_2d(y).map(|c| c / total);
        let mut power = DMatrix::zeros(mx / 2 + 1, my / 2 + 1);
        for l in 0..my {
            for k in 0..mx {
                let fk = k.min(mx - k);
                let fl = l.min(my - l);
                power[(fk, fl)] += total * coefficients[(k, l)].norm_sqr();
            }
        }
        let norm_sq = y.norm_squared();
        let normalized = if is_zero_norm(norm_sq) {
            DMatrix::zeros(power.nrows(), power.ncols())
        } else {
            &power / norm_sq
        };
        Ok(Self {
            shape: (mx, my),
            coefficients,
            power,
            normalized,
            norm_sq,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    /// Complex Fourier coefficients `G_kl` on the full `Mx x My` grid.
    pub fn coefficients(&self) -> &DMatrix<Complex<f64>> {
        &self.coefficients
    }

    pub fn power(&self) -> &DMatrix<f64> {
        &self.power
    }

    pub fn normalized(&self) -> &DMatrix<f64> {
        &self.normalized
    }

    pub fn is_degenerate(&self) -> bool {
        is_zero_norm(self.norm_sq)
    }

    /// Sum of `I(k/Mx, l/My)` over `0 <= k/Mx <= w1`, `0 <= l/My <= w2`.
    pub fn share(&self, w1: f64, w2: f64) -> Result<f64> {
        for w in [w1, w2] {
            if !(0.0..=0.5).contains(&w) {
                return param(format!("2D frequency bound {w} outside [0, 0.5]"));
            }
        }
        let (mx, my) = (self.shape.0 as f64, self.shape.1 as f64);
        let mut sum = 0.0;
        for l in 0..self.normalized.ncols() {
            if l as f64 > w2 * my + GRID_EPS {
                break;
            }
            for k in 0..self.normalized.nrows() {
                if k as f64 > w1 * mx + GRID_EPS {
                    break;
                }
                sum += self.normalized[(k, l)];
            }
        }
        Ok(sum)
    }
}

pub fn periodogram_2d(y: &DMatrix<f64>) -> Result<Periodogram2D> {
    Periodogram2D::new(y)
}

/// `T(Y; w1, w2)` over the closed rectangle `[0, w1] x [0, w2]`.
pub fn freq_contribution_2d(y: &DMatrix<f64>, w1: f64, w2: f64) -> Result<Contribution> {
    let p = Periodogram2D::new(y)?;
    Ok(Contribution {
        value: p.share(w1, w2)?,
        degenerate: p.is_degenerate(),
    })
}
