//! Data containers and their trajectory-matrix embeddings.
//!
//! Three layouts are supported:
//!
//! * `Hankel`: the `L x K` matrix of lagged windows of one series,
//!   `X[i][j] = x[i + j]`.
//! * `StackedHankel`: the Hankel matrices of all channels placed side by
//!   side, `[H(x1) : H(x2) : ... ]`, with `K = sum K_p`.
//! * `HankelBlockHankel`: for an `Nx x Ny` field and an `Lx x Ly` window,
//!   row `a + b * Lx` and column `i + j * Kx` hold `f(i + a, j + b)`.
//!   Both levels are traversed column-major, so a left singular vector
//!   reshapes column-major into an `Lx x Ly` array and a right singular
//!   vector into a `Kx x Ky` array.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{param, Result, SsaError};

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(pos) => Err(SsaError::Data(format!(
            "{what} has a non-finite value at position {pos}"
        ))),
        None => Ok(()),
    }
}

/// A real-valued series of length at least 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(SsaError::Data(format!(
                "series needs at least 2 values, got {}",
                values.len()
            )));
        }
        check_finite(&values, "series")?;
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// A system of series `X(1) .. X(s)`, possibly of different lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiSeries(Vec<TimeSeries>);

impl MultiSeries {
    pub fn new(channels: Vec<TimeSeries>) -> Result<Self> {
        if channels.is_empty() {
            return Err(SsaError::Data("multichannel series has no channels".into()));
        }
        Ok(Self(channels))
    }

    pub fn from_vecs(channels: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            channels
                .into_iter()
                .map(TimeSeries::new)
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn channels(&self) -> &[TimeSeries] {
        &self.0
    }

    pub fn num_channels(&self) -> usize {
        self.0.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.0.iter().map(TimeSeries::len).collect()
    }
}

/// A real `Nx x Ny` field.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D(DMatrix<f64>);

impl Field2D {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() < 2 || values.ncols() < 2 {
            return Err(SsaError::Data(format!(
                "field must be at least 2x2, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        check_finite(values.as_slice(), "field")?;
        Ok(Self(values))
    }

    pub fn from_fn(nx: usize, ny: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(DMatrix::from_fn(nx, ny, f))
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

/// Shape metadata needed to invert an embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Layout {
    Hankel {
        n: usize,
    },
    StackedHankel {
        lengths: Vec<usize>,
    },
    HankelBlockHankel {
        nx: usize,
        ny: usize,
        lx: usize,
        ly: usize,
    },
}

impl Layout {
    /// Per-channel widths `K_p` of the stacked layout; a single entry otherwise.
    pub fn column_blocks(&self, window: usize) -> Vec<usize> {
        match self {
            Layout::Hankel { n } => vec![n - window + 1],
            Layout::StackedHankel { lengths } => {
                lengths.iter().map(|n| n - window + 1).collect()
            }
            Layout::HankelBlockHankel { nx, ny, lx, ly } => vec![(nx - lx + 1) * (ny - ly + 1)],
        }
    }
}

/// A trajectory matrix together with the layout that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMatrix {
    matrix: DMatrix<f64>,
    layout: Layout,
}

impl TrajectoryMatrix {
    /// Pairs an arbitrary matrix with a layout, checking only that the
    /// dimensions agree.
    pub fn from_raw(matrix: DMatrix<f64>, layout: Layout) -> Result<Self> {
        let window = matrix.nrows();
        let expected = match &layout {
            Layout::Hankel { n } => n.checked_sub(window).map(|d| (window, d + 1)),
            Layout::StackedHankel { lengths } => lengths
                .iter()
                .map(|n| n.checked_sub(window).map(|d| d + 1))
                .sum::<Option<usize>>()
                .map(|k| (window, k)),
            Layout::HankelBlockHankel { nx, ny, lx, ly } => nx
                .checked_sub(*lx)
                .zip(ny.checked_sub(*ly))
                .map(|(dx, dy)| (lx * ly, (dx + 1) * (dy + 1))),
        };
        if expected != Some(matrix.shape()) {
            return param(format!(
                "matrix of shape {:?} does not match layout {layout:?}",
                matrix.shape()
            ));
        }
        Ok(Self { matrix, layout })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Number of rows, `L` (or `Lx * Ly` for fields).
    pub fn window(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn width(&self) -> usize {
        self.matrix.ncols()
    }
}

fn check_window(window: usize, n: usize, what: &str) -> Result<()> {
    if window < 2 || window + 1 > n {
        return param(format!(
            "{what} window {window} out of range [2, {}] for length {n}",
            n.saturating_sub(1)
        ));
    }
    Ok(())
}

fn hankel_block(values: &[f64], window: usize) -> DMatrix<f64> {
    let k = values.len() - window + 1;
    DMatrix::from_fn(window, k, |i, j| values[i + j])
}

/// Hankel embedding of a single series.
pub fn embed_1d(series: &TimeSeries, window: usize) -> Result<TrajectoryMatrix> {
    check_window(window, series.len(), "1D")?;
    Ok(TrajectoryMatrix {
        matrix: hankel_block(series.values(), window),
        layout: Layout::Hankel { n: series.len() },
    })
}

/// Horizontally stacked Hankel embedding of every channel with a common window.
pub fn embed_mssa(series: &MultiSeries, window: usize) -> Result<TrajectoryMatrix> {
    let lengths = series.lengths();
    let shortest = *lengths.iter().min().expect("at least one channel");
    check_window(window, shortest, "MSSA")?;
    let width: usize = lengths.iter().map(|n| n - window + 1).sum();
    let mut matrix = DMatrix::zeros(window, width);
    let mut offset = 0;
    for channel in series.channels() {
        let block = hankel_block(channel.values(), window);
        let k = block.ncols();
        matrix.columns_mut(offset, k).copy_from(&block);
        offset += k;
    }
    Ok(TrajectoryMatrix {
        matrix,
        layout: Layout::StackedHankel { lengths },
    })
}

/// Hankel-block-Hankel embedding of a field with an `lx x ly` moving window.
pub fn embed_2d(field: &Field2D, lx: usize, ly: usize) -> Result<TrajectoryMatrix> {
    let (nx, ny) = field.shape();
    check_window(lx, nx, "2D (x)")?;
    check_window(ly, ny, "2D (y)")?;
    let (kx, ky) = (nx - lx + 1, ny - ly + 1);
    let f = field.values();
    let matrix = DMatrix::from_fn(lx * ly, kx * ky, |row, col| {
        let (a, b) = (row % lx, row / lx);
        let (i, j) = (col % kx, col / kx);
        f[(i + a, j + b)]
    });
    Ok(TrajectoryMatrix {
        matrix,
        layout: Layout::HankelBlockHankel { nx, ny, lx, ly },
    })
}

/// Averages a matrix back onto the source shape of `layout`.
///
/// Each output sample is the mean of every matrix entry that the embedding
/// copied from it, so `hankelize(embed(x)) == x`.
pub(crate) fn hankelize(matrix: &DMatrix<f64>, layout: &Layout) -> Vec<Vec<f64>> {
    let window = matrix.nrows();
    match layout {
        Layout::Hankel { n } => vec![diagonal_average(matrix, 0, n - window + 1)],
        Layout::StackedHankel { lengths } => {
            let mut offset = 0;
            lengths
                .iter()
                .map(|n| {
                    let k = n - window + 1;
                    let out = diagonal_average(matrix, offset, k);
                    offset += k;
                    out
                })
                .collect()
        }
        Layout::HankelBlockHankel { nx, ny, lx, ly } => {
            let (kx, ky) = (nx - lx + 1, ny - ly + 1);
            let mut sum = DMatrix::<f64>::zeros(*nx, *ny);
            let mut count = DMatrix::<f64>::zeros(*nx, *ny);
            for col in 0..kx * ky {
                let (i, j) = (col % kx, col / kx);
                for row in 0..lx * ly {
                    let (a, b) = (row % lx, row / lx);
                    sum[(i + a, j + b)] += matrix[(row, col)];
                    count[(i + a, j + b)] += 1.0;
                }
            }
            vec![sum.component_div(&count).as_slice().to_vec()]
        }
    }
}

fn diagonal_average(matrix: &DMatrix<f64>, offset: usize, k: usize) -> Vec<f64> {
    let l = matrix.nrows();
    let n = l + k - 1;
    let mut sum = vec![0.0; n];
    let mut count = vec![0usize; n];
    for j in 0..k {
        let column = matrix.column(offset + j);
        for (i, v) in column.iter().enumerate() {
            sum[i + j] += v;
            count[i + j] += 1;
        }
    }
    sum.iter().zip(&count).map(|(s, &c)| s / c as f64).collect()
}
