//! Singular spectrum analysis (SSA) of time series, multichannel series and
//! 2D fields, with automatic identification of the eigentriples that make up
//! the trend and the oscillatory (exponentially-modulated harmonic) part.
//!
//! The pipeline is the usual one:
//!
//! 1. [`embed`] the data into a trajectory matrix,
//! 2. [`decompose`] it into eigentriples,
//! 3. pick components with one of the identification methods in
//!    [`grouping`], [`mssa`] or [`field`],
//! 4. [`reconstruct`] the selected group by diagonal averaging.
//!
//! [`experiments`] holds the simulation harness used to calibrate the
//! angle-regularity threshold and to compare it against the periodogram
//! method.
//!
//! Component indices are 0-based throughout the library.

pub mod decomposition;
pub mod embed;
pub mod error;
pub mod experiments;
pub mod field;
pub mod grouping;
pub mod mssa;
pub mod spectral;

pub use decomposition::{
    decompose, decompose_capped, elementary_component, reconstruct, split_factor_vector, Decomposition,
    Eigentriple, FactorVectorParts, Group, Reconstruction, DEFAULT_RANK_TOL,
};
pub use embed::{
    embed_1d, embed_2d, embed_mssa, Field2D, Layout, MultiSeries, TimeSeries, TrajectoryMatrix,
};
pub use error::{Result, SsaError};
pub use grouping::{Component, GroupingResult, Measured};
