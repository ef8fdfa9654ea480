//! Simulation harness: the modulated-harmonic model, Monte-Carlo threshold
//! calibration for the angle measure, and the comparison of the angle and
//! periodogram methods against two-component reconstruction.
//!
//! Every run is a pure function of a master seed. Each replication draws
//! from its own ChaCha8 stream whose seed is derived from
//! `(master, grid index, replication, realization)`, so parallel and
//! sequential runs produce identical results.

mod calibration;
mod comparison;
mod model;

pub use calibration::{calibrate_threshold, CalibrationResult, CalibrationRow, SimulationConfig};
pub use comparison::{
    compare_methods, identification_error, optimal_threshold, threshold_grid, visual_identification,
    CompareConfig, CompareMethod, ComparisonReport, ComparisonRow, Replication, ThresholdFit,
    ThresholdSweep, VisualIdentification,
};
pub use model::{
    fit_harmonic, harmonic_phase, phase_difference, simulate, window_from_fraction, HarmonicFit,
    SignalModel, Simulation,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of the stream for one realization of one replication.
pub fn sub_seed(master: u64, grid_index: usize, replication: usize, realization: usize) -> u64 {
    let mut h = splitmix64(master);
    for part in [grid_index, replication, realization] {
        h = splitmix64(h ^ part as u64);
    }
    h
}

/// `n` standard Gaussian draws by the Box-Muller transform, both outputs of
/// each uniform pair used in turn.
pub fn gaussian_noise(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        out.push(r * c);
        out.push(r * s);
    }
    out.truncate(n);
    out
}

/// Sample quantile with linear interpolation between order statistics
/// (`h = (n - 1) p`). `None` for an empty sample.
pub fn quantile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}
