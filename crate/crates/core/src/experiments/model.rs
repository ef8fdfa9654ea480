use serde::Serialize;

use super::gaussian_noise;
use crate::embed::TimeSeries;
use crate::error::{param, Result};

/// `x_k = a e^{alpha k} cos(2 pi k omega + phase) + e^{alpha k} sigma eps_k`,
/// `k = 1 .. n`, with `eps_k` i.i.d. standard Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalModel {
    pub a: f64,
    pub alpha: f64,
    pub omega: f64,
    pub phase: f64,
    pub sigma: f64,
    pub n: usize,
}

impl SignalModel {
    /// Unit-amplitude, zero-phase harmonic without noise.
    pub fn harmonic(n: usize, omega: f64, alpha: f64) -> Self {
        Self {
            a: 1.0,
            alpha,
            omega,
            phase: 0.0,
            sigma: 0.0,
            n,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    /// Sets `alpha = c / n`.
    pub fn with_modulation_constant(mut self, c: f64) -> Self {
        self.alpha = c / self.n as f64;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a != 0.0) {
            return param(format!("amplitude must be finite and nonzero, got {}", self.a));
        }
        if !self.alpha.is_finite() {
            return param("modulation rate must be finite");
        }
        if !(self.omega > 0.0 && self.omega <= 0.5) {
            return param(format!("frequency must lie in (0, 0.5], got {}", self.omega));
        }
        if !self.phase.is_finite() {
            return param("phase must be finite");
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return param(format!("noise scale must be >= 0, got {}", self.sigma));
        }
        if self.n < 3 {
            return param(format!("series length must be >= 3, got {}", self.n));
        }
        Ok(())
    }

    /// Noiseless signal `s_1 .. s_n`.
    pub fn signal(&self) -> Vec<f64> {
        let w = std::f64::consts::TAU * self.omega;
        (1..=self.n)
            .map(|k| {
                let k = k as f64;
                self.a * (self.alpha * k).exp() * (w * k + self.phase).cos()
            })
            .collect()
    }
}

/// `L = floor(beta N)`.
pub fn window_from_fraction(n: usize, beta: f64) -> usize {
    (beta * n as f64).floor() as usize
}

/// One realization of the model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Simulation {
    pub signal: Vec<f64>,
    pub noise: Vec<f64>,
    pub series: Vec<f64>,
}

impl Simulation {
    pub fn time_series(&self) -> Result<TimeSeries> {
        TimeSeries::new(self.series.clone())
    }
}

pub fn simulate(model: &SignalModel, seed: u64) -> Result<Simulation> {
    model.validate()?;
    let signal = model.signal();
    let noise: Vec<f64> = if model.sigma == 0.0 {
        vec![0.0; model.n]
    } else {
        gaussian_noise(seed, model.n)
            .into_iter()
            .enumerate()
            .map(|(i, e)| (model.alpha * (i + 1) as f64).exp() * model.sigma * e)
            .collect()
    };
    let series = signal.iter().zip(&noise).map(|(s, e)| s + e).collect();
    Ok(Simulation {
        signal,
        noise,
        series,
    })
}

/// Least-squares fit `v_k ~ amplitude e^{alpha k} cos(2 pi omega k + phase)`,
/// `k = 0 .. len-1`, with `amplitude >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicFit {
    pub amplitude: f64,
    pub phase: f64,
}

pub fn fit_harmonic(v: &[f64], omega: f64, alpha: f64) -> Result<HarmonicFit> {
    if v.len() < 2 {
        return param("harmonic fit needs at least 2 samples");
    }
    let w = std::f64::consts::TAU * omega;
    let (mut cc, mut cs, mut ss, mut vc, mut vs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, &x) in v.iter().enumerate() {
        let k = k as f64;
        let g = (alpha * k).exp();
        let (c, s) = (g * (w * k).cos(), g * (w * k).sin());
        cc += c * c;
        cs += c * s;
        ss += s * s;
        vc += x * c;
        vs += x * s;
    }
    let det = cc * ss - cs * cs;
    if det.abs() <= 1e-12 * cc * ss {
        return param(format!("harmonic fit is singular at frequency {omega}"));
    }
    let c = (vc * ss - vs * cs) / det;
    let s = (vs * cc - vc * cs) / det;
    Ok(HarmonicFit {
        amplitude: c.hypot(s),
        phase: (-s).atan2(c),
    })
}

pub fn harmonic_phase(v: &[f64], omega: f64, alpha: f64) -> Result<f64> {
    Ok(fit_harmonic(v, omega, alpha)?.phase)
}

/// Phase difference of the fitted harmonics of `u` and `w`, reduced to
/// `[0, pi)` (the sign of a singular vector is arbitrary).
pub fn phase_difference(u: &[f64], w: &[f64], omega: f64, alpha: f64) -> Result<f64> {
    let d = harmonic_phase(u, omega, alpha)? - harmonic_phase(w, omega, alpha)?;
    Ok(d.rem_euclid(std::f64::consts::PI))
}
