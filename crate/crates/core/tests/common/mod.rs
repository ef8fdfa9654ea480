//! Shared helpers for the integration tests: independent numerical oracles
//! and the property suites run both by `properties.rs` and by the acceptance
//! gate.
#![allow(dead_code)]

pub mod props;

use std::f64::consts::PI;

use nalgebra::DMatrix;

/// `a e^{alpha n} cos(2 pi omega n + phi)`, `n = 1 .. len`.
pub fn em_harmonic(len: usize, a: f64, alpha: f64, omega: f64, phi: f64) -> Vec<f64> {
    (1..=len)
        .map(|n| {
            let n = n as f64;
            a * (alpha * n).exp() * (2.0 * PI * omega * n + phi).cos()
        })
        .collect()
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns
/// eigenvalues in nonincreasing order and the matching unit eigenvectors.
pub fn jacobi_eigen(m: &DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[(p, q)] * a[(p, q)];
                }
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = order
        .iter()
        .map(|&i| v.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// Eigen-decomposition of `X X^T`.
pub fn gram_eigen(x: &DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    jacobi_eigen(&(x * x.transpose()))
}

/// Periodogram from the real Fourier coefficients `C_k`, `S_k`, summed
/// directly.
pub fn direct_periodogram(y: &[f64]) -> Vec<f64> {
    let m = y.len();
    let mf = m as f64;
    (0..=m / 2)
        .map(|k| {
            let mut c = 0.0;
            let mut s = 0.0;
            for (n, v) in y.iter().enumerate() {
                let arg = 2.0 * PI * (n * k) as f64 / mf;
                c += v * arg.cos();
                s += v * arg.sin();
            }
            if k == 0 || 2 * k == m {
                let ck = c / mf;
                mf * ck * ck
            } else {
                let (ck, sk) = (2.0 * c / mf, 2.0 * s / mf);
                mf / 2.0 * (ck * ck + sk * sk)
            }
        })
        .collect()
}

/// Folded 2D power by a direct double sum over the full grid.
pub fn direct_periodogram_2d(y: &DMatrix<f64>) -> DMatrix<f64> {
    let (mx, my) = y.shape();
    let total = (mx * my) as f64;
    let mut out = DMatrix::zeros(mx / 2 + 1, my / 2 + 1);
    for k in 0..mx {
        for l in 0..my {
            let (mut re, mut im) = (0.0, 0.0);
            for n in 0..mx {
                for j in 0..my {
                    let arg = -2.0 * PI * ((n * k) as f64 / mx as f64 + (j * l) as f64 / my as f64);
                    re += y[(n, j)] * arg.cos();
                    im += y[(n, j)] * arg.sin();
                }
            }
            let (gr, gi) = (re / total, im / total);
            out[(k.min(mx - k), l.min(my - l))] += total * (gr * gr + gi * gi);
        }
    }
    out
}

/// Population variance of the angles `acos(<a, b> / |a||b|)` between
/// consecutive points of `(p, q)`.
pub fn direct_tau(p: &[f64], q: &[f64]) -> f64 {
    let angles: Vec<f64> = (0..p.len() - 1)
        .map(|k| {
            let dot = p[k] * p[k + 1] + q[k] * q[k + 1];
            let na = p[k].hypot(q[k]);
            let nb = p[k + 1].hypot(q[k + 1]);
            (dot / (na * nb)).clamp(-1.0, 1.0).acos()
        })
        .collect();
    let n = angles.len() as f64;
    let mean = angles.iter().sum::<f64>() / n;
    angles.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
