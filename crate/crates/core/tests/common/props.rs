//! Property suites. Each function runs one family of properties with the
//! given runner and reports the first minimal failure.

use std::collections::BTreeSet;
use std::fmt::Debug;

use autossa::decomposition::FactorVectorParts;
use autossa::field::identify_trend_2d;
use autossa::grouping::{
    identify_periodic_angle, identify_periodic_freq, identify_trend, tau, AngleIdConfig,
    FreqIdConfig, TrendIdConfig,
};
use autossa::mssa::{
    identify_periodic_angle_mssa_right, identify_periodic_freq_mssa_right,
    identify_trend_mssa_right, right_parts,
};
use autossa::spectral::Periodogram;
use autossa::{
    decompose, embed_1d, embed_2d, embed_mssa, reconstruct, Component, Field2D, Group,
    MultiSeries, TimeSeries, DEFAULT_RANK_TOL,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use super::{direct_periodogram, em_harmonic};

/// Runner with `cases` cases and a fixed RNG stream.
pub fn deterministic_runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

/// Runner with `cases` cases and a fresh random seed.
pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn run<S>(
    runner: &mut TestRunner,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S: Strategy,
    S::Value: Debug,
{
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn vector(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

fn vectors(count: std::ops::Range<usize>, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (count, len).prop_flat_map(|(d, l)| prop::collection::vec(vector(l..l + 1), d))
}

fn field(rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> impl Strategy<Value = DMatrix<f64>> {
    (rows, cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-5.0f64..5.0, r * c)
            .prop_map(move |v| DMatrix::from_vec(r, c, v))
    })
}

fn err(e: impl ToString) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

/// Sum of the periodogram equals the squared norm; the normalized form sums
/// to one.
pub fn parseval(runner: &mut TestRunner) -> Result<(), String> {
    run(runner, vector(2..300), |y| {
        let p = Periodogram::new(&y).map_err(err)?;
        let norm: f64 = y.iter().map(|v| v * v).sum();
        let total: f64 = p.power().iter().sum();
        prop_assert!((total - norm).abs() <= 1e-10 * norm, "{total} vs {norm}");
        let direct: f64 = direct_periodogram(&y).iter().sum();
        prop_assert!((direct - norm).abs() <= 1e-10 * norm);
        if !p.is_degenerate() {
            let ones: f64 = p.normalized().iter().sum();
            prop_assert!((ones - 1.0).abs() <= 1e-10);
        }
        Ok(())
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Reconstruction by all `d` components reproduces 1D, multichannel and 2D
/// inputs.
pub fn full_reconstruction(runner: &mut TestRunner) -> Result<(), String> {
    let one_d = (5usize..60).prop_flat_map(|n| (vector(n..n + 1), 2..n));
    run(runner, one_d, |(x, l)| {
        let tm = embed_1d(&TimeSeries::new(x.clone()).map_err(err)?, l).map_err(err)?;
        let dec = decompose(&tm, DEFAULT_RANK_TOL).map_err(err)?;
        let r = reconstruct(&dec, &Group::leading(dec.rank())).map_err(err)?;
        prop_assert!(max_abs_diff(&r.flat(), &x) < 1e-8);
        Ok(())
    })?;

    let multi = prop::collection::vec(5usize..40, 1..4).prop_flat_map(|lens| {
        let shortest = *lens.iter().min().unwrap();
        let channels: Vec<_> = lens.iter().map(|&n| vector(n..n + 1)).collect();
        (channels, 2..shortest)
    });
    run(runner, multi, |(channels, l)| {
        let ms = MultiSeries::from_vecs(channels.clone()).map_err(err)?;
        let dec = decompose(&embed_mssa(&ms, l).map_err(err)?, DEFAULT_RANK_TOL).map_err(err)?;
        let r = reconstruct(&dec, &Group::leading(dec.rank())).map_err(err)?;
        for (got, want) in r.into_channels().iter().zip(&channels) {
            prop_assert_eq!(got.len(), want.len());
            prop_assert!(max_abs_diff(got, want) < 1e-8);
        }
        Ok(())
    })?;

    let two_d = field(3..9, 3..9).prop_flat_map(|f| {
        let (nx, ny) = f.shape();
        (Just(f), 2..nx, 2..ny)
    });
    run(runner, two_d, |(f, lx, ly)| {
        let fd = Field2D::new(f.clone()).map_err(err)?;
        let dec = decompose(&embed_2d(&fd, lx, ly).map_err(err)?, DEFAULT_RANK_TOL).map_err(err)?;
        let r = reconstruct(&dec, &Group::leading(dec.rank())).map_err(err)?;
        let got = r.into_field().unwrap();
        prop_assert!(max_abs_diff(got.as_slice(), f.as_slice()) < 1e-8);
        Ok(())
    })
}

fn points() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec((0.2f64..5.0, -10.0f64..10.0), 3..50)
        .prop_map(|pts| pts.iter().map(|(r, a)| (r * a.cos(), r * a.sin())).unzip())
}

/// `tau` is unchanged by a common scaling and by a common rotation of the
/// points.
pub fn tau_invariance(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (points(), -4i32..5, any::<bool>(), 0.1f64..10.0, -7.0f64..7.0);
    run(runner, strategy, |((p, q), exp, neg, c, phi)| {
        let t = tau(&p, &q).map_err(err)?;

        let two = if neg { -(2f64.powi(exp)) } else { 2f64.powi(exp) };
        let scale = |v: &[f64], c: f64| v.iter().map(|x| c * x).collect::<Vec<_>>();
        prop_assert_eq!(tau(&scale(&p, two), &scale(&q, two)).map_err(err)?, t);
        let ts = tau(&scale(&p, c), &scale(&q, c)).map_err(err)?;
        prop_assert!((ts - t).abs() <= 1e-10 * (1.0 + t), "{ts} vs {t}");

        let (s, co) = phi.sin_cos();
        let pr: Vec<f64> = p.iter().zip(&q).map(|(a, b)| co * a - s * b).collect();
        let qr: Vec<f64> = p.iter().zip(&q).map(|(a, b)| s * a + co * b).collect();
        let tr = tau(&pr, &qr).map_err(err)?;
        prop_assert!((tr - t).abs() <= 1e-10 * (1.0 + t), "{tr} vs {t}");
        Ok(())
    })
}

fn index_set(r: &autossa::GroupingResult) -> BTreeSet<Component> {
    r.selected.iter().copied().collect()
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A larger threshold never selects more: low-frequency (1D and 2D) and
/// periodogram methods.
pub fn threshold_monotonicity(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (vectors(1..7, 3..40), 0.0f64..0.5, 0.0f64..0.5, 0.0f64..1.0, 0.0f64..1.0);
    run(runner, strategy, |(vs, w1, w2, ta, tb)| {
        let (lo, hi) = ordered(ta, tb);
        let (w1, w2) = ordered(w1, w2);
        let items: Vec<(usize, Vec<f64>)> = vs.iter().cloned().enumerate().collect();
        let trend = |t| identify_trend(&items, &TrendIdConfig { omega1: w1, omega2: w2, ..TrendIdConfig::low_frequency(0.0, t) });
        let (a, b) = (trend(lo).map_err(err)?, trend(hi).map_err(err)?);
        prop_assert!(index_set(&b).is_subset(&index_set(&a)));

        let freq = |t| identify_periodic_freq(&vs, &FreqIdConfig::new(t));
        let (a, b) = (freq(lo).map_err(err)?, freq(hi).map_err(err)?);
        prop_assert!(index_set(&b).is_subset(&index_set(&a)));
        Ok(())
    })?;

    let strategy = (prop::collection::vec(field(2..8, 2..8), 1..5), 0.0f64..0.5, 0.0f64..0.5, 0.0f64..1.0, 0.0f64..1.0);
    run(runner, strategy, |(fs, w1, w2, ta, tb)| {
        let (lo, hi) = ordered(ta, tb);
        let items: Vec<(usize, DMatrix<f64>)> = fs.into_iter().enumerate().collect();
        let a = identify_trend_2d(&items, w1, w2, lo).map_err(err)?;
        let b = identify_trend_2d(&items, w1, w2, hi).map_err(err)?;
        prop_assert!(index_set(&b).is_subset(&index_set(&a)));
        Ok(())
    })
}

/// Multichannel methods on one channel give exactly the 1D results.
pub fn mssa_reduction(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (vectors(2..7, 3..30), 0.0f64..0.5, 0.0f64..1.0, 0.0f64..0.2, 0usize..4);
    run(runner, strategy, |(vs, w, t, t0, m)| {
        let parts: Vec<FactorVectorParts> = vs
            .iter()
            .map(|v| FactorVectorParts::from_parts(vec![v.clone()]))
            .collect();
        let items: Vec<(usize, Vec<f64>)> = vs.iter().cloned().enumerate().collect();
        let part_items: Vec<(usize, FactorVectorParts)> = parts.iter().cloned().enumerate().collect();

        let cfg = TrendIdConfig::low_frequency(w, t);
        prop_assert_eq!(
            identify_trend(&items, &cfg).map_err(err)?,
            identify_trend_mssa_right(&part_items, &cfg).map_err(err)?
        );
        let cfg = FreqIdConfig::new(t);
        prop_assert_eq!(
            identify_periodic_freq(&vs, &cfg).map_err(err)?,
            identify_periodic_freq_mssa_right(&parts, &cfg).map_err(err)?
        );
        let m = m.min(vs.len() / 2);
        for cfg in [AngleIdConfig::threshold(t0), AngleIdConfig::count(m)] {
            let one = identify_periodic_angle(&vs, &cfg);
            let multi = identify_periodic_angle_mssa_right(&parts, &cfg);
            prop_assert_eq!(one.map_err(err)?, multi.map_err(err)?);
        }
        Ok(())
    })?;

    let series = (12usize..40).prop_flat_map(|n| (vector(n..n + 1), 2..n));
    run(runner, series, |(x, l)| {
        let one = decompose(&embed_1d(&TimeSeries::new(x.clone()).map_err(err)?, l).map_err(err)?, DEFAULT_RANK_TOL)
            .map_err(err)?;
        let ms = MultiSeries::from_vecs(vec![x]).map_err(err)?;
        let multi = decompose(&embed_mssa(&ms, l).map_err(err)?, DEFAULT_RANK_TOL).map_err(err)?;
        prop_assert_eq!(one.triples(), multi.triples());
        let group = Group::leading(one.rank());
        for ((_, parts), v) in right_parts(&multi, &group).map_err(err)?.iter().zip(one.right_vectors()) {
            prop_assert_eq!(parts.parts()[0].as_slice(), v);
        }
        Ok(())
    })
}

/// Count mode on a noiseless sum of `m <= 3` exact-grid harmonics with
/// `r = 2m` returns the pairs that a direct periodogram check identifies as
/// spanning a single harmonic.
pub fn count_mode_bruteforce(runner: &mut TestRunner) -> Result<(), String> {
    const L: usize = 24;
    const N: usize = 2 * L - 1;
    let strategy = (1usize..=3).prop_flat_map(|m| {
        (
            prop::sample::subsequence((1..L / 2).collect::<Vec<usize>>(), m).prop_shuffle(),
            prop::collection::vec(0.0f64..std::f64::consts::TAU, m),
            0.9f64..1.1,
        )
    });
    run(runner, strategy, |(ks, phases, jitter)| {
        let m = ks.len();
        let mut x = vec![0.0; N];
        for (j, (&k, &phi)) in ks.iter().zip(&phases).enumerate() {
            let a = (3 - j) as f64 * jitter.powi(j as i32);
            for (xi, h) in x.iter_mut().zip(em_harmonic(N, a, 0.0, k as f64 / L as f64, phi)) {
                *xi += h;
            }
        }
        let dec = decompose(&embed_1d(&TimeSeries::new(x).map_err(err)?, L).map_err(err)?, DEFAULT_RANK_TOL)
            .map_err(err)?;
        prop_assert_eq!(dec.rank(), 2 * m);
        let u = &dec.left_vectors()[..2 * m];

        let peak = |v: &[f64]| -> (usize, f64) {
            let p = direct_periodogram(v);
            let norm: f64 = v.iter().map(|x| x * x).sum();
            let (k, best) = p
                .iter()
                .enumerate()
                .fold((0, 0.0), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
            (k, best / norm)
        };
        let mut truth = BTreeSet::new();
        for i in 0..2 * m - 1 {
            let (ka, sa) = peak(u[i]);
            let (kb, sb) = peak(u[i + 1]);
            if ka == kb && sa > 0.999 && sb > 0.999 {
                truth.insert(Component::Pair(i, i + 1));
            }
        }
        prop_assert_eq!(truth.len(), m);
        let got = identify_periodic_angle(u, &AngleIdConfig::count(m)).map_err(err)?;
        prop_assert_eq!(index_set(&got), truth);
        Ok(())
    })
}
