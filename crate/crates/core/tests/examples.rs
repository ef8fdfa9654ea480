//! Worked examples for every identification method on small synthetic
//! inputs with known structure.

mod common;

use autossa::experiments::gaussian_noise;
use autossa::field::{candidates_2d, identify_trend_2d};
use autossa::grouping::{
    candidates, identify_periodic_angle, identify_periodic_freq, identify_trend, tau, tau_norm,
    AngleIdConfig, Component, FreqIdConfig, SourceKind, TrendIdConfig,
};
use autossa::mssa::{
    elementary_parts, identify_periodic_angle_mssa_left, identify_periodic_angle_mssa_right,
    identify_periodic_freq_mssa_left, identify_periodic_freq_mssa_right,
    identify_trend_mssa_left, identify_trend_mssa_right, right_parts,
};
use autossa::{
    decompose, embed_1d, embed_2d, embed_mssa, Decomposition, FactorVectorParts, Field2D, Group,
    MultiSeries, TimeSeries, DEFAULT_RANK_TOL,
};
use common::em_harmonic;

fn dec_1d(x: Vec<f64>, l: usize) -> Decomposition {
    decompose(&embed_1d(&TimeSeries::new(x).unwrap(), l).unwrap(), DEFAULT_RANK_TOL).unwrap()
}

fn dec_mssa(channels: Vec<Vec<f64>>, l: usize) -> Decomposition {
    let ms = MultiSeries::from_vecs(channels).unwrap();
    decompose(&embed_mssa(&ms, l).unwrap(), DEFAULT_RANK_TOL).unwrap()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[test]
fn trend_vector_passes_and_harmonic_fails() {
    let trend: Vec<f64> = (1..=99).map(|n| (0.01 * n as f64).exp()).collect();
    let dec = dec_1d(trend, 50);
    let c = candidates(&dec, SourceKind::Eigen, &Group::leading(1)).unwrap();
    let r = identify_trend(&c, &TrendIdConfig::low_frequency(0.05, 0.9)).unwrap();
    assert_eq!(r.selected, vec![Component::Single(0)]);
    assert!(r.measures[0].value > 0.9);

    let dec = dec_1d(em_harmonic(99, 1.0, 0.0, 0.2, 0.0), 50);
    for source in [SourceKind::Eigen, SourceKind::Factor, SourceKind::Recon] {
        let c = candidates(&dec, source, &Group::leading(2)).unwrap();
        let r = identify_trend(&c, &TrendIdConfig::low_frequency(0.05, 0.9)).unwrap();
        assert!(r.selected.is_empty(), "{source:?}");
        let all = identify_trend(&c, &TrendIdConfig::low_frequency(0.05, 0.0)).unwrap();
        assert_eq!(all.selected.len(), 2);
    }
}

#[test]
fn periodogram_method_on_exact_grid_harmonic() {
    let dec = dec_1d(em_harmonic(99, 1.0, 0.0, 0.2, 0.0), 50);
    let r = identify_periodic_freq(&dec.left_vectors(), &FreqIdConfig::new(0.9)).unwrap();
    assert_eq!(r.selected, vec![Component::Pair(0, 1)]);
    assert!((r.measures[0].value - 1.0).abs() < 1e-10);
    assert_eq!(r.peaks[0], vec![Some(0.2)]);
}

#[test]
fn periodogram_method_finds_alternating_single() {
    let x: Vec<f64> = (1..=41).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let dec = dec_1d(x, 20);
    assert_eq!(dec.rank(), 1);
    let r = identify_periodic_freq(&dec.left_vectors(), &FreqIdConfig::new(0.9)).unwrap();
    assert_eq!(r.selected, vec![Component::Single(0)]);
}

#[test]
fn periodogram_method_rejects_noise_vectors() {
    let mut hits = 0;
    for seed in 0..100 {
        let vectors: Vec<Vec<f64>> = (0..10).map(|i| gaussian_noise(seed * 16 + i, 50)).collect();
        let r = identify_periodic_freq(&vectors, &FreqIdConfig::new(0.9)).unwrap();
        hits += usize::from(!r.selected.is_empty());
    }
    assert!(hits <= 1, "{hits} of 100 noise sets produced a selection");
}

#[test]
fn angle_measure_examples() {
    let dec = dec_1d(em_harmonic(99, 1.0, 0.0, 0.2, 0.0), 50);
    assert!(tau(&dec.triple(0).u, &dec.triple(1).u).unwrap() < 1e-10);

    // slowly turning pair: mean angle 0.01 with jitter 0.005
    let steps: Vec<f64> = (0..40).map(|k| 0.01 + if k % 2 == 0 { 0.005 } else { -0.005 }).collect();
    let mut angle = 0.0f64;
    let (mut p, mut q) = (vec![1.0], vec![0.0]);
    for s in &steps {
        angle += s;
        p.push(angle.cos());
        q.push(angle.sin());
    }
    let t = tau(&p, &q).unwrap();
    let tn = tau_norm(&p, &q).unwrap();
    assert!((tn / t - 1.0 / 0.01f64.powi(2)).abs() < 1e-3 / 0.01f64.powi(2));
}

#[test]
fn angle_method_picks_harmonic_over_trend() {
    // a linear trend has rank two, so r = 4 covers trend and harmonic
    let trend: Vec<f64> = (1..=99).map(|n| 0.3 + 0.004 * n as f64).collect();
    let x = add(&em_harmonic(99, 1.0, 0.0, 0.2, 0.4), &trend);
    let dec = dec_1d(x, 50);
    let u = dec.left_vectors();
    let r = identify_periodic_angle(&u[..4], &AngleIdConfig::count(1)).unwrap();
    let pair = r.selected[0];
    let (i, j) = match pair {
        Component::Pair(i, j) => (i, j),
        Component::Single(_) => panic!("angle method returned a single"),
    };
    // the harmonic pair carries the two equal-sized singular values
    assert!((dec.triple(i).sigma / dec.triple(j).sigma - 1.0).abs() < 0.05);

    let dec = dec_1d(em_harmonic(99, 1.0, 0.0, 0.2, 0.0), 50);
    let u = dec.left_vectors();
    let r = identify_periodic_angle(&u, &AngleIdConfig::threshold(0.01)).unwrap();
    assert_eq!(r.selected, vec![Component::Pair(0, 1)]);
    let r = identify_periodic_angle(&u, &AngleIdConfig::threshold(0.0)).unwrap();
    assert!(r.selected.is_empty());
}

fn two_channel(n: usize, omega: f64) -> Vec<Vec<f64>> {
    vec![
        em_harmonic(n, 1.0, 0.0, omega, 0.0),
        em_harmonic(n, 2.0, 0.0, omega, 1.1),
    ]
}

#[test]
fn mssa_harmonic_found_by_all_variants() {
    let dec = dec_mssa(two_channel(99, 0.2), 50);
    assert_eq!(dec.rank(), 2);
    let group = Group::leading(2);
    let right: Vec<FactorVectorParts> = right_parts(&dec, &group).unwrap().into_iter().map(|(_, p)| p).collect();
    let want = vec![Component::Pair(0, 1)];
    let u = dec.left_vectors();
    assert_eq!(identify_periodic_freq_mssa_left(&u, &FreqIdConfig::new(0.9)).unwrap().selected, want);
    assert_eq!(identify_periodic_freq_mssa_right(&right, &FreqIdConfig::new(0.9)).unwrap().selected, want);
    assert_eq!(identify_periodic_angle_mssa_left(&u, &AngleIdConfig::count(1)).unwrap().selected, want);
    assert_eq!(identify_periodic_angle_mssa_right(&right, &AngleIdConfig::count(1)).unwrap().selected, want);
    assert!(identify_periodic_angle_mssa_left(&u, &AngleIdConfig::threshold(0.0)).unwrap().selected.is_empty());
}

#[test]
fn mssa_common_trend_in_left_vector() {
    let channels = vec![
        (1..=99).map(|n| (0.01 * n as f64).exp()).collect(),
        (1..=99).map(|n| 2.0 * (0.01 * n as f64).exp()).collect(),
    ];
    let dec = dec_mssa(channels, 50);
    let c = candidates(&dec, SourceKind::Eigen, &Group::leading(1)).unwrap();
    let r = identify_trend_mssa_left(&c, &TrendIdConfig::low_frequency(0.05, 0.9)).unwrap();
    assert_eq!(r.selected, vec![Component::Single(0)]);
}

#[test]
fn mssa_trend_in_one_channel_found_through_max() {
    let channels = vec![
        em_harmonic(99, 1.0, 0.0, 0.2, 0.0),
        (1..=99).map(|n| 3.0 + 0.0 * n as f64).collect(),
    ];
    let dec = dec_mssa(channels, 50);
    let group = Group::leading(dec.rank());
    let items = right_parts(&dec, &group).unwrap();
    let cfg = TrendIdConfig::low_frequency(0.05, 0.9);
    let r = identify_trend_mssa_right(&items, &cfg).unwrap();
    // the constant channel dominates the first component
    assert_eq!(r.selected, vec![Component::Single(0)]);
    let recon = elementary_parts(&dec, &group).unwrap();
    let r = identify_trend_mssa_right(&recon, &cfg).unwrap();
    assert_eq!(r.selected, vec![Component::Single(0)]);

    // a pure harmonic in both channels is excluded
    let dec = dec_mssa(two_channel(99, 0.2), 50);
    let items = right_parts(&dec, &Group::leading(2)).unwrap();
    assert!(identify_trend_mssa_right(&items, &cfg).unwrap().selected.is_empty());
}

#[test]
fn mssa_harmonic_in_one_channel() {
    let noise = gaussian_noise(5, 99).iter().map(|v| 0.01 * v).collect::<Vec<_>>();
    let channels = vec![em_harmonic(99, 1.0, 0.0, 0.2, 0.3), noise];
    let dec = dec_mssa(channels, 50);
    let right: Vec<FactorVectorParts> = right_parts(&dec, &Group::leading(4))
        .unwrap()
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let r = identify_periodic_freq_mssa_right(&right, &FreqIdConfig::new(0.9)).unwrap();
    assert!(r.selected.contains(&Component::Pair(0, 1)));
    let r = identify_periodic_angle_mssa_right(&right, &AngleIdConfig::count(1)).unwrap();
    assert_eq!(r.selected, vec![Component::Pair(0, 1)]);
}

#[test]
fn mssa_nyquist_single() {
    let alt = |a: f64| (1..=41).map(|n| if n % 2 == 0 { a } else { -a }).collect::<Vec<f64>>();
    let dec = dec_mssa(vec![alt(1.0), alt(2.0)], 20);
    assert_eq!(dec.rank(), 1);
    let right: Vec<FactorVectorParts> = right_parts(&dec, &Group::leading(1))
        .unwrap()
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let r = identify_periodic_freq_mssa_right(&right, &FreqIdConfig::new(0.9)).unwrap();
    assert_eq!(r.selected, vec![Component::Single(0)]);
}

#[test]
fn field_bump_identified_checkerboard_excluded() {
    let bump = Field2D::from_fn(30, 30, |i, j| {
        let (x, y) = (i as f64 - 14.5, j as f64 - 14.5);
        (-(x * x + y * y) / 200.0).exp()
    })
    .unwrap();
    let dec = decompose(&embed_2d(&bump, 10, 10).unwrap(), DEFAULT_RANK_TOL).unwrap();
    let c = candidates_2d(&dec, SourceKind::Eigen, &Group::leading(1)).unwrap();
    let r = identify_trend_2d(&c, 0.1, 0.1, 0.9).unwrap();
    assert_eq!(r.selected, vec![Component::Single(0)]);

    let tau = std::f64::consts::TAU;
    let check = Field2D::from_fn(20, 20, |i, j| (tau * i as f64 / 4.0).cos() * (tau * j as f64 / 4.0).cos()).unwrap();
    let dec = decompose(&embed_2d(&check, 8, 8).unwrap(), DEFAULT_RANK_TOL).unwrap();
    for source in [SourceKind::Eigen, SourceKind::Factor, SourceKind::Recon] {
        let c = candidates_2d(&dec, source, &Group::leading(dec.rank())).unwrap();
        let r = identify_trend_2d(&c, 0.1, 0.1, 0.9).unwrap();
        assert!(r.selected.is_empty(), "{source:?}");
        let all = identify_trend_2d(&c, 0.1, 0.1, 0.0).unwrap();
        assert_eq!(all.selected.len(), c.len());
    }
}
