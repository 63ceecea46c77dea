//! Mutual information and marginals checked against routes that do not share
//! the Simpson code path: values frozen from an arbitrary-precision
//! tanh-sinh computation, a composite Gauss–Legendre integrator written here,
//! and modified-Bessel closed forms for the θ-averaged probabilities.

use std::f64::consts::PI;

use oamfid_core::fidelity::{
    fidelity, marginal_outcome_probability, FidelityOptions, PriorDensity, QuadratureGrid,
};
use oamfid_core::probmodels::{noisy_outcome_probability, outcome_probability};
use oamfid_core::{InterferometerConfig, NoiseModel, Outcome, Strategy};

fn cfg(n: f64, l: u32) -> InterferometerConfig {
    InterferometerConfig::new(n, l).unwrap()
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// ∫_{−π}^{π} f with breakpoints at every multiple of π/(2ℓ), where the
/// integrand's log singularities sit.
fn gl_integrate(f: &dyn Fn(f64) -> f64, l: u32) -> f64 {
    let rule = gauss_legendre(24);
    let pieces = 4 * l as usize * 32;
    let h = 2.0 * PI / pieces as f64;
    (0..pieces)
        .map(|j| {
            let a = -PI + j as f64 * h;
            let mid = a + 0.5 * h;
            rule.iter().map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

fn oracle_information(strategy: Strategy, config: &InterferometerConfig, noise: &NoiseModel) -> f64 {
    let l = config.quantum_number();
    let prior = 1.0 / (2.0 * PI);
    strategy
        .outcomes()
        .iter()
        .map(|&o| {
            let p = |t: f64| noisy_outcome_probability(strategy, o, t, config, noise).unwrap();
            let marginal = gl_integrate(&|t| p(t) * prior, l);
            gl_integrate(
                &|t| {
                    let q = p(t);
                    if q > 0.0 {
                        prior * q * (q / marginal).log2()
                    } else {
                        0.0
                    }
                },
                l,
            )
        })
        .sum()
}

/// e^{−x} I₀(x).
fn scaled_bessel_i0(x: f64) -> f64 {
    if x < 25.0 {
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 1..200 {
            term *= (x / 2.0) * (x / 2.0) / (k * k) as f64;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        // asymptotic series Σ ((2k−1)!!)² / (k! (8x)^k)
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 1..30 {
            term *= ((2 * k - 1) * (2 * k - 1)) as f64 / (k as f64 * 8.0 * x);
            sum += term;
            if term.abs() < 1e-17 {
                break;
            }
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

// H in bits at ℓ = 1, ideal detection, tanh-sinh at 30 digits.
const FROZEN: [(f64, f64, f64); 4] = [
    (1.0, 0.18494052761402093, 0.10406348371107622),
    (3.0, 0.3776128557520357, 0.10222986987322741),
    (5.0, 0.43586975129471386, 0.087100733568137495),
    (20.0, 0.37682508686047603, 0.049451098743757966),
];

#[test]
fn frozen_high_precision_values() {
    let opts = FidelityOptions::default();
    for (n, z, parity) in FROZEN {
        let hz = fidelity(Strategy::Z, &cfg(n, 1), &NoiseModel::identity(), &opts).unwrap();
        let hp = fidelity(Strategy::Parity, &cfg(n, 1), &NoiseModel::identity(), &opts).unwrap();
        assert!((hz.bits - z).abs() < 1e-8, "Z N={n}: {} vs {z}", hz.bits);
        assert!((hp.bits - parity).abs() < 1e-8, "parity N={n}: {} vs {parity}", hp.bits);
        assert!((hz.bits - z).abs() <= hz.estimated_error.max(1e-12) * 2.0);
    }
    let eta = fidelity(Strategy::Z, &cfg(3.0, 1), &NoiseModel::with_efficiency(0.5).unwrap(), &opts).unwrap();
    assert!((eta.bits - 0.25235597268571237).abs() < 1e-8);
    let dark = fidelity(Strategy::Z, &cfg(3.0, 1), &NoiseModel::with_dark_rate(0.01).unwrap(), &opts).unwrap();
    assert!((dark.bits - 0.36848997669534523).abs() < 1e-8);
}

#[test]
fn gauss_legendre_oracle_reproduces_frozen_values() {
    for (n, z, parity) in FROZEN {
        let oz = oracle_information(Strategy::Z, &cfg(n, 1), &NoiseModel::identity());
        let op = oracle_information(Strategy::Parity, &cfg(n, 1), &NoiseModel::identity());
        assert!((oz - z).abs() < 1e-10, "{n}: {oz} vs {z}");
        assert!((op - parity).abs() < 1e-10, "{n}: {op} vs {parity}");
    }
}

#[test]
fn simpson_matches_gauss_legendre_oracle() {
    let cases = [
        (Strategy::Z, 0.5, 2, NoiseModel::identity()),
        (Strategy::Z, 7.5, 3, NoiseModel::identity()),
        (Strategy::Parity, 12.0, 5, NoiseModel::identity()),
        (Strategy::Parity, 2.2, 4, NoiseModel::identity()),
        (Strategy::Z, 3.0, 1, NoiseModel::lossy(0.3, 0.9).unwrap()),
        (Strategy::Z, 6.0, 2, NoiseModel::new(0.8, 0.8, 0.6, 1e-3).unwrap()),
    ];
    for (s, n, l, noise) in cases {
        let c = cfg(n, l);
        let h = fidelity(s, &c, &noise, &FidelityOptions::default()).unwrap();
        let oracle = oracle_information(s, &c, &noise);
        assert!((h.bits - oracle).abs() < 1e-8, "{s} N={n} l={l}: {} vs {oracle}", h.bits);
    }
}

#[test]
fn marginals_match_bessel_closed_forms() {
    let grid = QuadratureGrid::full_circle(12).unwrap();
    for (n, l) in [(0.5, 1), (3.0, 2), (20.0, 3), (1000.0, 1)] {
        let c = cfg(n, l);
        let z = marginal_outcome_probability(Outcome::Zero, Strategy::Z, &c, &NoiseModel::identity(), &PriorDensity::Uniform, &grid)
            .unwrap();
        let even = marginal_outcome_probability(Outcome::Even, Strategy::Parity, &c, &NoiseModel::identity(), &PriorDensity::Uniform, &grid)
            .unwrap();
        // ⟨e^{−N sin²}⟩ = e^{−N/2} I₀(N/2)
        assert!((z - scaled_bessel_i0(n / 2.0)).abs() < 1e-10, "N={n}: {z}");
        assert!((even - 0.5 * (1.0 + scaled_bessel_i0(n))).abs() < 1e-10, "N={n}: {even}");
    }
    // the parity marginal approaches ½ only like 1/√(8πN)
    let even = marginal_outcome_probability(Outcome::Even, Strategy::Parity, &cfg(1000.0, 1), &NoiseModel::identity(), &PriorDensity::Uniform, &grid)
        .unwrap();
    assert!((even - 0.50631).abs() < 1e-5);
}

#[test]
fn large_photon_number_values() {
    let opts = FidelityOptions::default();
    for l in [1, 2, 3] {
        let z = fidelity(Strategy::Z, &cfg(1000.0, l), &NoiseModel::identity(), &opts).unwrap();
        let p = fidelity(Strategy::Parity, &cfg(1000.0, l), &NoiseModel::identity(), &opts).unwrap();
        assert!((z.bits - 0.1053).abs() < 0.002, "l={l}: {}", z.bits);
        assert!((p.bits - 7.68e-3).abs() < 2e-4, "l={l}: {}", p.bits);
    }
}

#[test]
fn information_does_not_depend_on_l() {
    let opts = FidelityOptions::default();
    for n in [0.7, 3.0, 12.0] {
        for s in Strategy::ALL {
            let base = fidelity(s, &cfg(n, 1), &NoiseModel::identity(), &opts).unwrap().bits;
            for k in [2, 3, 5] {
                let h = fidelity(s, &cfg(n, k), &NoiseModel::identity(), &opts).unwrap().bits;
                assert!((h - base).abs() < 1e-9, "{s} N={n} l={k}: {}", (h - base).abs());
            }
        }
    }
}

#[test]
fn swapping_paths_preserves_information() {
    let opts = FidelityOptions::default();
    for (ta, tb, l) in [(0.2, 0.9, 1), (1.0, 0.35, 2), (0.6, 0.0, 3)] {
        let noise = NoiseModel::lossy(ta, tb).unwrap();
        let a = fidelity(Strategy::Z, &cfg(3.0, l), &noise, &opts).unwrap().bits;
        let b = fidelity(Strategy::Z, &cfg(3.0, l), &noise.swapped(), &opts).unwrap().bits;
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn refinement_stays_within_estimated_error() {
    for (s, n, l) in [(Strategy::Z, 1.0, 1), (Strategy::Z, 20.0, 3), (Strategy::Parity, 5.0, 2), (Strategy::Z, 1000.0, 1)] {
        let coarse = fidelity(s, &cfg(n, l), &NoiseModel::identity(), &FidelityOptions::default()).unwrap();
        let fine = fidelity(
            s,
            &cfg(n, l),
            &NoiseModel::identity(),
            &FidelityOptions {
                grid_exponent: 13,
                ..Default::default()
            },
        )
        .unwrap();
        let change = (fine.bits - coarse.bits).abs();
        assert!(change <= coarse.estimated_error, "{s} N={n}: change {change:e} > {:e}", coarse.estimated_error);
    }
}

#[test]
fn dark_counts_never_add_information() {
    // zero → nonzero with probability 1 − e^{−r} is a channel on the outcome
    let opts = FidelityOptions::default();
    for n in [0.5, 2.0, 6.0, 15.0, 40.0] {
        let ideal = fidelity(Strategy::Z, &cfg(n, 2), &NoiseModel::identity(), &opts).unwrap();
        for r in [1e-8, 1e-4, 1e-2, 0.5] {
            let noisy = fidelity(Strategy::Z, &cfg(n, 2), &NoiseModel::with_dark_rate(r).unwrap(), &opts).unwrap();
            assert!(noisy.bits <= ideal.bits + 1e-9, "N={n} r={r}");
        }
    }
}

#[test]
fn loss_never_adds_information_below_the_optimum() {
    let opts = FidelityOptions::default();
    let noises = [
        NoiseModel::lossy(0.9, 0.9).unwrap(),
        NoiseModel::lossy(0.4, 1.0).unwrap(),
        NoiseModel::with_efficiency(0.3).unwrap(),
        NoiseModel::new(0.7, 0.7, 0.8, 1e-3).unwrap(),
    ];
    for n in [0.5, 2.0, 4.0] {
        let ideal = fidelity(Strategy::Z, &cfg(n, 2), &NoiseModel::identity(), &opts).unwrap();
        for noise in &noises {
            let noisy = fidelity(Strategy::Z, &cfg(n, 2), noise, &opts).unwrap();
            assert!(noisy.bits <= ideal.bits + 1e-9, "N={n} {noise:?}");
        }
    }
}

#[test]
fn loss_past_the_optimum_can_add_information() {
    // H(N) falls beyond N ≈ 7, and uniform loss only rescales N
    let opts = FidelityOptions::default();
    let ideal = fidelity(Strategy::Z, &cfg(20.0, 1), &NoiseModel::identity(), &opts).unwrap();
    let lossy = fidelity(Strategy::Z, &cfg(20.0, 1), &NoiseModel::lossy(0.25, 0.25).unwrap(), &opts).unwrap();
    let rescaled = fidelity(Strategy::Z, &cfg(5.0, 1), &NoiseModel::identity(), &opts).unwrap();
    assert!((lossy.bits - rescaled.bits).abs() < 1e-12);
    assert!((lossy.bits - FROZEN[2].1).abs() < 1e-8);
    assert!(lossy.bits > ideal.bits + 0.05);
}

#[test]
fn ideal_probabilities_feed_the_integrand() {
    // the noisy dispatcher with identity noise is the ideal model node for node
    let c = cfg(4.0, 3);
    for t in [-2.0, -0.1, 0.0, 0.77] {
        for s in Strategy::ALL {
            for o in s.outcomes() {
                assert_eq!(
                    noisy_outcome_probability(s, o, t, &c, &NoiseModel::identity()).unwrap(),
                    outcome_probability(s, o, t, &c).unwrap()
                );
            }
        }
    }
}
