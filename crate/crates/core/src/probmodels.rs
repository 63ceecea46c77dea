//! Outcome probabilities for Z and parity detection at one output port of an
//! OAM-fed Mach-Zehnder interferometer.
//!
//! The port-B field after the interferometer is a coherent state whose mean
//! photon number is `N sin²(ℓθ)`. Z detection only tells "no click" from
//! "click"; parity detection only reports whether the photon number is even.
//! Noise models cover unequal path transmissivities, detector efficiency and
//! Poissonian dark counts. [`fock_oracle_probability`] recomputes the ideal
//! probabilities by brute force in a truncated two-mode Fock basis.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{contract, domain, Error, Result};

/// Coherent-state input: mean photon number `N = |α_ℓ|²` and OAM quantum number `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    mean_photons: f64,
    quantum_number: u32,
}

impl InterferometerConfig {
    pub fn new(mean_photons: f64, quantum_number: u32) -> Result<Self> {
        if !mean_photons.is_finite() || mean_photons < 0.0 {
            return Err(domain(format!(
                "mean photon number must be finite and non-negative, got {mean_photons}"
            )));
        }
        if quantum_number == 0 {
            return Err(domain("quantum number must be a positive integer"));
        }
        Ok(Self {
            mean_photons,
            quantum_number,
        })
    }

    pub fn mean_photons(&self) -> f64 {
        self.mean_photons
    }

    pub fn quantum_number(&self) -> u32 {
        self.quantum_number
    }

    /// Same ℓ, different photon number.
    pub fn with_mean_photons(&self, mean_photons: f64) -> Result<Self> {
        Self::new(mean_photons, self.quantum_number)
    }

    /// Mean photon number reaching port B at angle `theta`.
    pub fn port_b_mean(&self, theta: f64) -> f64 {
        self.mean_photons * sin_squared(self.quantum_number, theta)
    }

    /// Fringe period in θ of every outcome probability, `π/ℓ`.
    pub fn period(&self) -> f64 {
        std::f64::consts::PI / f64::from(self.quantum_number)
    }
}

/// Path transmissivities, detector efficiency and dark-count rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    t_a: f64,
    t_b: f64,
    efficiency: f64,
    dark_rate: f64,
}

impl NoiseModel {
    pub fn new(t_a: f64, t_b: f64, efficiency: f64, dark_rate: f64) -> Result<Self> {
        check_transmissivity("t_a", t_a)?;
        check_transmissivity("t_b", t_b)?;
        check_efficiency(efficiency)?;
        check_dark_rate(dark_rate)?;
        Ok(Self {
            t_a,
            t_b,
            efficiency,
            dark_rate,
        })
    }

    /// No loss, unit efficiency, no dark counts.
    pub const fn identity() -> Self {
        Self {
            t_a: 1.0,
            t_b: 1.0,
            efficiency: 1.0,
            dark_rate: 0.0,
        }
    }

    pub fn lossy(t_a: f64, t_b: f64) -> Result<Self> {
        Self::new(t_a, t_b, 1.0, 0.0)
    }

    pub fn with_efficiency(efficiency: f64) -> Result<Self> {
        Self::new(1.0, 1.0, efficiency, 0.0)
    }

    pub fn with_dark_rate(dark_rate: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, dark_rate)
    }

    pub fn t_a(&self) -> f64 {
        self.t_a
    }

    pub fn t_b(&self) -> f64 {
        self.t_b
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn dark_rate(&self) -> f64 {
        self.dark_rate
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Swap the two path transmissivities.
    pub fn swapped(&self) -> Self {
        Self {
            t_a: self.t_b,
            t_b: self.t_a,
            ..*self
        }
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::identity()
    }
}

/// Binary detection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Z,
    Parity,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::Z, Strategy::Parity];

    /// The two outcomes, "dark" outcome first.
    pub fn outcomes(self) -> [Outcome; 2] {
        match self {
            Strategy::Z => [Outcome::Zero, Outcome::Nonzero],
            Strategy::Parity => [Outcome::Even, Outcome::Odd],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Z => "z",
            Strategy::Parity => "parity",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Detection outcome label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Zero,
    Nonzero,
    Even,
    Odd,
}

impl Outcome {
    pub fn strategy(self) -> Strategy {
        match self {
            Outcome::Zero | Outcome::Nonzero => Strategy::Z,
            Outcome::Even | Outcome::Odd => Strategy::Parity,
        }
    }

    pub fn complement(self) -> Outcome {
        match self {
            Outcome::Zero => Outcome::Nonzero,
            Outcome::Nonzero => Outcome::Zero,
            Outcome::Even => Outcome::Odd,
            Outcome::Odd => Outcome::Even,
        }
    }

    /// Zero for Z detection, Even for parity detection.
    fn is_dark(self) -> bool {
        matches!(self, Outcome::Zero | Outcome::Even)
    }

    pub fn name(self) -> &'static str {
        match self {
            Outcome::Zero => "zero",
            Outcome::Nonzero => "nonzero",
            Outcome::Even => "even",
            Outcome::Odd => "odd",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_pair(strategy: Strategy, outcome: Outcome) -> Result<()> {
    if outcome.strategy() != strategy {
        return Err(contract(format!(
            "outcome `{outcome}` does not belong to strategy `{strategy}`"
        )));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() {
        return Err(domain(format!("angle must be finite, got {theta}")));
    }
    Ok(())
}

fn check_transmissivity(name: &str, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(format!("{name} must lie in [0, 1], got {t}")));
    }
    Ok(())
}

fn check_efficiency(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(domain(format!("efficiency must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

fn check_dark_rate(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(domain(format!(
            "dark-count rate must be finite and non-negative, got {r}"
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn sin_squared(quantum_number: u32, theta: f64) -> f64 {
    let s = (f64::from(quantum_number) * theta).sin();
    s * s
}

/// Probability of the dark outcome (Zero or Even) given the port-B mean.
#[inline]
fn dark_outcome(strategy: Strategy, port_mean: f64) -> f64 {
    match strategy {
        Strategy::Z => (-port_mean).exp(),
        Strategy::Parity => 0.5 * (1.0 + (-2.0 * port_mean).exp()),
    }
}

/// Ideal outcome probability `p(outcome | θ)`.
///
/// Z detection: `p(zero|θ) = exp[−N sin²(ℓθ)]`. Parity detection:
/// `p(even|θ) = ½{1 + exp[−2N sin²(ℓθ)]}`. The other outcome is the complement.
pub fn outcome_probability(
    strategy: Strategy,
    outcome: Outcome,
    theta: f64,
    config: &InterferometerConfig,
) -> Result<f64> {
    check_pair(strategy, outcome)?;
    check_theta(theta)?;
    let dark = dark_outcome(strategy, config.port_b_mean(theta));
    Ok(if outcome.is_dark() { dark } else { 1.0 - dark })
}

/// Zero-count probability with path transmissivities `t_a`, `t_b`.
///
/// Uses `|√T_A e^{−iℓθ} − √T_B e^{iℓθ}|² = T_A + T_B − 2√(T_A T_B) cos(2ℓθ)`.
pub fn lossy_zero_probability(
    theta: f64,
    config: &InterferometerConfig,
    t_a: f64,
    t_b: f64,
) -> Result<f64> {
    check_theta(theta)?;
    check_transmissivity("t_a", t_a)?;
    check_transmissivity("t_b", t_b)?;
    Ok((-0.25 * lossy_modulus_squared(config.quantum_number, theta, t_a, t_b) * config.mean_photons).exp())
}

#[inline]
fn lossy_modulus_squared(quantum_number: u32, theta: f64, t_a: f64, t_b: f64) -> f64 {
    let c = (2.0 * f64::from(quantum_number) * theta).cos();
    // rounding can push the expansion a hair below zero at the balanced dark fringe
    (t_a + t_b - 2.0 * (t_a * t_b).sqrt() * c).max(0.0)
}

/// Zero-count probability behind a detector of efficiency `η`: `exp[−η N sin²(ℓθ)]`.
pub fn efficiency_zero_probability(
    theta: f64,
    config: &InterferometerConfig,
    efficiency: f64,
) -> Result<f64> {
    check_theta(theta)?;
    check_efficiency(efficiency)?;
    Ok((-efficiency * config.port_b_mean(theta)).exp())
}

/// Poisson probability of `n` dark counts at mean rate `r`.
pub fn dark_count_pmf(n: u64, dark_rate: f64) -> Result<f64> {
    check_dark_rate(dark_rate)?;
    if dark_rate == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let log_pmf = -dark_rate + n as f64 * dark_rate.ln() - ln_factorial(n);
    Ok(log_pmf.exp())
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Zero-count probability with dark counts: `p(zero|θ) · P_dark(0) = exp[−N sin²(ℓθ) − r]`.
pub fn dark_zero_probability(
    theta: f64,
    config: &InterferometerConfig,
    dark_rate: f64,
) -> Result<f64> {
    let signal = outcome_probability(Strategy::Z, Outcome::Zero, theta, config)?;
    Ok(signal * dark_count_pmf(0, dark_rate)?)
}

/// Zero-count probability with equal path loss `T`, efficiency `η` and dark rate `r`:
/// `exp[−T η N sin²(ℓθ) − r]`.
///
/// Only defined for `t_a == t_b`; unequal losses go through [`lossy_zero_probability`].
pub fn combined_zero_probability(
    theta: f64,
    config: &InterferometerConfig,
    noise: &NoiseModel,
) -> Result<f64> {
    check_theta(theta)?;
    if noise.t_a != noise.t_b {
        return Err(contract(format!(
            "combined model needs t_a == t_b (got {} and {}); use lossy_zero_probability for unequal path losses",
            noise.t_a, noise.t_b
        )));
    }
    let effective = noise.t_a * noise.efficiency * config.mean_photons;
    Ok((-effective * sin_squared(config.quantum_number, theta) - noise.dark_rate).exp())
}

/// Outcome probability under a noise model.
///
/// Z detection supports every [`NoiseModel`] the individual models cover:
/// equal path loss with any efficiency and dark rate (combined model), or
/// unequal path loss with unit efficiency and no dark counts (lossy model).
/// Parity detection has no noise model and requires the identity.
pub fn noisy_outcome_probability(
    strategy: Strategy,
    outcome: Outcome,
    theta: f64,
    config: &InterferometerConfig,
    noise: &NoiseModel,
) -> Result<f64> {
    check_pair(strategy, outcome)?;
    check_theta(theta)?;
    let dark = noisy_dark_probability(strategy, theta, config, noise)?;
    Ok(if outcome.is_dark() { dark } else { 1.0 - dark })
}

/// Checks that a strategy/noise combination has a defined model.
pub fn check_noise_supported(strategy: Strategy, noise: &NoiseModel) -> Result<()> {
    match strategy {
        Strategy::Parity if !noise.is_identity() => Err(contract(
            "parity detection is only modelled without noise",
        )),
        Strategy::Z if noise.t_a != noise.t_b && (noise.efficiency != 1.0 || noise.dark_rate != 0.0) => {
            Err(contract(
                "unequal path losses cannot be combined with detector efficiency or dark counts",
            ))
        }
        _ => Ok(()),
    }
}

fn noisy_dark_probability(
    strategy: Strategy,
    theta: f64,
    config: &InterferometerConfig,
    noise: &NoiseModel,
) -> Result<f64> {
    check_noise_supported(strategy, noise)?;
    let l = config.quantum_number;
    Ok(match strategy {
        Strategy::Parity => dark_outcome(Strategy::Parity, config.port_b_mean(theta)),
        Strategy::Z if noise.t_a == noise.t_b => {
            let effective = noise.t_a * noise.efficiency * config.mean_photons;
            (-effective * sin_squared(l, theta) - noise.dark_rate).exp()
        }
        Strategy::Z => {
            (-0.25 * lossy_modulus_squared(l, theta, noise.t_a, noise.t_b) * config.mean_photons).exp()
        }
    })
}

/// Truncation that leaves a Poisson tail below ~1e−12 for mean `mean`.
pub fn default_truncation(mean: f64) -> usize {
    (mean + 10.0 * mean.sqrt() + 20.0).ceil() as usize
}

/// Largest admissible probability mass lost to truncation in the Fock oracle.
pub const FOCK_TAIL_THRESHOLD: f64 = 1e-12;

/// Brute-force outcome probability from the two-mode Fock expansion of the output state.
///
/// Sums `|⟨x, y|ψ⟩|²` over `x, y ≤ truncation`, marginalizes mode A, then
/// reads the port-B photon-number distribution for the requested outcome.
pub fn fock_oracle_probability(
    strategy: Strategy,
    outcome: Outcome,
    theta: f64,
    config: &InterferometerConfig,
    truncation: usize,
) -> Result<f64> {
    check_pair(strategy, outcome)?;
    check_theta(theta)?;
    let n = config.mean_photons;
    let phase = f64::from(config.quantum_number) * theta;
    let (c, s) = (phase.cos(), phase.sin());
    // |i α cos(ℓθ)|² and |i α sin(ℓθ)|²
    let mean_a = n * c * c;
    let mean_b = n * s * s;

    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=truncation).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    let ln_power = |mean: f64, k: usize| -> Option<f64> {
        if k == 0 {
            Some(0.0)
        } else if mean == 0.0 {
            None
        } else {
            Some(k as f64 * mean.ln())
        }
    };

    let mut port_b = vec![0.0; truncation + 1];
    for (y, slot) in port_b.iter_mut().enumerate() {
        let Some(ln_y) = ln_power(mean_b, y) else { continue };
        for x in 0..=truncation {
            let Some(ln_x) = ln_power(mean_a, x) else { continue };
            *slot += (-n + ln_x + ln_y - ln_fact[x] - ln_fact[y]).exp();
        }
    }

    let captured: f64 = port_b.iter().sum();
    let tail = (1.0 - captured).abs();
    if tail > FOCK_TAIL_THRESHOLD {
        return Err(Error::Accuracy {
            message: format!("Fock truncation {truncation} too small for mean photon number {n}"),
            estimate: tail,
            reference: FOCK_TAIL_THRESHOLD,
        });
    }

    let p = match outcome {
        Outcome::Zero => port_b[0],
        Outcome::Nonzero => port_b[1..].iter().sum(),
        Outcome::Even => port_b.iter().step_by(2).sum(),
        Outcome::Odd => port_b.iter().skip(1).step_by(2).sum(),
    };
    Ok(p)
}
