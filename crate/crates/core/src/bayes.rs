//! Bayesian estimation of θ from Z-detection counts.
//!
//! M trials at a fixed angle reduce to the pair (M, k), k the number of zero
//! outcomes, so the posterior on a grid is
//! `p(θ|k) ∝ p(zero|θ)^k p(nonzero|θ)^(M−k) p(θ)`, evaluated in log space and
//! normalized by quadrature.
//!
//! Z detection cannot tell θ from −θ or from θ + π/ℓ, so the full-circle
//! posterior has 2ℓ copies of every peak. Summaries are usually taken on the
//! fundamental branch `[0, π/(2ℓ)]` (shifted by −θ₀ for offset models) where
//! `sin²(ℓθ)` is monotone.

use rand::distr::{Bernoulli, Distribution};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, domain, Error, Result};
use crate::fidelity::{PriorDensity, QuadratureGrid};
use crate::probmodels::{
    check_noise_supported, noisy_outcome_probability, InterferometerConfig, NoiseModel, Outcome,
    Strategy,
};
use crate::signalfit::SignalModel;

/// Identifier of the generator behind every simulated sample.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.9/seed_from_u64";

/// Zero/nonzero counts from `trials` Z-detection trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSample {
    /// Angle the data were taken at, when known.
    pub true_theta: Option<f64>,
    pub trials: u64,
    pub zero_count: u64,
    /// Present for simulated data.
    pub seed: Option<u64>,
}

impl TrialSample {
    /// Recorded counts.
    pub fn recorded(trials: u64, zero_count: u64, true_theta: Option<f64>) -> Result<Self> {
        if zero_count > trials {
            return Err(domain(format!(
                "zero count {zero_count} exceeds trial count {trials}"
            )));
        }
        Ok(Self {
            true_theta,
            trials,
            zero_count,
            seed: None,
        })
    }

    /// Reduces a per-trial stream (`true` = zero outcome) to counts.
    pub fn from_outcomes(outcomes: &[bool], true_theta: Option<f64>) -> Self {
        let zero_count = outcomes.iter().filter(|&&z| z).count() as u64;
        Self {
            true_theta,
            trials: outcomes.len() as u64,
            zero_count,
            seed: None,
        }
    }

    pub fn nonzero_count(&self) -> u64 {
        self.trials - self.zero_count
    }
}

/// `p(zero|θ)` used for simulation and inference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum LikelihoodModel {
    /// `exp[−N sin²(ℓθ)]`.
    Ideal { config: InterferometerConfig },
    /// `exp[−TηN sin²(ℓθ) − r]`, equal path losses.
    Combined {
        config: InterferometerConfig,
        noise: NoiseModel,
    },
    /// `A exp[−N_e sin²(ℓ(θ + θ₀))]`.
    Experimental { signal: SignalModel },
}

impl LikelihoodModel {
    pub fn ideal(config: InterferometerConfig) -> Self {
        Self::Ideal { config }
    }

    pub fn combined(config: InterferometerConfig, noise: NoiseModel) -> Result<Self> {
        if noise.t_a() != noise.t_b() {
            return Err(contract("combined likelihood needs equal path transmissivities"));
        }
        check_noise_supported(Strategy::Z, &noise)?;
        Ok(Self::Combined { config, noise })
    }

    pub fn experimental(signal: SignalModel) -> Self {
        Self::Experimental { signal }
    }

    pub fn quantum_number(&self) -> u32 {
        match self {
            Self::Ideal { config } | Self::Combined { config, .. } => config.quantum_number(),
            Self::Experimental { signal } => signal.quantum_number(),
        }
    }

    fn offset(&self) -> f64 {
        match self {
            Self::Experimental { signal } => signal.offset(),
            _ => 0.0,
        }
    }

    pub fn zero_probability(&self, theta: f64) -> Result<f64> {
        match self {
            Self::Ideal { config } => noisy_outcome_probability(
                Strategy::Z,
                Outcome::Zero,
                theta,
                config,
                &NoiseModel::identity(),
            ),
            Self::Combined { config, noise } => {
                noisy_outcome_probability(Strategy::Z, Outcome::Zero, theta, config, noise)
            }
            Self::Experimental { signal } => {
                if !theta.is_finite() {
                    return Err(domain(format!("angle must be finite, got {theta}")));
                }
                Ok(signal.evaluate(theta))
            }
        }
    }

    /// Interval on which `p(zero|θ)` falls monotonically from its maximum.
    pub fn fundamental_branch(&self) -> (f64, f64) {
        let lo = 0.0 - self.offset();
        (lo, lo + std::f64::consts::PI / (2.0 * f64::from(self.quantum_number())))
    }

    /// Simpson grid with `2^exponent + 1` nodes over the fundamental branch.
    pub fn branch_grid(&self, exponent: u32) -> Result<QuadratureGrid> {
        let (lo, hi) = self.fundamental_branch();
        QuadratureGrid::dyadic(lo, hi, exponent)
    }
}

/// Normalized posterior density on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    pub grid: QuadratureGrid,
    /// Per-node density in 1/radian.
    pub density: Vec<f64>,
    /// `ln ∫ L(θ) p(θ) dθ`.
    pub log_normalizer: f64,
}

impl Posterior {
    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.density)
    }
}

/// Point estimate and credible interval of a posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    /// Highest node; the smallest θ wins ties.
    pub map_theta: f64,
    pub posterior_mean: f64,
    /// Connected piece of the highest-density region that contains the MAP.
    pub hpd_interval: (f64, f64),
    pub level: f64,
    /// Posterior mass inside `hpd_interval`.
    pub hpd_mass: f64,
    /// Number of strict local maxima.
    pub peak_count: usize,
    /// The highest-density region is split and the MAP piece holds less than `level`.
    pub multimodal: bool,
    /// The posterior is flat; the interval is the whole domain.
    pub degenerate: bool,
}

/// Draws `trials` Bernoulli trials at `true_theta` from `model`.
pub fn simulate_trials(true_theta: f64, trials: u64, model: &LikelihoodModel, seed: u64) -> Result<TrialSample> {
    let p = model.zero_probability(true_theta)?;
    let coin = Bernoulli::new(p).map_err(|e| domain(format!("invalid probability {p}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero_count = (0..trials).filter(|_| coin.sample(&mut rng)).count() as u64;
    Ok(TrialSample {
        true_theta: Some(true_theta),
        trials,
        zero_count,
        seed: Some(seed),
    })
}

/// Seed of replication `index` derived from a master seed.
pub fn replication_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng.next_u64()
}

/// Independent replications of [`simulate_trials`], seeded with [`replication_seed`].
pub fn simulate_replications(
    true_theta: f64,
    trials: u64,
    model: &LikelihoodModel,
    seed: u64,
    replications: u64,
) -> Result<Vec<TrialSample>> {
    (0..replications)
        .into_par_iter()
        .map(|i| simulate_trials(true_theta, trials, model, replication_seed(seed, i)))
        .collect()
}

/// `c · ln x` with `0 · ln 0 := 0`.
#[inline]
fn weighted_ln(c: f64, x: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * x.ln()
    }
}

fn normalize(grid: &QuadratureGrid, log_like: Vec<f64>, prior: &PriorDensity) -> Result<Posterior> {
    let prior = prior.density_on(grid);
    let log_post: Vec<f64> = log_like
        .iter()
        .zip(&prior)
        .map(|(&l, &p)| if p > 0.0 { l + p.ln() } else { f64::NEG_INFINITY })
        .collect();
    let peak = log_post
        .iter()
        .cloned()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::Degenerate(
            "the data have zero likelihood at every grid node".into(),
        ));
    }
    let unnormalized: Vec<f64> = log_post.iter().map(|&v| (v - peak).exp()).collect();
    let z = grid.integrate(&unnormalized);
    if !(z > 0.0) {
        return Err(Error::Degenerate("posterior mass vanishes on the grid".into()));
    }
    Ok(Posterior {
        grid: grid.clone(),
        density: unnormalized.iter().map(|v| v / z).collect(),
        log_normalizer: peak + z.ln(),
    })
}

/// Posterior from recorded or simulated counts.
pub fn posterior_from_counts(
    sample: &TrialSample,
    model: &LikelihoodModel,
    prior: &PriorDensity,
    grid: &QuadratureGrid,
) -> Result<Posterior> {
    if sample.zero_count > sample.trials {
        return Err(domain("zero count exceeds trial count"));
    }
    let zeros = sample.zero_count as f64;
    let clicks = sample.nonzero_count() as f64;
    let log_like = grid
        .nodes()
        .iter()
        .map(|&t| {
            let p = model.zero_probability(t)?;
            Ok(weighted_ln(zeros, p) + weighted_ln(clicks, 1.0 - p))
        })
        .collect::<Result<Vec<f64>>>()?;
    normalize(grid, log_like, prior)
}

/// Large-M posterior with the observed fractions replaced by their expectations at θ*:
/// `exp{M [p(nonzero|θ*) ln p(nonzero|θ) + p(zero|θ*) ln p(zero|θ)]}`.
pub fn asymptotic_posterior(
    true_theta: f64,
    trials: u64,
    model: &LikelihoodModel,
    prior: &PriorDensity,
    grid: &QuadratureGrid,
) -> Result<Posterior> {
    if trials == 0 {
        return Err(domain("asymptotic posterior needs at least one trial"));
    }
    let m = trials as f64;
    let p_star = model.zero_probability(true_theta)?;
    let log_like = grid
        .nodes()
        .iter()
        .map(|&t| {
            let p = model.zero_probability(t)?;
            Ok(weighted_ln(m * p_star, p) + weighted_ln(m * (1.0 - p_star), 1.0 - p))
        })
        .collect::<Result<Vec<f64>>>()?;
    normalize(grid, log_like, prior)
}

/// Mass of the piecewise-linear density above `cut` on segments `[from, to)`.
fn mass_above(xs: &[f64], ys: &[f64], cut: f64, from: usize, to: usize) -> f64 {
    (from..to)
        .map(|i| {
            let (y0, y1) = (ys[i], ys[i + 1]);
            let h = xs[i + 1] - xs[i];
            match (y0 >= cut, y1 >= cut) {
                (true, true) => 0.5 * h * (y0 + y1),
                (false, false) => 0.0,
                (true, false) => {
                    let t = (y0 - cut) / (y0 - y1);
                    0.5 * h * t * (y0 + cut)
                }
                (false, true) => {
                    let t = (y1 - cut) / (y1 - y0);
                    0.5 * h * t * (y1 + cut)
                }
            }
        })
        .sum()
}

fn count_peaks(ys: &[f64], periodic: bool) -> usize {
    let n = ys.len();
    if periodic {
        let m = n - 1;
        return (0..m)
            .filter(|&i| ys[i] > ys[(i + m - 1) % m] && ys[i] > ys[(i + 1) % m])
            .count();
    }
    (0..n)
        .filter(|&i| {
            let left = i == 0 || ys[i] > ys[i - 1];
            let right = i + 1 == n || ys[i] > ys[i + 1];
            left && right && n > 1
        })
        .count()
}

/// MAP, mean, HPD interval around the MAP and peak count.
///
/// The density is treated as piecewise linear between nodes, which lets the
/// highest-density threshold be solved continuously so the region holds
/// exactly `level` of the mass.
pub fn summarize(posterior: &Posterior, level: f64) -> Result<EstimateSummary> {
    if !(level > 0.0 && level < 1.0) {
        return Err(domain(format!("credibility level must lie in (0, 1), got {level}")));
    }
    let xs = posterior.grid.nodes();
    let ys = &posterior.density;
    let n = xs.len();

    let mut imap = 0;
    for i in 1..n {
        if ys[i] > ys[imap] {
            imap = i;
        }
    }
    let top = ys[imap];
    let bottom = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let mass = posterior.grid.integrate(ys);
    let posterior_mean = posterior
        .grid
        .integrate(&xs.iter().zip(ys).map(|(x, y)| x * y).collect::<Vec<_>>())
        / mass;
    let peak_count = count_peaks(ys, posterior.grid.is_full_circle());

    if top - bottom <= 1e-12 * top {
        return Ok(EstimateSummary {
            map_theta: xs[imap],
            posterior_mean,
            hpd_interval: (xs[0], xs[n - 1]),
            level,
            hpd_mass: 1.0,
            peak_count,
            multimodal: false,
            degenerate: true,
        });
    }

    let total = mass_above(xs, ys, 0.0, 0, n - 1);
    let fraction = |cut: f64| mass_above(xs, ys, cut, 0, n - 1) / total;
    let (mut lo, mut hi) = (0.0, top);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fraction(mid) >= level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * top {
            break;
        }
    }
    let cut = lo;

    // walk out from the MAP to where the density drops below the cut
    let mut left = imap;
    while left > 0 && ys[left - 1] >= cut {
        left -= 1;
    }
    let mut right = imap;
    while right + 1 < n && ys[right + 1] >= cut {
        right += 1;
    }
    let crossing = |i: usize, j: usize| {
        // linear crossing between node i (below cut) and node j (above)
        let t = (cut - ys[i]) / (ys[j] - ys[i]);
        xs[i] + t * (xs[j] - xs[i])
    };
    let low = if left > 0 { crossing(left - 1, left) } else { xs[0] };
    let high = if right + 1 < n { crossing(right + 1, right) } else { xs[n - 1] };
    let seg_from = left.saturating_sub(1);
    let seg_to = (right + 1).min(n - 1);
    let hpd_mass = mass_above(xs, ys, cut, seg_from, seg_to) / total;

    Ok(EstimateSummary {
        map_theta: xs[imap],
        posterior_mean,
        hpd_interval: (low, high),
        level,
        hpd_mass,
        peak_count,
        multimodal: hpd_mass < level - 1e-6,
        degenerate: false,
    })
}

/// Total-variation distance between two posteriors on the same grid.
pub fn total_variation(a: &Posterior, b: &Posterior) -> Result<f64> {
    if a.grid != b.grid {
        return Err(contract("posteriors live on different grids"));
    }
    let diff: Vec<f64> = a.density.iter().zip(&b.density).map(|(x, y)| (x - y).abs()).collect();
    Ok(0.5 * a.grid.integrate(&diff))
}
