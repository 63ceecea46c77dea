//! Conditional densities `p(θ|m)` and the Shannon mutual information between
//! the angular displacement and a binary detection outcome.
//!
//! Integrals over θ use composite Simpson on a uniform grid. The information
//! integral is repeated on the grid with every other node removed and the two
//! are combined to cancel the leading error term.

mod grid;
mod sweep;

pub use grid::{PriorDensity, QuadratureGrid, QuadratureRule};
pub use sweep::{fidelity_sweep, Axis, SweepAxis, SweepPoint};

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::probmodels::{
    check_noise_supported, noisy_outcome_probability, InterferometerConfig, NoiseModel, Outcome,
    Strategy,
};

/// Denominators below this are treated as an impossible outcome.
pub const DEGENERATE_MARGINAL: f64 = 1e-300;

/// Default node count exponent: `2^12 + 1 = 4097` nodes.
pub const DEFAULT_GRID_EXPONENT: u32 = 12;

/// Default bound on `|H(n) − H(n/2)|` before the result is rejected.
pub const DEFAULT_TOLERANCE: f64 = 1e-5;

/// `p(θ|m)` tabulated on a grid, in 1/radian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalDensity {
    pub outcome: Outcome,
    pub grid: QuadratureGrid,
    pub values: Vec<f64>,
}

/// Mutual information between θ and the outcome of one detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    /// Mutual information in bits.
    pub bits: f64,
    pub strategy: Strategy,
    pub config: InterferometerConfig,
    pub noise: NoiseModel,
    pub grid_size: usize,
    /// `|H(grid) − H(coarser grid)|`.
    pub estimated_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityOptions {
    /// The grid has `2^grid_exponent + 1` nodes.
    pub grid_exponent: u32,
    /// Largest acceptable `estimated_error` in bits.
    pub tolerance: f64,
    /// Integrate over one fringe period `[0, π/ℓ]` instead of `[−π, π]`.
    /// Only valid for a uniform prior, which is the only prior used here.
    pub reduce_to_period: bool,
}

impl Default for FidelityOptions {
    fn default() -> Self {
        Self {
            grid_exponent: DEFAULT_GRID_EXPONENT,
            tolerance: DEFAULT_TOLERANCE,
            reduce_to_period: false,
        }
    }
}

impl FidelityOptions {
    pub fn grid_for(&self, config: &InterferometerConfig) -> Result<QuadratureGrid> {
        if self.reduce_to_period {
            QuadratureGrid::dyadic(0.0, config.period(), self.grid_exponent)
        } else {
            QuadratureGrid::full_circle(self.grid_exponent)
        }
    }
}

fn likelihood(
    outcome: Outcome,
    strategy: Strategy,
    config: &InterferometerConfig,
    noise: &NoiseModel,
    grid: &QuadratureGrid,
) -> Result<Vec<f64>> {
    if outcome.strategy() != strategy {
        return Err(contract(format!(
            "outcome `{outcome}` does not belong to strategy `{strategy}`"
        )));
    }
    check_noise_supported(strategy, noise)?;
    grid.nodes()
        .iter()
        .map(|&t| noisy_outcome_probability(strategy, outcome, t, config, noise))
        .collect()
}

/// `∫ p(m|θ) p(θ) dθ` by quadrature on `grid`.
pub fn marginal_outcome_probability(
    outcome: Outcome,
    strategy: Strategy,
    config: &InterferometerConfig,
    noise: &NoiseModel,
    prior: &PriorDensity,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let like = likelihood(outcome, strategy, config, noise, grid)?;
    let prior = prior.density_on(grid);
    Ok(weighted_mass(grid, &like, &prior))
}

fn weighted_mass(grid: &QuadratureGrid, like: &[f64], prior: &[f64]) -> f64 {
    grid.weights()
        .iter()
        .zip(like)
        .zip(prior)
        .map(|((w, l), p)| w * l * p)
        .sum()
}

/// Bayes' rule on a grid: `p(θ|m) = p(m|θ) p(θ) / ∫ p(m|θ′) p(θ′) dθ′`.
pub fn conditional_density(
    outcome: Outcome,
    strategy: Strategy,
    config: &InterferometerConfig,
    noise: &NoiseModel,
    prior: &PriorDensity,
    grid: &QuadratureGrid,
) -> Result<ConditionalDensity> {
    let like = likelihood(outcome, strategy, config, noise, grid)?;
    let prior = prior.density_on(grid);
    let evidence = weighted_mass(grid, &like, &prior);
    if evidence < DEGENERATE_MARGINAL {
        return Err(Error::Degenerate(format!(
            "outcome `{outcome}` has marginal probability {evidence:e}"
        )));
    }
    let values = like
        .iter()
        .zip(&prior)
        .map(|(l, p)| l * p / evidence)
        .collect();
    Ok(ConditionalDensity {
        outcome,
        grid: grid.clone(),
        values,
    })
}

/// `x log₂(x / y)` with `0 · log 0 := 0`.
#[inline]
pub fn xlog2_ratio(x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (x / y).log2()
    }
}

fn information_on(
    strategy: Strategy,
    config: &InterferometerConfig,
    noise: &NoiseModel,
    prior: &PriorDensity,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let prior = prior.density_on(grid);
    let mut total = 0.0;
    for outcome in strategy.outcomes() {
        let like = likelihood(outcome, strategy, config, noise, grid)?;
        let marginal = weighted_mass(grid, &like, &prior);
        if marginal < DEGENERATE_MARGINAL {
            // an outcome that never occurs carries no information
            continue;
        }
        total += grid
            .weights()
            .iter()
            .zip(&like)
            .zip(&prior)
            .map(|((w, &l), &p)| w * p * xlog2_ratio(l, marginal))
            .sum::<f64>();
    }
    Ok(total)
}

/// Shannon mutual information `H = Σ_m ∫ p(m|θ) p(θ) log₂[p(m|θ) / P(m)] dθ`.
///
/// The same integral is repeated on a grid half as dense (or twice as dense
/// when the grid cannot be halved) and the pair is Richardson-extrapolated.
/// `estimated_error` is the size of the removed term; above `tolerance` an
/// [`Error::Accuracy`] carrying both Simpson values is returned.
pub fn mutual_information(
    strategy: Strategy,
    config: &InterferometerConfig,
    noise: &NoiseModel,
    prior: &PriorDensity,
    grid: &QuadratureGrid,
    tolerance: f64,
) -> Result<FidelityResult> {
    let on_grid = information_on(strategy, config, noise, prior, grid)?;
    let (fine, coarse) = match grid.coarsened() {
        Some(c) => (on_grid, information_on(strategy, config, noise, prior, &c)?),
        None => (
            information_on(strategy, config, noise, prior, &grid.refined())?,
            on_grid,
        ),
    };
    // p·log p has a |θ−θ₀|²·log|θ−θ₀| cusp at every dark fringe, so Simpson
    // converges like h³ there; one Richardson step removes that term.
    let bits = (8.0 * fine - coarse) / 7.0;
    let estimated_error = (fine - coarse).abs() / 7.0;
    if !(estimated_error <= tolerance) {
        return Err(Error::Accuracy {
            message: format!(
                "mutual information not converged on {} nodes (tolerance {tolerance:e})",
                grid.len()
            ),
            estimate: fine,
            reference: coarse,
        });
    }
    Ok(FidelityResult {
        // the outcome alphabet has two letters
        bits: bits.clamp(0.0, 1.0),
        strategy,
        config: *config,
        noise: *noise,
        grid_size: grid.len(),
        estimated_error,
    })
}

/// Mutual information under a uniform prior with the grid chosen by `options`.
pub fn fidelity(
    strategy: Strategy,
    config: &InterferometerConfig,
    noise: &NoiseModel,
    options: &FidelityOptions,
) -> Result<FidelityResult> {
    let grid = options.grid_for(config)?;
    mutual_information(
        strategy,
        config,
        noise,
        &PriorDensity::Uniform,
        &grid,
        options.tolerance,
    )
}
