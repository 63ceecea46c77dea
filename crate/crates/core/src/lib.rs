//! Angular displacement estimation with an OAM coherent state in a
//! Mach-Zehnder interferometer read out by binary (Z or parity) detection.
//!
//! - [`probmodels`]: outcome probabilities, ideal and noisy, with a Fock-basis oracle.
//! - [`fidelity`]: conditional densities and the mutual information between θ and the outcome.
//! - [`bayes`]: seeded trial simulation and grid posteriors from counts.
//! - [`signalfit`]: least-squares fringe fitting, visibility, FWHM and resolution factor.

pub mod bayes;
pub mod error;
pub mod fidelity;
pub mod probmodels;
pub mod signalfit;

pub use error::{Error, Result};
pub use probmodels::{InterferometerConfig, NoiseModel, Outcome, Strategy};
