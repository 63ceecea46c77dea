mod estimate;
mod fit;
mod physics;

use oamfid_core::fidelity::{Axis, FidelityOptions};
use oamfid_core::{InterferometerConfig, NoiseModel};

use crate::args::{Command, ConfigArgs, Format, NoiseArgs, QuadratureArgs, Range};
use crate::error::{CliError, Result};

/// Bytes of one command's result plus what its manifest must record.
#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub bytes: Vec<u8>,
    pub format: Format,
    pub seed: Option<u64>,
    pub rng: Option<&'static str>,
    pub grid_sizes: Vec<usize>,
}

impl Product {
    fn new(bytes: Vec<u8>, format: Format) -> Self {
        Self {
            bytes,
            format,
            seed: None,
            rng: None,
            grid_sizes: Vec::new(),
        }
    }
}

/// Runs a parsed command without touching the file system beyond its inputs.
pub fn dispatch(command: &Command) -> Result<Product> {
    match command {
        Command::Probability(a) => physics::probability(a),
        Command::Fidelity(a) => physics::fidelity(a),
        Command::Sweep(a) => physics::sweep(a),
        Command::Simulate(a) => estimate::simulate(a),
        Command::Bayes(a) => estimate::bayes(a),
        Command::Fit(a) => fit::fit(a),
        Command::Synthesize(a) => fit::synthesize(a),
        Command::Replay(_) => Err(CliError::Usage("replay cannot be nested".into())),
    }
}

fn config(a: &ConfigArgs) -> Result<InterferometerConfig> {
    Ok(InterferometerConfig::new(a.mean_photons, a.quantum_number)?)
}

fn noise(a: &NoiseArgs) -> Result<NoiseModel> {
    Ok(NoiseModel::new(a.t_a, a.t_b, a.efficiency, a.dark_rate)?)
}

fn quadrature(a: &QuadratureArgs) -> FidelityOptions {
    FidelityOptions {
        grid_exponent: a.grid_exponent,
        tolerance: a.tolerance,
        reduce_to_period: a.reduce_to_period,
    }
}

fn axis(r: &Range) -> Result<Axis> {
    Ok(Axis::linspace(r.start, r.stop, r.points)?)
}
