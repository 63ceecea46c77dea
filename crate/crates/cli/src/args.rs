//! Command-line surface. Every argument struct also serializes, so the parsed
//! invocation can be echoed into the run manifest.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oamfid_core::signalfit::Parametrization;
use oamfid_core::{Outcome, Strategy};
use serde::Serialize;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "oamfid", version, about = "Angular displacement estimation with OAM coherent states and binary detection")]
pub struct Cli {
    /// TOML file with default flag values; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Outcome probability at one angle or over an angle range.
    Probability(ProbabilityArgs),
    /// Mutual information between angle and outcome.
    Fidelity(FidelityArgs),
    /// Fidelity over a parameter grid.
    Sweep(SweepArgs),
    /// Simulate trials, then build and summarize posteriors.
    Simulate(SimulateArgs),
    /// Posteriors from recorded counts.
    Bayes(BayesArgs),
    /// Fit the fringe model to measured zero fractions.
    Fit(FitArgs),
    /// Generate a binomially noised fringe data set.
    Synthesize(SynthesizeArgs),
    /// Re-run a manifest and check the output is byte-identical.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Probability(_) => "probability",
            Self::Fidelity(_) => "fidelity",
            Self::Sweep(_) => "sweep",
            Self::Simulate(_) => "simulate",
            Self::Bayes(_) => "bayes",
            Self::Fit(_) => "fit",
            Self::Synthesize(_) => "synthesize",
            Self::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output file; relative paths resolve against $OAMFID_OUTPUT_DIR when set. Default: stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Manifest path. Default: `<out>.manifest.json`, or stderr when writing to stdout.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,

    /// Read input angles (flags and data files) in degrees.
    #[arg(long)]
    pub degrees: bool,
}

impl OutputArgs {
    pub fn angle(&self, value: f64) -> f64 {
        if self.degrees {
            value.to_radians()
        } else {
            value
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyArg {
    Z,
    Parity,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Z => Strategy::Z,
            StrategyArg::Parity => Strategy::Parity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeArg {
    Zero,
    Nonzero,
    Even,
    Odd,
}

impl From<OutcomeArg> for Outcome {
    fn from(o: OutcomeArg) -> Self {
        match o {
            OutcomeArg::Zero => Outcome::Zero,
            OutcomeArg::Nonzero => Outcome::Nonzero,
            OutcomeArg::Even => Outcome::Even,
            OutcomeArg::Odd => Outcome::Odd,
        }
    }
}

/// `start,stop,points`, evenly spaced and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, k] = parts.as_slice() else {
            return Err(format!("expected start,stop,points, got {s:?}"));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        let points = k.parse::<usize>().map_err(|e| format!("{k:?}: {e}"))?;
        if points == 0 {
            return Err("a range needs at least one point".into());
        }
        Ok(Self {
            start: num(a)?,
            stop: num(b)?,
            points,
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConfigArgs {
    /// Mean photon number N.
    #[arg(long = "n", default_value_t = 1.0, value_name = "N")]
    pub mean_photons: f64,

    /// OAM quantum number ℓ.
    #[arg(long = "l", default_value_t = 1, value_name = "L")]
    pub quantum_number: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NoiseArgs {
    /// Transmissivity of path A.
    #[arg(long, default_value_t = 1.0)]
    pub t_a: f64,

    /// Transmissivity of path B.
    #[arg(long, default_value_t = 1.0)]
    pub t_b: f64,

    /// Detection efficiency η.
    #[arg(long, default_value_t = 1.0)]
    pub efficiency: f64,

    /// Mean dark counts per gate.
    #[arg(long, default_value_t = 0.0)]
    pub dark_rate: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QuadratureArgs {
    /// The θ grid has 2^k + 1 nodes.
    #[arg(long, default_value_t = oamfid_core::fidelity::DEFAULT_GRID_EXPONENT, value_name = "K")]
    pub grid_exponent: u32,

    /// Largest accepted quadrature error estimate, in bits.
    #[arg(long, default_value_t = oamfid_core::fidelity::DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    /// Integrate over one period π/ℓ and rescale.
    #[arg(long)]
    pub reduce_to_period: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProbabilityArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::Z)]
    pub strategy: StrategyArg,

    /// Defaults to the dark outcome of the strategy (zero or even).
    #[arg(long, value_enum)]
    pub outcome: Option<OutcomeArg>,

    #[arg(long, required_unless_present = "theta_range", conflicts_with = "theta_range")]
    pub theta: Option<f64>,

    #[arg(long, value_name = "START,STOP,POINTS", allow_hyphen_values = true)]
    pub theta_range: Option<Range>,

    #[command(flatten)]
    pub config: ConfigArgs,

    #[command(flatten)]
    pub noise: NoiseArgs,

    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FidelityArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::Z)]
    pub strategy: StrategyArg,

    #[command(flatten)]
    pub config: ConfigArgs,

    #[command(flatten)]
    pub noise: NoiseArgs,

    #[command(flatten)]
    pub quadrature: QuadratureArgs,

    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    /// Mean photon number.
    Photon,
    /// Path losses L_A × L_B, with L = 1 − T.
    Loss,
    /// Detection efficiency.
    Efficiency,
    /// Dark rate × mean photon number.
    Dark,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub kind: SweepKind,

    /// Strategies to tabulate, one pair of columns each. Default: z and parity
    /// for photon sweeps, z otherwise.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub strategy: Vec<StrategyArg>,

    /// Photon-number axis (photon and dark sweeps).
    #[arg(long, value_name = "START,STOP,POINTS", default_value = "1,20,20")]
    pub n_range: Range,

    /// Loss axis of path A (and of path B unless --loss-b-range is given).
    #[arg(long, value_name = "START,STOP,POINTS", default_value = "0,1,21")]
    pub loss_range: Range,

    #[arg(long, value_name = "START,STOP,POINTS")]
    pub loss_b_range: Option<Range>,

    #[arg(long, value_name = "START,STOP,POINTS", default_value = "0.05,1,20")]
    pub efficiency_range: Range,

    #[arg(long, value_delimiter = ',', default_value = "1e-8,1e-6,1e-4,1e-2")]
    pub dark_rates: Vec<f64>,

    #[command(flatten)]
    pub config: ConfigArgs,

    #[command(flatten)]
    pub noise: NoiseArgs,

    #[command(flatten)]
    pub quadrature: QuadratureArgs,

    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Ideal Z detection.
    Ideal,
    /// Equal path loss, efficiency and dark counts.
    Combined,
    /// Fitted fringe `A·exp[−N_e sin²(ℓ(θ+θ₀))]`.
    Experimental,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// The monotone branch next to the fringe peak.
    Branch,
    /// All of [−π, π].
    Full,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Experimental)]
    pub model: ModelKind,

    /// Mean photon number (ideal and combined models).
    #[arg(long = "n", default_value_t = 1.0, value_name = "N")]
    pub mean_photons: f64,

    #[arg(long = "l", default_value_t = 2, value_name = "L")]
    pub quantum_number: u32,

    /// Fringe amplitude A (experimental model).
    #[arg(long = "a", default_value_t = 0.911, value_name = "A")]
    pub amplitude: f64,

    /// Effective photon number N_e (experimental model).
    #[arg(long = "ne", default_value_t = 4.11, value_name = "NE")]
    pub effective_photons: f64,

    /// Fringe offset θ₀ (experimental model).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub offset: f64,

    #[command(flatten)]
    pub noise: NoiseArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PosteriorArgs {
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,

    #[arg(long, value_enum, default_value_t = Domain::Branch)]
    pub domain: Domain,

    /// The posterior grid has 2^k + 1 nodes.
    #[arg(long, default_value_t = 12, value_name = "K")]
    pub grid_exponent: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub theta_star: f64,

    /// Trial counts M, one simulated sample each.
    #[arg(long, value_delimiter = ',', default_value = "200,500,1000")]
    pub trials: Vec<u64>,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Independent samples per trial count.
    #[arg(long, default_value_t = 1)]
    pub replications: u64,

    /// Use the large-M form built from expected fractions instead of sampled counts.
    #[arg(long)]
    pub asymptotic: bool,

    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub posterior: PosteriorArgs,

    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

/// `trials:zero_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub trials: u64,
    pub zero_count: u64,
}

impl FromStr for Counts {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m, k) = s
            .split_once(':')
            .ok_or_else(|| format!("expected trials:zero_count, got {s:?}"))?;
        let parse = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
        Ok(Self {
            trials: parse(m)?,
            zero_count: parse(k)?,
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BayesArgs {
    /// Recorded counts, e.g. `200:167,500:419`.
    #[arg(long, value_delimiter = ',', required_unless_present = "input", conflicts_with = "input")]
    pub counts: Vec<Counts>,

    /// CSV with columns theta,zero_count,trials (theta may be empty).
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,

    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub posterior: PosteriorArgs,

    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParametrizationArg {
    Amplitude,
    Background,
}

impl From<ParametrizationArg> for Parametrization {
    fn from(p: ParametrizationArg) -> Self {
        match p {
            ParametrizationArg::Amplitude => Parametrization::Amplitude,
            ParametrizationArg::Background => Parametrization::Background,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// CSV with columns theta,zero_fraction,sigma or theta,zero_count,trials.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    #[arg(long = "l", default_value_t = 2, value_name = "L")]
    pub quantum_number: u32,

    /// Starting point `A,NE,OFFSET`; data-driven when absent.
    #[arg(long, value_delimiter = ',', num_args = 3, allow_hyphen_values = true, value_name = "A,NE,OFFSET")]
    pub initial: Option<Vec<f64>>,

    #[arg(long, value_enum, default_value_t = ParametrizationArg::Amplitude)]
    pub parametrization: ParametrizationArg,

    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,

    #[arg(long, default_value_t = 1e-10)]
    pub step_tolerance: f64,

    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Schema {
    /// theta,zero_count,trials
    Counts,
    /// theta,zero_fraction,sigma
    Fraction,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthesizeArgs {
    #[arg(long = "a", default_value_t = 0.911, value_name = "A")]
    pub amplitude: f64,

    #[arg(long = "ne", default_value_t = 4.11, value_name = "NE")]
    pub effective_photons: f64,

    #[arg(long, default_value_t = 0.686, allow_negative_numbers = true)]
    pub offset: f64,

    #[arg(long = "l", default_value_t = 2, value_name = "L")]
    pub quantum_number: u32,

    #[arg(long, value_name = "START,STOP,POINTS", allow_hyphen_values = true, default_value = "0,1.5707963267948966,41")]
    pub theta_range: Range,

    /// Trials per run.
    #[arg(long, default_value_t = 2000)]
    pub trials: u64,

    /// Runs pooled at each angle.
    #[arg(long, default_value_t = 20)]
    pub repeats: u64,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = Schema::Counts)]
    pub schema: Schema,

    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,

    /// Where to write the regenerated output. Default: stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_counts_parse() {
        let r: Range = "-3.14,3.14,9".parse().unwrap();
        assert_eq!((r.start, r.stop, r.points), (-3.14, 3.14, 9));
        assert!("1,2".parse::<Range>().is_err());
        assert!("1,2,0".parse::<Range>().is_err());
        let c: Counts = "200:167".parse().unwrap();
        assert_eq!((c.trials, c.zero_count), (200, 167));
        assert!("200-167".parse::<Counts>().is_err());
    }

    #[test]
    fn degrees_convert_on_input() {
        let mut o = OutputArgs {
            out: None,
            format: None,
            manifest: None,
            degrees: false,
        };
        assert_eq!(o.angle(0.5), 0.5);
        o.degrees = true;
        assert!((o.angle(45.0) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }
}
