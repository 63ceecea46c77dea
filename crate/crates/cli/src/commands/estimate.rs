use oamfid_core::bayes::{
    asymptotic_posterior, posterior_from_counts, replication_seed, simulate_trials, summarize,
    EstimateSummary, LikelihoodModel, Posterior, TrialSample, RNG_ALGORITHM,
};
use oamfid_core::fidelity::{PriorDensity, QuadratureGrid};
use oamfid_core::signalfit::SignalModel;
use oamfid_core::InterferometerConfig;
use serde::Serialize;

use super::{noise, Product};
use crate::args::{BayesArgs, Domain, Format, ModelArgs, ModelKind, OutputArgs, PosteriorArgs, SimulateArgs};
use crate::error::Result;
use crate::input::read_trials;
use crate::table::{json_bytes, num, Table};

fn likelihood(m: &ModelArgs, out: &OutputArgs) -> Result<LikelihoodModel> {
    let config = || InterferometerConfig::new(m.mean_photons, m.quantum_number);
    Ok(match m.model {
        ModelKind::Ideal => LikelihoodModel::ideal(config()?),
        ModelKind::Combined => LikelihoodModel::combined(config()?, noise(&m.noise)?)?,
        ModelKind::Experimental => LikelihoodModel::experimental(SignalModel::new(
            m.amplitude,
            m.effective_photons,
            out.angle(m.offset),
            m.quantum_number,
        )?),
    })
}

fn grid(model: &LikelihoodModel, p: &PosteriorArgs) -> Result<QuadratureGrid> {
    Ok(match p.domain {
        Domain::Branch => model.branch_grid(p.grid_exponent)?,
        Domain::Full => QuadratureGrid::full_circle(p.grid_exponent)?,
    })
}

#[derive(Debug, Serialize)]
struct Run {
    trials: u64,
    replication: u64,
    /// Absent for the asymptotic form, which uses no sample.
    sample: Option<TrialSample>,
    summary: EstimateSummary,
}

#[derive(Debug, Serialize)]
struct MapError {
    trials: u64,
    replications: usize,
    median_abs_error: f64,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    model: &'a LikelihoodModel,
    #[serde(skip_serializing_if = "Option::is_none")]
    rng: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    level: f64,
    domain: Domain,
    grid_size: usize,
    runs: Vec<Run>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    map_error: Vec<MapError>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn posterior_table(runs: &[(Run, Posterior)]) -> Table {
    let mut t = Table::new(["trials", "replication", "zero_count", "theta", "density"]);
    for (run, post) in runs {
        let k = run.sample.as_ref().map_or(serde_json::Value::Null, |s| s.zero_count.into());
        for (x, d) in post.grid.nodes().iter().zip(&post.density) {
            t.push(vec![run.trials.into(), run.replication.into(), k.clone(), num(*x), num(*d)]);
        }
    }
    t
}

fn finish(report: Report, posteriors: Vec<Posterior>, format: Format) -> Result<Product> {
    let grid_size = report.grid_size;
    let bytes = match format {
        Format::Json => json_bytes(&report),
        Format::Csv => {
            let pairs: Vec<(Run, Posterior)> = report.runs.into_iter().zip(posteriors).collect();
            posterior_table(&pairs).to_csv()?
        }
    };
    let mut product = Product::new(bytes, format);
    product.grid_sizes = vec![grid_size];
    Ok(product)
}

pub fn simulate(a: &SimulateArgs) -> Result<Product> {
    let model = likelihood(&a.model, &a.output)?;
    let grid = grid(&model, &a.posterior)?;
    let theta = a.output.angle(a.theta_star);
    let prior = PriorDensity::Uniform;
    let replications = if a.asymptotic { 1 } else { a.replications };

    let mut runs = Vec::new();
    let mut posteriors = Vec::new();
    let mut map_error = Vec::new();
    for (j, &m) in a.trials.iter().enumerate() {
        let mut errors = Vec::new();
        for r in 0..replications {
            let (sample, post) = if a.asymptotic {
                (None, asymptotic_posterior(theta, m, &model, &prior, &grid)?)
            } else {
                let seed = replication_seed(a.seed, j as u64 * replications + r);
                let s = simulate_trials(theta, m, &model, seed)?;
                let post = posterior_from_counts(&s, &model, &prior, &grid)?;
                (Some(s), post)
            };
            let summary = summarize(&post, a.posterior.level)?;
            errors.push((summary.map_theta - theta).abs());
            runs.push(Run {
                trials: m,
                replication: r,
                sample,
                summary,
            });
            posteriors.push(post);
        }
        map_error.push(MapError {
            trials: m,
            replications: errors.len(),
            median_abs_error: median(errors),
        });
    }
    let report = Report {
        model: &model,
        rng: (!a.asymptotic).then_some(RNG_ALGORITHM),
        seed: (!a.asymptotic).then_some(a.seed),
        level: a.posterior.level,
        domain: a.posterior.domain,
        grid_size: grid.len(),
        runs,
        map_error,
    };
    let mut product = finish(report, posteriors, a.output.format.unwrap_or(Format::Json))?;
    if !a.asymptotic {
        product.seed = Some(a.seed);
        product.rng = Some(RNG_ALGORITHM);
    }
    Ok(product)
}

pub fn bayes(a: &BayesArgs) -> Result<Product> {
    let model = likelihood(&a.model, &a.output)?;
    let grid = grid(&model, &a.posterior)?;
    let samples = match &a.input {
        Some(path) => read_trials(path, |t| a.output.angle(t))?,
        None => a
            .counts
            .iter()
            .map(|c| TrialSample::recorded(c.trials, c.zero_count, None))
            .collect::<oamfid_core::Result<_>>()?,
    };
    let mut runs = Vec::new();
    let mut posteriors = Vec::new();
    for (i, s) in samples.into_iter().enumerate() {
        let post = posterior_from_counts(&s, &model, &PriorDensity::Uniform, &grid)?;
        runs.push(Run {
            trials: s.trials,
            replication: i as u64,
            summary: summarize(&post, a.posterior.level)?,
            sample: Some(s),
        });
        posteriors.push(post);
    }
    let report = Report {
        model: &model,
        rng: None,
        seed: None,
        level: a.posterior.level,
        domain: a.posterior.domain,
        grid_size: grid.len(),
        runs,
        map_error: Vec::new(),
    };
    finish(report, posteriors, a.output.format.unwrap_or(Format::Json))
}
