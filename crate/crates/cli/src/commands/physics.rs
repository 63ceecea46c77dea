use oamfid_core::fidelity::{fidelity_sweep, Axis, SweepAxis, SweepPoint};
use oamfid_core::probmodels::noisy_outcome_probability;
use oamfid_core::{Outcome, Strategy};
use serde_json::Value;

use super::{axis, config, noise, quadrature, Product};
use crate::args::{FidelityArgs, Format, ProbabilityArgs, StrategyArg, SweepArgs, SweepKind};
use crate::error::{CliError, Result};
use crate::table::{json_bytes, num, Table};

fn emit(table: &Table, format: Format) -> Result<Product> {
    let bytes = match format {
        Format::Csv => table.to_csv()?,
        Format::Json => json_bytes(&table.to_json_value()),
    };
    Ok(Product::new(bytes, format))
}

pub fn probability(a: &ProbabilityArgs) -> Result<Product> {
    let strategy = Strategy::from(a.strategy);
    let outcome = a.outcome.map_or(strategy.outcomes()[0], Outcome::from);
    if outcome.strategy() != strategy {
        return Err(CliError::Usage(format!(
            "outcome {} does not belong to strategy {}",
            outcome.name(),
            strategy.name()
        )));
    }
    let cfg = config(&a.config)?;
    let nm = noise(&a.noise)?;
    let thetas: Vec<f64> = match (a.theta, a.theta_range) {
        (Some(t), _) => vec![a.output.angle(t)],
        (None, Some(r)) => Axis::linspace(a.output.angle(r.start), a.output.angle(r.stop), r.points)?
            .values()
            .to_vec(),
        (None, None) => return Err(CliError::Usage("give --theta or --theta-range".into())),
    };
    let mut table = Table::new(["theta", "probability"]);
    for t in thetas {
        let p = noisy_outcome_probability(strategy, outcome, t, &cfg, &nm)?;
        table.push(vec![num(t), num(p)]);
    }
    emit(&table, a.output.format.unwrap_or(Format::Csv))
}

pub fn fidelity(a: &FidelityArgs) -> Result<Product> {
    let r = oamfid_core::fidelity::fidelity(a.strategy.into(), &config(&a.config)?, &noise(&a.noise)?, &quadrature(&a.quadrature))?;
    let format = a.output.format.unwrap_or(Format::Json);
    let mut product = match format {
        Format::Json => Product::new(json_bytes(&r), format),
        Format::Csv => {
            let mut t = Table::new([
                "strategy",
                "mean_photons",
                "quantum_number",
                "t_a",
                "t_b",
                "efficiency",
                "dark_rate",
                "bits",
                "estimated_error",
                "grid_size",
            ]);
            t.push(vec![
                Value::String(r.strategy.name().into()),
                num(r.config.mean_photons()),
                r.config.quantum_number().into(),
                num(r.noise.t_a()),
                num(r.noise.t_b()),
                num(r.noise.efficiency()),
                num(r.noise.dark_rate()),
                num(r.bits),
                num(r.estimated_error),
                r.grid_size.into(),
            ]);
            emit(&t, format)?
        }
    };
    product.grid_sizes = vec![r.grid_size];
    Ok(product)
}

pub fn sweep(a: &SweepArgs) -> Result<Product> {
    let strategies: Vec<StrategyArg> = if !a.strategy.is_empty() {
        a.strategy.clone()
    } else if a.kind == SweepKind::Photon {
        vec![StrategyArg::Z, StrategyArg::Parity]
    } else {
        vec![StrategyArg::Z]
    };
    let loss_a = axis(&a.loss_range)?;
    let loss_b = axis(a.loss_b_range.as_ref().unwrap_or(&a.loss_range))?;
    let transmissivity = |l: &Axis| Axis::new(l.values().iter().map(|x| 1.0 - x).collect());
    let (sweep_axis, names): (SweepAxis, &[&str]) = match a.kind {
        SweepKind::Photon => (SweepAxis::MeanPhotons(axis(&a.n_range)?), &["mean_photons"]),
        SweepKind::Loss => (
            SweepAxis::Transmissivities {
                t_a: transmissivity(&loss_a)?,
                t_b: transmissivity(&loss_b)?,
            },
            &["loss_a", "loss_b"],
        ),
        SweepKind::Efficiency => (SweepAxis::Efficiency(axis(&a.efficiency_range)?), &["efficiency"]),
        SweepKind::Dark => (
            SweepAxis::DarkRateByPhotons {
                dark_rate: Axis::new(a.dark_rates.clone())?,
                mean_photons: axis(&a.n_range)?,
            },
            &["dark_rate", "mean_photons"],
        ),
    };
    let cfg = config(&a.config)?;
    let nm = noise(&a.noise)?;
    let opts = quadrature(&a.quadrature);
    let results: Vec<Vec<SweepPoint>> = strategies
        .iter()
        .map(|&s| fidelity_sweep(s.into(), &sweep_axis, &cfg, &nm, &opts))
        .collect::<oamfid_core::Result<_>>()?;

    let mut columns: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    for &s in &strategies {
        let name = Strategy::from(s).name();
        columns.push(format!("bits_{name}"));
        columns.push(format!("error_{name}"));
    }
    let mut table = Table::new(columns);
    let mut grid_sizes = Vec::new();
    for (row, point) in results[0].iter().enumerate() {
        let mut cells: Vec<Value> = match a.kind {
            // report the losses the user asked for, not 1 − (1 − L)
            SweepKind::Loss => {
                let (i, j) = (row / loss_b.len(), row % loss_b.len());
                vec![num(loss_a.values()[i]), num(loss_b.values()[j])]
            }
            _ => point.coordinates.iter().map(|&c| num(c)).collect(),
        };
        for r in &results {
            cells.push(num(r[row].result.bits));
            cells.push(num(r[row].result.estimated_error));
            if !grid_sizes.contains(&r[row].result.grid_size) {
                grid_sizes.push(r[row].result.grid_size);
            }
        }
        table.push(cells);
    }
    let mut product = emit(&table, a.output.format.unwrap_or(Format::Csv))?;
    product.grid_sizes = grid_sizes;
    Ok(product)
}
