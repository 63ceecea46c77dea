use oamfid_core::fidelity::Axis;
use oamfid_core::signalfit::{fit_signal_with, synthesize_counts, DataPoint, FitOptions, SignalModel};
use serde_json::Value;

use super::Product;
use crate::args::{FitArgs, Format, Schema, SynthesizeArgs};
use crate::error::{CliError, Result};
use crate::input::read_fit_data;
use crate::table::{json_bytes, num, Table};

pub fn fit(a: &FitArgs) -> Result<Product> {
    let (_, data) = read_fit_data(&a.input, |t| a.output.angle(t))?;
    let initial = match &a.initial {
        Some(v) => Some(SignalModel::new(v[0], v[1], a.output.angle(v[2]), a.quantum_number)?),
        None => None,
    };
    let options = FitOptions {
        max_iterations: a.max_iterations,
        step_tolerance: a.step_tolerance,
        parametrization: a.parametrization.into(),
    };
    // everything that goes wrong past parsing is a fit failure
    let report = fit_signal_with(&data, a.quantum_number, initial, &options).map_err(CliError::Fit)?;
    let format = a.output.format.unwrap_or(Format::Json);
    let bytes = match format {
        Format::Json => json_bytes(&report),
        Format::Csv => {
            let m = report.model;
            let opt = |x: Option<f64>| x.map_or(Value::Null, num);
            let mut t = Table::new([
                "amplitude",
                "background",
                "effective_photons",
                "offset",
                "quantum_number",
                "visibility",
                "fwhm",
                "resolution_factor",
                "residual_norm",
                "iterations",
            ]);
            t.push(vec![
                num(m.amplitude()),
                num(m.background()),
                num(m.effective_photons()),
                num(m.offset()),
                m.quantum_number().into(),
                num(report.visibility),
                opt(report.fwhm),
                opt(report.resolution_factor),
                num(report.residual_norm),
                report.iterations.into(),
            ]);
            t.to_csv()?
        }
    };
    Ok(Product::new(bytes, format))
}

pub fn synthesize(a: &SynthesizeArgs) -> Result<Product> {
    let model = SignalModel::new(a.amplitude, a.effective_photons, a.output.angle(a.offset), a.quantum_number)?;
    let r = &a.theta_range;
    let thetas = Axis::linspace(a.output.angle(r.start), a.output.angle(r.stop), r.points)?;
    let counts = synthesize_counts(&model, thetas.values(), a.trials, a.repeats, a.seed)?;
    let table = match a.schema {
        Schema::Counts => {
            let mut t = Table::new(["theta", "zero_count", "trials"]);
            for c in &counts {
                t.push(vec![num(c.theta), c.zero_count.into(), c.trials.into()]);
            }
            t
        }
        Schema::Fraction => {
            let mut t = Table::new(["theta", "zero_fraction", "sigma"]);
            for c in &counts {
                let p = DataPoint::from_counts(c.theta, c.zero_count, c.trials)?;
                t.push(vec![num(p.theta), num(p.zero_fraction), num(p.sigma)]);
            }
            t
        }
    };
    let format = a.output.format.unwrap_or(Format::Csv);
    let bytes = match format {
        Format::Csv => table.to_csv()?,
        Format::Json => json_bytes(&table.to_json_value()),
    };
    let mut product = Product::new(bytes, format);
    product.seed = Some(a.seed);
    product.rng = Some(oamfid_core::bayes::RNG_ALGORITHM);
    Ok(product)
}
