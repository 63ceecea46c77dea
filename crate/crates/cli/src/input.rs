//! CSV ingestion for recorded trials and fringe data.

use std::path::Path;

use oamfid_core::bayes::TrialSample;
use oamfid_core::signalfit::DataPoint;

use crate::error::{CliError, Result};

/// Column layout of a fit file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitSchema {
    Fraction,
    Counts,
}

struct Records {
    name: String,
    header: Vec<String>,
    rows: Vec<(u64, Vec<String>)>,
}

fn read(path: &Path) -> Result<Records> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_text(&text, &path.display().to_string())
}

fn parse_text(text: &str, name: &str) -> Result<Records> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let located = |e: csv::Error| {
        let line = e.position().map(|p| p.line());
        CliError::parse(name, line, e.to_string())
    };
    let header = reader
        .headers()
        .map_err(located)?
        .iter()
        .map(str::to_owned)
        .collect::<Vec<_>>();
    if header.iter().all(String::is_empty) {
        return Err(CliError::parse(name, Some(1), "missing header row"));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(located)?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(Records {
        name: name.to_owned(),
        header,
        rows,
    })
}

impl Records {
    fn expect_header(&self, expected: &[&str]) -> Result<()> {
        if self.header != expected {
            return Err(CliError::parse(
                &self.name,
                Some(1),
                format!("header must be {}, found {}", expected.join(","), self.header.join(",")),
            ));
        }
        Ok(())
    }

    fn field<T: std::str::FromStr>(&self, line: u64, column: &str, raw: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        raw.parse::<T>()
            .map_err(|e| CliError::parse(&self.name, Some(line), format!("{column} = {raw:?}: {e}")))
    }
}

/// Reads `theta,zero_count,trials`; an empty theta means the true angle is unknown.
pub fn read_trials(path: &Path, to_radians: impl Fn(f64) -> f64) -> Result<Vec<TrialSample>> {
    let records = read(path)?;
    trials_from(&records, to_radians)
}

fn trials_from(records: &Records, to_radians: impl Fn(f64) -> f64) -> Result<Vec<TrialSample>> {
    records.expect_header(&["theta", "zero_count", "trials"])?;
    records
        .rows
        .iter()
        .map(|(line, row)| {
            let theta = if row[0].is_empty() {
                None
            } else {
                Some(to_radians(records.field::<f64>(*line, "theta", &row[0])?))
            };
            let zeros = records.field::<u64>(*line, "zero_count", &row[1])?;
            let trials = records.field::<u64>(*line, "trials", &row[2])?;
            TrialSample::recorded(trials, zeros, theta)
                .map_err(|e| CliError::parse(&records.name, Some(*line), e.to_string()))
        })
        .collect()
}

/// Reads either fit schema, recognized by its header.
pub fn read_fit_data(path: &Path, to_radians: impl Fn(f64) -> f64) -> Result<(FitSchema, Vec<DataPoint>)> {
    let records = read(path)?;
    fit_data_from(&records, to_radians)
}

fn fit_data_from(records: &Records, to_radians: impl Fn(f64) -> f64) -> Result<(FitSchema, Vec<DataPoint>)> {
    let schema = match records.header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["theta", "zero_fraction", "sigma"] => FitSchema::Fraction,
        ["theta", "zero_count", "trials"] => FitSchema::Counts,
        _ => {
            return Err(CliError::parse(
                &records.name,
                Some(1),
                format!(
                    "header must be theta,zero_fraction,sigma or theta,zero_count,trials, found {}",
                    records.header.join(",")
                ),
            ))
        }
    };
    let points = records
        .rows
        .iter()
        .map(|(line, row)| {
            let theta = to_radians(records.field::<f64>(*line, "theta", &row[0])?);
            let point = match schema {
                FitSchema::Fraction => DataPoint::new(
                    theta,
                    records.field(*line, "zero_fraction", &row[1])?,
                    records.field(*line, "sigma", &row[2])?,
                ),
                FitSchema::Counts => DataPoint::from_counts(
                    theta,
                    records.field(*line, "zero_count", &row[1])?,
                    records.field(*line, "trials", &row[2])?,
                ),
            };
            point.map_err(|e| CliError::parse(&records.name, Some(*line), e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((schema, points))
}
