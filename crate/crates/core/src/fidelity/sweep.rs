use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fidelity, FidelityOptions, FidelityResult};
use crate::error::{domain, Result};
use crate::probmodels::{InterferometerConfig, NoiseModel, Strategy};

/// Strictly monotone, non-empty list of sweep values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    values: Vec<f64>,
}

impl Axis {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("sweep axis is empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("sweep axis contains a non-finite value"));
        }
        let increasing = values.windows(2).all(|w| w[0] < w[1]);
        let decreasing = values.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Err(domain("sweep axis must be strictly monotone"));
        }
        Ok(Self { values })
    }

    /// `points` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(start: f64, stop: f64, points: usize) -> Result<Self> {
        match points {
            0 => Err(domain("sweep axis needs at least one point")),
            1 => Self::new(vec![start]),
            _ => {
                let step = (stop - start) / (points - 1) as f64;
                let mut values: Vec<f64> = (0..points).map(|i| start + step * i as f64).collect();
                values[points - 1] = stop;
                Self::new(values)
            }
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// What a fidelity sweep varies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    MeanPhotons(Axis),
    /// Rectangular grid over the two path transmissivities, `t_a` outermost.
    Transmissivities { t_a: Axis, t_b: Axis },
    Efficiency(Axis),
    /// Rectangular grid, dark rate outermost.
    DarkRateByPhotons { dark_rate: Axis, mean_photons: Axis },
}

impl SweepAxis {
    pub fn names(&self) -> &'static [&'static str] {
        match self {
            Self::MeanPhotons(_) => &["mean_photons"],
            Self::Transmissivities { .. } => &["t_a", "t_b"],
            Self::Efficiency(_) => &["efficiency"],
            Self::DarkRateByPhotons { .. } => &["dark_rate", "mean_photons"],
        }
    }

    /// Grid coordinates in lexicographic order of the axes.
    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        fn outer(a: &Axis, b: &Axis) -> Vec<Vec<f64>> {
            a.values()
                .iter()
                .flat_map(|&x| b.values().iter().map(move |&y| vec![x, y]))
                .collect()
        }
        match self {
            Self::MeanPhotons(a) | Self::Efficiency(a) => {
                a.values().iter().map(|&x| vec![x]).collect()
            }
            Self::Transmissivities { t_a, t_b } => outer(t_a, t_b),
            Self::DarkRateByPhotons {
                dark_rate,
                mean_photons,
            } => outer(dark_rate, mean_photons),
        }
    }

    fn apply(
        &self,
        coords: &[f64],
        config: &InterferometerConfig,
        noise: &NoiseModel,
    ) -> Result<(InterferometerConfig, NoiseModel)> {
        let (c, n) = (*config, *noise);
        Ok(match self {
            Self::MeanPhotons(_) => (c.with_mean_photons(coords[0])?, n),
            Self::Transmissivities { .. } => (
                c,
                NoiseModel::new(coords[0], coords[1], n.efficiency(), n.dark_rate())?,
            ),
            Self::Efficiency(_) => (
                c,
                NoiseModel::new(n.t_a(), n.t_b(), coords[0], n.dark_rate())?,
            ),
            Self::DarkRateByPhotons { .. } => (
                c.with_mean_photons(coords[1])?,
                NoiseModel::new(n.t_a(), n.t_b(), n.efficiency(), coords[0])?,
            ),
        })
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Values of [`SweepAxis::names`], in order.
    pub coordinates: Vec<f64>,
    pub result: FidelityResult,
}

/// Evaluates the fidelity at every grid point of `axis`.
///
/// Parameters not on the axis are taken from `config` and `noise`. Points are
/// evaluated in parallel; the output order is always the lexicographic order
/// of [`SweepAxis::coordinates`].
pub fn fidelity_sweep(
    strategy: Strategy,
    axis: &SweepAxis,
    config: &InterferometerConfig,
    noise: &NoiseModel,
    options: &FidelityOptions,
) -> Result<Vec<SweepPoint>> {
    axis.coordinates()
        .into_par_iter()
        .map(|coordinates| {
            let (c, n) = axis.apply(&coordinates, config, noise)?;
            let result = fidelity(strategy, &c, &n, options)?;
            Ok(SweepPoint {
                coordinates,
                result,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_validation() {
        assert!(Axis::new(vec![]).is_err());
        assert!(Axis::new(vec![1.0, 1.0]).is_err());
        assert!(Axis::new(vec![1.0, 3.0, 2.0]).is_err());
        assert!(Axis::new(vec![3.0, 2.0, 1.0]).is_ok());
        assert!(Axis::new(vec![f64::NAN]).is_err());
        let a = Axis::linspace(0.0, 1.0, 21).unwrap();
        assert_eq!(a.len(), 21);
        assert_eq!(a.values()[20], 1.0);
        assert!((a.values()[3] - 0.15).abs() < 1e-15);
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let axis = SweepAxis::DarkRateByPhotons {
            dark_rate: Axis::new(vec![1e-8, 1e-2]).unwrap(),
            mean_photons: Axis::new(vec![1.0, 2.0, 3.0]).unwrap(),
        };
        let coords = axis.coordinates();
        assert_eq!(coords.len(), 6);
        assert_eq!(coords[0], vec![1e-8, 1.0]);
        assert_eq!(coords[2], vec![1e-8, 3.0]);
        assert_eq!(coords[3], vec![1e-2, 1.0]);
    }

    #[test]
    fn sweep_is_ordered_and_deterministic() {
        let config = InterferometerConfig::new(1.0, 1).unwrap();
        let axis = SweepAxis::MeanPhotons(Axis::linspace(1.0, 8.0, 8).unwrap());
        let opts = FidelityOptions {
            grid_exponent: 10,
            ..Default::default()
        };
        let a = fidelity_sweep(Strategy::Z, &axis, &config, &NoiseModel::identity(), &opts).unwrap();
        let b = fidelity_sweep(Strategy::Z, &axis, &config, &NoiseModel::identity(), &opts).unwrap();
        assert_eq!(a, b);
        for (p, n) in a.iter().zip(1..) {
            assert_eq!(p.coordinates, vec![n as f64]);
            assert_eq!(p.result.config.mean_photons(), n as f64);
        }
    }

    #[test]
    fn invalid_axis_value_propagates() {
        let config = InterferometerConfig::new(3.0, 1).unwrap();
        let axis = SweepAxis::Efficiency(Axis::new(vec![0.5, 1.5]).unwrap());
        let r = fidelity_sweep(Strategy::Z, &axis, &config, &NoiseModel::identity(), &FidelityOptions::default());
        assert!(r.is_err());
    }
}
