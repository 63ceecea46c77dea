//! Fitting the experimental Z-detection fringe
//! `p(zero|θ) = A exp[−N_e sin²(ℓ(θ + θ₀))]` and its figures of merit.
//!
//! `A = exp(−n_b)` absorbs background counts and incomplete extinction. The
//! fit is a weighted Levenberg–Marquardt iteration over `(A, N_e, θ₀)` with ℓ
//! held fixed. Visibility, FWHM and the resolution factor against a classical
//! `cos²(ℓθ)` fringe follow from the fitted parameters.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{contract, domain, Error, Result};

/// One measured point of the fringe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub theta: f64,
    pub zero_fraction: f64,
    pub sigma: f64,
}

impl DataPoint {
    pub fn new(theta: f64, zero_fraction: f64, sigma: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(domain(format!("angle must be finite, got {theta}")));
        }
        if !(0.0..=1.0).contains(&zero_fraction) {
            return Err(domain(format!(
                "zero fraction must lie in [0, 1], got {zero_fraction}"
            )));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(domain(format!("sigma must be non-negative, got {sigma}")));
        }
        Ok(Self {
            theta,
            zero_fraction,
            sigma,
        })
    }

    /// Point from raw counts, with the binomial standard error as `sigma`.
    pub fn from_counts(theta: f64, zero_count: u64, trials: u64) -> Result<Self> {
        let sigma = poisson_error_bar(zero_count, trials)?;
        Self::new(theta, zero_count as f64 / trials as f64, sigma)
    }
}

/// `A exp[−N_e sin²(ℓ(θ + θ₀))]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalModel {
    amplitude: f64,
    effective_photons: f64,
    offset: f64,
    quantum_number: u32,
}

impl SignalModel {
    pub fn new(amplitude: f64, effective_photons: f64, offset: f64, quantum_number: u32) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude <= 1.0) {
            return Err(domain(format!("amplitude must lie in (0, 1], got {amplitude}")));
        }
        if !(effective_photons.is_finite() && effective_photons > 0.0) {
            return Err(domain(format!(
                "effective photon number must be positive, got {effective_photons}"
            )));
        }
        if !offset.is_finite() {
            return Err(domain(format!("offset must be finite, got {offset}")));
        }
        if quantum_number == 0 {
            return Err(domain("quantum number must be a positive integer"));
        }
        Ok(Self {
            amplitude,
            effective_photons,
            offset,
            quantum_number,
        })
    }

    /// Same model written with the background `n_b = −ln A`.
    pub fn from_background(background: f64, effective_photons: f64, offset: f64, quantum_number: u32) -> Result<Self> {
        if !(background.is_finite() && background >= 0.0) {
            return Err(domain(format!("background must be non-negative, got {background}")));
        }
        Self::new((-background).exp(), effective_photons, offset, quantum_number)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn background(&self) -> f64 {
        -self.amplitude.ln()
    }

    pub fn effective_photons(&self) -> f64 {
        self.effective_photons
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn quantum_number(&self) -> u32 {
        self.quantum_number
    }

    pub fn period(&self) -> f64 {
        PI / f64::from(self.quantum_number)
    }

    /// Same model with `θ₀` folded into `[0, π/ℓ)`.
    pub fn canonical(&self) -> Self {
        let period = self.period();
        let mut offset = self.offset.rem_euclid(period);
        if offset >= period {
            offset = 0.0;
        }
        Self { offset, ..*self }
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        let s = (f64::from(self.quantum_number) * (theta + self.offset)).sin();
        self.amplitude * (-self.effective_photons * s * s).exp()
    }

    /// Angle of the fringe maximum nearest zero: `−θ₀`.
    pub fn peak_theta(&self) -> f64 {
        -self.offset
    }
}

/// Binomial standard error `√(p̂(1 − p̂)/M)` of the zero fraction `p̂ = k/M`.
pub fn poisson_error_bar(zero_count: u64, trials: u64) -> Result<f64> {
    if trials == 0 {
        return Err(domain("error bar needs at least one trial"));
    }
    if zero_count > trials {
        return Err(domain(format!(
            "zero count {zero_count} exceeds trial count {trials}"
        )));
    }
    let p = zero_count as f64 / trials as f64;
    Ok((p * (1.0 - p) / trials as f64).sqrt())
}

/// Fringe contrast `(max − min)/(max + min) = (1 − e^{−N_e})/(1 + e^{−N_e})`.
pub fn visibility(model: &SignalModel) -> f64 {
    let dip = (-model.effective_photons).exp();
    (1.0 - dip) / (1.0 + dip)
}

/// Full width of the central fringe at half its maximum `A/2`.
///
/// Found by bisection on the model itself between the peak and the adjacent
/// minimum, to an absolute width of 1e−12.
pub fn fwhm(model: &SignalModel) -> Result<f64> {
    let ne = model.effective_photons;
    if ne <= std::f64::consts::LN_2 {
        return Err(domain(format!(
            "fringe never falls to half maximum for N_e = {ne} <= ln 2"
        )));
    }
    let peak = model.peak_theta();
    let half = 0.5 * model.amplitude;
    let (mut lo, mut hi) = (0.0, 0.5 * model.period());
    while hi - lo > 5e-13 {
        let mid = 0.5 * (lo + hi);
        if model.evaluate(peak + mid) > half {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + hi)
}

/// FWHM of the classical `cos²(ℓθ)` fringe divided by the fitted FWHM.
pub fn resolution_factor(model: &SignalModel) -> Result<f64> {
    let classical = PI / (2.0 * f64::from(model.quantum_number));
    Ok(classical / fwhm(model)?)
}

/// How the amplitude enters the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parametrization {
    /// Optimize `A` directly.
    #[default]
    Amplitude,
    /// Optimize `n_b = −ln A`.
    Background,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Stop once `‖δ‖ < step_tolerance · (‖p‖ + step_tolerance)`.
    pub step_tolerance: f64,
    pub parametrization: Parametrization,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            step_tolerance: 1e-10,
            parametrization: Parametrization::Amplitude,
        }
    }
}

/// Fitted model plus figures of merit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: SignalModel,
    pub visibility: f64,
    /// `None` when `N_e <= ln 2`.
    pub fwhm: Option<f64>,
    pub resolution_factor: Option<f64>,
    /// `√Σ r_i²` of the weighted residuals.
    pub residual_norm: f64,
    /// Covariance of `(A, N_e, θ₀)`, `(JᵀWJ)⁻¹`.
    pub covariance: [[f64; 3]; 3],
    pub iterations: usize,
}

struct Problem<'a> {
    data: &'a [DataPoint],
    weights: Vec<f64>,
    quantum_number: u32,
    parametrization: Parametrization,
}

impl Problem<'_> {
    fn amplitude(&self, p: &Vector3<f64>) -> f64 {
        match self.parametrization {
            Parametrization::Amplitude => p[0],
            Parametrization::Background => (-p[0]).exp(),
        }
    }

    /// Weighted residuals and Jacobian rows.
    fn linearize(&self, p: &Vector3<f64>) -> (Vec<f64>, Vec<Vector3<f64>>) {
        let a = self.amplitude(p);
        let (ne, offset) = (p[1], p[2]);
        let l = f64::from(self.quantum_number);
        let mut residuals = Vec::with_capacity(self.data.len());
        let mut rows = Vec::with_capacity(self.data.len());
        for (d, &w) in self.data.iter().zip(&self.weights) {
            let u = l * (d.theta + offset);
            let s2 = u.sin().powi(2);
            let shape = (-ne * s2).exp();
            let f = a * shape;
            let d_first = match self.parametrization {
                Parametrization::Amplitude => shape,
                Parametrization::Background => -f,
            };
            let d_ne = -s2 * f;
            let d_offset = -ne * f * l * (2.0 * u).sin();
            residuals.push(w * (f - d.zero_fraction));
            rows.push(Vector3::new(w * d_first, w * d_ne, w * d_offset));
        }
        (residuals, rows)
    }

    fn cost(&self, p: &Vector3<f64>) -> f64 {
        let a = self.amplitude(p);
        let l = f64::from(self.quantum_number);
        self.data
            .iter()
            .zip(&self.weights)
            .map(|(d, &w)| {
                let s = (l * (d.theta + p[2])).sin();
                let r = w * (a * (-p[1] * s * s).exp() - d.zero_fraction);
                r * r
            })
            .sum()
    }
}

fn normal_equations(residuals: &[f64], rows: &[Vector3<f64>]) -> (Matrix3<f64>, Vector3<f64>) {
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for (r, row) in residuals.iter().zip(rows) {
        jtj += row * row.transpose();
        jtr += row * *r;
    }
    (jtj, jtr)
}

fn check_rank(jtj: &Matrix3<f64>) -> Result<()> {
    let eig = jtj.symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
    let min = eig.iter().cloned().fold(f64::INFINITY, |a, b| a.min(b.abs()));
    if !(max > 0.0) || min <= 1e-14 * max {
        return Err(Error::Rank(format!(
            "normal matrix eigenvalues span [{min:e}, {max:e}]"
        )));
    }
    Ok(())
}

/// Data-driven starting point: amplitude from the highest sample, `N_e` from
/// the lowest, `θ₀` placing a fringe peak on the highest sample.
pub fn initial_guess(data: &[DataPoint], quantum_number: u32) -> Result<SignalModel> {
    let (imax, top) = data
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.zero_fraction.total_cmp(&b.1.zero_fraction))
        .ok_or_else(|| contract("no data"))?;
    let amplitude = top.zero_fraction;
    if amplitude <= 0.0 {
        return Err(Error::Rank("every zero fraction is 0".into()));
    }
    let bottom = data
        .iter()
        .map(|d| d.zero_fraction)
        .fold(f64::INFINITY, f64::min);
    let ne = -(bottom.max(1e-6) / amplitude).ln();
    let offset = -data[imax].theta;
    Ok(SignalModel {
        amplitude,
        effective_photons: ne,
        offset,
        quantum_number,
    }
    .canonical())
}

fn check_data(data: &[DataPoint], quantum_number: u32) -> Result<()> {
    if quantum_number == 0 {
        return Err(domain("quantum number must be a positive integer"));
    }
    if data.len() < 4 {
        return Err(contract(format!(
            "fit needs at least 4 data points, got {}",
            data.len()
        )));
    }
    let lo = data.iter().map(|d| d.theta).fold(f64::INFINITY, f64::min);
    let hi = data.iter().map(|d| d.theta).fold(f64::NEG_INFINITY, f64::max);
    let half_period = 0.5 * PI / f64::from(quantum_number);
    if hi - lo < half_period * (1.0 - 1e-12) {
        return Err(contract(format!(
            "data span {:.6} rad is shorter than half a fringe period ({half_period:.6} rad)",
            hi - lo
        )));
    }
    Ok(())
}

/// `1/σ_i`, with zero sigmas replaced by the smallest nonzero one, or unit
/// weights when every sigma is zero.
fn fit_weights(data: &[DataPoint]) -> Vec<f64> {
    let floor = data
        .iter()
        .map(|d| d.sigma)
        .filter(|&s| s > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !floor.is_finite() {
        return vec![1.0; data.len()];
    }
    data.iter()
        .map(|d| 1.0 / if d.sigma > 0.0 { d.sigma } else { floor })
        .collect()
}

/// Weighted least-squares fit of the fringe with default options.
pub fn fit_signal(data: &[DataPoint], quantum_number: u32, initial: Option<SignalModel>) -> Result<FitReport> {
    fit_signal_with(data, quantum_number, initial, &FitOptions::default())
}

/// Levenberg–Marquardt over `(A or n_b, N_e, θ₀)`.
pub fn fit_signal_with(
    data: &[DataPoint],
    quantum_number: u32,
    initial: Option<SignalModel>,
    options: &FitOptions,
) -> Result<FitReport> {
    check_data(data, quantum_number)?;
    let start = match initial {
        Some(m) if m.quantum_number != quantum_number => {
            return Err(contract(format!(
                "initial model has l = {}, fit requested l = {quantum_number}",
                m.quantum_number
            )))
        }
        Some(m) => m,
        None => initial_guess(data, quantum_number)?,
    };
    let problem = Problem {
        data,
        weights: fit_weights(data),
        quantum_number,
        parametrization: options.parametrization,
    };
    let first = match options.parametrization {
        Parametrization::Amplitude => start.amplitude,
        Parametrization::Background => -start.amplitude.ln(),
    };
    let mut p = Vector3::new(first, start.effective_photons, start.offset);
    let mut cost = problem.cost(&p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        iterations += 1;
        let (residuals, rows) = problem.linearize(&p);
        let (jtj, jtr) = normal_equations(&residuals, &rows);
        check_rank(&jtj)?;
        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = jtj;
            for i in 0..3 {
                damped[(i, i)] += lambda * jtj[(i, i)];
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&(-jtr))) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let trial_cost = problem.cost(&trial);
            if trial_cost.is_finite() && trial_cost <= cost {
                let small = step.norm() < options.step_tolerance * (p.norm() + options.step_tolerance);
                p = trial;
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                converged = small;
                break;
            }
            lambda *= 10.0;
        }
        // no damping level decreases the cost: p is a minimum to working precision
        if !accepted || converged {
            converged = true;
            break;
        }
    }

    let amplitude = problem.amplitude(&p);
    if !converged {
        return Err(Error::NoConvergence {
            iterations,
            best_cost: cost,
            best: [amplitude, p[1], p[2]],
        });
    }
    let model = SignalModel::new(amplitude, p[1], p[2], quantum_number)
        .map_err(|e| Error::Rank(format!("fit left the model domain: {e}")))?
        .canonical();

    let (_, rows) = problem.linearize(&p);
    let (jtj, _) = normal_equations(&vec![0.0; rows.len()], &rows);
    check_rank(&jtj)?;
    let inverse = jtj
        .try_inverse()
        .ok_or_else(|| Error::Rank("normal matrix is not invertible".into()))?;
    let covariance = match options.parametrization {
        Parametrization::Amplitude => inverse,
        Parametrization::Background => {
            // dA/dn_b = −A
            let jac = Matrix3::from_diagonal(&Vector3::new(-amplitude, 1.0, 1.0));
            jac * inverse * jac.transpose()
        }
    };
    let mut cov = [[0.0; 3]; 3];
    for (i, row) in cov.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = covariance[(i, j)];
        }
    }

    Ok(FitReport {
        model,
        visibility: visibility(&model),
        fwhm: fwhm(&model).ok(),
        resolution_factor: resolution_factor(&model).ok(),
        residual_norm: cost.sqrt(),
        covariance: cov,
        iterations,
    })
}

/// Zero counts pooled at one angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeCount {
    pub theta: f64,
    pub zero_count: u64,
    pub trials: u64,
}

/// Synthetic fringe measurement: at each angle, `repeats` runs of `trials`
/// Bernoulli draws with success probability `model(θ)`, pooled.
pub fn synthesize_counts(
    model: &SignalModel,
    thetas: &[f64],
    trials: u64,
    repeats: u64,
    seed: u64,
) -> Result<Vec<FringeCount>> {
    if trials == 0 || repeats == 0 {
        return Err(domain("synthetic data needs at least one trial and one repeat"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    thetas
        .iter()
        .map(|&theta| {
            let coin = Bernoulli::new(model.evaluate(theta))
                .map_err(|e| domain(format!("invalid probability: {e}")))?;
            let total = trials * repeats;
            let zero_count = (0..total).filter(|_| coin.sample(&mut rng)).count() as u64;
            Ok(FringeCount {
                theta,
                zero_count,
                trials: total,
            })
        })
        .collect()
}

/// [`synthesize_counts`] converted to zero fractions with binomial error bars.
pub fn synthesize_dataset(
    model: &SignalModel,
    thetas: &[f64],
    trials: u64,
    repeats: u64,
    seed: u64,
) -> Result<Vec<DataPoint>> {
    synthesize_counts(model, thetas, trials, repeats, seed)?
        .iter()
        .map(|c| DataPoint::from_counts(c.theta, c.zero_count, c.trials))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn measured_model() -> SignalModel {
        SignalModel::new(0.911, 4.11, 0.686, 2).unwrap()
    }

    fn noiseless(model: &SignalModel, n: usize, lo: f64, hi: f64) -> Vec<DataPoint> {
        (0..n)
            .map(|i| {
                let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                DataPoint::new(t, model.evaluate(t), 0.0).unwrap()
            })
            .collect()
    }

    #[test]
    fn error_bar_examples() {
        assert_eq!(poisson_error_bar(0, 100).unwrap(), 0.0);
        assert!((poisson_error_bar(50, 100).unwrap() - 0.05).abs() < 1e-15);
        let s = poisson_error_bar(1822, 2000).unwrap();
        assert!((s - (0.911f64 * 0.089 / 2000.0).sqrt()).abs() < 1e-15);
        assert!((s - 0.00637).abs() < 1e-5);
        assert!(poisson_error_bar(1, 0).is_err());
        assert!(poisson_error_bar(3, 2).is_err());
    }

    #[test]
    fn visibility_examples() {
        assert!((visibility(&measured_model()) - 0.967714).abs() < 1e-6);
        let flat = SignalModel::new(0.9, 1e-12, 0.0, 1).unwrap();
        assert!(visibility(&flat) < 1e-12);
        let third = SignalModel::new(0.9, 3f64.ln(), 0.0, 1).unwrap();
        assert!((visibility(&third) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fwhm_examples() {
        let w2 = fwhm(&measured_model()).unwrap();
        let closed = (2.0 / 2.0) * (std::f64::consts::LN_2 / 4.11).sqrt().asin();
        assert!((w2 - closed).abs() < 1e-12);
        assert!((w2 - 0.4231).abs() < 1e-4);
        let w4 = fwhm(&SignalModel::new(0.911, 4.11, 0.1, 4).unwrap()).unwrap();
        assert!((w4 - 0.5 * w2).abs() < 1e-12);
        let sharp = fwhm(&SignalModel::new(1.0, 1e12, 0.0, 1).unwrap()).unwrap();
        assert!(sharp < 1e-5);
        let err = fwhm(&SignalModel::new(1.0, 0.6, 0.0, 1).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn resolution_factor_examples() {
        let f = resolution_factor(&measured_model()).unwrap();
        assert!((f - 1.856).abs() < 1e-3);
        // sin²(π/8) = ln 2 / N_e gives FWHM π/8 at ℓ = 2
        let ne = std::f64::consts::LN_2 / (PI / 8.0).sin().powi(2);
        let f = resolution_factor(&SignalModel::new(0.8, ne, 0.0, 2).unwrap()).unwrap();
        assert!((f - 2.0).abs() < 1e-10);
        // FWHM equal to π/(2ℓ) needs sin²(π/4) = ½, i.e. N_e = 2 ln 2
        let f = resolution_factor(&SignalModel::new(1.0, 2.0 * std::f64::consts::LN_2, 0.3, 3).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn model_invariants() {
        let m = SignalModel::from_background(0.093, 4.11, 0.686, 2).unwrap();
        assert!((m.amplitude() - 0.911).abs() < 1e-3);
        assert!((m.background() - 0.093).abs() < 1e-15);
        let shifted = SignalModel::new(0.911, 4.11, 0.686 + PI / 2.0, 2).unwrap();
        assert!((shifted.canonical().offset() - 0.686).abs() < 1e-15);
        let negative = SignalModel::new(0.911, 4.11, 0.686 - 3.0 * PI / 2.0, 2).unwrap();
        assert!((negative.canonical().offset() - 0.686).abs() < 1e-14);
        for t in [-1.0, 0.0, 0.3, 2.0] {
            assert!((shifted.evaluate(t) - measured_model().evaluate(t)).abs() < 1e-14);
            let v = measured_model().evaluate(t);
            assert!(v > 0.0 && v <= 0.911);
        }
        assert!(SignalModel::new(1.2, 1.0, 0.0, 1).is_err());
        assert!(SignalModel::new(0.5, 0.0, 0.0, 1).is_err());
    }

    #[test]
    fn noiseless_round_trip() {
        let truth = measured_model();
        let data = noiseless(&truth, 50, 0.0, PI / 2.0);
        let r = fit_signal(&data, 2, None).unwrap();
        assert!((r.model.amplitude() - 0.911).abs() < 1e-8);
        assert!((r.model.effective_photons() - 4.11).abs() < 1e-8);
        assert!((r.model.offset() - 0.686).abs() < 1e-8);
        assert!(r.residual_norm < 1e-8);
    }

    #[test]
    fn reparametrization_is_consistent() {
        let truth = measured_model();
        let data = synthesize_dataset(&truth, &(0..40).map(|i| i as f64 * PI / 78.0).collect::<Vec<_>>(), 2000, 1, 3)
            .unwrap();
        let a = fit_signal_with(&data, 2, None, &FitOptions::default()).unwrap();
        let b = fit_signal_with(
            &data,
            2,
            None,
            &FitOptions {
                parametrization: Parametrization::Background,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((a.model.amplitude() - b.model.amplitude()).abs() < 1e-10);
        assert!((a.model.effective_photons() - b.model.effective_photons()).abs() < 1e-10);
        assert!((a.model.offset() - b.model.offset()).abs() < 1e-10);
        assert!((a.residual_norm - b.residual_norm).abs() < 1e-10);
        for i in 0..3 {
            for j in 0..3 {
                let scale = a.covariance[i][j].abs().max(1e-12);
                assert!((a.covariance[i][j] - b.covariance[i][j]).abs() < 1e-6 * scale);
            }
        }
    }

    #[test]
    fn preconditions() {
        let truth = measured_model();
        let few = noiseless(&truth, 3, 0.0, 1.0);
        assert!(matches!(fit_signal(&few, 2, None), Err(Error::Contract(_))));
        let narrow = noiseless(&truth, 10, 0.0, 0.2);
        assert!(matches!(fit_signal(&narrow, 2, None), Err(Error::Contract(_))));
        let flat: Vec<DataPoint> = (0..10)
            .map(|i| DataPoint::new(i as f64 * 0.2, 0.5, 0.01).unwrap())
            .collect();
        assert!(matches!(fit_signal(&flat, 2, None), Err(Error::Rank(_))));
    }

    #[test]
    fn zero_sigmas_use_smallest_nonzero() {
        let data = [
            DataPoint::new(0.0, 0.5, 0.0).unwrap(),
            DataPoint::new(0.1, 0.5, 0.02).unwrap(),
            DataPoint::new(0.2, 0.5, 0.05).unwrap(),
        ];
        assert_eq!(fit_weights(&data), vec![50.0, 50.0, 20.0]);
        let zeros = [DataPoint::new(0.0, 0.5, 0.0).unwrap(); 2];
        assert_eq!(fit_weights(&zeros), vec![1.0, 1.0]);
    }

    #[test]
    fn iteration_budget_is_enforced() {
        let truth = measured_model();
        let data = synthesize_dataset(&truth, &(0..30).map(|i| i as f64 * 0.05).collect::<Vec<_>>(), 500, 1, 9)
            .unwrap();
        let far = SignalModel::new(0.3, 0.9, 0.1, 2).unwrap();
        let opts = FitOptions {
            max_iterations: 1,
            ..Default::default()
        };
        match fit_signal_with(&data, 2, Some(far), &opts) {
            Err(Error::NoConvergence { iterations, best, .. }) => {
                assert_eq!(iterations, 1);
                assert!(best.iter().all(|v| v.is_finite()));
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
