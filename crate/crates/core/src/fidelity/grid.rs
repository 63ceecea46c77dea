use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Composite rule used to build a [`QuadratureGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    CompositeSimpson,
}

/// Uniform composite-Simpson nodes and weights on a closed interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rule: QuadratureRule,
}

impl QuadratureGrid {
    /// Composite Simpson on `[lower, upper]` with an odd number of nodes (≥ 3).
    pub fn simpson(lower: f64, upper: f64, nodes: usize) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(domain(format!("invalid interval [{lower}, {upper}]")));
        }
        if nodes < 3 || nodes % 2 == 0 {
            return Err(domain(format!(
                "composite Simpson needs an odd node count >= 3, got {nodes}"
            )));
        }
        let intervals = nodes - 1;
        let mid = 0.5 * (lower + upper);
        let half = 0.5 * (upper - lower);
        // (2i − n) / n is exactly antisymmetric in i, so a symmetric interval
        // gets nodes with θ_{n−i} == −θ_i bit for bit
        let mut xs: Vec<f64> = (0..nodes)
            .map(|i| {
                let t = (2 * i as i64 - intervals as i64) as f64 / intervals as f64;
                mid + half * t
            })
            .collect();
        xs[0] = lower;
        xs[intervals] = upper;

        let h = (upper - lower) / intervals as f64;
        let weights = (0..nodes)
            .map(|i| {
                let c = if i == 0 || i == intervals {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect();
        Ok(Self {
            nodes: xs,
            weights,
            rule: QuadratureRule::CompositeSimpson,
        })
    }

    /// `[−π, π]` with `2^exponent + 1` nodes.
    pub fn full_circle(exponent: u32) -> Result<Self> {
        Self::simpson(-PI, PI, nodes_for_exponent(exponent)?)
    }

    /// `[lower, upper]` with `2^exponent + 1` nodes.
    pub fn dyadic(lower: f64, upper: f64, exponent: u32) -> Result<Self> {
        Self::simpson(lower, upper, nodes_for_exponent(exponent)?)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lower(&self) -> f64 {
        self.nodes[0]
    }

    pub fn upper(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn width(&self) -> f64 {
        self.upper() - self.lower()
    }

    pub fn spacing(&self) -> f64 {
        self.width() / (self.len() - 1) as f64
    }

    /// True when the grid covers the whole circle `[−π, π]`.
    pub fn is_full_circle(&self) -> bool {
        self.lower() == -PI && self.upper() == PI
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        self.weights.iter().zip(values).map(|(w, f)| w * f).sum()
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, w)| w * f(x))
            .sum()
    }

    /// Same interval with every other node dropped, if that is still a Simpson grid.
    pub fn coarsened(&self) -> Option<Self> {
        let intervals = self.len() - 1;
        if intervals % 4 != 0 {
            return None;
        }
        Self::simpson(self.lower(), self.upper(), intervals / 2 + 1).ok()
    }

    /// Same interval with twice as many subintervals.
    pub fn refined(&self) -> Self {
        Self::simpson(self.lower(), self.upper(), 2 * (self.len() - 1) + 1)
            .expect("refining a valid grid yields a valid grid")
    }
}

fn nodes_for_exponent(exponent: u32) -> Result<usize> {
    if !(1..=26).contains(&exponent) {
        return Err(domain(format!(
            "grid exponent must lie in 1..=26, got {exponent}"
        )));
    }
    Ok((1usize << exponent) + 1)
}

/// Prior density over the angular displacement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorDensity {
    /// Flat over whatever interval it is evaluated on (`1/2π` on the full circle).
    Uniform,
    /// Piecewise-linear density through `(nodes, values)`, zero outside.
    Tabulated { nodes: Vec<f64>, values: Vec<f64> },
}

impl PriorDensity {
    /// Tabulated prior on `grid`; must be non-negative and integrate to 1.
    pub fn tabulated(grid: &QuadratureGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(domain(format!(
                "prior table has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(domain("prior density must be finite and non-negative"));
        }
        let mass = grid.integrate(&values);
        if (mass - 1.0).abs() > 1e-10 {
            return Err(domain(format!("prior integrates to {mass}, expected 1")));
        }
        Ok(Self::Tabulated {
            nodes: grid.nodes().to_vec(),
            values,
        })
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, Self::Uniform)
    }

    /// Prior values at every node of `grid`.
    pub fn density_on(&self, grid: &QuadratureGrid) -> Vec<f64> {
        match self {
            Self::Uniform => vec![1.0 / grid.width(); grid.len()],
            Self::Tabulated { nodes, values } => grid
                .nodes()
                .iter()
                .map(|&x| interpolate(nodes, values, x))
                .collect(),
        }
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if xs.is_empty() || x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let j = xs.partition_point(|&v| v <= x);
    if j == 0 {
        return ys[0];
    }
    if j >= xs.len() {
        return ys[xs.len() - 1];
    }
    let (x0, x1) = (xs[j - 1], xs[j]);
    let t = (x - x0) / (x1 - x0);
    ys[j - 1] + t * (ys[j] - ys[j - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_circle_invariants() {
        let g = QuadratureGrid::full_circle(12).unwrap();
        assert_eq!(g.len(), 4097);
        assert_eq!(g.lower(), -PI);
        assert_eq!(g.upper(), PI);
        assert!(g.is_full_circle());
        assert!((g.weights().iter().sum::<f64>() - 2.0 * PI).abs() < 1e-12);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(g.weights().iter().all(|&w| w >= 0.0));
        let n = g.len();
        for i in 0..n {
            assert_eq!(g.nodes()[i], -g.nodes()[n - 1 - i]);
        }
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let g = QuadratureGrid::simpson(-1.0, 2.0, 9).unwrap();
        let v = g.integrate_fn(|x| x * x * x - 2.0 * x + 1.0);
        // ∫ x³ − 2x + 1 over [−1, 2] = 15/4 − 3 + 3
        assert!((v - 3.75).abs() < 1e-13);
    }

    #[test]
    fn invalid_grids() {
        assert!(QuadratureGrid::simpson(0.0, 1.0, 4).is_err());
        assert!(QuadratureGrid::simpson(0.0, 1.0, 1).is_err());
        assert!(QuadratureGrid::simpson(1.0, 1.0, 5).is_err());
        assert!(QuadratureGrid::full_circle(0).is_err());
    }

    #[test]
    fn coarsen_and_refine() {
        let g = QuadratureGrid::full_circle(4).unwrap();
        let c = g.coarsened().unwrap();
        assert_eq!(c.len(), 9);
        assert_eq!(c.refined(), g);
        assert!(QuadratureGrid::simpson(0.0, 1.0, 7).unwrap().coarsened().is_none());
    }

    #[test]
    fn uniform_prior_on_circle() {
        let g = QuadratureGrid::full_circle(8).unwrap();
        let p = PriorDensity::Uniform.density_on(&g);
        assert!(p.iter().all(|&v| (v - 1.0 / (2.0 * PI)).abs() < 1e-16));
        assert!((g.integrate(&p) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tabulated_prior() {
        let g = QuadratureGrid::full_circle(10).unwrap();
        // raised cosine, normalized
        let raw: Vec<f64> = g.nodes().iter().map(|t| (1.0 + t.cos()) / (2.0 * PI)).collect();
        let prior = PriorDensity::tabulated(&g, raw.clone()).unwrap();
        assert_eq!(prior.density_on(&g), raw);
        let unnormalized: Vec<f64> = raw.iter().map(|v| 2.0 * v).collect();
        assert!(PriorDensity::tabulated(&g, unnormalized).is_err());
        let coarse = g.coarsened().unwrap();
        let on_coarse = prior.density_on(&coarse);
        assert!((coarse.integrate(&on_coarse) - 1.0).abs() < 1e-10);
    }
}
