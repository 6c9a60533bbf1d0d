//! Thermodynamic formalism on the compact alphabet `[0, 1]`.
//!
//! The a priori probability on `[0, 1]` is replaced by a quadrature rule, and
//! a continuous potential `A(x₁, x₂)` by its values on node pairs. That is a
//! finite-alphabet problem with the quadrature weights as a priori weights,
//! so every operation here is a thin wrapper over [`crate::finite_thermo`]
//! and [`crate::involution`] (Nyström discretization of the Ruelle operator,
//! `B[j][i] = exp A(a_i, a_j) · w_i`).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::finite_thermo::{
    equilibrium_with, relative_entropy, spectral_data_with, EquilibriumState, Potential,
    SolverOptions, SpectralData,
};
use crate::involution::entropy_production_potential;
use crate::symbolic::AprioriWeights;
use crate::units::ExtReal;

/// Fewest nodes accepted by the named rules.
pub const MIN_RULE_NODES: usize = 8;

/// Tolerance on `Σ w = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    /// `n` equal cells, nodes at the cell midpoints.
    Midpoint,
    /// Gauss–Legendre mapped from `[−1, 1]` to `[0, 1]`.
    GaussLegendre,
    /// User-supplied nodes and weights.
    Custom,
}

impl QuadratureRule {
    pub fn parse(s: &str) -> Option<QuadratureRule> {
        match s {
            "midpoint" => Some(QuadratureRule::Midpoint),
            "gauss-legendre" | "gauss_legendre" | "gl" => Some(QuadratureRule::GaussLegendre),
            "custom" => Some(QuadratureRule::Custom),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QuadratureRule::Midpoint => "midpoint",
            QuadratureRule::GaussLegendre => "gauss-legendre",
            QuadratureRule::Custom => "custom",
        }
    }
}

/// Discrete a priori probability on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rule: QuadratureRule,
}

impl QuadratureMeasure {
    pub fn midpoint(n: usize) -> Result<Self> {
        check_rule_size(n)?;
        let h = 1.0 / n as f64;
        let nodes = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        Self::build(nodes, vec![h; n], QuadratureRule::Midpoint)
    }

    pub fn gauss_legendre(n: usize) -> Result<Self> {
        check_rule_size(n)?;
        let (x, w) = gauss_legendre_nodes(n);
        let nodes = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
        let weights = w.iter().map(|v| 0.5 * v).collect();
        Self::build(nodes, weights, QuadratureRule::GaussLegendre)
    }

    /// Arbitrary rule with at least two nodes.
    pub fn custom(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidQuadrature(format!(
                "need at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        Self::build(nodes, weights, QuadratureRule::Custom)
    }

    pub fn with_rule(rule: QuadratureRule, n: usize) -> Result<Self> {
        match rule {
            QuadratureRule::Midpoint => Self::midpoint(n),
            QuadratureRule::GaussLegendre => Self::gauss_legendre(n),
            QuadratureRule::Custom => Err(Error::InvalidQuadrature(
                "custom rules need explicit nodes and weights".into(),
            )),
        }
    }

    fn build(nodes: Vec<f64>, weights: Vec<f64>, rule: QuadratureRule) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::InvalidQuadrature(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.iter().any(|&a| !(0.0..=1.0).contains(&a)) {
            return Err(Error::InvalidQuadrature("nodes must lie in [0, 1]".into()));
        }
        if nodes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidQuadrature(
                "nodes must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidQuadrature("weights must be positive".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidQuadrature(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        Ok(QuadratureMeasure {
            nodes,
            weights,
            rule,
        })
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

    pub fn apriori_weights(&self) -> AprioriWeights {
        AprioriWeights::new(self.weights.clone()).expect("quadrature weights are positive")
    }
}

fn check_rule_size(n: usize) -> Result<()> {
    if n < MIN_RULE_NODES {
        return Err(Error::InvalidQuadrature(format!(
            "need at least {MIN_RULE_NODES} nodes, got {n}"
        )));
    }
    Ok(())
}

/// Nodes and weights on `[−1, 1]`, ascending. Newton's method on `P_n` from
/// the Chebyshev-like initial guesses; weights `2 / ((1 − x²) P_n'(x)²)`.
/// The weights are rescaled to sum to exactly 2 up to rounding.
fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let legendre = |t: f64| {
        // returns (P_n(t), P_n'(t))
        let (mut p0, mut p1) = (1.0, t);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
        (p1, dp)
    };
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(t);
            let step = p / dp;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(t);
        let weight = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v *= 2.0 / sum);
    (x, w)
}

/// Potential on `[0, 1]²` depending on `(x₁, x₂)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ContinuousPotential {
    /// `c`.
    Constant { c: f64 },
    /// `f(x₁) = Σ_k coeffs[k] x₁^k`.
    Separable { coeffs: Vec<f64> },
    /// `α x₁ x₂ + β x₁ + γ x₂`.
    Bilinear { alpha: f64, beta: f64, gamma: f64 },
    /// `α cos(2π(x₁ − x₂))`, symmetric.
    CosineCoupling { alpha: f64 },
    /// `α sin(2π(x₁ − x₂))`, antisymmetric.
    SineCoupling { alpha: f64 },
    /// Values on node pairs, `values[i·n + j] = A(a_i, a_j)`.
    Tabulated { n: usize, values: Vec<f64> },
}

impl ContinuousPotential {
    /// Value at a point; `None` for tabulated potentials, which only exist
    /// on their nodes.
    pub fn eval(&self, x1: f64, x2: f64) -> Option<f64> {
        Some(match self {
            ContinuousPotential::Constant { c } => *c,
            ContinuousPotential::Separable { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * x1 + c)
            }
            ContinuousPotential::Bilinear { alpha, beta, gamma } => {
                alpha * x1 * x2 + beta * x1 + gamma * x2
            }
            ContinuousPotential::CosineCoupling { alpha } => alpha * (2.0 * PI * (x1 - x2)).cos(),
            ContinuousPotential::SineCoupling { alpha } => alpha * (2.0 * PI * (x1 - x2)).sin(),
            ContinuousPotential::Tabulated { .. } => return None,
        })
    }

    /// Finite potential on the node alphabet.
    pub fn discretize(&self, q: &QuadratureMeasure) -> Result<Potential> {
        let n = q.len();
        let table = match self {
            ContinuousPotential::Tabulated { n: size, values } => {
                if *size != n || values.len() != n * n {
                    return Err(Error::DimensionMismatch {
                        what: "tabulated potential",
                        expected: n * n,
                        found: values.len(),
                    });
                }
                values.clone()
            }
            _ => {
                let a = q.nodes();
                (0..n * n)
                    .map(|e| self.eval(a[e / n], a[e % n]).expect("closed-form family"))
                    .collect()
            }
        };
        if let Some(index) = table.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidEntry {
                what: "continuous potential",
                index,
                value: table[index],
            });
        }
        Potential::new(n, 2, table)
    }
}

pub fn nystrom_spectral(a: &ContinuousPotential, q: &QuadratureMeasure) -> Result<SpectralData> {
    nystrom_spectral_with(a, q, SolverOptions::default())
}

pub fn nystrom_spectral_with(
    a: &ContinuousPotential,
    q: &QuadratureMeasure,
    opts: SolverOptions,
) -> Result<SpectralData> {
    spectral_data_with(&a.discretize(q)?, &q.apriori_weights(), opts)
}

/// Equilibrium on the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TfcaEquilibrium {
    /// Column-stochastic `G[i][j] = exp Ā(a_i, a_j) · w_i`, row-major.
    pub kernel: Vec<f64>,
    /// Stationary node probabilities.
    pub stationary: Vec<f64>,
    pub state: EquilibriumState,
}

impl TfcaEquilibrium {
    /// 2-cylinder masses `μ₂(i, j) = G[i][j] π_j`, row-major.
    pub fn two_cylinder(&self) -> Vec<f64> {
        let n = self.stationary.len();
        (0..n * n)
            .map(|e| self.kernel[e] * self.stationary[e % n])
            .collect()
    }
}

pub fn tfca_equilibrium(a: &ContinuousPotential, q: &QuadratureMeasure) -> Result<TfcaEquilibrium> {
    tfca_equilibrium_with(a, q, SolverOptions::default())
}

pub fn tfca_equilibrium_with(
    a: &ContinuousPotential,
    q: &QuadratureMeasure,
    opts: SolverOptions,
) -> Result<TfcaEquilibrium> {
    let state = equilibrium_with(&a.discretize(q)?, &q.apriori_weights(), opts)?;
    let n = q.len();
    let w = q.weights();
    let kernel = (0..n * n)
        .map(|e| state.normalized.table()[e].exp() * w[e / n])
        .collect();
    Ok(TfcaEquilibrium {
        kernel,
        stationary: state.measure.stationary().to_vec(),
        state,
    })
}

/// `h^ν(μ_A) = −∫ Ā dμ_A`, nonpositive for a probability `ν`.
pub fn tfca_entropy(a: &ContinuousPotential, q: &QuadratureMeasure) -> Result<f64> {
    let eq = tfca_equilibrium(a, q)?;
    relative_entropy(&eq.state.measure, &q.apriori_weights())
}

/// `Σ μ₂(i, j) [Ā(a_i, a_j) − Ā(a_j, a_i)]`.
pub fn tfca_entropy_production(a: &ContinuousPotential, q: &QuadratureMeasure) -> Result<ExtReal> {
    entropy_production_potential(&a.discretize(q)?, &q.apriori_weights())
}
