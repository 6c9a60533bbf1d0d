//! Involution kernels, dual potentials, entropy production and specific
//! information gain.
//!
//! For a depth-2 potential the involution kernel `W(y₁, x₁)` couples the
//! most recent past symbol `y₁` with the first future symbol `x₁`. The dual
//! potential lives on the past, stored as a table `a_minus[y₁][y₂]`, and is
//! tied to `A` by the cocycle identity
//!
//! ```text
//! a_minus[y₁][y₂] = A(y₁, x₁) + W(y₂, y₁) − W(y₁, x₁)     for every x₁.
//! ```
//!
//! The canonical kernel `W = A` gives the transpose `a_minus(i, j) = A(j, i)`.
//! Adding a gauge `g(y₁)` to `W` changes `a_minus` by the coboundary
//! `g(j) − g(i)`, which does not change any equilibrium state.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::finite_thermo::{
    equilibrium, integrate_potential, relative_entropy, spectral_data, Potential,
};
use crate::symbolic::{
    log_cylinder_mass_unchecked, sample_orbit_with, trial_rng, Alphabet, AprioriWeights,
    MarkovMeasure,
};
use crate::units::ExtReal;

/// Exhaustive enumeration bound for [`cylinder_gain_estimate`].
pub const MAX_CYLINDERS: u128 = 10_000_000;

/// Tolerance for the gauge equations in [`is_symmetric`].
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct InvolutionData {
    /// `W(y₁, x₁)`, row-major `d × d`.
    pub kernel: Vec<f64>,
    /// Dual potential on the past, depth 2.
    pub a_minus: Potential,
    /// Gauge added to the canonical kernel.
    pub gauge: Vec<f64>,
}

impl InvolutionData {
    /// Largest violation of the cocycle identity over all `(y₁, y₂, x₁)`.
    /// Pairs where both sides are `−∞` are skipped.
    pub fn cocycle_residual(&self, a: &Potential) -> f64 {
        let d = a.alphabet_size();
        let w = |y: usize, x: usize| self.kernel[y * d + x];
        let mut worst: f64 = 0.0;
        for y1 in 0..d {
            for y2 in 0..d {
                for x1 in 0..d {
                    let lhs = self.a_minus.pair(y1, y2);
                    let rhs = a.pair(y1, x1) + w(y2, y1) - w(y1, x1);
                    if lhs == f64::NEG_INFINITY && rhs == f64::NEG_INFINITY {
                        continue;
                    }
                    if a.pair(y1, x1) == f64::NEG_INFINITY || w(y1, x1) == f64::NEG_INFINITY {
                        // the identity is only required where the kernel is finite
                        continue;
                    }
                    let diff = (lhs - rhs).abs();
                    worst = worst.max(if diff.is_nan() { f64::INFINITY } else { diff });
                }
            }
        }
        worst
    }
}

fn depth2(a: &Potential) -> Result<Potential> {
    a.to_depth2()
}

/// Canonical involution kernel `W = A`, gauge zero.
pub fn involution_kernel(a: &Potential) -> Result<InvolutionData> {
    let d = a.alphabet_size();
    with_gauge(a, &vec![0.0; d])
}

/// Kernel `W(y₁, x₁) = A(y₁, x₁) + g(y₁)`, giving
/// `a_minus(i, j) = A(j, i) + g(j) − g(i)`.
pub fn with_gauge(a: &Potential, gauge: &[f64]) -> Result<InvolutionData> {
    let a = depth2(a)?;
    let d = a.alphabet_size();
    if gauge.len() != d {
        return Err(Error::DimensionMismatch {
            what: "gauge",
            expected: d,
            found: gauge.len(),
        });
    }
    if let Some(index) = gauge.iter().position(|g| !g.is_finite()) {
        return Err(Error::InvalidEntry {
            what: "gauge",
            index,
            value: gauge[index],
        });
    }
    let kernel = (0..d * d).map(|e| a.table()[e] + gauge[e / d]).collect();
    let a_minus = Potential::from_fn(d, 2, |w| a.pair(w[1], w[0]) + gauge[w[1]] - gauge[w[0]])?;
    Ok(InvolutionData {
        kernel,
        a_minus,
        gauge: gauge.to_vec(),
    })
}

/// Result of [`is_symmetric`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    /// `A(i, j) = A(j, i) + g(j) − g(i)` for some gauge `g`.
    pub symmetric: bool,
    /// Plain transpose symmetry `A(i, j) = A(j, i)`.
    pub strict: bool,
    /// A witness gauge with `g(0) = 0` on each connected class, when symmetric.
    pub gauge: Option<Vec<f64>>,
    /// Largest violation of the gauge equations for the candidate gauge.
    pub defect: f64,
}

/// Symmetry up to the involution-kernel gauge.
///
/// The candidate gauge is propagated from symbol 0 along pairs where both
/// `A(i, j)` and `A(j, i)` are finite; every pair is then checked. A pair
/// with exactly one forbidden direction is never symmetric. Symmetry does not
/// involve the a priori weights.
pub fn is_symmetric(a: &Potential) -> Result<SymmetryReport> {
    let a = depth2(a)?;
    let d = a.alphabet_size();
    let finite = |i: usize, j: usize| a.pair(i, j).is_finite() && a.pair(j, i).is_finite();
    let diff = |i: usize, j: usize| a.pair(i, j) - a.pair(j, i);

    let mut one_way = false;
    let mut strict = true;
    for i in 0..d {
        for j in 0..d {
            let (x, y) = (a.pair(i, j), a.pair(j, i));
            if x.is_finite() != y.is_finite() {
                one_way = true;
                strict = false;
            } else if x.is_finite() && (x - y).abs() > SYMMETRY_TOL {
                strict = false;
            }
        }
    }

    let mut g = vec![f64::NAN; d];
    for root in 0..d {
        if !g[root].is_nan() {
            continue;
        }
        g[root] = 0.0;
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            for j in 0..d {
                if g[j].is_nan() && finite(i, j) {
                    g[j] = g[i] + diff(i, j);
                    stack.push(j);
                }
            }
        }
    }
    let mut defect: f64 = if one_way { f64::INFINITY } else { 0.0 };
    for i in 0..d {
        for j in 0..d {
            if finite(i, j) {
                defect = defect.max((diff(i, j) - (g[j] - g[i])).abs());
            }
        }
    }
    let symmetric = defect <= SYMMETRY_TOL;
    Ok(SymmetryReport {
        symmetric,
        strict,
        gauge: symmetric.then_some(g),
        defect,
    })
}

/// `Σ π_i p_ij log(π_i p_ij / (π_j p_ji))`, `+∞` on a one-way transition.
pub fn entropy_production_markov(mu: &MarkovMeasure) -> ExtReal {
    let d = mu.dim();
    let pi = mu.stationary();
    let mut ep = 0.0;
    for i in 0..d {
        for j in 0..d {
            let forward = pi[i] * mu.p(i, j);
            if forward > 0.0 {
                let backward = pi[j] * mu.p(j, i);
                if backward <= 0.0 {
                    return ExtReal::PosInf;
                }
                ep += forward * (forward / backward).ln();
            }
        }
    }
    ExtReal::Finite(ep)
}

/// `e_p = Σ μ₂(i, j) [Ā(i, j) − Ā⁻(i, j)]` with `Ā⁻` the canonical dual of the
/// normalized potential and `μ₂` the 2-cylinder marginal of the equilibrium.
pub fn entropy_production_potential(a: &Potential, nu: &AprioriWeights) -> Result<ExtReal> {
    let a = depth2(a)?;
    let eq = equilibrium(&a, nu)?;
    let dual = involution_kernel(&eq.normalized)?;
    let d = a.alphabet_size();
    let mu2 = eq.measure.two_cylinder();
    let mut ep = 0.0;
    for i in 0..d {
        for j in 0..d {
            let m = mu2[i * d + j];
            if m > 0.0 {
                let back = dual.a_minus.pair(i, j);
                if back == f64::NEG_INFINITY {
                    return Ok(ExtReal::PosInf);
                }
                ep += m * (eq.normalized.pair(i, j) - back);
            }
        }
    }
    Ok(ExtReal::Finite(ep))
}

/// Which estimator produced a [`GainReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainRoute {
    PressureFormula,
    CylinderSum,
    OrbitMonteCarlo,
}

impl GainRoute {
    pub fn as_str(self) -> &'static str {
        match self {
            GainRoute::PressureFormula => "pressure_formula",
            GainRoute::CylinderSum => "cylinder_sum",
            GainRoute::OrbitMonteCarlo => "orbit_monte_carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainReport {
    pub value: ExtReal,
    pub route: GainRoute,
    /// Depth: potential depth, cylinder length or orbit length.
    pub n: usize,
    /// Standard error of the mean; zero for exact routes.
    pub stderr: f64,
}

/// `h(η, μ_A) = log λ_A − ∫ A dη − h^ν(η)`; the choice of `ν` does not
/// change the value. `+∞` if `η` charges a word where `A = −∞`.
pub fn specific_gain(
    eta: &MarkovMeasure,
    a: &Potential,
    nu: &AprioriWeights,
) -> Result<GainReport> {
    let s = spectral_data(a, nu)?;
    let integral = integrate_potential(a, eta)?;
    let h = relative_entropy(eta, nu)?;
    let value = if integral == f64::NEG_INFINITY {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(s.pressure() - integral - h)
    };
    Ok(GainReport {
        value,
        route: GainRoute::PressureFormula,
        n: a.depth(),
        stderr: 0.0,
    })
}

fn check_same_alphabet(eta: &MarkovMeasure, mu: &MarkovMeasure) -> Result<()> {
    if eta.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            what: "reference measure alphabet",
            expected: eta.dim(),
            found: mu.dim(),
        });
    }
    Ok(())
}

/// `(1/n) Σ_{|C| = n} η(C) log(η(C) / μ(C))` by exhaustive enumeration.
pub fn cylinder_gain_estimate(
    eta: &MarkovMeasure,
    mu: &MarkovMeasure,
    n: usize,
) -> Result<GainReport> {
    check_same_alphabet(eta, mu)?;
    if n < 2 {
        return Err(Error::InvalidArgument(
            "cylinder length must be at least 2".into(),
        ));
    }
    let count = Alphabet::new(eta.dim())?.word_count(n).unwrap_or(u128::MAX);
    if count > MAX_CYLINDERS {
        return Err(Error::EnumerationTooLarge {
            count,
            limit: MAX_CYLINDERS,
        });
    }
    let mut total = 0.0;
    let mut singular = false;
    for s in 0..eta.dim() {
        let (e, m) = (eta.stationary()[s], mu.stationary()[s]);
        descend(eta, mu, s, e, m, n - 1, &mut total, &mut singular);
        if singular {
            break;
        }
    }
    let value = if singular {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(total / n as f64)
    };
    Ok(GainReport {
        value,
        route: GainRoute::CylinderSum,
        n,
        stderr: 0.0,
    })
}

#[allow(clippy::too_many_arguments)]
fn descend(
    eta: &MarkovMeasure,
    mu: &MarkovMeasure,
    last: usize,
    eta_mass: f64,
    mu_mass: f64,
    remaining: usize,
    total: &mut f64,
    singular: &mut bool,
) {
    if eta_mass <= 0.0 || *singular {
        return;
    }
    if remaining == 0 {
        if mu_mass <= 0.0 {
            *singular = true;
        } else {
            *total += eta_mass * (eta_mass / mu_mass).ln();
        }
        return;
    }
    for s in 0..eta.dim() {
        descend(
            eta,
            mu,
            s,
            eta_mass * eta.p(last, s),
            mu_mass * mu.p(last, s),
            remaining - 1,
            total,
            singular,
        );
    }
}

/// Mean and standard error over `trials` orbits of length `n` drawn from
/// `η` of the exponent `(1/n) log(η(Cₙ) / μ(Cₙ))`.
///
/// Trial `t` uses the generator `trial_rng(seed, t)`, so the result does not
/// depend on how trials are scheduled across threads.
pub fn orbit_gain_estimate(
    eta: &MarkovMeasure,
    mu: &MarkovMeasure,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<GainReport> {
    check_same_alphabet(eta, mu)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "orbit length must be at least 1".into(),
        ));
    }
    if trials < 2 {
        return Err(Error::InvalidArgument(
            "orbit estimator needs at least 2 trials".into(),
        ));
    }
    let exponents: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let orbit = sample_orbit_with(eta, n, &mut rng);
            let log_eta = log_cylinder_mass_unchecked(eta, &orbit);
            let log_mu = log_cylinder_mass_unchecked(mu, &orbit);
            (log_eta - log_mu) / n as f64
        })
        .collect();
    if exponents.iter().any(|&e| e == f64::INFINITY) {
        return Ok(GainReport {
            value: ExtReal::PosInf,
            route: GainRoute::OrbitMonteCarlo,
            n,
            stderr: f64::INFINITY,
        });
    }
    let k = trials as f64;
    let mean = exponents.iter().sum::<f64>() / k;
    let var = exponents.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(GainReport {
        value: ExtReal::Finite(mean),
        route: GainRoute::OrbitMonteCarlo,
        n,
        stderr: (var / k).sqrt(),
    })
}

/// Leading eigenvalues of `A` and of its canonical dual.
pub fn dual_eigenvalue_check(a: &Potential, nu: &AprioriWeights) -> Result<(f64, f64)> {
    let a = depth2(a)?;
    let dual = involution_kernel(&a)?;
    let la = spectral_data(&a, nu)?.lambda;
    let lb = spectral_data(&dual.a_minus, nu)?.lambda;
    Ok((la, lb))
}
