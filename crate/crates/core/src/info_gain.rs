//! Entropies, information gain and divergences on finite product spaces.
//!
//! A [`JointDistribution`] is a table `π[x][y]` on `X × Y` with marginals
//! `P` (over `x`) and `Q` (over `y`). The Jacobian `J^π(x, y) = π[x][y] / Q[y]`
//! is the disintegration of `π` along the horizontal fibers, and a
//! [`ProbabilityKernel`] is any such family of fiber probabilities.

use crate::error::{Error, Result};
use crate::symbolic::{check_probability, AprioriWeights};
use crate::units::{xlogx, ExtReal, LogBase};

/// Tolerance on `Σ_x exp φ(x, y) ν(x) = 1` in [`ig_shift`].
pub const SHIFT_NORMALIZATION_TOL: f64 = 1e-10;

/// Probability table on `X × Y`, stored row-major (`x` major).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    d: usize,
    r: usize,
    table: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        let r = rows.first().map_or(0, Vec::len);
        let mut table = Vec::with_capacity(d * r);
        for row in &rows {
            if row.len() != r {
                return Err(Error::DimensionMismatch {
                    what: "joint distribution row",
                    expected: r,
                    found: row.len(),
                });
            }
            table.extend_from_slice(row);
        }
        Self::from_flat(d, r, table)
    }

    pub fn from_flat(d: usize, r: usize, table: Vec<f64>) -> Result<Self> {
        if d == 0 || r == 0 {
            return Err(Error::DimensionMismatch {
                what: "joint distribution",
                expected: 1,
                found: 0,
            });
        }
        if table.len() != d * r {
            return Err(Error::DimensionMismatch {
                what: "joint distribution entries",
                expected: d * r,
                found: table.len(),
            });
        }
        check_probability(&table, "joint distribution")?;
        Ok(JointDistribution { d, r, table })
    }

    /// Product `P × Q`.
    pub fn product(p: &[f64], q: &[f64]) -> Result<Self> {
        check_probability(p, "x-marginal")?;
        check_probability(q, "y-marginal")?;
        let table = p
            .iter()
            .flat_map(|&a| q.iter().map(move |&b| a * b))
            .collect();
        Self::from_flat(p.len(), q.len(), table)
    }

    pub fn x_size(&self) -> usize {
        self.d
    }

    pub fn y_size(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.table[x * self.r + y]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// `P[x] = Σ_y π[x][y]`.
    pub fn x_marginal(&self) -> Vec<f64> {
        self.table
            .chunks(self.r)
            .map(|row| row.iter().sum())
            .collect()
    }

    /// `Q[y] = Σ_x π[x][y]`.
    pub fn y_marginal(&self) -> Vec<f64> {
        let mut q = vec![0.0; self.r];
        for row in self.table.chunks(self.r) {
            for (acc, v) in q.iter_mut().zip(row) {
                *acc += v;
            }
        }
        q
    }
}

/// One probability vector over `X` per `y`; `table[y][x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityKernel {
    d: usize,
    r: usize,
    table: Vec<f64>,
}

impl ProbabilityKernel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if r == 0 || d == 0 {
            return Err(Error::DimensionMismatch {
                what: "probability kernel",
                expected: 1,
                found: 0,
            });
        }
        let mut table = Vec::with_capacity(d * r);
        for row in &rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    what: "probability kernel row",
                    expected: d,
                    found: row.len(),
                });
            }
            check_probability(row, "probability kernel row")?;
            table.extend_from_slice(row);
        }
        Ok(ProbabilityKernel { d, r, table })
    }

    /// The same probability `p` on every fiber.
    pub fn constant(p: &[f64], r: usize) -> Result<Self> {
        Self::new(vec![p.to_vec(); r])
    }

    /// The kernel `exp φ(x, y) ν(x)`, with `φ[x][y]` stored row-major.
    pub fn tilt(nu: &[f64], phi: &[f64], r: usize) -> Result<Self> {
        let d = nu.len();
        if phi.len() != d * r {
            return Err(Error::DimensionMismatch {
                what: "tilt function",
                expected: d * r,
                found: phi.len(),
            });
        }
        let rows = (0..r)
            .map(|y| (0..d).map(|x| phi[x * r + y].exp() * nu[x]).collect())
            .collect();
        Self::new(rows)
    }

    /// Columns of a Jacobian table (degenerate columns included as stored).
    pub fn from_jacobian(j: &JacobianTable) -> Self {
        let table = (0..j.r)
            .flat_map(|y| (0..j.d).map(move |x| (x, y)))
            .map(|(x, y)| j.get(x, y))
            .collect();
        ProbabilityKernel {
            d: j.d,
            r: j.r,
            table,
        }
    }

    pub fn x_size(&self) -> usize {
        self.d
    }

    pub fn y_size(&self) -> usize {
        self.r
    }

    /// `ν̂^y(x)`.
    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.table[y * self.d + x]
    }

    /// `π = ν̂ dQ`, i.e. `π[x][y] = ν̂^y(x) Q[y]`.
    pub fn compose(&self, q: &[f64]) -> Result<JointDistribution> {
        if q.len() != self.r {
            return Err(Error::DimensionMismatch {
                what: "y-marginal",
                expected: self.r,
                found: q.len(),
            });
        }
        check_probability(q, "y-marginal")?;
        let mut table = vec![0.0; self.d * self.r];
        for y in 0..self.r {
            for x in 0..self.d {
                table[x * self.r + y] = self.get(y, x) * q[y];
            }
        }
        // renormalize away rounding in the products
        let sum: f64 = table.iter().sum();
        table.iter_mut().for_each(|v| *v /= sum);
        JointDistribution::from_flat(self.d, self.r, table)
    }
}

/// `J^π(x, y) = π[x][y] / Q[y]`, column-normalized where `Q[y] > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianTable {
    d: usize,
    r: usize,
    table: Vec<f64>,
    degenerate: Vec<bool>,
}

impl JacobianTable {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.table[x * self.r + y]
    }

    pub fn column(&self, y: usize) -> Vec<f64> {
        (0..self.d).map(|x| self.get(x, y)).collect()
    }

    /// True for columns with `Q[y] = 0`, which were filled with `1/d`.
    pub fn is_degenerate(&self, y: usize) -> bool {
        self.degenerate[y]
    }

    pub fn x_size(&self) -> usize {
        self.d
    }

    pub fn y_size(&self) -> usize {
        self.r
    }
}

/// Shannon entropy `−Σ p log p` in the requested base.
pub fn shannon_entropy(p: &[f64], base: LogBase) -> Result<f64> {
    check_probability(p, "probability vector")?;
    Ok(base.from_nats(-p.iter().map(|&x| xlogx(x)).sum::<f64>()))
}

pub fn joint_jacobian(pi: &JointDistribution) -> JacobianTable {
    let q = pi.y_marginal();
    let (d, r) = (pi.d, pi.r);
    let degenerate: Vec<bool> = q.iter().map(|&v| v <= 0.0).collect();
    let mut table = vec![0.0; d * r];
    for x in 0..d {
        for y in 0..r {
            table[x * r + y] = if degenerate[y] {
                1.0 / d as f64
            } else {
                pi.get(x, y) / q[y]
            };
        }
    }
    JacobianTable {
        d,
        r,
        table,
        degenerate,
    }
}

/// `H(π) = −Σ π log J^π`, the `Q`-weighted mean of the column entropies.
pub fn conditional_entropy(pi: &JointDistribution, base: LogBase) -> f64 {
    let q = pi.y_marginal();
    let mut h = 0.0;
    for x in 0..pi.d {
        for y in 0..pi.r {
            let v = pi.get(x, y);
            if v > 0.0 {
                h -= v * (v / q[y]).ln();
            }
        }
    }
    base.from_nats(h)
}

/// `Σ π log(π / (P Q))`.
pub fn mutual_information(pi: &JointDistribution, base: LogBase) -> f64 {
    let p = pi.x_marginal();
    let q = pi.y_marginal();
    let mut m = 0.0;
    for x in 0..pi.d {
        for y in 0..pi.r {
            let v = pi.get(x, y);
            if v > 0.0 {
                m += v * (v / (p[x] * q[y])).ln();
            }
        }
    }
    base.from_nats(m)
}

/// `IG(π, P) = S(P) − H(π)`. Debug builds check it against
/// [`mutual_information`].
pub fn information_gain(pi: &JointDistribution, base: LogBase) -> f64 {
    let p = pi.x_marginal();
    let s: f64 = -p.iter().map(|&x| xlogx(x)).sum::<f64>();
    let ig = base.from_nats(s) - conditional_entropy(pi, base);
    debug_assert!(
        (ig - mutual_information(pi, base)).abs() <= 1e-10,
        "entropy difference and mutual information disagree"
    );
    ig
}

fn check_same_len(a: &[f64], b: &[f64], what: &'static str) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what,
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// `D_KL(P | ν) = Σ P log(P / ν)`, `+∞` when `P` is not absolutely
/// continuous with respect to `ν`.
pub fn kl_divergence(p: &[f64], nu: &[f64]) -> Result<ExtReal> {
    check_probability(p, "probability vector")?;
    check_probability(nu, "reference probability")?;
    check_same_len(p, nu, "reference probability")?;
    let mut kl = 0.0;
    for (&a, &b) in p.iter().zip(nu) {
        if a > 0.0 {
            if b <= 0.0 {
                return Ok(ExtReal::PosInf);
            }
            kl += a * (a / b).ln();
        }
    }
    Ok(ExtReal::Finite(kl))
}

/// `IG(π, ν̂) = D_KL(π | ν̂ dQ)` in nats.
pub fn kernel_information_gain(pi: &JointDistribution, k: &ProbabilityKernel) -> Result<ExtReal> {
    if k.d != pi.d || k.r != pi.r {
        return Err(Error::DimensionMismatch {
            what: "probability kernel",
            expected: pi.d * pi.r,
            found: k.d * k.r,
        });
    }
    let q = pi.y_marginal();
    let mut ig = 0.0;
    for x in 0..pi.d {
        for y in 0..pi.r {
            let v = pi.get(x, y);
            if v > 0.0 {
                let reference = k.get(y, x) * q[y];
                if reference <= 0.0 {
                    return Ok(ExtReal::PosInf);
                }
                ig += v * (v / reference).ln();
            }
        }
    }
    Ok(ExtReal::Finite(ig))
}

/// `IG(π, π₀) = −[Σ π log J^{π₀} + H(π)]` for a strictly positive table `π₀`.
pub fn information_gain_wrt(pi: &JointDistribution, pi0: &JointDistribution) -> Result<ExtReal> {
    if pi0.d != pi.d || pi0.r != pi.r {
        return Err(Error::DimensionMismatch {
            what: "reference joint distribution",
            expected: pi.d * pi.r,
            found: pi0.d * pi0.r,
        });
    }
    if let Some(index) = pi0.table.iter().position(|&v| v <= 0.0) {
        return Err(Error::InvalidEntry {
            what: "reference joint distribution (must be strictly positive)",
            index,
            value: pi0.table[index],
        });
    }
    kernel_information_gain(pi, &ProbabilityKernel::from_jacobian(&joint_jacobian(pi0)))
}

/// Shannon entropy relative to an a priori measure, `S^ν(P) = −Σ P log(P / ν)`.
pub fn relative_shannon_entropy(p: &[f64], nu: &AprioriWeights) -> Result<f64> {
    check_probability(p, "probability vector")?;
    check_same_len(p, nu.weights(), "a priori weights")?;
    Ok(-p
        .iter()
        .zip(nu.weights())
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &w)| a * (a / w).ln())
        .sum::<f64>())
}

/// Conditional entropy relative to an a priori measure on `X`,
/// `H^ν(π) = −Σ π log(J^π / ν)`. For a probability `ν` this is
/// `−D_KL(π | ν dQ)`.
pub fn relative_conditional_entropy(pi: &JointDistribution, nu: &AprioriWeights) -> Result<f64> {
    if nu.len() != pi.d {
        return Err(Error::DimensionMismatch {
            what: "a priori weights",
            expected: pi.d,
            found: nu.len(),
        });
    }
    let q = pi.y_marginal();
    let mut h = 0.0;
    for x in 0..pi.d {
        for y in 0..pi.r {
            let v = pi.get(x, y);
            if v > 0.0 {
                h -= v * (v / (q[y] * nu.weights()[x])).ln();
            }
        }
    }
    Ok(h)
}

/// Largest deviation `max_y |Σ_x exp φ[x][y] ν[x] − 1|`.
pub fn shift_normalization_defect(nu: &[f64], phi: &[f64], r: usize) -> f64 {
    (0..r)
        .map(|y| {
            let s: f64 = nu
                .iter()
                .enumerate()
                .map(|(x, &w)| phi[x * r + y].exp() * w)
                .sum();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// `−Σ π φ₀ − H^ν(π)` for a ν-normalized `φ₀[x][y]`, which equals
/// `IG(π, exp φ₀ · ν)`.
pub fn ig_shift(
    pi: &JointDistribution,
    nu: &[f64],
    phi0: &[f64],
    base: LogBase,
) -> Result<ExtReal> {
    check_probability(nu, "a priori probability")?;
    if nu.len() != pi.d {
        return Err(Error::DimensionMismatch {
            what: "a priori probability",
            expected: pi.d,
            found: nu.len(),
        });
    }
    if phi0.len() != pi.d * pi.r {
        return Err(Error::DimensionMismatch {
            what: "tilt function",
            expected: pi.d * pi.r,
            found: phi0.len(),
        });
    }
    if let Some(index) = phi0.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidEntry {
            what: "tilt function",
            index,
            value: phi0[index],
        });
    }
    let deviation = shift_normalization_defect(nu, phi0, pi.r);
    if deviation > SHIFT_NORMALIZATION_TOL {
        return Err(Error::NotNormalized { deviation });
    }
    let tilt: f64 = pi.table.iter().zip(phi0).map(|(p, f)| p * f).sum();
    let base_gain = kernel_information_gain(pi, &ProbabilityKernel::constant(nu, pi.r)?)?;
    Ok((base_gain + -tilt).in_base(base))
}

/// Outcome of [`variational_entropy_oracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Achieved `Σ f π` (nats); approaches `−H(π)` from below.
    pub value: f64,
    pub iterations: usize,
    /// The normalized maximizer, `f[x][y]` row-major.
    pub f: Vec<f64>,
}

/// Maximizes `Σ f π` over normalized `f` (`Σ_x exp f(x, y) = 1` for all `y`),
/// parameterized as `f = g − log Σ_x exp g`.
///
/// Each column is updated with a gradient step preconditioned by the
/// diagonal of the softmax Hessian, `Δg_x = step · (t_x − s_x) / s_x` with
/// `t = π[·][y] / Q[y]` and `s = exp f`, and halved until the column
/// objective does not decrease. Columns with `Q[y] = 0` do not enter the
/// objective and stay at `g = 0`. Iteration stops early once an update
/// changes the objective by less than `1e−17`.
pub fn variational_entropy_oracle(
    pi: &JointDistribution,
    iters: usize,
    step: f64,
) -> Result<OracleResult> {
    if iters == 0 {
        return Err(Error::InvalidArgument(
            "oracle needs at least one iteration".into(),
        ));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "oracle step must be positive, got {step}"
        )));
    }
    let (d, r) = (pi.d, pi.r);
    let q = pi.y_marginal();
    let mut f = vec![0.0; d * r];
    let mut value = 0.0;
    let mut used = 0;
    for y in 0..r {
        let mut g = vec![0.0; d];
        let mut col = normalize_column(&g);
        if q[y] > 0.0 {
            let t: Vec<f64> = (0..d).map(|x| pi.get(x, y) / q[y]).collect();
            let objective = |fc: &[f64]| -> f64 {
                t.iter()
                    .zip(fc)
                    .filter(|(&a, _)| a > 0.0)
                    .map(|(a, b)| a * b)
                    .sum()
            };
            let mut current = objective(&col);
            for it in 0..iters {
                used = used.max(it + 1);
                let dir: Vec<f64> = (0..d)
                    .map(|x| {
                        let s = col[x].exp();
                        (t[x] - s) / s
                    })
                    .collect();
                let mut eta = step;
                let mut accepted = None;
                for _ in 0..60 {
                    let trial: Vec<f64> = g.iter().zip(&dir).map(|(a, b)| a + eta * b).collect();
                    let trial_col = normalize_column(&trial);
                    let val = objective(&trial_col);
                    if val >= current {
                        accepted = Some((trial, trial_col, val));
                        break;
                    }
                    eta *= 0.5;
                }
                let Some((ng, ncol, val)) = accepted else {
                    break;
                };
                let gain = val - current;
                g = ng;
                col = ncol;
                current = val;
                if gain < 1e-17 {
                    break;
                }
            }
            value += q[y] * current;
        }
        for x in 0..d {
            f[x * r + y] = col[x];
        }
    }
    Ok(OracleResult {
        value,
        iterations: used,
        f,
    })
}

/// `g − logsumexp(g)`.
fn normalize_column(g: &[f64]) -> Vec<f64> {
    let max = g.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let lse = max + g.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    g.iter().map(|v| v - lse).collect()
}
