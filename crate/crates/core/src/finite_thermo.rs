//! Ruelle transfer operator on a finite alphabet with a priori weights.
//!
//! A potential of depth `k` is a table over words of length `k`. The operator
//! acts on functions of the first `k − 1` symbols by prepending a symbol:
//!
//! ```text
//! (L f)(u) = Σ_a ν_a · exp A(a·u) · f(first k−1 symbols of a·u)
//! ```
//!
//! so for `k = 2` it is the matrix `M[j][i] = ν_i · exp A(i, j)`. Depth `k > 2`
//! is the same operator on the alphabet of `(k − 1)`-blocks, where only
//! block-compatible transitions are nonzero; `k = 1` is a scalar.
//!
//! Entries of a potential may be `−∞` to forbid a transition. The support
//! graph must then still be irreducible.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::symbolic::AprioriWeights;
use crate::symbolic::{all_words, cylinder_mass_unchecked, MarkovMeasure, StochasticMatrix};

/// Largest table a potential may hold.
pub const MAX_TABLE_LEN: usize = 10_000_000;

/// Residual every returned eigen-pair satisfies.
pub const CONTRACT_TOL: f64 = 1e-10;

const POLISH_STEPS: usize = 200;

/// Tolerance of [`is_normalized`].
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Locally constant potential: one value per word of length `depth`.
///
/// The table is indexed by `Σ w_i d^{k−i}` (first symbol most significant),
/// so a depth-2 table is the row-major matrix `A(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    d: usize,
    k: usize,
    table: Vec<f64>,
}

impl Potential {
    pub fn new(d: usize, k: usize, table: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::AlphabetTooSmall(d));
        }
        if k == 0 {
            return Err(Error::InvalidArgument(
                "potential depth must be at least 1".into(),
            ));
        }
        let len = table_len(d, k)?;
        if table.len() != len {
            return Err(Error::DimensionMismatch {
                what: "potential table",
                expected: len,
                found: table.len(),
            });
        }
        for (index, &value) in table.iter().enumerate() {
            if value.is_nan() || value == f64::INFINITY {
                return Err(Error::InvalidEntry {
                    what: "potential table",
                    index,
                    value,
                });
            }
        }
        for (context, chunk) in column_views(d, &table).enumerate() {
            if chunk.iter().all(|v| *v == f64::NEG_INFINITY) {
                return Err(Error::InvalidArgument(format!(
                    "potential forbids every symbol in front of context {context}"
                )));
            }
        }
        Ok(Potential { d, k, table })
    }

    pub fn constant(d: usize, k: usize, c: f64) -> Result<Self> {
        let len = table_len(d.max(2), k.max(1))?;
        Self::new(d, k, vec![c; len])
    }

    /// Tabulates `f` over all words of length `k`.
    pub fn from_fn(d: usize, k: usize, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::AlphabetTooSmall(d));
        }
        table_len(d, k.max(1))?;
        let table = all_words(d, k).map(|w| f(&w)).collect();
        Self::new(d, k, table)
    }

    /// Depth-2 potential from a square matrix `rows[i][j] = A(i, j)`.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let mut table = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    what: "potential matrix row",
                    expected: d,
                    found: row.len(),
                });
            }
            table.extend_from_slice(row);
        }
        Self::new(d, 2, table)
    }

    /// `A(i, j) = log(π_i p_ij / π_j)`: normalized for counting weights, with
    /// the Markov measure as its equilibrium. Forbidden transitions give `−∞`.
    pub fn from_markov(mu: &MarkovMeasure) -> Self {
        let d = mu.dim();
        let pi = mu.stationary();
        let mut table = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                table[i * d + j] = (pi[i] * mu.p(i, j) / pi[j]).ln();
            }
        }
        Potential { d, k: 2, table }
    }

    pub fn alphabet_size(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.k
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Number of `(k − 1)`-contexts the transfer operator acts on.
    pub fn context_count(&self) -> usize {
        self.table.len() / self.d
    }

    pub fn value(&self, w: &[usize]) -> f64 {
        debug_assert_eq!(w.len(), self.k);
        self.table[w.iter().fold(0, |acc, &s| acc * self.d + s)]
    }

    /// `A(i, j)` of a depth-2 potential.
    #[inline]
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        debug_assert_eq!(self.k, 2);
        self.table[i * self.d + j]
    }

    /// Same potential written at depth 2; depth 1 becomes `A(i, j) = A(i)`.
    pub fn to_depth2(&self) -> Result<Potential> {
        match self.k {
            1 => Potential::from_fn(self.d, 2, |w| self.table[w[0]]),
            2 => Ok(self.clone()),
            k => Err(Error::UnsupportedDepth { depth: k, max: 2 }),
        }
    }

    /// `A + c`.
    pub fn shifted(&self, c: f64) -> Potential {
        Potential {
            d: self.d,
            k: self.k,
            table: self.table.iter().map(|v| v + c).collect(),
        }
    }

    /// Transposed depth-2 table `A(j, i)`.
    pub fn transpose(&self) -> Result<Potential> {
        if self.k != 2 {
            return Err(Error::UnsupportedDepth {
                depth: self.k,
                max: 2,
            });
        }
        let d = self.d;
        Potential::from_fn(d, 2, |w| self.table[w[1] * d + w[0]])
    }

    fn check_weights(&self, nu: &AprioriWeights) -> Result<()> {
        if nu.len() != self.d {
            return Err(Error::DimensionMismatch {
                what: "a priori weights",
                expected: self.d,
                found: nu.len(),
            });
        }
        Ok(())
    }
}

fn table_len(d: usize, k: usize) -> Result<usize> {
    let len = u32::try_from(k)
        .ok()
        .and_then(|k| d.checked_pow(k))
        .filter(|&n| n <= MAX_TABLE_LEN);
    len.ok_or_else(|| Error::EnumerationTooLarge {
        count: (d as u128).saturating_pow(k.min(u32::MAX as usize) as u32),
        limit: MAX_TABLE_LEN as u128,
    })
}

/// For each context `u`, the `d` values `A(a·u)`.
fn column_views(d: usize, table: &[f64]) -> impl Iterator<Item = Vec<f64>> + '_ {
    let m = table.len() / d;
    (0..m).map(move |c| (0..d).map(|a| table[a * m + c]).collect())
}

/// Sparse transfer operator: context `c` receives `weight[c·d + a] · f[target[c·d + a]]`.
struct Transfer {
    d: usize,
    m: usize,
    target: Vec<usize>,
    weight: Vec<f64>,
}

impl Transfer {
    fn new(a: &Potential, nu: &AprioriWeights) -> Transfer {
        let d = a.d;
        let m = a.context_count();
        let shift = m / d; // d^{k-2}; zero when k = 1
        let mut target = Vec::with_capacity(m * d);
        let mut weight = Vec::with_capacity(m * d);
        for c in 0..m {
            for (sym, &w) in nu.weights().iter().enumerate() {
                target.push(if m == 1 { 0 } else { sym * shift + c / d });
                weight.push(w * a.table[sym * m + c].exp());
            }
        }
        Transfer {
            d,
            m,
            target,
            weight,
        }
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate() {
            let base = c * self.d;
            *o = (base..base + self.d)
                .map(|e| self.weight[e] * f[self.target[e]])
                .sum();
        }
    }

    fn adjoint(&self, r: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (c, &rc) in r.iter().enumerate() {
            let base = c * self.d;
            for e in base..base + self.d {
                out[self.target[e]] += self.weight[e] * rc;
            }
        }
    }
}

/// Power-iteration settings for the Perron eigen-pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative residual at which iteration stops.
    pub tol: f64,
    /// Iteration cap per eigenvector.
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-12,
            max_iter: 100_000,
        }
    }
}

/// Leading eigen-triple of the transfer operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// Leading eigenvalue `λ > 0`.
    pub lambda: f64,
    /// Right eigenfunction on `(k − 1)`-contexts, scaled so `Σ h ρ = 1`.
    pub h: Vec<f64>,
    /// Left eigenvector on `(k − 1)`-contexts, a probability vector.
    pub rho: Vec<f64>,
    /// Largest relative eigen-residual of `h` and `ρ`.
    pub residual: f64,
}

impl SpectralData {
    /// The ν-pressure `log λ`.
    pub fn pressure(&self) -> f64 {
        self.lambda.ln()
    }
}

/// One step of `L f`, with `f` indexed by `(k − 1)`-contexts.
pub fn transfer_apply(a: &Potential, nu: &AprioriWeights, f: &[f64]) -> Result<Vec<f64>> {
    a.check_weights(nu)?;
    let t = Transfer::new(a, nu);
    if f.len() != t.m {
        return Err(Error::DimensionMismatch {
            what: "function table",
            expected: t.m,
            found: f.len(),
        });
    }
    let mut out = vec![0.0; t.m];
    t.apply(f, &mut out);
    Ok(out)
}

/// Dense `m × m` matrix of the transfer operator on `(k − 1)`-contexts.
pub fn transfer_matrix(a: &Potential, nu: &AprioriWeights) -> Result<DMatrix<f64>> {
    a.check_weights(nu)?;
    let t = Transfer::new(a, nu);
    let mut m = DMatrix::zeros(t.m, t.m);
    for c in 0..t.m {
        for e in c * t.d..(c + 1) * t.d {
            m[(c, t.target[e])] += t.weight[e];
        }
    }
    Ok(m)
}

pub fn spectral_data(a: &Potential, nu: &AprioriWeights) -> Result<SpectralData> {
    spectral_data_with(a, nu, SolverOptions::default())
}

pub fn spectral_data_with(
    a: &Potential,
    nu: &AprioriWeights,
    opts: SolverOptions,
) -> Result<SpectralData> {
    a.check_weights(nu)?;
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidArgument(
            "solver needs tol > 0 and max_iter ≥ 1".into(),
        ));
    }
    let t = Transfer::new(a, nu);
    let accept = opts.tol.max(CONTRACT_TOL);
    let (lambda, mut h, res_h) = perron_vector(&t, opts, accept, |t, f, out| t.apply(f, out))?;
    let (_, mut rho, res_rho) = perron_vector(&t, opts, accept, |t, f, out| t.adjoint(f, out))?;
    if h.iter().chain(&rho).any(|&x| !(x > 0.0)) {
        return Err(Error::ReducibleChain);
    }
    let rho_sum: f64 = rho.iter().sum();
    rho.iter_mut().for_each(|x| *x /= rho_sum);
    let pairing: f64 = h.iter().zip(&rho).map(|(x, y)| x * y).sum();
    h.iter_mut().for_each(|x| *x /= pairing);
    Ok(SpectralData {
        lambda,
        h,
        rho,
        residual: res_h.max(res_rho),
    })
}

/// Power iteration from the all-ones vector. A plain phase is tried first;
/// if it stalls (periodic support) the iteration continues on `L + λ̂ I`,
/// whose leading eigenvalue is strictly dominant. After the residual drops
/// below `tol` the iteration continues for a few steps while the residual
/// still improves, which brings the vectors to rounding level.
fn perron_vector(
    t: &Transfer,
    opts: SolverOptions,
    accept: f64,
    op: impl Fn(&Transfer, &[f64], &mut [f64]),
) -> Result<(f64, Vec<f64>, f64)> {
    let m = t.m;
    let mut v = vec![1.0 / m as f64; m];
    let mut lv = vec![0.0; m];
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    let plain_budget = (opts.max_iter / 10).max(100).min(opts.max_iter);
    let mut shift = 0.0;
    // once converged, keep going while the residual still shrinks
    let mut polish = POLISH_STEPS;
    let mut best = f64::INFINITY;
    for iter in 0..opts.max_iter {
        op(t, &v, &mut lv);
        lambda = lv.iter().sum::<f64>();
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::ConvergenceFailure {
                iterations: iter,
                residual: f64::NAN,
            });
        }
        let vmax = v.iter().fold(0.0f64, |acc, &x| acc.max(x));
        residual = lv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).abs())
            .fold(0.0, f64::max)
            / (lambda * vmax);
        if residual <= opts.tol {
            if polish == 0 || residual > 0.9 * best {
                return Ok((lambda, v, residual));
            }
            polish -= 1;
        }
        best = best.min(residual);
        if iter + 1 == plain_budget {
            shift = lambda;
        }
        let norm = lambda + shift;
        for (x, y) in v.iter_mut().zip(&lv) {
            *x = (y + shift * *x) / norm;
        }
    }
    if residual <= accept {
        return Ok((lambda, v, residual));
    }
    Err(Error::ConvergenceFailure {
        iterations: opts.max_iter,
        residual,
    })
}

/// `Ā = A + log h − log h∘σ − log λ`.
pub fn normalize_potential(a: &Potential, s: &SpectralData) -> Result<Potential> {
    let m = a.context_count();
    if s.h.len() != m {
        return Err(Error::DimensionMismatch {
            what: "eigenfunction",
            expected: m,
            found: s.h.len(),
        });
    }
    let d = a.d;
    let shift = m / d;
    let log_lambda = s.lambda.ln();
    let mut table = a.table.clone();
    for sym in 0..d {
        for c in 0..m {
            let v = if m == 1 { 0 } else { sym * shift + c / d };
            table[sym * m + c] += s.h[v].ln() - s.h[c].ln() - log_lambda;
        }
    }
    Ok(Potential { d, k: a.k, table })
}

/// Largest deviation `max_u |Σ_a exp A(a·u) ν_a − 1|`.
pub fn normalization_defect(a: &Potential, nu: &AprioriWeights) -> Result<f64> {
    a.check_weights(nu)?;
    let m = a.context_count();
    Ok((0..m)
        .map(|c| {
            let s: f64 = nu
                .weights()
                .iter()
                .enumerate()
                .map(|(sym, w)| w * a.table[sym * m + c].exp())
                .sum();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max))
}

/// True iff the potential is ν-normalized within `1e−10`.
pub fn is_normalized(a: &Potential, nu: &AprioriWeights) -> bool {
    matches!(normalization_defect(a, nu), Ok(dev) if dev <= NORMALIZATION_TOL)
}

/// Everything produced while solving for an equilibrium state.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumState {
    pub spectral: SpectralData,
    /// Normalized potential `Ā`, at the depth of the measure's alphabet.
    pub normalized: Potential,
    /// For depth `k ≤ 2` a chain on the symbols; for `k > 2` a chain on
    /// `(k − 1)`-blocks (block index as in the potential table).
    pub measure: MarkovMeasure,
}

pub fn equilibrium(a: &Potential, nu: &AprioriWeights) -> Result<EquilibriumState> {
    equilibrium_with(a, nu, SolverOptions::default())
}

pub fn equilibrium_with(
    a: &Potential,
    nu: &AprioriWeights,
    opts: SolverOptions,
) -> Result<EquilibriumState> {
    let a = if a.k == 1 { a.to_depth2()? } else { a.clone() };
    let spectral = spectral_data_with(&a, nu, opts)?;
    let normalized = normalize_potential(&a, &spectral)?;
    let d = a.d;
    let m = a.context_count();
    let shift = m / d;
    let pi: Vec<f64> = spectral
        .h
        .iter()
        .zip(&spectral.rho)
        .map(|(x, y)| x * y)
        .collect();
    let total: f64 = pi.iter().sum();
    let pi: Vec<f64> = pi.into_iter().map(|x| x / total).collect();
    // μ(a·u) = e^{Ā(a·u)} ν_a π(u); the chain steps from block prefix(a·u) to u.
    let mut entries = vec![0.0; m * m];
    for sym in 0..d {
        let w = nu.weights()[sym];
        for c in 0..m {
            let from = sym * shift + c / d;
            entries[from * m + c] += normalized.table[sym * m + c].exp() * w * pi[c];
        }
    }
    for row in entries.chunks_mut(m) {
        let sum: f64 = row.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::ReducibleChain);
        }
        row.iter_mut().for_each(|x| *x /= sum);
    }
    let transition = StochasticMatrix::from_flat(m, entries)?;
    let measure = MarkovMeasure::from_parts(transition, pi)?;
    Ok(EquilibriumState {
        spectral,
        normalized,
        measure,
    })
}

pub fn equilibrium_measure(a: &Potential, nu: &AprioriWeights) -> Result<MarkovMeasure> {
    Ok(equilibrium(a, nu)?.measure)
}

/// `∫ A dη` for a Markov measure on the same alphabet, by summing over the
/// cylinders of length `k`. Null cylinders contribute nothing; `−∞` if `η`
/// charges a forbidden word.
pub fn integrate_potential(a: &Potential, eta: &MarkovMeasure) -> Result<f64> {
    if eta.dim() != a.d {
        return Err(Error::DimensionMismatch {
            what: "measure alphabet",
            expected: a.d,
            found: eta.dim(),
        });
    }
    let mut total = 0.0;
    for (idx, w) in all_words(a.d, a.k).enumerate() {
        let mass = cylinder_mass_unchecked(eta, &w);
        if mass > 0.0 {
            total += mass * a.table[idx];
        }
    }
    Ok(total)
}

/// Relative entropy `h^ν(μ) = −∫ log J dμ`, with `J(i, j) = μ(|i,j]) / (μ(|j]) ν_i)`
/// the ν-Jacobian. Equals the Kolmogorov–Sinai entropy plus `Σ π_i log ν_i`.
pub fn relative_entropy(mu: &MarkovMeasure, nu: &AprioriWeights) -> Result<f64> {
    if nu.len() != mu.dim() {
        return Err(Error::DimensionMismatch {
            what: "a priori weights",
            expected: mu.dim(),
            found: nu.len(),
        });
    }
    let d = mu.dim();
    let pi = mu.stationary();
    let mut h = 0.0;
    for i in 0..d {
        for j in 0..d {
            let joint = pi[i] * mu.p(i, j);
            if joint > 0.0 {
                h -= joint * (joint / (pi[j] * nu.weights()[i])).ln();
            }
        }
    }
    Ok(h)
}
