//! Alphabets, words, Markov measures on the one-sided shift, time reversal
//! and orbit sampling.
//!
//! Symbols are `0..d`. A [`Word`] `w = (w_1, …, w_n)` stands for the cylinder
//! of sequences starting with `w`. Shift invariance is the prepend-sum
//! identity `μ(w) = Σ_i μ(i·w)`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::units::xlogx;

/// Tolerance on `Σ p = 1` for probability vectors and stochastic rows.
pub const PROB_TOL: f64 = 1e-12;

/// Tolerance on `πᵀP = πᵀ` for a supplied stationary vector.
pub const STATIONARY_TOL: f64 = 1e-10;

/// Largest chain solved by a direct null-space computation; bigger chains
/// use power iteration on the lazy chain.
pub const DIRECT_SOLVE_MAX_DIM: usize = 64;

const NULLITY_TOL: f64 = 1e-8;
const POWER_RESIDUAL: f64 = 1e-13;
const POWER_MAX_ITER: usize = 1_000_000;

pub(crate) fn check_probability(p: &[f64], what: &'static str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::DimensionMismatch {
            what,
            expected: 1,
            found: 0,
        });
    }
    for (index, &value) in p.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidEntry { what, index, value });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::NotProbability { what, sum });
    }
    Ok(())
}

/// Finite alphabet `{0, …, d−1}` with `d ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::AlphabetTooSmall(size));
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> usize {
        self.0
    }

    /// Number of words of length `n`, or `None` on overflow.
    pub fn word_count(self, n: usize) -> Option<u128> {
        (self.0 as u128).checked_pow(u32::try_from(n).ok()?)
    }
}

/// Nonempty finite word over an alphabet; denotes a cylinder set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>, alphabet: Alphabet) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s >= alphabet.size()) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad,
                size: alphabet.size(),
            });
        }
        Ok(Word(symbols))
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn into_symbols(self) -> Vec<usize> {
        self.0
    }
}

/// Iterator over all words of length `n` on `d` symbols in lexicographic
/// order (first symbol most significant).
pub fn all_words(d: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current = if n == 0 || d == 0 {
        None
    } else {
        Some(vec![0usize; n])
    };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let word = current.as_mut().unwrap();
        let mut pos = n;
        loop {
            if pos == 0 {
                current = None;
                break;
            }
            pos -= 1;
            word[pos] += 1;
            if word[pos] < d {
                break;
            }
            word[pos] = 0;
        }
        Some(out)
    })
}

/// A priori measure on a finite alphabet: one positive weight per symbol.
///
/// The total mass is free. All-ones weights give the counting measure,
/// weights summing to one give an a priori probability.
#[derive(Debug, Clone, PartialEq)]
pub struct AprioriWeights(Vec<f64>);

impl AprioriWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Alphabet::new(weights.len())?;
        for (index, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidEntry {
                    what: "a priori weights",
                    index,
                    value,
                });
            }
        }
        Ok(AprioriWeights(weights))
    }

    pub fn counting(d: usize) -> Result<Self> {
        Self::new(vec![1.0; d])
    }

    pub fn uniform_probability(d: usize) -> Result<Self> {
        Self::new(vec![1.0 / d as f64; d])
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= PROB_TOL
    }
}

/// Row-stochastic `d × d` matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "stochastic matrix row",
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_flat(dim, entries)
    }

    pub fn from_flat(dim: usize, entries: Vec<f64>) -> Result<Self> {
        Alphabet::new(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                what: "stochastic matrix entries",
                expected: dim * dim,
                found: entries.len(),
            });
        }
        for (index, &value) in entries.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidEntry {
                    what: "stochastic matrix",
                    index,
                    value,
                });
            }
        }
        for (row, chunk) in entries.chunks(dim).enumerate() {
            let sum: f64 = chunk.iter().sum();
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::NotStochastic { row, sum });
            }
        }
        Ok(StochasticMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// Strong connectivity of the transition graph `i → j` iff `p_ij > 0`.
    pub fn is_irreducible(&self) -> bool {
        let reach = |forward: bool| {
            let mut seen = vec![false; self.dim];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for v in 0..self.dim {
                    let p = if forward {
                        self.get(u, v)
                    } else {
                        self.get(v, u)
                    };
                    if p > 0.0 && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }

    fn stationarity_residual(&self, pi: &[f64]) -> f64 {
        (0..self.dim)
            .map(|j| {
                let flow: f64 = (0..self.dim).map(|i| pi[i] * self.get(i, j)).sum();
                (flow - pi[j]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Stationary (shift-invariant) Markov measure given by a transition matrix
/// and its unique positive stationary vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMeasure {
    transition: StochasticMatrix,
    stationary: Vec<f64>,
}

impl MarkovMeasure {
    /// Builds the measure, solving for the stationary vector.
    pub fn new(transition: StochasticMatrix) -> Result<Self> {
        let stationary = stationary_distribution(&transition)?;
        Ok(MarkovMeasure {
            transition,
            stationary,
        })
    }

    /// Builds the measure from a transition matrix and a stationary vector
    /// that has already been computed elsewhere.
    pub fn from_parts(transition: StochasticMatrix, stationary: Vec<f64>) -> Result<Self> {
        if stationary.len() != transition.dim() {
            return Err(Error::DimensionMismatch {
                what: "stationary vector",
                expected: transition.dim(),
                found: stationary.len(),
            });
        }
        check_probability(&stationary, "stationary vector")?;
        if !transition.is_irreducible() || stationary.iter().any(|&p| p <= 0.0) {
            return Err(Error::ReducibleChain);
        }
        let residual = transition.stationarity_residual(&stationary);
        if residual > STATIONARY_TOL {
            return Err(Error::NotStationary { residual });
        }
        Ok(MarkovMeasure {
            transition,
            stationary,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(StochasticMatrix::new(rows)?)
    }

    pub fn transition(&self) -> &StochasticMatrix {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn dim(&self) -> usize {
        self.transition.dim()
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet(self.dim())
    }

    #[inline]
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.transition.get(i, j)
    }

    /// Two-cylinder masses `μ(|i,j]) = π_i p_ij`, row-major `d × d`.
    pub fn two_cylinder(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = self.stationary[i] * self.p(i, j);
            }
        }
        out
    }
}

/// Unique stationary probability vector of an irreducible chain.
///
/// Chains with `d ≤ 64` are solved through the null space of `Pᵀ − I`
/// (SVD); the eigenvalue-1 multiplicity is the number of singular values
/// below `1e−8`. Larger chains use power iteration on `(P + I)/2`, which
/// has the same stationary vector and no periodicity.
pub fn stationary_distribution(m: &StochasticMatrix) -> Result<Vec<f64>> {
    let d = m.dim();
    if !m.is_irreducible() {
        return Err(Error::ReducibleChain);
    }
    let pi = if d <= DIRECT_SOLVE_MAX_DIM {
        let a = DMatrix::from_fn(d, d, |r, c| m.get(c, r) - if r == c { 1.0 } else { 0.0 });
        let svd = a.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let nullity = svd
            .singular_values
            .iter()
            .filter(|&&s| s <= NULLITY_TOL)
            .count();
        if nullity > 1 {
            return Err(Error::ReducibleChain);
        }
        let (min_idx, _) =
            svd.singular_values
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (k, &s)| if s < acc.1 { (k, s) } else { acc },
                );
        let v: Vec<f64> = v_t.row(min_idx).iter().copied().collect();
        let sum: f64 = v.iter().sum();
        v.into_iter().map(|x| x / sum).collect::<Vec<_>>()
    } else {
        lazy_power_stationary(m)?
    };
    if pi.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::ReducibleChain);
    }
    let sum: f64 = pi.iter().sum();
    Ok(pi.into_iter().map(|x| x / sum).collect())
}

fn lazy_power_stationary(m: &StochasticMatrix) -> Result<Vec<f64>> {
    let d = m.dim();
    let mut pi = vec![1.0 / d as f64; d];
    let mut next = vec![0.0; d];
    let mut residual = f64::INFINITY;
    for _ in 0..POWER_MAX_ITER {
        next.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..d {
            let row = m.row(i);
            for j in 0..d {
                next[j] += pi[i] * row[j];
            }
        }
        residual = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        for j in 0..d {
            pi[j] = 0.5 * (pi[j] + next[j]);
        }
        let sum: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|x| *x /= sum);
        if residual <= POWER_RESIDUAL {
            return Ok(pi);
        }
    }
    Err(Error::ConvergenceFailure {
        iterations: POWER_MAX_ITER,
        residual,
    })
}

fn check_word_for(mu: &MarkovMeasure, w: &Word) -> Result<()> {
    if let Some(&bad) = w.symbols().iter().find(|&&s| s >= mu.dim()) {
        return Err(Error::SymbolOutOfRange {
            symbol: bad,
            size: mu.dim(),
        });
    }
    Ok(())
}

/// `μ(|w_1,…,w_n]) = π_{w_1} · Π p_{w_k w_{k+1}}`.
pub fn cylinder_mass(mu: &MarkovMeasure, w: &Word) -> Result<f64> {
    check_word_for(mu, w)?;
    Ok(cylinder_mass_unchecked(mu, w.symbols()))
}

pub(crate) fn cylinder_mass_unchecked(mu: &MarkovMeasure, w: &[usize]) -> f64 {
    let mut mass = mu.stationary()[w[0]];
    for pair in w.windows(2) {
        mass *= mu.p(pair[0], pair[1]);
    }
    mass
}

/// Natural log of the cylinder mass, summed in log space so that long
/// orbits do not underflow. Returns `-inf` for null cylinders.
pub fn log_cylinder_mass(mu: &MarkovMeasure, w: &Word) -> Result<f64> {
    check_word_for(mu, w)?;
    Ok(log_cylinder_mass_unchecked(mu, w.symbols()))
}

pub(crate) fn log_cylinder_mass_unchecked(mu: &MarkovMeasure, w: &[usize]) -> f64 {
    let mut acc = mu.stationary()[w[0]].ln();
    for pair in w.windows(2) {
        let p = mu.p(pair[0], pair[1]);
        if p == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += p.ln();
    }
    acc
}

/// Time reversal `θ_*μ⁻`: transitions `q_ij = π_j p_ji / π_i`, same
/// stationary vector, and `μ̃(w) = μ(reverse w)` for every word.
pub fn reverse_measure(mu: &MarkovMeasure) -> MarkovMeasure {
    let d = mu.dim();
    let pi = mu.stationary();
    let mut entries = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            entries[i * d + j] = pi[j] * mu.p(j, i) / pi[i];
        }
        // absorb rounding so the row is stochastic to machine precision
        let sum: f64 = entries[i * d..(i + 1) * d].iter().sum();
        entries[i * d..(i + 1) * d]
            .iter_mut()
            .for_each(|x| *x /= sum);
    }
    let transition = StochasticMatrix { dim: d, entries };
    MarkovMeasure {
        transition,
        stationary: pi.to_vec(),
    }
}

fn cumulative_rows(mu: &MarkovMeasure) -> (Vec<f64>, Vec<Vec<f64>>) {
    let cum = |p: &[f64]| {
        let mut acc = 0.0;
        p.iter()
            .map(|&x| {
                acc += x;
                acc
            })
            .collect::<Vec<_>>()
    };
    let initial = cum(mu.stationary());
    let rows = (0..mu.dim()).map(|i| cum(mu.transition().row(i))).collect();
    (initial, rows)
}

fn draw(cum: &[f64], u: f64) -> usize {
    let total = *cum.last().unwrap();
    let target = u * total;
    let idx = cum.partition_point(|&c| c <= target);
    if idx < cum.len() {
        return idx;
    }
    // u·total landed on the last boundary: take the last symbol with mass
    cum.iter()
        .enumerate()
        .rev()
        .find(|&(k, &c)| k == 0 || c > cum[k - 1])
        .map(|(k, _)| k)
        .unwrap_or(0)
}

pub(crate) fn sample_orbit_with<R: Rng>(mu: &MarkovMeasure, n: usize, rng: &mut R) -> Vec<usize> {
    let (initial, rows) = cumulative_rows(mu);
    let mut out = Vec::with_capacity(n);
    let mut state = draw(&initial, rng.random::<f64>());
    out.push(state);
    for _ in 1..n {
        state = draw(&rows[state], rng.random::<f64>());
        out.push(state);
    }
    out
}

/// Random generator for trial `stream` of a seeded experiment. Each
/// `(seed, stream)` pair gives an independent, reproducible ChaCha stream.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Samples a word of length `n` with the law of the `n`-cylinder marginal
/// of `mu`. Deterministic in `seed`.
pub fn sample_orbit(mu: &MarkovMeasure, n: usize, seed: u64) -> Result<Word> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "orbit length must be at least 1".into(),
        ));
    }
    let mut rng = trial_rng(seed, 0);
    Ok(Word(sample_orbit_with(mu, n, &mut rng)))
}

/// Kolmogorov–Sinai entropy of a Markov measure in nats,
/// `−Σ π_i p_ij log p_ij`.
pub fn ks_entropy(mu: &MarkovMeasure) -> f64 {
    let d = mu.dim();
    let mut h = 0.0;
    for i in 0..d {
        let row: f64 = mu.transition().row(i).iter().map(|&p| xlogx(p)).sum();
        h -= mu.stationary()[i] * row;
    }
    h
}
