//! Job documents: parsing, flag overrides and conversion into library types.

use serde::Deserialize;
use symdyn_info::{
    AprioriWeights, ContinuousPotential, JointDistribution, LogBase, MarkovMeasure, Potential,
    QuadratureMeasure, QuadratureRule, SolverOptions,
};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

const DEFAULT_NODES: usize = 64;
const DEFAULT_TRIALS: usize = 200;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub schema_version: u32,
    pub command: String,
    #[serde(default)]
    pub input: Input,
    #[serde(default)]
    pub options: Options,
}

/// Union of every input field any command reads. Each command checks for the
/// fields it needs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Input {
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub joint: Option<Vec<Vec<f64>>>,
    /// Reference joint for `IG(π, π₀)`.
    pub reference: Option<Vec<Vec<f64>>>,
    /// Kernel rows, one per `y`.
    pub kernel: Option<Vec<Vec<f64>>>,
    /// Shift function `φ₀[x][y]` for the shifted gain.
    pub phi0: Option<Vec<Vec<f64>>>,
    /// Transition matrix of a Markov measure.
    pub chain: Option<Vec<Vec<f64>>>,
    pub potential: Option<PotentialSpec>,
    pub weights: Option<Vec<f64>>,
    pub continuous: Option<ContinuousSpec>,
    pub quadrature: Option<QuadratureSpec>,
}

/// Finite potential, either as a `d × d` matrix (depth 2) or as a flat table
/// over words of length `depth`, first symbol most significant. `null`
/// entries stand for `−∞` (forbidden words).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub matrix: Option<Vec<Vec<Option<f64>>>>,
    pub alphabet: Option<usize>,
    pub depth: Option<usize>,
    pub table: Option<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContinuousSpec {
    Constant { c: f64 },
    Separable { coeffs: Vec<f64> },
    Bilinear { alpha: f64, beta: f64, gamma: f64 },
    Cosine { alpha: f64 },
    Sine { alpha: f64 },
    Tabulated { n: usize, values: Vec<f64> },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rule: Option<String>,
    pub count: Option<usize>,
    pub nodes: Option<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
}

/// A single value or a list, used for sweeps over `n`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub base: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub n: Option<OneOrMany>,
    pub depth: Option<usize>,
    pub nodes: Option<usize>,
    pub rule: Option<String>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub mode: Option<String>,
    pub iterations: Option<usize>,
    pub step: Option<f64>,
}

/// Command-line values that take precedence over the job's `options`.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub base: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub n: Option<Vec<usize>>,
    pub depth: Option<usize>,
    pub nodes: Option<usize>,
    pub rule: Option<String>,
    pub tol: Option<f64>,
    pub mode: Option<String>,
}

impl JobSpec {
    pub fn parse(text: &str) -> Result<JobSpec, CliError> {
        let job: JobSpec = serde_json::from_str(text)
            .map_err(|e| CliError::Schema(format!("malformed job: {e}")))?;
        if job.schema_version != SCHEMA_VERSION {
            return Err(CliError::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                job.schema_version
            )));
        }
        Ok(job)
    }

    pub fn apply(&mut self, o: Overrides) {
        let opts = &mut self.options;
        macro_rules! set {
            ($($f:ident),*) => { $( if o.$f.is_some() { opts.$f = o.$f; } )* };
        }
        set!(base, seed, trials, depth, nodes, rule, tol, mode);
        if let Some(n) = o.n {
            opts.n = Some(OneOrMany::Many(n));
        }
    }
}

impl Options {
    pub fn base(&self) -> Result<LogBase, CliError> {
        match &self.base {
            None => Ok(LogBase::Natural),
            Some(s) => LogBase::parse(s).ok_or_else(|| {
                CliError::Schema(format!("unknown base {s:?} (expected e, 2 or 10)"))
            }),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    pub fn lengths(&self) -> Result<Vec<usize>, CliError> {
        match &self.n {
            None => Err(CliError::Schema(
                "options.n is required for this mode".into(),
            )),
            Some(OneOrMany::One(n)) => Ok(vec![*n]),
            Some(OneOrMany::Many(v)) if v.is_empty() => {
                Err(CliError::Schema("options.n must not be empty".into()))
            }
            Some(OneOrMany::Many(v)) => Ok(v.clone()),
        }
    }

    pub fn solver(&self) -> Result<SolverOptions, CliError> {
        let mut s = SolverOptions::default();
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Schema(format!("tol must be positive, got {tol}")));
            }
            s.tol = tol;
        }
        if let Some(m) = self.max_iter {
            s.max_iter = m;
        }
        Ok(s)
    }
}

fn need<'a, T>(field: &'a Option<T>, name: &str, command: &str) -> Result<&'a T, CliError> {
    field
        .as_ref()
        .ok_or_else(|| CliError::Schema(format!("command {command:?} requires input.{name}")))
}

impl Input {
    pub fn p(&self, command: &str) -> Result<&[f64], CliError> {
        need(&self.p, "p", command).map(Vec::as_slice)
    }

    pub fn q(&self, command: &str) -> Result<&[f64], CliError> {
        need(&self.q, "q", command).map(Vec::as_slice)
    }

    pub fn joint(&self, command: &str) -> Result<JointDistribution, CliError> {
        Ok(JointDistribution::new(
            need(&self.joint, "joint", command)?.clone(),
        )?)
    }

    pub fn chain(&self, command: &str) -> Result<MarkovMeasure, CliError> {
        Ok(MarkovMeasure::from_rows(
            need(&self.chain, "chain", command)?.clone(),
        )?)
    }

    /// A priori weights; counting measure on the alphabet when omitted.
    pub fn weights(&self, d: usize) -> Result<AprioriWeights, CliError> {
        Ok(match &self.weights {
            Some(w) => AprioriWeights::new(w.clone())?,
            None => AprioriWeights::counting(d)?,
        })
    }

    pub fn potential(&self, command: &str, depth: Option<usize>) -> Result<Potential, CliError> {
        need(&self.potential, "potential", command)?.build(depth)
    }

    pub fn continuous(&self, command: &str) -> Result<ContinuousPotential, CliError> {
        Ok(need(&self.continuous, "continuous", command)?.build())
    }

    pub fn quadrature(&self, opts: &Options) -> Result<QuadratureMeasure, CliError> {
        let spec = self.quadrature.clone().unwrap_or_default();
        let rule_name = opts.rule.clone().or(spec.rule).unwrap_or_else(|| {
            if spec.nodes.is_some() {
                "custom"
            } else {
                "gauss-legendre"
            }
            .to_string()
        });
        let rule = QuadratureRule::parse(&rule_name)
            .ok_or_else(|| CliError::Schema(format!("unknown quadrature rule {rule_name:?}")))?;
        Ok(match rule {
            QuadratureRule::Custom => {
                let (Some(nodes), Some(weights)) = (spec.nodes, spec.weights) else {
                    return Err(CliError::Schema(
                        "custom quadrature needs input.quadrature.nodes and .weights".into(),
                    ));
                };
                QuadratureMeasure::custom(nodes, weights)?
            }
            _ => {
                let n = opts.nodes.or(spec.count).unwrap_or(DEFAULT_NODES);
                QuadratureMeasure::with_rule(rule, n)?
            }
        })
    }
}

fn expand(values: &[Option<f64>]) -> Vec<f64> {
    values
        .iter()
        .map(|v| v.unwrap_or(f64::NEG_INFINITY))
        .collect()
}

impl PotentialSpec {
    /// `depth` is the fallback when the table does not state its own; with
    /// neither, it is inferred from the table length.
    pub fn build(&self, depth: Option<usize>) -> Result<Potential, CliError> {
        match (&self.matrix, &self.table) {
            (Some(_), Some(_)) => Err(CliError::Schema(
                "potential takes either matrix or table, not both".into(),
            )),
            (None, None) => Err(CliError::Schema("potential needs matrix or table".into())),
            (Some(rows), None) => {
                let rows: Vec<Vec<f64>> = rows.iter().map(|r| expand(r)).collect();
                Ok(Potential::from_matrix(&rows)?)
            }
            (None, Some(table)) => {
                let d = self.alphabet.ok_or_else(|| {
                    CliError::Schema("potential.table needs potential.alphabet".into())
                })?;
                let k = match self.depth.or(depth) {
                    Some(k) => k,
                    None => infer_depth(d, table.len())?,
                };
                Ok(Potential::new(d, k, expand(table))?)
            }
        }
    }
}

fn infer_depth(d: usize, len: usize) -> Result<usize, CliError> {
    let mut k = 1;
    let mut size = d;
    while size < len && d >= 2 {
        size *= d;
        k += 1;
    }
    if size == len {
        Ok(k)
    } else {
        Err(CliError::Schema(format!(
            "table length {len} is not a power of the alphabet size {d}"
        )))
    }
}

impl ContinuousSpec {
    pub fn build(&self) -> ContinuousPotential {
        match self.clone() {
            ContinuousSpec::Constant { c } => ContinuousPotential::Constant { c },
            ContinuousSpec::Separable { coeffs } => ContinuousPotential::Separable { coeffs },
            ContinuousSpec::Bilinear { alpha, beta, gamma } => {
                ContinuousPotential::Bilinear { alpha, beta, gamma }
            }
            ContinuousSpec::Cosine { alpha } => ContinuousPotential::CosineCoupling { alpha },
            ContinuousSpec::Sine { alpha } => ContinuousPotential::SineCoupling { alpha },
            ContinuousSpec::Tabulated { n, values } => ContinuousPotential::Tabulated { n, values },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_inference() {
        assert_eq!(infer_depth(2, 8).unwrap(), 3);
        assert_eq!(infer_depth(3, 3).unwrap(), 1);
        assert!(infer_depth(3, 10).is_err());
    }

    #[test]
    fn overrides_win() {
        let mut job = JobSpec::parse(
            r#"{"schema_version":1,"command":"entropy","options":{"base":"e","seed":4}}"#,
        )
        .unwrap();
        job.apply(Overrides {
            base: Some("2".into()),
            ..Overrides::default()
        });
        assert_eq!(job.options.base().unwrap(), LogBase::Two);
        assert_eq!(job.options.seed(), 4);
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        assert!(JobSpec::parse(r#"{"schema_version":1,"command":"kl","bogus":1}"#).is_err());
        assert!(JobSpec::parse(r#"{"schema_version":2,"command":"kl"}"#).is_err());
    }

    #[test]
    fn null_entries_are_forbidden_words() {
        let spec = PotentialSpec {
            matrix: Some(vec![vec![Some(0.0), None], vec![Some(0.0), Some(0.0)]]),
            ..PotentialSpec::default()
        };
        let a = spec.build(None).unwrap();
        assert_eq!(a.pair(0, 1), f64::NEG_INFINITY);
    }
}
