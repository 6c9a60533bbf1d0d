//! Command dispatch.

use symdyn_info::finite_thermo::equilibrium_with;
use symdyn_info::info_gain::information_gain_wrt;
use symdyn_info::involution::with_gauge;
use symdyn_info::tfca::{nystrom_spectral_with, tfca_equilibrium_with};
use symdyn_info::{
    conditional_entropy, cylinder_gain_estimate, dual_eigenvalue_check, entropy_production_markov,
    entropy_production_potential, equilibrium, equilibrium_measure, ig_shift, information_gain,
    involution_kernel, is_symmetric, kernel_information_gain, kl_divergence, ks_entropy,
    mutual_information, orbit_gain_estimate, relative_entropy, shannon_entropy, specific_gain,
    spectral_data_with, tfca_entropy, tfca_entropy_production, variational_entropy_oracle,
    GainReport, GainRoute, JointDistribution, LogBase, MarkovMeasure, ProbabilityKernel,
    SpectralData,
};

use crate::job::JobSpec;
use crate::output::{Entry, Value};
use crate::CliError;

pub const COMMANDS: [&str; 14] = [
    "entropy",
    "infogain",
    "kl",
    "kernel-ig",
    "spectral",
    "equilibrium",
    "relent",
    "specgain",
    "ep",
    "involution",
    "symmetric",
    "tfca-spectral",
    "tfca-ep",
    "variational-oracle",
];

const DEFAULT_ORACLE_ITERATIONS: usize = 10_000;
const DEFAULT_ORACLE_STEP: f64 = 0.5;

use Value::{Count, Ext, Flag, Real, Vector};

/// Runs one job and returns its entries in a fixed order.
pub fn run(job: &JobSpec) -> Result<Vec<Entry>, CliError> {
    let cmd = job.command.as_str();
    let input = &job.input;
    let opts = &job.options;
    let nat = LogBase::Natural;
    let mut out = Vec::new();

    match cmd {
        "entropy" => {
            let h = shannon_entropy(input.p(cmd)?, nat)?;
            out.push(Entry::info("entropy", "shannon_entropy", Real(h)));
        }
        "infogain" => {
            let pi = input.joint(cmd)?;
            out.push(Entry::info(
                "information_gain",
                "information_gain",
                Real(information_gain(&pi, nat)),
            ));
            out.push(Entry::info(
                "mutual_information",
                "mutual_information",
                Real(mutual_information(&pi, nat)),
            ));
            out.push(Entry::info(
                "conditional_entropy",
                "conditional_entropy",
                Real(conditional_entropy(&pi, nat)),
            ));
            out.push(Entry::info(
                "marginal_entropy",
                "shannon_entropy",
                Real(shannon_entropy(&pi.x_marginal(), nat)?),
            ));
            if let Some(reference) = &input.reference {
                let pi0 = JointDistribution::new(reference.clone())?;
                out.push(Entry::info(
                    "reference_gain",
                    "information_gain_wrt",
                    Ext(information_gain_wrt(&pi, &pi0)?),
                ));
            }
            if let Some(phi0) = &input.phi0 {
                let nu = input
                    .weights
                    .as_ref()
                    .ok_or_else(|| CliError::Schema("input.phi0 needs input.weights".into()))?;
                let flat: Vec<f64> = phi0.iter().flatten().copied().collect();
                out.push(Entry::info(
                    "shifted_gain",
                    "ig_shift",
                    Ext(ig_shift(&pi, nu, &flat, nat)?),
                ));
            }
        }
        "kl" => {
            let d = kl_divergence(input.p(cmd)?, input.q(cmd)?)?;
            out.push(Entry::info("kl_divergence", "kl_divergence", Ext(d)));
        }
        "kernel-ig" => {
            let pi = input.joint(cmd)?;
            let rows = input.kernel.clone().ok_or_else(|| {
                CliError::Schema("command \"kernel-ig\" requires input.kernel".into())
            })?;
            let k = ProbabilityKernel::new(rows)?;
            out.push(Entry::info(
                "kernel_information_gain",
                "kernel_information_gain",
                Ext(kernel_information_gain(&pi, &k)?),
            ));
        }
        "spectral" => {
            let a = input.potential(cmd, opts.depth)?;
            let nu = input.weights(a.alphabet_size())?;
            push_spectral(
                &mut out,
                &spectral_data_with(&a, &nu, opts.solver()?)?,
                "spectral_data",
            );
        }
        "equilibrium" => {
            let a = input.potential(cmd, opts.depth)?;
            let nu = input.weights(a.alphabet_size())?;
            let eq = equilibrium_with(&a, &nu, opts.solver()?)?;
            push_spectral(&mut out, &eq.spectral, "equilibrium");
            out.push(Entry::new(
                "normalized_potential",
                "normalize_potential",
                Vector(eq.normalized.table().to_vec()),
            ));
            push_measure(&mut out, &eq.measure, "equilibrium");
            out.push(Entry::info(
                "relative_entropy",
                "relative_entropy",
                Real(relative_entropy(&eq.measure, &nu)?),
            ));
        }
        "relent" => {
            let mu = input.chain(cmd)?;
            let nu = input.weights(mu.dim())?;
            out.push(Entry::info(
                "relative_entropy",
                "relative_entropy",
                Real(relative_entropy(&mu, &nu)?),
            ));
            out.push(Entry::info(
                "ks_entropy",
                "ks_entropy",
                Real(ks_entropy(&mu)),
            ));
        }
        "specgain" => {
            let eta = input.chain(cmd)?;
            let a = input.potential(cmd, opts.depth)?;
            let nu = input.weights(a.alphabet_size())?;
            match opts.mode.as_deref().unwrap_or("formula") {
                "formula" => push_gain(&mut out, specific_gain(&eta, &a, &nu)?, false),
                "cylinder" => {
                    let mu = equilibrium_measure(&a, &nu)?;
                    for n in opts.lengths()? {
                        push_gain(&mut out, cylinder_gain_estimate(&eta, &mu, n)?, true);
                    }
                }
                "orbit" => {
                    let mu = equilibrium_measure(&a, &nu)?;
                    for n in opts.lengths()? {
                        let report = orbit_gain_estimate(&eta, &mu, n, opts.trials(), opts.seed())?;
                        push_gain(&mut out, report, true);
                    }
                }
                other => return Err(unknown_mode(cmd, other, "formula, cylinder or orbit")),
            }
        }
        "ep" => {
            let default = if input.chain.is_some() {
                "markov"
            } else {
                "potential"
            };
            match opts.mode.as_deref().unwrap_or(default) {
                "markov" => {
                    let mu = input.chain(cmd)?;
                    out.push(Entry::info(
                        "entropy_production",
                        "entropy_production_markov",
                        Ext(entropy_production_markov(&mu)),
                    ));
                }
                "potential" => {
                    let a = input.potential(cmd, opts.depth)?;
                    let nu = input.weights(a.alphabet_size())?;
                    out.push(Entry::info(
                        "entropy_production",
                        "entropy_production_potential",
                        Ext(entropy_production_potential(&a, &nu)?),
                    ));
                }
                other => return Err(unknown_mode(cmd, other, "markov or potential")),
            }
        }
        "involution" => {
            let a = input.potential(cmd, opts.depth)?;
            let nu = input.weights(a.alphabet_size())?;
            let inv = involution_kernel(&a)?;
            out.push(Entry::new(
                "kernel",
                "involution_kernel",
                Vector(inv.kernel.clone()),
            ));
            out.push(Entry::new(
                "dual_potential",
                "involution_kernel",
                Vector(inv.a_minus.table().to_vec()),
            ));
            out.push(Entry::new(
                "cocycle_residual",
                "cocycle_residual",
                Real(inv.cocycle_residual(&a)),
            ));
            let (lambda, dual) = dual_eigenvalue_check(&a, &nu)?;
            out.push(Entry::new("lambda", "dual_eigenvalue_check", Real(lambda)));
            out.push(Entry::new(
                "lambda_dual",
                "dual_eigenvalue_check",
                Real(dual),
            ));
            // the Markov gauge −log π turns e^{A⁻} into the forward transitions
            let eq = equilibrium(&a, &nu)?;
            let gauge: Vec<f64> = eq.measure.stationary().iter().map(|p| -p.ln()).collect();
            let gauged = with_gauge(&eq.normalized, &gauge)?;
            out.push(Entry::new(
                "gauged_dual_potential",
                "with_gauge",
                Vector(gauged.a_minus.table().to_vec()),
            ));
        }
        "symmetric" => {
            let a = input.potential(cmd, opts.depth)?;
            let report = is_symmetric(&a)?;
            out.push(Entry::new(
                "symmetric",
                "is_symmetric",
                Flag(report.symmetric),
            ));
            out.push(Entry::new("strict", "is_symmetric", Flag(report.strict)));
            out.push(Entry::new("defect", "is_symmetric", Real(report.defect)));
            if let Some(g) = report.gauge {
                out.push(Entry::new("gauge", "is_symmetric", Vector(g)));
            }
        }
        "tfca-spectral" => {
            let a = input.continuous(cmd)?;
            let q = input.quadrature(opts)?;
            out.push(Entry::new(
                "nodes",
                "quadrature",
                Vector(q.nodes().to_vec()),
            ));
            out.push(Entry::new(
                "weights",
                "quadrature",
                Vector(q.weights().to_vec()),
            ));
            push_spectral(
                &mut out,
                &nystrom_spectral_with(&a, &q, opts.solver()?)?,
                "nystrom_spectral",
            );
        }
        "tfca-ep" => {
            let a = input.continuous(cmd)?;
            let q = input.quadrature(opts)?;
            let eq = tfca_equilibrium_with(&a, &q, opts.solver()?)?;
            out.push(Entry::new(
                "stationary",
                "tfca_equilibrium",
                Vector(eq.stationary.clone()),
            ));
            out.push(Entry::info(
                "entropy",
                "tfca_entropy",
                Real(tfca_entropy(&a, &q)?),
            ));
            out.push(Entry::info(
                "entropy_production",
                "tfca_entropy_production",
                Ext(tfca_entropy_production(&a, &q)?),
            ));
        }
        "variational-oracle" => {
            let pi = input.joint(cmd)?;
            let iters = opts.iterations.unwrap_or(DEFAULT_ORACLE_ITERATIONS);
            let step = opts.step.unwrap_or(DEFAULT_ORACLE_STEP);
            let r = variational_entropy_oracle(&pi, iters, step)?;
            out.push(Entry::info(
                "supremum",
                "variational_entropy_oracle",
                Real(r.value),
            ));
            out.push(Entry::new(
                "iterations",
                "variational_entropy_oracle",
                Count(r.iterations),
            ));
            out.push(Entry::info(
                "negative_conditional_entropy",
                "conditional_entropy",
                Real(-conditional_entropy(&pi, nat)),
            ));
        }
        other => {
            return Err(CliError::Schema(format!(
                "unknown command {other:?} (expected one of {})",
                COMMANDS.join(", ")
            )))
        }
    }
    Ok(out)
}

fn unknown_mode(cmd: &str, mode: &str, expected: &str) -> CliError {
    CliError::Schema(format!(
        "unknown mode {mode:?} for {cmd:?} (expected {expected})"
    ))
}

fn push_spectral(out: &mut Vec<Entry>, s: &SpectralData, op: &'static str) {
    out.push(Entry::new("lambda", op, Real(s.lambda)));
    out.push(Entry::new("pressure", op, Real(s.pressure())));
    out.push(Entry::new("h", op, Vector(s.h.clone())));
    out.push(Entry::new("rho", op, Vector(s.rho.clone())));
    out.push(Entry::new("residual", op, Real(s.residual)));
}

fn push_measure(out: &mut Vec<Entry>, mu: &MarkovMeasure, op: &'static str) {
    let flat: Vec<f64> = mu.transition().rows().into_iter().flatten().collect();
    out.push(Entry::new("transition", op, Vector(flat)));
    out.push(Entry::new(
        "stationary",
        op,
        Vector(mu.stationary().to_vec()),
    ));
}

fn push_gain(out: &mut Vec<Entry>, g: GainReport, indexed: bool) {
    let op = g.route.as_str();
    let tag = |e: Entry| if indexed { e.at(g.n) } else { e };
    out.push(tag(Entry::info("specific_gain", op, Ext(g.value))));
    if g.route == GainRoute::OrbitMonteCarlo {
        out.push(tag(Entry::info("stderr", op, Real(g.stderr))));
    }
}
