//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the report is always printed.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use symdyn_info::info_gain::{relative_conditional_entropy, shift_normalization_defect};
use symdyn_info::tfca::nystrom_spectral;
use symdyn_info::{
    conditional_entropy, cylinder_gain_estimate, dual_eigenvalue_check, entropy_production_markov,
    entropy_production_potential, equilibrium, equilibrium_measure, ig_shift, information_gain,
    integrate_potential, kernel_information_gain, mutual_information, orbit_gain_estimate,
    relative_entropy, reverse_measure, shannon_entropy, spectral_data, tfca_entropy,
    tfca_entropy_production, tfca_equilibrium, variational_entropy_oracle, AprioriWeights,
    ContinuousPotential, JointDistribution, LogBase, Potential, ProbabilityKernel,
    QuadratureMeasure,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{}; {:.3} ms", out.detail, elapsed.as_secs_f64() * 1e3);
    if let Some(b) = budget {
        if elapsed > b {
            out.pass = false;
            out.detail = format!("{} (over budget {:?})", out.detail, b);
        }
    }
    out
}

/// Shannon entropy in bits, written independently of the library.
fn bits(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

fn c1_shannon_fixtures() -> Outcome {
    let b = LogBase::Two;
    let uniform = shannon_entropy(&[0.25; 4], b).unwrap();
    let dyadic = shannon_entropy(&[0.5, 0.25, 0.125, 0.125], b).unwrap();
    let biased = shannon_entropy(&[2.0 / 3.0, 1.0 / 3.0], b).unwrap();
    let pass = (uniform - 2.0).abs() <= 1e-12
        && (dyadic - 1.75).abs() <= 1e-12
        && (biased - 0.918).abs() <= 5e-4;
    outcome(pass, format!("H = {uniform}, {dyadic}, {biased:.6} bits"))
}

fn c2_box_example() -> Outcome {
    let table = [[0.10, 0.20], [0.45, 0.25]];
    let pi = JointDistribution::new(table.iter().map(|r| r.to_vec()).collect()).unwrap();
    let difference = information_gain(&pi, LogBase::Two);
    let kl_form = mutual_information(&pi, LogBase::Two);
    // oracle: S(P) from row sums, H(π) from the column conditionals
    let p = [table[0][0] + table[0][1], table[1][0] + table[1][1]];
    let q = [table[0][0] + table[1][0], table[0][1] + table[1][1]];
    let h = q[0] * bits(&[table[0][0] / q[0], table[1][0] / q[0]])
        + q[1] * bits(&[table[0][1] / q[1], table[1][1] / q[1]]);
    let oracle = bits(&p) - h;
    let pass = (difference - kl_form).abs() <= 1e-12 && (difference - oracle).abs() <= 1e-12;
    outcome(
        pass,
        format!(
            "IG = {difference:.12} bits, routes differ by {:.1e}, oracle by {:.1e}",
            (difference - kl_form).abs(),
            (difference - oracle).abs()
        ),
    )
}

fn c3_three_routes() -> Outcome {
    let counting = AprioriWeights::counting(3).unwrap();
    let mut worst_potential: f64 = 0.0;
    let mut worst_cylinder: f64 = 0.0;
    for seed in 0..50 {
        let mut rng = common::rng(3000 + seed);
        let mu = common::positive_chain(&mut rng, 3);
        let closed = entropy_production_markov(&mu).to_f64();
        let potential = entropy_production_potential(&Potential::from_markov(&mu), &counting)
            .unwrap()
            .to_f64();
        let n = 8;
        let cyl = cylinder_gain_estimate(&mu, &reverse_measure(&mu), n)
            .unwrap()
            .value
            .to_f64();
        worst_potential = worst_potential.max((closed - potential).abs());
        worst_cylinder = worst_cylinder.max((closed - n as f64 / (n as f64 - 1.0) * cyl).abs());
    }
    outcome(
        worst_potential <= 1e-10 && worst_cylinder <= 1e-9,
        format!("max |closed − potential| = {worst_potential:.1e}, max |closed − cylinder| = {worst_cylinder:.1e}"),
    )
}

fn c4_two_symbol_zero() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let mut rng = common::rng(4000 + seed);
        let mu = common::positive_chain(&mut rng, 2);
        worst = worst.max(entropy_production_markov(&mu).to_f64());
    }
    outcome(worst <= 1e-12, format!("max e_p = {worst:.1e}"))
}

fn c5_symmetric_zero() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let mut rng = common::rng(5000 + seed);
        let s = common::potential(&mut rng, 3, 2, 1.0);
        let g = common::probability(&mut rng, 3, 0.0);
        // A(i,j) − A(j,i) = g(j) − g(i)
        let a = Potential::from_fn(3, 2, |w| {
            let sym = 0.5 * (s.pair(w[0], w[1]) + s.pair(w[1], w[0]));
            sym + 0.5 * (3.0 * g[w[1]] - 3.0 * g[w[0]])
        })
        .unwrap();
        let nu = common::weights(&mut rng, 3);
        let ep = entropy_production_potential(&a, &nu).unwrap().to_f64();
        worst = worst.max(ep.abs());
    }
    outcome(worst <= 1e-10, format!("max |e_p| = {worst:.1e}"))
}

fn c6_dual_eigenvalue() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let mut rng = common::rng(6000 + seed);
        let a = common::potential(&mut rng, 3, 2, 1.0);
        let nu = common::weights(&mut rng, 3);
        let (la, lb) = dual_eigenvalue_check(&a, &nu).unwrap();
        worst = worst.max((la - lb).abs());
    }
    outcome(worst <= 1e-10, format!("max |λ_A − λ_A⁻| = {worst:.1e}"))
}

fn c7_variational() -> Outcome {
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_equality: f64 = 0.0;
    for p in 0..10 {
        let mut rng = common::rng(7000 + p);
        let a = common::potential(&mut rng, 3, 2, 1.0);
        let nu = common::weights(&mut rng, 3);
        let pressure = spectral_data(&a, &nu).unwrap().pressure();
        for _ in 0..100 {
            let eta = common::positive_chain(&mut rng, 3);
            let free =
                integrate_potential(&a, &eta).unwrap() + relative_entropy(&eta, &nu).unwrap();
            worst_gap = worst_gap.max(free - pressure);
        }
        let mu = equilibrium_measure(&a, &nu).unwrap();
        let free = integrate_potential(&a, &mu).unwrap() + relative_entropy(&mu, &nu).unwrap();
        worst_equality = worst_equality.max((free - pressure).abs());
    }
    outcome(
        worst_gap <= 1e-10 && worst_equality <= 1e-9,
        format!("max (∫A dη + h^ν(η) − log λ) = {worst_gap:.3e}, equality defect = {worst_equality:.1e}"),
    )
}

fn c8_orbit_estimator() -> Outcome {
    let mut rng = common::rng(8000);
    let a = common::potential(&mut rng, 3, 2, 1.0);
    let nu = common::weights(&mut rng, 3);
    let eta = equilibrium_measure(&a, &nu).unwrap();
    let mu = reverse_measure(&eta);
    let ep = entropy_production_markov(&eta).to_f64();
    let r = orbit_gain_estimate(&eta, &mu, 2000, 200, 8001).unwrap();
    let mean = r.value.to_f64();
    let pass = (mean - ep).abs() <= 3.0 * r.stderr && r.stderr < 0.05;
    outcome(
        pass,
        format!(
            "mean = {mean:.6}, e_p = {ep:.6}, stderr = {:.2e}, |Δ|/stderr = {:.2}",
            r.stderr,
            (mean - ep).abs() / r.stderr
        ),
    )
}

fn c9_variational_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut above = false;
    for seed in 0..20 {
        let mut rng = common::rng(9000 + seed);
        let zeros = if seed < 2 { 3 } else { 0 };
        let pi = common::joint(&mut rng, 4, 4, zeros);
        let target = -conditional_entropy(&pi, LogBase::Natural);
        let res = variational_entropy_oracle(&pi, 500, 1.0).unwrap();
        above |= res.value > target + 1e-6;
        worst = worst.max((res.value - target).abs());
    }
    outcome(
        worst <= 1e-6 && !above,
        format!("max |sup − (−H)| = {worst:.1e}"),
    )
}

fn c10_tfca() -> Outcome {
    let two = QuadratureMeasure::custom(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
    let half = AprioriWeights::new(vec![0.5, 0.5]).unwrap();
    let mut identical = true;
    for seed in 0..10 {
        let mut rng = common::rng(10_000 + seed);
        let values = common::potential(&mut rng, 2, 2, 1.5).table().to_vec();
        let cont = ContinuousPotential::Tabulated {
            n: 2,
            values: values.clone(),
        };
        let finite = Potential::new(2, 2, values).unwrap();
        let finite_eq = equilibrium(&finite, &half).unwrap();
        let tfca_eq = tfca_equilibrium(&cont, &two).unwrap();
        identical &=
            nystrom_spectral(&cont, &two).unwrap() == spectral_data(&finite, &half).unwrap();
        identical &= tfca_eq.state == finite_eq;
        identical &= tfca_entropy(&cont, &two).unwrap().to_bits()
            == relative_entropy(&finite_eq.measure, &half)
                .unwrap()
                .to_bits();
        identical &= tfca_entropy_production(&cont, &two).unwrap()
            == entropy_production_potential(&finite, &half).unwrap();
    }
    let bilinear = ContinuousPotential::Bilinear {
        alpha: 2.0,
        beta: -0.5,
        gamma: 1.0,
    };
    let l32 = nystrom_spectral(&bilinear, &QuadratureMeasure::gauss_legendre(32).unwrap())
        .unwrap()
        .lambda;
    let l64 = nystrom_spectral(&bilinear, &QuadratureMeasure::gauss_legendre(64).unwrap())
        .unwrap()
        .lambda;
    let refinement = (l32 - l64).abs() / l64;
    let cosine = ContinuousPotential::CosineCoupling { alpha: 1.5 };
    let ep = tfca_entropy_production(&cosine, &QuadratureMeasure::midpoint(64).unwrap())
        .unwrap()
        .to_f64()
        .abs();
    outcome(
        identical && refinement <= 1e-6 && ep <= 1e-10,
        format!(
            "bit-identical = {identical}, λ refinement = {refinement:.1e}, cosine e_p = {ep:.1e}"
        ),
    )
}

fn c11_counterexample() -> Outcome {
    let mut rng = common::rng(11_000);
    let d = 3;
    let nu = common::probability(&mut rng, d, 0.2);
    let p = common::probability(&mut rng, d, 0.0);
    // f = log(P/ν) is ν-normalized and nonzero
    let f: Vec<f64> = p.iter().zip(&nu).map(|(a, b)| (a / b).ln()).collect();
    let int_f: f64 = f.iter().zip(&nu).map(|(a, b)| a * b).sum();
    let phi0 = vec![0.0; d * 2];
    let psi0: Vec<f64> = (0..d * 2).map(|e| (e % 2) as f64 * f[e / 2]).collect();

    // both tilts disintegrate π₀ = ν × δ₀
    let delta0 = [1.0, 0.0];
    let pi0_a = ProbabilityKernel::tilt(&nu, &phi0, 2)
        .unwrap()
        .compose(&delta0)
        .unwrap();
    let pi0_b = ProbabilityKernel::tilt(&nu, &psi0, 2)
        .unwrap()
        .compose(&delta0)
        .unwrap();
    let same_pi0 = pi0_a
        .table()
        .iter()
        .zip(pi0_b.table())
        .all(|(x, y)| (x - y).abs() <= 1e-15);
    let normalized = shift_normalization_defect(&nu, &phi0, 2) <= 1e-12
        && shift_normalization_defect(&nu, &psi0, 2) <= 1e-12;

    // π = ν × δ₁ has H^ν(π) = 0
    let pi = JointDistribution::from_flat(
        d,
        2,
        (0..d * 2).map(|e| (e % 2) as f64 * nu[e / 2]).collect(),
    )
    .unwrap();
    let nu_weights = AprioriWeights::new(nu.clone()).unwrap();
    let h_nu = relative_conditional_entropy(&pi, &nu_weights).unwrap();
    let route_phi = ig_shift(&pi, &nu, &phi0, LogBase::Natural)
        .unwrap()
        .to_f64();
    let route_psi = ig_shift(&pi, &nu, &psi0, LogBase::Natural)
        .unwrap()
        .to_f64();
    let gap = route_psi - route_phi;
    // each route agrees with the kernel it actually encodes
    let kernel_psi = kernel_information_gain(&pi, &ProbabilityKernel::tilt(&nu, &psi0, 2).unwrap())
        .unwrap()
        .to_f64();
    let pass = same_pi0
        && normalized
        && h_nu.abs() <= 1e-15
        && route_phi.abs() <= 1e-15
        && (gap.abs() - int_f.abs()).abs() <= 1e-12
        && int_f.abs() > 1e-3
        && (route_psi - kernel_psi).abs() <= 1e-12;
    outcome(
        pass,
        format!("routes give {route_phi:.3e} and {route_psi:.12}; |difference| = {:.12} = |∫f dν| (∫f dν = {int_f:.12})",
            gap.abs()),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        (
            "1 Shannon entropy fixtures",
            Some(Duration::from_millis(1)),
            c1_shannon_fixtures,
        ),
        (
            "2 box example, two routes and oracle",
            Some(Duration::from_millis(1)),
            c2_box_example,
        ),
        (
            "3 Markov entropy production, three routes",
            Some(Duration::from_secs(1)),
            c3_three_routes,
        ),
        (
            "4 two-symbol chains have zero entropy production",
            Some(Duration::from_millis(10)),
            c4_two_symbol_zero,
        ),
        (
            "5 symmetric potentials have zero entropy production",
            None,
            c5_symmetric_zero,
        ),
        ("6 dual eigenvalue", None, c6_dual_eigenvalue),
        (
            "7 variational principle",
            Some(Duration::from_secs(5)),
            c7_variational,
        ),
        (
            "8 orbit estimator",
            Some(Duration::from_secs(10)),
            c8_orbit_estimator,
        ),
        (
            "9 variational entropy oracle",
            Some(Duration::from_secs(5)),
            c9_variational_oracle,
        ),
        (
            "10 quadrature model consistency",
            Some(Duration::from_secs(5)),
            c10_tfca,
        ),
        (
            "11 ill-defined reference-joint gain",
            None,
            c11_counterexample,
        ),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let out = timed(budget, run);
        if !out.pass {
            failures += 1;
        }
        println!(
            "[{}] criterion {name}: {}",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
