use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use circle_eq_core::model::{to_charge_system, HatConfig, StructuredConfig};
use circle_eq_core::solve::{
    analytic_equilibrium, angle_sup_distance, hat_analytic_equilibrium, maximize, Domain, EquilibriumSolution,
    InitialGuess, SolveOptions, SolvedConfig,
};
use circle_eq_core::verify::{verify_hat, verify_structured, VerificationReport};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::schema::{
    mobile_name, Config, ConfigDoc, OptimizeDoc, Params, ReportDoc, RunDoc, Space, Summary, VerifyDoc, SCHEMA_VERSION,
};
use crate::{svg, Failure, ParamArgs};

pub(crate) fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    text
}

pub(crate) fn check_params(n: u64, m: u64, p: f64, q: f64) -> Result<Params, Failure> {
    if n < 1 {
        return Err(Failure::Input("n must be ≥ 1".into()));
    }
    if m < 1 {
        return Err(Failure::Input("m must be ≥ 1".into()));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(Failure::Input(format!("p must be > 0, got {p}")));
    }
    if !(q.is_finite() && q > 0.0) {
        return Err(Failure::Input(format!("q must be > 0, got {q}")));
    }
    Ok(Params { n: n as usize, m: m as usize, p, q })
}

fn params_of(args: &ParamArgs) -> Result<Params, Failure> {
    check_params(args.n, args.m, args.p, args.q)
}

/// Analytic equilibrium in the requested space, with its verification report.
pub(crate) fn solve_and_verify(params: Params, space: Space) -> Result<(ConfigDoc, VerificationReport), Failure> {
    let Params { n, m, p, q } = params;
    let (mut doc, report, zeros) = match space {
        Space::S => {
            let sol = analytic_equilibrium(n, m, p, q)?;
            let SolvedConfig::Structured(cfg) = &sol.config else { unreachable!("structured solve") };
            (ConfigDoc::from_structured(cfg), verify_structured(cfg)?, sol.jacobi_zeros)
        }
        Space::Hat => {
            let sol = hat_analytic_equilibrium(n, m, p, q)?;
            let SolvedConfig::Hat(cfg) = &sol.config else { unreachable!("hat solve") };
            (ConfigDoc::from_hat(cfg), verify_hat(cfg)?, sol.jacobi_zeros)
        }
    };
    doc.jacobi_zeros = zeros;
    doc.verification = Some(Summary::from_report(&report));
    Ok((doc, report))
}

pub fn solve(args: &ParamArgs, space: Space, output: Option<&Path>) -> Result<(), Failure> {
    let (doc, _) = solve_and_verify(params_of(args)?, space)?;
    emit(&to_json(&doc), output)
}

pub struct OptimizeSettings {
    pub space: Space,
    pub starts: usize,
    pub seed: u64,
    pub initial: Option<PathBuf>,
    pub tolerance: f64,
    pub max_iterations: usize,
}

fn read_doc(path: &Path) -> Result<ConfigDoc, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let doc: ConfigDoc =
        serde_json::from_str(&text).with_context(|| format!("{} is not a configuration document", path.display()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Failure::Input(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    Ok(doc)
}

fn validated(doc: &ConfigDoc) -> Result<Config, Failure> {
    let config = doc.to_config();
    match &config {
        Config::Structured(cfg) => cfg.validate()?,
        Config::Hat(cfg) => cfg.validate()?,
    }
    Ok(config)
}

pub fn optimize(args: &ParamArgs, settings: &OptimizeSettings, output: Option<&Path>) -> Result<(), Failure> {
    let params = params_of(args)?;
    let Params { n, m, p, q } = params;
    if settings.starts == 0 {
        return Err(Failure::Input("--starts must be ≥ 1".into()));
    }
    let first = match &settings.initial {
        None => InitialGuess::Midpoint,
        Some(path) => {
            let doc = read_doc(path)?;
            if doc.params != params || doc.space != settings.space {
                return Err(Failure::Input("initial configuration does not match --space/--n/--m/--p/--q".into()));
            }
            match validated(&doc)? {
                Config::Structured(cfg) => InitialGuess::Structured(cfg),
                Config::Hat(cfg) => InitialGuess::Hat(cfg),
            }
        }
    };
    let (domain, analytic) = match settings.space {
        Space::S => (Domain::Structured { n, m, p, q }, analytic_equilibrium(n, m, p, q)?),
        Space::Hat => (Domain::Hat { n, m, p, q }, hat_analytic_equilibrium(n, m, p, q)?),
    };
    let target = analytic.config.free_angles();

    let mut rng = StdRng::seed_from_u64(settings.seed);
    let mut solutions: Vec<(String, EquilibriumSolution)> = Vec::with_capacity(settings.starts);
    for run in 0..settings.starts {
        let (label, initial) = if run == 0 {
            let label = if settings.initial.is_some() { "file" } else { "midpoint" };
            (label.to_string(), first.clone())
        } else {
            let guess = match settings.space {
                Space::S => InitialGuess::Structured(StructuredConfig::sample(n, m, p, q, || rng.gen())),
                Space::Hat => InitialGuess::Hat(HatConfig::sample(n, m, p, q, || rng.gen())),
            };
            (format!("random {run}"), guess)
        };
        let opts = SolveOptions {
            gradient_tolerance: settings.tolerance,
            max_iterations: settings.max_iterations,
            initial,
            ..SolveOptions::default()
        };
        solutions.push((label, maximize(&domain, &opts)?));
    }

    let finals: Vec<Vec<f64>> = solutions.iter().map(|(_, s)| s.config.free_angles()).collect();
    let mut max_pairwise = 0.0f64;
    for (i, a) in finals.iter().enumerate() {
        for b in &finals[..i] {
            max_pairwise = max_pairwise.max(angle_sup_distance(a, b));
        }
    }
    let runs: Vec<RunDoc> = solutions
        .iter()
        .zip(&finals)
        .map(|((label, sol), angles)| RunDoc {
            start: label.clone(),
            converged: sol.converged,
            iterations: sol.iterations,
            final_gradient_norm: sol.final_gradient_norm,
            distance_to_analytic: angle_sup_distance(angles, &target),
        })
        .collect();

    let best = &solutions[0].1;
    let config = match &best.config {
        SolvedConfig::Structured(cfg) => ConfigDoc::from_structured(cfg),
        SolvedConfig::Hat(cfg) => ConfigDoc::from_hat(cfg),
        SolvedConfig::Custom(_) => unreachable!("CLI only optimizes structured domains"),
    };
    let all_converged = runs.iter().all(|r| r.converged);
    let doc = OptimizeDoc {
        config,
        converged: all_converged,
        iterations: best.iterations,
        final_gradient_norm: best.final_gradient_norm,
        distance_to_analytic: runs.iter().map(|r| r.distance_to_analytic).fold(0.0, f64::max),
        max_pairwise_distance: max_pairwise,
        runs,
    };
    emit(&to_json(&doc), output)?;
    if all_converged {
        Ok(())
    } else {
        Err(Failure::NonConvergence("Newton iteration did not converge; last iterate written".into()))
    }
}

/// Names of the checks in `report` that exceed `threshold`.
pub(crate) fn threshold_failures(report: &VerificationReport, threshold: f64) -> Vec<String> {
    let mut failures = Vec::new();
    let tangential = report.max_tangential_relative();
    if !(tangential <= threshold) {
        failures.push(format!("tangential force {tangential:e}"));
    }
    let identity = report.max_identity_relative();
    if !(identity <= threshold) {
        failures.push(format!("critical-point identity {identity:e}"));
    }
    if let Some(c) = &report.constants {
        if !(c.max_deviation <= threshold) {
            failures.push(format!("radial constants {:e}", c.max_deviation));
        }
    }
    if let Some(r) = report.q_ode_max_residual {
        if !(r <= threshold) {
            failures.push(format!("Q ODE {r:e}"));
        }
    }
    if report.negated_hessian_factorizes == Some(false) {
        failures.push("negated Hessian not positive definite".into());
    }
    failures
}

pub fn verify(path: &Path, threshold: f64, output: Option<&Path>) -> Result<(), Failure> {
    if !(threshold > 0.0) {
        return Err(Failure::Input(format!("threshold must be > 0, got {threshold}")));
    }
    let doc = read_doc(path)?;
    let report = match validated(&doc)? {
        Config::Structured(cfg) => verify_structured(&cfg)?,
        Config::Hat(cfg) => verify_hat(&cfg)?,
    };
    let failures = threshold_failures(&report, threshold);
    let worst = report
        .per_particle
        .iter()
        .max_by(|a, b| a.tangential_residual.abs().total_cmp(&b.tangential_residual.abs()))
        .map(|r| mobile_name(doc.space, doc.params.m, r.index));
    let out = VerifyDoc {
        schema_version: SCHEMA_VERSION,
        space: doc.space,
        params: doc.params,
        threshold,
        passed: failures.is_empty(),
        failures: failures.clone(),
        worst_angle: worst,
        report: ReportDoc::new(&report, doc.space, doc.params.m),
    };
    emit(&to_json(&out), output)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("verification failed: {}", failures.join(", "))))
    }
}

pub fn plot(
    config: Option<&Path>,
    n: Option<u64>,
    m: Option<u64>,
    p: Option<f64>,
    q: Option<f64>,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let (params, phi, psi, theta) = match config {
        Some(path) => {
            let doc = read_doc(path)?;
            let (phi, psi) = match validated(&doc)? {
                Config::Structured(cfg) => {
                    // a structured config must also be a finite-energy system
                    to_charge_system(&cfg)?;
                    (doc.phi.clone(), doc.psi.clone())
                }
                Config::Hat(cfg) => {
                    let hat = ConfigDoc::from_hat(&cfg);
                    (hat.phi, hat.psi)
                }
            };
            (doc.params, phi, psi, doc.theta)
        }
        None => {
            let (Some(n), Some(m), Some(p), Some(q)) = (n, m, p, q) else {
                return Err(Failure::Input("plot needs --config or all of --n --m --p --q".into()));
            };
            let params = check_params(n, m, p, q)?;
            let sol = analytic_equilibrium(params.n, params.m, p, q)?;
            let SolvedConfig::Structured(cfg) = sol.config else { unreachable!("structured solve") };
            (params, cfg.phi().to_vec(), cfg.psi().to_vec(), cfg.theta().to_vec())
        }
    };
    emit(&svg::render(&params, &phi, &psi, &theta), output)
}
