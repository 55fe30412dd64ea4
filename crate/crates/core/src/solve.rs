//! Analytic equilibria and numerical maximization.
//!
//! The analytic route reads the unit-charge angles off the Jacobi zeros: on
//! `|z| = 1`, `(z^m + z^{-m})/2 = cos(mθ)`, so the unit-circle zeros of
//! `z^{mn} P_n^{(p-1/2, q-1/2)}((z^m + z^{-m})/2)` are the `2mn` angles with
//! `cos(mθ) = x_k` for the `n` Jacobi zeros `x_k`.
//!
//! The numeric route is damped Newton ascent on the concave Hamiltonian. Since
//! `H → -∞` at the boundary of its domain, backtracking until `H` increases
//! keeps every iterate inside the starting component.

use alloc::format;
use alloc::vec::Vec;

use crate::energy::{hamiltonian_gradient, hamiltonian_hessian, hamiltonian_value, value_and_magnitude};
use crate::linalg::Cholesky;
use crate::math::{acos, circular_gap, cos, PI, TAU};
use crate::model::{hat_charge_system, to_charge_system, ChargeSystem, HatConfig, StructuredConfig};
use crate::special::{jacobi_eval, jacobi_zeros, JacobiSpec};
use crate::{Error, Result};

/// Where to start the Newton iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    /// Charges at the roots of ±1, unit charges evenly spread in each arc.
    Midpoint,
    Structured(StructuredConfig),
    Hat(HatConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Stop once the gradient sup-norm is at most this.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    /// Step shrink factor during backtracking, in `(0, 1)`.
    pub backtrack_factor: f64,
    /// Halvings allowed per Newton step before giving up.
    pub max_backtracks: usize,
    pub initial: InitialGuess,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            gradient_tolerance: 1e-11,
            max_iterations: 200,
            backtrack_factor: 0.5,
            max_backtracks: 60,
            initial: InitialGuess::Midpoint,
        }
    }
}

impl SolveOptions {
    fn check(&self) -> Result<()> {
        if !(self.gradient_tolerance > 0.0) {
            return Err(Error::Parameter(format!(
                "gradient tolerance must be > 0, got {}",
                self.gradient_tolerance
            )));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::Parameter(format!(
                "backtrack factor must lie in (0, 1), got {}",
                self.backtrack_factor
            )));
        }
        Ok(())
    }
}

/// Which component to maximize over.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// The interleaved space with mobile `p` and `q` charges.
    Structured { n: usize, m: usize, p: f64, q: f64 },
    /// The slice with `p` and `q` charges pinned at the roots of ±1.
    Hat { n: usize, m: usize, p: f64, q: f64 },
    /// The component of an arbitrary system containing its current positions.
    /// Use [`ChargeSystem::freeze`] to pin some of its mobile particles.
    Custom(ChargeSystem),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolvedConfig {
    Structured(StructuredConfig),
    Hat(HatConfig),
    Custom(ChargeSystem),
}

impl SolvedConfig {
    pub fn charge_system(&self) -> Result<ChargeSystem> {
        match self {
            SolvedConfig::Structured(cfg) => to_charge_system(cfg),
            SolvedConfig::Hat(cfg) => hat_charge_system(cfg),
            SolvedConfig::Custom(sys) => Ok(sys.clone()),
        }
    }

    /// The optimized angles: free structured angles, hat `theta`, or the
    /// custom system's mobile angles.
    pub fn free_angles(&self) -> Vec<f64> {
        match self {
            SolvedConfig::Structured(cfg) => cfg.free_angles(),
            SolvedConfig::Hat(cfg) => cfg.theta().to_vec(),
            SolvedConfig::Custom(sys) => sys.mobile_angles(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Numeric,
}

/// One accepted Newton step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// `H` after the step.
    pub value: f64,
    /// Gradient sup-norm after the step.
    pub gradient_norm: f64,
    /// Fraction of the full Newton step taken.
    pub step_scale: f64,
    /// `false` when `H` did not rise measurably and the step was accepted
    /// because the gradient shrank while `H` stayed within rounding noise.
    pub strict_increase: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSolution {
    pub config: SolvedConfig,
    pub method: Method,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub converged: bool,
    /// Zeros of `P_n^{(p-1/2, q-1/2)}` for analytic solutions; empty otherwise.
    pub jacobi_zeros: Vec<f64>,
    pub trace: Vec<StepRecord>,
}

fn check_parameters(n: usize, m: usize, p: f64, q: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::Parameter("n must be ≥ 1".into()));
    }
    if m == 0 {
        return Err(Error::Parameter("m must be ≥ 1".into()));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::Parameter(format!("p must be > 0, got {p}")));
    }
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::Parameter(format!("q must be > 0, got {q}")));
    }
    Ok(())
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest circular distance between matching angles; `∞` on length mismatch.
pub fn angle_sup_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).fold(0.0, |acc, (&x, &y)| acc.max(circular_gap(x, y)))
}

/// The `2mn` solutions of `cos(mθ) = x_k` in `[0, 2π)`, ascending.
pub fn theta_from_zeros(zeros: &[f64], m: usize) -> Vec<f64> {
    let mf = m as f64;
    let mut theta = Vec::with_capacity(2 * m * zeros.len());
    for j in 0..m {
        let base = TAU * j as f64;
        for &x in zeros {
            let a = acos(x);
            theta.push((base + a) / mf);
            theta.push((base + TAU - a) / mf);
        }
    }
    theta.sort_by(f64::total_cmp);
    theta
}

fn analytic_parts(n: usize, m: usize, p: f64, q: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_parameters(n, m, p, q)?;
    let zeros = jacobi_zeros(JacobiSpec::from_charges(n, p, q)?)?;
    let theta = theta_from_zeros(&zeros, m);
    Ok((zeros, theta))
}

/// The maximizer of the interleaved-space Hamiltonian: `p` charges at the
/// m-th roots of 1, `q` charges at the m-th roots of -1, unit charges at the
/// unit-circle zeros of `z^{mn} P_n^{(p-1/2, q-1/2)}((z^m + z^{-m})/2)`.
pub fn analytic_equilibrium(n: usize, m: usize, p: f64, q: f64) -> Result<EquilibriumSolution> {
    let (zeros, theta) = analytic_parts(n, m, p, q)?;
    let (phi, psi) = crate::model::roots_of_plus_minus_one(m);
    let cfg = StructuredConfig::new(m, n, p, q, phi, psi, theta);
    let gradient = hamiltonian_gradient(&to_charge_system(&cfg)?)?;
    Ok(EquilibriumSolution {
        config: SolvedConfig::Structured(cfg),
        method: Method::Analytic,
        iterations: 0,
        final_gradient_norm: sup_norm(&gradient),
        converged: true,
        jacobi_zeros: zeros,
        trace: Vec::new(),
    })
}

/// The maximizer over the slice with pinned `p` and `q` charges.
pub fn hat_analytic_equilibrium(n: usize, m: usize, p: f64, q: f64) -> Result<EquilibriumSolution> {
    let (zeros, theta) = analytic_parts(n, m, p, q)?;
    let cfg = HatConfig::new(m, n, p, q, theta);
    let gradient = hamiltonian_gradient(&hat_charge_system(&cfg)?)?;
    Ok(EquilibriumSolution {
        config: SolvedConfig::Hat(cfg),
        method: Method::Analytic,
        iterations: 0,
        final_gradient_norm: sup_norm(&gradient),
        converged: true,
        jacobi_zeros: zeros,
        trace: Vec::new(),
    })
}

/// `|Q_{nm}(e^{iθ})| = |P_n^{(α,β)}(cos mθ)|`; the factor `e^{imnθ}` has modulus 1.
pub fn q_polynomial_modulus(n: usize, m: usize, alpha: f64, beta: f64, theta: f64) -> Result<f64> {
    let spec = JacobiSpec::new(n, alpha, beta)?;
    Ok(jacobi_eval(spec, cos(m as f64 * theta)).0.abs())
}

/// Maps free angles to a charge system, rejecting points outside the component.
enum Problem {
    Structured(StructuredConfig),
    Hat(HatConfig),
    Custom { base: ChargeSystem, order: Vec<usize> },
}

impl Problem {
    fn system(&self, angles: &[f64]) -> Option<ChargeSystem> {
        match self {
            Problem::Structured(base) => to_charge_system(&base.with_free_angles(angles)).ok(),
            Problem::Hat(base) => hat_charge_system(&base.with_theta(angles)).ok(),
            Problem::Custom { base, order } => {
                let sys = base.with_mobile_angles(angles).ok()?;
                (sys.cyclic_order() == *order).then_some(sys)
            }
        }
    }

    fn config(&self, angles: &[f64]) -> SolvedConfig {
        match self {
            Problem::Structured(base) => SolvedConfig::Structured(base.with_free_angles(angles)),
            Problem::Hat(base) => SolvedConfig::Hat(base.with_theta(angles)),
            Problem::Custom { base, .. } => SolvedConfig::Custom(
                base.with_mobile_angles(angles).expect("accepted iterates are separated"),
            ),
        }
    }
}

fn setup(domain: &Domain, initial: &InitialGuess) -> Result<(Problem, Vec<f64>)> {
    let mismatch = |what: &str| Error::Parameter(format!("initial guess is not a {what} configuration"));
    match domain {
        Domain::Structured { n, m, p, q } => {
            let (n, m, p, q) = (*n, *m, *p, *q);
            check_parameters(n, m, p, q)?;
            let cfg = match initial {
                InitialGuess::Midpoint => StructuredConfig::midpoint(n, m, p, q),
                InitialGuess::Structured(cfg) => cfg.clone(),
                InitialGuess::Hat(_) => return Err(mismatch("structured")),
            };
            if (cfg.n(), cfg.m(), cfg.p(), cfg.q()) != (n, m, p, q) {
                return Err(Error::Parameter("initial guess parameters do not match the domain".into()));
            }
            cfg.validate()?;
            let angles = cfg.free_angles();
            Ok((Problem::Structured(cfg), angles))
        }
        Domain::Hat { n, m, p, q } => {
            let (n, m, p, q) = (*n, *m, *p, *q);
            check_parameters(n, m, p, q)?;
            let cfg = match initial {
                InitialGuess::Midpoint => HatConfig::midpoint(n, m, p, q),
                InitialGuess::Hat(cfg) => cfg.clone(),
                InitialGuess::Structured(_) => return Err(mismatch("hat")),
            };
            if (cfg.n(), cfg.m(), cfg.p(), cfg.q()) != (n, m, p, q) {
                return Err(Error::Parameter("initial guess parameters do not match the domain".into()));
            }
            cfg.validate()?;
            let angles = cfg.theta().to_vec();
            Ok((Problem::Hat(cfg), angles))
        }
        Domain::Custom(sys) => {
            if sys.fixed_count() == 0 {
                return Err(Error::Parameter("custom systems need at least one fixed particle".into()));
            }
            let order = sys.cyclic_order();
            Ok((Problem::Custom { base: sys.clone(), order }, sys.mobile_angles()))
        }
    }
}

/// Damped Newton ascent from `opts.initial` (custom domains start from the
/// system's own positions).
///
/// Each step solves `(-∇²H) d = ∇H` by Cholesky and backtracks until the
/// trial point is feasible and `H` increases. Near the optimum the increase
/// drops below the rounding error of `H`; there a feasible step is also taken
/// when `H` stays within that error and the gradient shrinks. Running out of
/// iterations, or of backtracks, returns the last iterate with
/// `converged = false`.
pub fn maximize(domain: &Domain, opts: &SolveOptions) -> Result<EquilibriumSolution> {
    opts.check()?;
    let (problem, mut angles) = setup(domain, &opts.initial)?;
    let mut sys = problem
        .system(&angles)
        .ok_or_else(|| Error::Domain("initial point is not strictly inside the component".into()))?;
    let mut gradient = hamiltonian_gradient(&sys)?;
    let mut gradient_norm = sup_norm(&gradient);
    let (mut value, mut magnitude) = value_and_magnitude(&sys);
    let mut trace = Vec::new();
    let mut converged = gradient_norm <= opts.gradient_tolerance;

    while !converged && trace.len() < opts.max_iterations {
        let negated = hamiltonian_hessian(&sys)?.negated();
        let direction = Cholesky::factor(&negated)?.solve(&gradient);
        let noise = 8.0 * f64::EPSILON * magnitude.max(1.0);

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let trial: Vec<f64> = angles.iter().zip(&direction).map(|(x, d)| x + scale * d).collect();
            if let Some(trial_sys) = problem.system(&trial) {
                let (trial_value, trial_magnitude) = value_and_magnitude(&trial_sys);
                if trial_value > value {
                    accepted = Some((trial, trial_sys, trial_value, trial_magnitude, true));
                    break;
                }
                if trial_value >= value - noise {
                    let trial_gradient = hamiltonian_gradient(&trial_sys)?;
                    if sup_norm(&trial_gradient) < gradient_norm {
                        accepted = Some((trial, trial_sys, trial_value, trial_magnitude, false));
                        break;
                    }
                }
            }
            scale *= opts.backtrack_factor;
        }
        let Some((trial, trial_sys, trial_value, trial_magnitude, strict)) = accepted else {
            break;
        };
        angles = trial;
        sys = trial_sys;
        value = trial_value;
        magnitude = trial_magnitude;
        gradient = hamiltonian_gradient(&sys)?;
        gradient_norm = sup_norm(&gradient);
        trace.push(StepRecord { value, gradient_norm, step_scale: scale, strict_increase: strict });
        converged = gradient_norm <= opts.gradient_tolerance;
    }

    Ok(EquilibriumSolution {
        config: problem.config(&angles),
        method: Method::Numeric,
        iterations: trace.len(),
        final_gradient_norm: gradient_norm,
        converged,
        jacobi_zeros: Vec::new(),
        trace,
    })
}

/// `H` at a solved configuration.
pub fn solution_value(solution: &EquilibriumSolution) -> Result<f64> {
    Ok(hamiltonian_value(&solution.config.charge_system()?))
}

/// Arc index `k` such that `kπ/m < θ < (k+1)π/m`, if `θ` is not an endpoint.
pub fn arc_of(theta: f64, m: usize) -> Option<usize> {
    let scaled = theta * m as f64 / PI;
    let k = libm::floor(scaled);
    (scaled > k && k >= 0.0 && (k as usize) < 2 * m).then_some(k as usize)
}
