//! Independent checks of an equilibrium.
//!
//! * Force balance: the force `Σ 2 s s' / (conj(b) - conj(a))` on every particle
//!   must be normal to the circle.
//! * Critical-point identity: for every mobile `t_k`,
//!   `Σ_j s_j s_k / (e^{it_k} - e^{it_j}) = e^{-it_k} s_k · (half the other charges)`,
//!   which holds exactly when `∂H/∂t_k = 0`.
//! * Radial constants of the `p` and `q` charges in the interleaved family.
//! * The second-order ODE satisfied by `Q_{nm}`.
//! * Diagonal dominance of `-∇²H`, with row gaps equal to the fixed-charge terms.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::energy::{fixed_curvature, hamiltonian_gradient, hamiltonian_hessian};
use crate::linalg::Cholesky;
use crate::math::{cos, sin};
use crate::model::{to_charge_system, ChargeSystem, HatConfig, StructuredConfig};
use crate::solve::{sup_norm, EquilibriumSolution, SolvedConfig};
use crate::special::{recurrence_with_derivatives, JacobiSpec};
use crate::{Error, Result};

/// `e^{ia} - e^{ib} = e^{i(a+b)/2} · 2i sin((a-b)/2)`.
fn chord(a: f64, b: f64) -> Complex64 {
    let mid = 0.5 * (a + b);
    let s = 2.0 * sin(0.5 * (a - b));
    Complex64::new(-s * sin(mid), s * cos(mid))
}

fn unit(t: f64) -> Complex64 {
    Complex64::new(cos(t), sin(t))
}

fn ensure_separated(sys: &ChargeSystem) -> Result<()> {
    match sys.coincident_pair() {
        Some((first, second)) => Err(Error::Singularity { first, second }),
        None => Ok(()),
    }
}

/// Force on one particle plus the sum of the magnitudes of its contributions.
fn force_and_scale(sys: &ChargeSystem, index: usize) -> (Complex64, f64) {
    let target = sys.particle(index);
    let mut force = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for other in (0..sys.len()).filter(|&j| j != index).map(|j| sys.particle(j)) {
        let term = 2.0 * target.charge * other.charge / chord(target.angle, other.angle).conj();
        force += term;
        scale += term.norm();
    }
    (force, scale)
}

/// Total complex force on particle `index` (global numbering: mobile first,
/// then fixed).
pub fn force_on_particle(sys: &ChargeSystem, index: usize) -> Result<Complex64> {
    ensure_separated(sys)?;
    if index >= sys.len() {
        return Err(Error::Parameter(format!("particle {index} does not exist")));
    }
    Ok(force_and_scale(sys, index).0)
}

/// Per-particle force and critical-point residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleResidual {
    /// Global particle index.
    pub index: usize,
    /// Outward normal component of the force.
    pub radial_coefficient: f64,
    /// Tangential component of the force.
    pub tangential_residual: f64,
    /// `|tangential|` over the summed magnitude of the pair forces.
    pub tangential_relative: f64,
    /// `|left - right|` of the critical-point identity; `None` for fixed particles.
    pub identity_residual: Option<f64>,
    /// The same, over the summed magnitude of the terms on both sides.
    pub identity_relative: Option<f64>,
}

/// Radial constants of the `p` charges (`C`) and `q` charges (`C'`).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialConstants {
    /// Mean numerically extracted constant over the `p` charges.
    pub c: f64,
    /// Mean numerically extracted constant over the `q` charges.
    pub c_prime: f64,
    /// `2pnm + pqm + p²(m-1)`.
    pub c_closed: f64,
    /// `2qnm + pqm + q²(m-1)`.
    pub c_prime_closed: f64,
    /// Largest `|C_k - closed| / closed` over all `p` and `q` charges, where
    /// `C_k` is complex; its imaginary part is the non-radial defect.
    pub max_deviation: f64,
    pub c_deviation: f64,
    pub c_prime_deviation: f64,
    /// Largest relative spread of the real parts among charges of one kind.
    pub spread: f64,
    /// Largest mismatch between the summed other charges at a `p` or `q`
    /// particle and `2mn + mq + (m-1)p` or `2mn + mp + (m-1)q`.
    pub charge_sum_deviation: f64,
}

/// Everything the checks report. Partial reports leave unrelated fields
/// empty (`Vec::new()` or `None`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub gradient_supnorm: f64,
    /// One entry per mobile particle, in mobile order.
    pub per_particle: Vec<ParticleResidual>,
    /// Forces on the fixed particles, in fixed order.
    pub fixed_particles: Vec<ParticleResidual>,
    /// Largest mismatch between the half-sum of the other charges summed
    /// directly and `(total - own) / 2`.
    pub charge_sum_deviation: f64,
    /// `|diag| - Σ|offdiag|` for each row of `-∇²H`.
    pub diag_dominance_margins: Vec<f64>,
    /// `Σ_b (s_b s_k/4) csc²((t_k - η_b)/2)` for each row.
    pub fixed_curvature: Vec<f64>,
    /// Whether `-∇²H` admits a Cholesky factorization.
    pub negated_hessian_factorizes: Option<bool>,
    pub constants: Option<RadialConstants>,
    /// Largest relative residual of the `Q_{nm}` ODE at the unit charges.
    pub q_ode_max_residual: Option<f64>,
}

impl VerificationReport {
    pub fn max_tangential_relative(&self) -> f64 {
        self.per_particle
            .iter()
            .chain(&self.fixed_particles)
            .fold(0.0, |acc, r| acc.max(r.tangential_relative))
    }

    pub fn max_identity_relative(&self) -> f64 {
        self.per_particle.iter().filter_map(|r| r.identity_relative).fold(0.0, f64::max)
    }

    pub fn max_identity_residual(&self) -> f64 {
        self.per_particle.iter().filter_map(|r| r.identity_residual).fold(0.0, f64::max)
    }

    pub fn min_margin(&self) -> Option<f64> {
        self.diag_dominance_margins.iter().copied().reduce(f64::min)
    }

    /// Largest `|margin - fixed term| / fixed term` over the rows.
    pub fn max_margin_error(&self) -> f64 {
        self.diag_dominance_margins
            .iter()
            .zip(&self.fixed_curvature)
            .map(|(m, f)| (m - f).abs() / f.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    /// Index of the mobile particle with the largest tangential force.
    pub fn worst_particle(&self) -> Option<usize> {
        self.per_particle
            .iter()
            .max_by(|a, b| a.tangential_relative.total_cmp(&b.tangential_relative))
            .map(|r| r.index)
    }

    fn merge(mut self, other: VerificationReport) -> Self {
        self.diag_dominance_margins = other.diag_dominance_margins;
        self.fixed_curvature = other.fixed_curvature;
        self.negated_hessian_factorizes = other.negated_hessian_factorizes;
        self
    }
}

fn force_residual(sys: &ChargeSystem, index: usize) -> ParticleResidual {
    let (force, scale) = force_and_scale(sys, index);
    let local = force * unit(sys.particle(index).angle).conj();
    ParticleResidual {
        index,
        radial_coefficient: local.re,
        tangential_residual: local.im,
        tangential_relative: local.im.abs() / scale.max(f64::MIN_POSITIVE),
        identity_residual: None,
        identity_relative: None,
    }
}

/// Force balance and the critical-point identity at every mobile particle.
pub fn critical_point_residual(sys: &ChargeSystem) -> Result<VerificationReport> {
    ensure_separated(sys)?;
    let gradient = hamiltonian_gradient(sys)?;
    let total = sys.total_charge();
    let mobile_count = sys.mobile_count();
    let mut charge_sum_deviation = 0.0f64;
    let mut per_particle = Vec::with_capacity(mobile_count);

    for k in 0..mobile_count {
        let target = sys.particle(k);
        let mut left = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        let mut half_sum = 0.0;
        for other in (0..sys.len()).filter(|&j| j != k).map(|j| sys.particle(j)) {
            let term = target.charge * other.charge / chord(target.angle, other.angle);
            left += term;
            scale += term.norm();
            half_sum += 0.5 * other.charge;
        }
        charge_sum_deviation = charge_sum_deviation.max((half_sum - 0.5 * (total - target.charge)).abs());
        let right = unit(target.angle).conj() * (target.charge * half_sum);
        let residual = (left - right).norm();

        let mut entry = force_residual(sys, k);
        entry.identity_residual = Some(residual);
        entry.identity_relative = Some(residual / (scale + right.norm()));
        per_particle.push(entry);
    }
    let fixed_particles = (mobile_count..sys.len()).map(|b| force_residual(sys, b)).collect();

    Ok(VerificationReport {
        gradient_supnorm: sup_norm(&gradient),
        per_particle,
        fixed_particles,
        charge_sum_deviation,
        ..VerificationReport::default()
    })
}

/// Row gaps of diagonal dominance of `-∇²H` next to the fixed-charge terms
/// they should equal, plus a Cholesky test of `-∇²H`.
pub fn hessian_structure_report(sys: &ChargeSystem) -> Result<VerificationReport> {
    let hessian = hamiltonian_hessian(sys)?;
    let negated = hessian.negated();
    let dim = hessian.dim();
    let mut margins = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut off = 0.0;
        for j in (0..dim).filter(|&j| j != k) {
            off += negated[(k, j)].abs();
        }
        margins.push(negated[(k, k)].abs() - off);
    }
    let curvature = sys.mobile().iter().map(|a| fixed_curvature(sys, a.angle, a.charge)).collect();
    Ok(VerificationReport {
        diag_dominance_margins: margins,
        fixed_curvature: curvature,
        negated_hessian_factorizes: Some(Cholesky::factor(&negated).is_ok()),
        ..VerificationReport::default()
    })
}

/// Force balance, critical-point identity and Hessian structure.
pub fn system_report(sys: &ChargeSystem) -> Result<VerificationReport> {
    Ok(critical_point_residual(sys)?.merge(hessian_structure_report(sys)?))
}

/// Full report for a structured configuration, including radial constants
/// and the `Q_{nm}` ODE at the unit charges.
pub fn verify_structured(cfg: &StructuredConfig) -> Result<VerificationReport> {
    let sys = to_charge_system(cfg)?;
    let mut report = system_report(&sys)?;
    report.constants = Some(radial_constants_of(cfg)?);
    report.q_ode_max_residual = Some(q_ode_max_at(cfg.n(), cfg.m(), cfg.p(), cfg.q(), cfg.theta())?);
    Ok(report)
}

/// Full report for the fixed-charge slice.
pub fn verify_hat(cfg: &HatConfig) -> Result<VerificationReport> {
    let sys = crate::model::hat_charge_system(cfg)?;
    let mut report = system_report(&sys)?;
    report.q_ode_max_residual = Some(q_ode_max_at(cfg.n(), cfg.m(), cfg.p(), cfg.q(), cfg.theta())?);
    Ok(report)
}

fn q_ode_max_at(n: usize, m: usize, p: f64, q: f64, theta: &[f64]) -> Result<f64> {
    let spec = JacobiSpec::from_charges(n, p, q)?;
    let mut worst = 0.0f64;
    for &t in theta {
        worst = worst.max(q_ode_relative_residual(n, m, spec.alpha(), spec.beta(), unit(t))?);
    }
    Ok(worst)
}

/// Radial constants at a structured equilibrium with parameters `(n, m, p, q)`.
pub fn radial_constants(n: usize, m: usize, p: f64, q: f64, solution: &EquilibriumSolution) -> Result<RadialConstants> {
    let SolvedConfig::Structured(cfg) = &solution.config else {
        return Err(Error::Parameter("radial constants need a structured configuration".into()));
    };
    if (cfg.n(), cfg.m(), cfg.p(), cfg.q()) != (n, m, p, q) {
        return Err(Error::Parameter("solution parameters do not match (n, m, p, q)".into()));
    }
    radial_constants_of(cfg)
}

fn radial_constants_of(cfg: &StructuredConfig) -> Result<RadialConstants> {
    cfg.validate()?;
    let (n, m, p, q) = (cfg.n() as f64, cfg.m() as f64, cfg.p(), cfg.q());
    let c_closed = 2.0 * p * n * m + p * q * m + p * p * (m - 1.0);
    let c_prime_closed = 2.0 * q * n * m + p * q * m + q * q * (m - 1.0);

    // e^{iφ_k} Σ 2 s_k s_j / (e^{iφ_k} - e^{i t_j}) over every other particle
    let constant = |own: &[f64], own_charge: f64, other: &[f64], other_charge: f64, k: usize| {
        let at = own[k];
        let mut sum = Complex64::new(0.0, 0.0);
        for &t in cfg.theta() {
            sum += 2.0 * own_charge / chord(at, t);
        }
        for &t in other {
            sum += 2.0 * own_charge * other_charge / chord(at, t);
        }
        for (j, &t) in own.iter().enumerate().filter(|&(j, _)| j != k) {
            let _ = j;
            sum += 2.0 * own_charge * own_charge / chord(at, t);
        }
        sum * unit(at)
    };
    let c_values: Vec<Complex64> = (0..cfg.m()).map(|k| constant(cfg.phi(), p, cfg.psi(), q, k)).collect();
    let c_prime_values: Vec<Complex64> = (0..cfg.m()).map(|k| constant(cfg.psi(), q, cfg.phi(), p, k)).collect();

    let deviation = |values: &[Complex64], closed: f64| {
        values.iter().map(|v| (v - closed).norm() / closed).fold(0.0, f64::max)
    };
    let spread = |values: &[Complex64], closed: f64| {
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v.re), hi.max(v.re)));
        (hi - lo) / closed
    };
    let mean = |values: &[Complex64]| values.iter().map(|v| v.re).sum::<f64>() / values.len() as f64;
    let c_deviation = deviation(&c_values, c_closed);
    let c_prime_deviation = deviation(&c_prime_values, c_prime_closed);

    let sys = to_charge_system(cfg)?;
    let total = sys.total_charge();
    let others_at_phi = 2.0 * n * m + m * q + (m - 1.0) * p;
    let others_at_psi = 2.0 * n * m + m * p + (m - 1.0) * q;
    let charge_sum_deviation = ((total - p) - others_at_phi).abs().max(((total - q) - others_at_psi).abs());

    Ok(RadialConstants {
        c: mean(&c_values),
        c_prime: mean(&c_prime_values),
        c_closed,
        c_prime_closed,
        max_deviation: c_deviation.max(c_prime_deviation),
        c_deviation,
        c_prime_deviation,
        spread: spread(&c_values, c_closed).max(spread(&c_prime_values, c_prime_closed)),
        charge_sum_deviation,
    })
}

/// The three terms `y''`, `c₁(z) y'` and `(m z^{m-1})² T(z^m) y` of the ODE
/// satisfied by `y = Q_{nm}(z) = z^{mn} P_n^{(α,β)}((z^m + z^{-m})/2)`, where
/// `c₁ = m z^{m-1}((2α+1)/(z^m-1) - (α+β+2n)/z^m + (2β+1)/(z^m+1)) - (m-1)/z`
/// and `T(u) = -n[(α+β+1)/u² - (2(β-α)u - (α+β+1)(u²+1))/(u²(u²-1))]`.
pub fn q_ode_terms(n: usize, m: usize, alpha: f64, beta: f64, z: Complex64) -> Result<[Complex64; 3]> {
    let spec = JacobiSpec::new(n, alpha, beta)?;
    if m == 0 {
        return Err(Error::Parameter("m must be ≥ 1".into()));
    }
    let pole_tol = 1e-12;
    if z.norm() < pole_tol {
        return Err(Error::Domain("z = 0 is a pole".into()));
    }
    let mi = m as i32;
    let zm = z.powi(mi);
    if (zm - 1.0).norm() < pole_tol || (zm + 1.0).norm() < pole_tol {
        return Err(Error::Domain(format!("z = {z} is a 2m-th root of unity")));
    }
    let (nf, mf) = (n as f64, m as f64);
    let (a, b) = (spec.alpha(), spec.beta());

    let w = (zm + zm.inv()) * 0.5;
    let v = (zm - zm.inv()) * 0.5;
    let [pn, dpn, d2pn] = recurrence_with_derivatives(n, a, b, w);
    let nm = (n * m) as i32;
    let z_nm = z.powi(nm);
    let z_nm1 = z.powi(nm - 1);
    let z_nm2 = z.powi(nm - 2);
    let nmf = nf * mf;

    let y = z_nm * pn;
    let dy = z_nm1 * pn * nmf + z_nm1 * v * dpn * mf;
    let d2y = z_nm2 * pn * (nmf * (nmf - 1.0))
        + z_nm2 * v * dpn * (2.0 * nf * mf * mf - mf)
        + z_nm2 * w * dpn * (mf * mf)
        + z_nm2 * v * v * d2pn * (mf * mf);

    let zm1 = z.powi(mi - 1);
    let c1 = zm1 * mf * ((zm - 1.0).inv() * (2.0 * a + 1.0) - zm.inv() * (a + b + 2.0 * nf) + (zm + 1.0).inv() * (2.0 * b + 1.0))
        - z.inv() * (mf - 1.0);
    let u = zm;
    let u2 = u * u;
    let t = -((u2.inv() * (a + b + 1.0)) - (u * (2.0 * (b - a)) - (u2 + 1.0) * (a + b + 1.0)) / (u2 * (u2 - 1.0))) * nf;
    let c0 = zm1 * zm1 * (mf * mf) * t;

    Ok([d2y, c1 * dy, c0 * y])
}

/// Residual of the `Q_{nm}` ODE at `z`.
pub fn q_ode_residual(n: usize, m: usize, alpha: f64, beta: f64, z: Complex64) -> Result<Complex64> {
    let [a, b, c] = q_ode_terms(n, m, alpha, beta, z)?;
    Ok(a + b + c)
}

/// `|residual| / (|y''| + |c₁ y'| + |c₀ y|)`.
pub fn q_ode_relative_residual(n: usize, m: usize, alpha: f64, beta: f64, z: Complex64) -> Result<f64> {
    let terms = q_ode_terms(n, m, alpha, beta, z)?;
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    let residual = (terms[0] + terms[1] + terms[2]).norm();
    Ok(if scale == 0.0 { 0.0 } else { residual / scale })
}
