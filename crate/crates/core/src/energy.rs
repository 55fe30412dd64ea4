//! Log-energy Hamiltonian of a [`ChargeSystem`], with gradient and Hessian in
//! the mobile angles.
//!
//! Chord lengths are computed as `2|sin((a-b)/2)|` and pair derivatives as
//! `(s s'/2) cot((a-b)/2)` and `(s s'/4) csc²((a-b)/2)`.

use alloc::vec::Vec;

use crate::linalg::DenseMatrix;
use crate::math::{chord_length, circular_gap, ln, sin, tan};
use crate::model::{to_charge_system, ChargeSystem, StructuredConfig};
use crate::{Error, Result, COINCIDENCE_THRESHOLD};

/// Value, gradient and (optionally) Hessian at one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Option<DenseMatrix>,
}

/// `log|e^{ia} - e^{ib}|`, or `-∞` when the angles coincide.
fn log_chord(a: f64, b: f64) -> f64 {
    if circular_gap(a, b) < COINCIDENCE_THRESHOLD {
        f64::NEG_INFINITY
    } else {
        ln(chord_length(a, b))
    }
}

/// `H` over mobile-mobile and fixed-mobile pairs. Fixed-fixed pairs are
/// constant and left out. Returns `-∞` if two particles coincide.
pub fn hamiltonian_value(sys: &ChargeSystem) -> f64 {
    let mobile = sys.mobile();
    let mut total = 0.0;
    for (k, a) in mobile.iter().enumerate() {
        for b in &mobile[..k] {
            total += a.charge * b.charge * log_chord(a.angle, b.angle);
        }
        for b in sys.fixed() {
            total += a.charge * b.charge * log_chord(a.angle, b.angle);
        }
    }
    total
}

/// Value together with the sum of absolute pair contributions, which bounds
/// the rounding error of the value.
pub(crate) fn value_and_magnitude(sys: &ChargeSystem) -> (f64, f64) {
    let mobile = sys.mobile();
    let (mut total, mut magnitude) = (0.0, 0.0);
    for (k, a) in mobile.iter().enumerate() {
        for b in mobile[..k].iter().chain(sys.fixed()) {
            let term = a.charge * b.charge * log_chord(a.angle, b.angle);
            total += term;
            magnitude += term.abs();
        }
    }
    (total, magnitude)
}

fn ensure_separated(sys: &ChargeSystem) -> Result<()> {
    match sys.coincident_pair() {
        Some((first, second)) => Err(Error::Singularity { first, second }),
        None => Ok(()),
    }
}

/// `∂H/∂t_k` for every mobile angle, in mobile order.
pub fn hamiltonian_gradient(sys: &ChargeSystem) -> Result<Vec<f64>> {
    ensure_separated(sys)?;
    let mobile = sys.mobile();
    let gradient = mobile
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let others = mobile.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, b)| b);
            others
                .chain(sys.fixed())
                .map(|b| 0.5 * a.charge * b.charge / tan(0.5 * (a.angle - b.angle)))
                .sum()
        })
        .collect();
    Ok(gradient)
}

fn csc_squared(x: f64) -> f64 {
    let s = sin(x);
    1.0 / (s * s)
}

/// Exact Hessian of `H` in the mobile angles.
///
/// Off-diagonal entries are `(s_j s_k/4) csc²((t_k - t_j)/2) > 0`; each
/// diagonal entry is minus the sum of its row's off-diagonal entries minus the
/// fixed-charge terms `(s_b s_k/4) csc²((t_k - η_b)/2)`, summed in index order.
pub fn hamiltonian_hessian(sys: &ChargeSystem) -> Result<DenseMatrix> {
    ensure_separated(sys)?;
    let mobile = sys.mobile();
    let dim = mobile.len();
    let mut h = DenseMatrix::zeros(dim);
    for k in 0..dim {
        for j in 0..k {
            let (a, b) = (mobile[k], mobile[j]);
            let v = 0.25 * a.charge * b.charge * csc_squared(0.5 * (a.angle - b.angle));
            h[(k, j)] = v;
            h[(j, k)] = v;
        }
    }
    for k in 0..dim {
        let a = mobile[k];
        let mut diag = 0.0;
        for j in (0..dim).filter(|&j| j != k) {
            diag -= h[(k, j)];
        }
        diag -= fixed_curvature(sys, a.angle, a.charge);
        h[(k, k)] = diag;
    }
    Ok(h)
}

/// `Σ_b (s_b s/4) csc²((t - η_b)/2)`, the fixed-charge part of a Hessian
/// diagonal entry.
pub fn fixed_curvature(sys: &ChargeSystem, angle: f64, charge: f64) -> f64 {
    sys.fixed()
        .iter()
        .map(|b| 0.25 * charge * b.charge * csc_squared(0.5 * (angle - b.angle)))
        .sum()
}

/// Value, gradient and optionally Hessian in one call.
pub fn energy_report(sys: &ChargeSystem, with_hessian: bool) -> Result<EnergyReport> {
    let gradient = hamiltonian_gradient(sys)?;
    let hessian = if with_hessian { Some(hamiltonian_hessian(sys)?) } else { None };
    Ok(EnergyReport { value: hamiltonian_value(sys), gradient, hessian })
}

/// The interleaved-space Hamiltonian written out term by term:
///
/// ```text
/// p  Σ_j Σ_k log|φ_j - θ_k|  + q Σ_j Σ_k log|ψ_j - θ_k| + Σ_{k<j} log|θ_j - θ_k|
/// p² Σ_{k<j} log|φ_j - φ_k| + q² Σ_{k<j} log|ψ_j - ψ_k| + pq Σ_{k,j} log|φ_j - ψ_k|
/// ```
///
/// With a single fixed charge there are no fixed-fixed pairs, so this agrees
/// with [`hamiltonian_value`] of [`to_charge_system`] exactly in exact arithmetic.
pub fn structured_hamiltonian(cfg: &StructuredConfig) -> Result<f64> {
    cfg.validate()?;
    let (p, q) = (cfg.p(), cfg.q());
    let (phi, psi, theta) = (cfg.phi(), cfg.psi(), cfg.theta());
    let cross = |xs: &[f64], ys: &[f64]| -> f64 {
        xs.iter().map(|&x| ys.iter().map(|&y| log_chord(x, y)).sum::<f64>()).sum()
    };
    let within = |xs: &[f64]| -> f64 {
        xs.iter()
            .enumerate()
            .map(|(j, &x)| xs[..j].iter().map(|&y| log_chord(x, y)).sum::<f64>())
            .sum()
    };
    Ok(p * cross(phi, theta)
        + q * cross(psi, theta)
        + within(theta)
        + p * p * within(phi)
        + q * q * within(psi)
        + p * q * cross(phi, psi))
}

/// [`hamiltonian_value`] routed through the general system.
pub fn structured_hamiltonian_via_system(cfg: &StructuredConfig) -> Result<f64> {
    Ok(hamiltonian_value(&to_charge_system(cfg)?))
}
