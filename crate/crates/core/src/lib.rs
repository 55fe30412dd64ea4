//! Electrostatic equilibria of charged particles confined to the unit circle.
//!
//! Particles carry positive charges and interact through the two-dimensional
//! logarithmic potential. A configuration is an equilibrium when the force on
//! every mobile particle is normal to the circle, i.e. when it is a critical
//! point of the log-energy Hamiltonian
//!
//! ```text
//! H(t) = sum_{j<k} s_j s_k log|e^{i t_j} - e^{i t_k}|
//!      + sum_b sum_a  s_b s_a log|e^{i eta_b} - e^{i t_a}|
//! ```
//!
//! over mobile angles `t` with fixed anchor angles `eta`. `H` is strictly concave
//! on every connected component of its domain, so each component holds exactly
//! one critical point, which is the maximizer.
//!
//! For the interleaved family with `m` charges `p` at the m-th roots of 1,
//! `m` charges `q` at the m-th roots of -1 and `2mn` unit charges, the
//! equilibrium unit charges sit at the unit-circle zeros of
//! `z^{mn} P_n^{(p-1/2, q-1/2)}((z^m + z^{-m}) / 2)`, where `P_n` is a Jacobi
//! polynomial.
//!
//! Modules:
//!
//! * [`special`]: Jacobi polynomials and a symmetric tridiagonal eigensolver.
//! * [`model`]: charge systems and the two interleaved configuration spaces.
//! * [`energy`]: Hamiltonian value, gradient and Hessian.
//! * [`solve`]: analytic equilibria and damped Newton ascent.
//! * [`verify`]: force balance, radial constants, Q-polynomial ODE and Hessian
//!   structure checks.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![forbid(unsafe_code)]
// negated comparisons below are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod energy;
mod error;
pub mod linalg;
mod math;
pub mod model;
pub mod solve;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ChargeSystem, HatConfig, Particle, StructuredConfig};
pub use solve::{EquilibriumSolution, SolveOptions};
pub use special::JacobiSpec;
pub use verify::VerificationReport;

/// Angles closer than this (in radians, modulo 2π) are treated as coincident.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-14;
