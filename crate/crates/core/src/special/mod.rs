//! Jacobi polynomials `P_n^{(α,β)}` and their zeros.
//!
//! Normalization is the classical one, `P_n(1) = binom(n+α, n)`. Values come
//! from the forward three-term recurrence in the degree; derivatives use
//! `d/dx P_n^{(α,β)} = (n+α+β+1)/2 · P_{n-1}^{(α+1,β+1)}`. Zeros are the
//! eigenvalues of the symmetric Jacobi matrix of the monic recurrence,
//! polished with Newton steps.

mod tridiag;

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use crate::math::sqrt;
use crate::{Error, Result};

pub use tridiag::{sym_tridiag_eigenvalues, SymTridiag};

/// Degree and parameters of a Jacobi polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiSpec {
    n: usize,
    alpha: f64,
    beta: f64,
}

impl JacobiSpec {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > -1.0) {
            return Err(Error::Parameter(format!("alpha must be > -1, got {alpha}")));
        }
        if !(beta.is_finite() && beta > -1.0) {
            return Err(Error::Parameter(format!("beta must be > -1, got {beta}")));
        }
        Ok(Self { n, alpha, beta })
    }

    /// Parameters attached to charges `p` at `x = 1` and `q` at `x = -1`:
    /// `α = p - 1/2`, `β = q - 1/2`.
    pub fn from_charges(n: usize, p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Parameter(format!("p must be > 0, got {p}")));
        }
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::Parameter(format!("q must be > 0, got {q}")));
        }
        Self::new(n, p - 0.5, q - 0.5)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// `P_n^{(a,b)}(x)` by forward recurrence, generic so the same code serves
/// real and complex arguments.
pub(crate) fn recurrence<T>(n: usize, a: f64, b: f64, x: T) -> T
where
    T: Copy + From<f64> + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Mul<f64, Output = T>,
{
    if n == 0 {
        return T::from(1.0);
    }
    let mut prev = T::from(1.0);
    let mut curr = x * (0.5 * (a + b + 2.0)) + T::from(0.5 * (a - b));
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let c1 = 2.0 * k * (k + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * s * (s - 2.0);
        let c3 = (s - 1.0) * (a * a - b * b);
        let c4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        let next = ((x * c2 + T::from(c3)) * curr - prev * c4) * (1.0 / c1);
        prev = curr;
        curr = next;
    }
    curr
}

/// Value, first and second derivative of `P_n^{(a,b)}` at `x`.
pub(crate) fn recurrence_with_derivatives<T>(n: usize, a: f64, b: f64, x: T) -> [T; 3]
where
    T: Copy + From<f64> + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Mul<f64, Output = T>,
{
    let nf = n as f64;
    let value = recurrence(n, a, b, x);
    let first = if n >= 1 {
        recurrence(n - 1, a + 1.0, b + 1.0, x) * (0.5 * (nf + a + b + 1.0))
    } else {
        T::from(0.0)
    };
    let second = if n >= 2 {
        recurrence(n - 2, a + 2.0, b + 2.0, x) * (0.25 * (nf + a + b + 1.0) * (nf + a + b + 2.0))
    } else {
        T::from(0.0)
    };
    [value, first, second]
}

/// `(P_n(x), P_n'(x))`.
pub fn jacobi_eval(spec: JacobiSpec, x: f64) -> (f64, f64) {
    let [value, first, _] = recurrence_with_derivatives(spec.n, spec.alpha, spec.beta, x);
    (value, first)
}

/// `[P_n(x), P_n'(x), P_n''(x)]`.
pub fn jacobi_derivatives(spec: JacobiSpec, x: f64) -> [f64; 3] {
    recurrence_with_derivatives(spec.n, spec.alpha, spec.beta, x)
}

/// The three terms of the Jacobi ODE at `x` with `y = P_n`:
/// `(1-x²)y''`, `(β-α-(α+β+2)x)y'` and `n(n+α+β+1)y`. They sum to zero.
pub fn jacobi_ode_terms(spec: JacobiSpec, x: f64) -> [f64; 3] {
    let JacobiSpec { n, alpha, beta } = spec;
    let [y, dy, d2y] = recurrence_with_derivatives(n, alpha, beta, x);
    let nf = n as f64;
    [
        (1.0 - x * x) * d2y,
        (beta - alpha - (alpha + beta + 2.0) * x) * dy,
        nf * (nf + alpha + beta + 1.0) * y,
    ]
}

/// Residual of `(1-x²)y'' + (β-α-(α+β+2)x)y' + n(n+α+β+1)y = 0` at `x`.
pub fn jacobi_ode_residual(spec: JacobiSpec, x: f64) -> f64 {
    let [a, b, c] = jacobi_ode_terms(spec, x);
    a + b + c
}

/// Diagonal and off-diagonal of the Jacobi matrix of the monic recurrence
/// `p_{k+1} = (x - a_k) p_k - b_k p_{k-1}`; the off-diagonal holds `sqrt(b_k)`.
pub fn jacobi_matrix(spec: JacobiSpec) -> Option<SymTridiag> {
    let JacobiSpec { n, alpha: a, beta: b } = spec;
    if n == 0 {
        return None;
    }
    let mut diagonal = Vec::with_capacity(n);
    for k in 0..n {
        let d = if k == 0 {
            // (b²-a²)/((a+b)(a+b+2)) with the a+b factor cancelled
            (b - a) / (a + b + 2.0)
        } else {
            let s = 2.0 * k as f64 + a + b;
            (b * b - a * a) / (s * (s + 2.0))
        };
        diagonal.push(d);
    }
    let mut offdiagonal = Vec::with_capacity(n - 1);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let bk = if k == 1 {
            // (1+a+b) cancelled between numerator and denominator
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
        };
        offdiagonal.push(sqrt(bk));
    }
    Some(SymTridiag::new(diagonal, offdiagonal).expect("jacobi matrix shape is consistent"))
}

/// The `n` zeros of `P_n^{(α,β)}`, ascending, all in `(-1, 1)`.
pub fn jacobi_zeros(spec: JacobiSpec) -> Result<Vec<f64>> {
    let Some(matrix) = jacobi_matrix(spec) else {
        return Ok(Vec::new());
    };
    let mut zeros = sym_tridiag_eigenvalues(&matrix)?;
    for x in zeros.iter_mut() {
        *x = newton_polish(spec, *x);
    }
    zeros.sort_by(f64::total_cmp);
    Ok(zeros)
}

fn newton_polish(spec: JacobiSpec, mut x: f64) -> f64 {
    let (mut value, mut slope) = jacobi_eval(spec, x);
    for _ in 0..2 {
        if slope == 0.0 || value == 0.0 {
            break;
        }
        let trial = x - value / slope;
        if !(trial > -1.0 && trial < 1.0) {
            break;
        }
        let (v, s) = jacobi_eval(spec, trial);
        if v.abs() >= value.abs() {
            break;
        }
        x = trial;
        value = v;
        slope = s;
    }
    x
}
