use alloc::format;
use alloc::vec::Vec;

use crate::math::hypot;
use crate::{Error, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diagonal: Vec<f64>,
    offdiagonal: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diagonal: Vec<f64>, offdiagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::Parameter("tridiagonal matrix must have at least one row".into()));
        }
        if offdiagonal.len() + 1 != diagonal.len() {
            return Err(Error::Parameter(format!(
                "off-diagonal length {} does not match diagonal length {}",
                offdiagonal.len(),
                diagonal.len()
            )));
        }
        Ok(Self { diagonal, offdiagonal })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn offdiagonal(&self) -> &[f64] {
        &self.offdiagonal
    }
}

/// All eigenvalues in ascending order, by implicit-shift QL iterations with
/// Wilkinson shifts. The iteration budget is `30·k` sweeps in total.
pub fn sym_tridiag_eigenvalues(t: &SymTridiag) -> Result<Vec<f64>> {
    let n = t.dim();
    let mut d = t.diagonal.clone();
    let mut e = t.offdiagonal.clone();
    e.push(0.0);
    let budget = 30 * n;
    let mut sweeps = 0;

    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > budget {
                return Err(Error::NonConvergence { index: l, iterations: sweeps - 1 });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    d.sort_by(f64::total_cmp);
    Ok(d)
}
