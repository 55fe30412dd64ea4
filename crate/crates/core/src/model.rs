//! Charge systems and the two interleaved configuration spaces.
//!
//! [`StructuredConfig`] is a point of the space where `m` charges `p`, `m`
//! charges `q` and `2mn` unit charges alternate around the circle, with the
//! first `p` charge pinned at angle 0. [`HatConfig`] is the slice where the
//! `p` and `q` charges sit at the m-th roots of 1 and -1 and only the unit
//! charges move, each block of `n` confined to one arc between consecutive
//! (2m)-th roots of unity.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::math::{circular_gap, wrap_angle, PI, TAU};
use crate::{Error, Result, COINCIDENCE_THRESHOLD};

/// One charged particle on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub angle: f64,
    pub charge: f64,
}

impl Particle {
    pub fn new(angle: f64, charge: f64) -> Self {
        Self { angle, charge }
    }
}

/// Mobile and fixed charged particles on the unit circle.
///
/// Particles are addressed globally: index `i < M` is mobile particle `i`,
/// index `M + b` is fixed particle `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeSystem {
    mobile: Vec<Particle>,
    fixed: Vec<Particle>,
}

impl ChargeSystem {
    /// Build a system with at least one fixed particle, positive charges and
    /// pairwise distinct angles. Angles are reduced to `[0, 2π)`.
    pub fn new(mobile: Vec<Particle>, fixed: Vec<Particle>) -> Result<Self> {
        if fixed.is_empty() {
            return Err(Error::Parameter("a charge system needs at least one fixed particle".into()));
        }
        Self::build(mobile, fixed)
    }

    /// A system with no fixed particle. Its Hamiltonian is rotation invariant,
    /// so it has no isolated critical point; only useful as a diagnostic.
    pub fn unanchored(mobile: Vec<Particle>) -> Result<Self> {
        Self::build(mobile, Vec::new())
    }

    fn build(mut mobile: Vec<Particle>, mut fixed: Vec<Particle>) -> Result<Self> {
        for particle in mobile.iter_mut().chain(fixed.iter_mut()) {
            if !particle.angle.is_finite() {
                return Err(Error::Parameter(format!("angle {} is not finite", particle.angle)));
            }
            if !(particle.charge.is_finite() && particle.charge > 0.0) {
                return Err(Error::Parameter(format!("charge must be > 0, got {}", particle.charge)));
            }
            particle.angle = wrap_angle(particle.angle);
        }
        let system = Self { mobile, fixed };
        if let Some((first, second)) = system.coincident_pair() {
            return Err(Error::Singularity { first, second });
        }
        Ok(system)
    }

    pub fn mobile(&self) -> &[Particle] {
        &self.mobile
    }

    pub fn fixed(&self) -> &[Particle] {
        &self.fixed
    }

    pub fn mobile_count(&self) -> usize {
        self.mobile.len()
    }

    pub fn fixed_count(&self) -> usize {
        self.fixed.len()
    }

    /// Particle by global index (mobile first, then fixed).
    pub fn particle(&self, index: usize) -> Particle {
        if index < self.mobile.len() {
            self.mobile[index]
        } else {
            self.fixed[index - self.mobile.len()]
        }
    }

    pub fn len(&self) -> usize {
        self.mobile.len() + self.fixed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_charge(&self) -> f64 {
        self.mobile.iter().chain(&self.fixed).map(|p| p.charge).sum()
    }

    pub fn mobile_angles(&self) -> Vec<f64> {
        self.mobile.iter().map(|p| p.angle).collect()
    }

    /// Same charges with the mobile particles moved to `angles`.
    pub fn with_mobile_angles(&self, angles: &[f64]) -> Result<Self> {
        if angles.len() != self.mobile.len() {
            return Err(Error::Parameter(format!(
                "expected {} mobile angles, got {}",
                self.mobile.len(),
                angles.len()
            )));
        }
        let mobile = self
            .mobile
            .iter()
            .zip(angles)
            .map(|(p, &angle)| Particle::new(angle, p.charge))
            .collect();
        Self::build(mobile, self.fixed.clone())
    }

    /// Turn every mobile particle whose mask entry is `false` into a fixed one.
    pub fn freeze(&self, mobility: &[bool]) -> Result<Self> {
        if mobility.len() != self.mobile.len() {
            return Err(Error::Parameter(format!(
                "mobility mask has {} entries for {} mobile particles",
                mobility.len(),
                self.mobile.len()
            )));
        }
        let mut mobile = Vec::new();
        let mut fixed = self.fixed.clone();
        for (p, &free) in self.mobile.iter().zip(mobility) {
            if free {
                mobile.push(*p);
            } else {
                fixed.push(*p);
            }
        }
        Self::new(mobile, fixed)
    }

    /// Global indices of all particles in counter-clockwise order starting at
    /// the first fixed particle (or particle 0 when there is none). Two systems
    /// with the same charges lie in the same component of the domain iff their
    /// cyclic orders agree.
    pub fn cyclic_order(&self) -> Vec<usize> {
        let start = if self.fixed.is_empty() { 0 } else { self.mobile.len() };
        let origin = self.particle(start).angle;
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            let ta = wrap_angle(self.particle(a).angle - origin);
            let tb = wrap_angle(self.particle(b).angle - origin);
            ta.total_cmp(&tb).then(a.cmp(&b))
        });
        order
    }

    /// First pair of particles closer than the coincidence threshold.
    pub fn coincident_pair(&self) -> Option<(usize, usize)> {
        let n = self.len();
        if n < 2 {
            return None;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.particle(a).angle.total_cmp(&self.particle(b).angle));
        for w in 0..n {
            let a = order[w];
            let b = order[(w + 1) % n];
            if circular_gap(self.particle(a).angle, self.particle(b).angle) < COINCIDENCE_THRESHOLD {
                return Some((a.min(b), a.max(b)));
            }
        }
        None
    }
}

/// Which angle an ordering constraint refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleRef {
    Phi(usize),
    Psi(usize),
    Theta(usize),
    /// `kπ/m`, an arc endpoint of the fixed-charge slice.
    ArcEnd(usize),
    /// `2π`, closing the structured chain.
    FullTurn,
}

impl fmt::Display for AngleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleRef::Phi(i) => write!(f, "phi[{i}]"),
            AngleRef::Psi(i) => write!(f, "psi[{i}]"),
            AngleRef::Theta(i) => write!(f, "theta[{i}]"),
            AngleRef::ArcEnd(k) => write!(f, "{k}pi/m"),
            AngleRef::FullTurn => write!(f, "2pi"),
        }
    }
}

/// One failed constraint. Indices are zero-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Parameter { name: &'static str, value: f64 },
    Length { block: &'static str, expected: usize, found: usize },
    /// `phi[0]` must be exactly 0.
    Gauge { value: f64 },
    NotFinite(AngleRef),
    OutOfRange(AngleRef),
    /// `lower < upper` fails.
    Order { lower: AngleRef, upper: AngleRef },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Parameter { name, value } => write!(f, "{name} = {value} is out of range"),
            Violation::Length { block, expected, found } => {
                write!(f, "{block} has {found} angles, expected {expected}")
            }
            Violation::Gauge { value } => write!(f, "phi[0] must be exactly 0, got {value}"),
            Violation::NotFinite(a) => write!(f, "{a} is not finite"),
            Violation::OutOfRange(a) => write!(f, "{a} is outside [0, 2pi)"),
            Violation::Order { lower, upper } => write!(f, "expected {lower} < {upper}"),
        }
    }
}

fn check_parameters(m: usize, n: usize, p: f64, q: f64, out: &mut Vec<Violation>) {
    if m == 0 {
        out.push(Violation::Parameter { name: "m", value: 0.0 });
    }
    if n == 0 {
        out.push(Violation::Parameter { name: "n", value: 0.0 });
    }
    if !(p.is_finite() && p > 0.0) {
        out.push(Violation::Parameter { name: "p", value: p });
    }
    if !(q.is_finite() && q > 0.0) {
        out.push(Violation::Parameter { name: "q", value: q });
    }
}

fn check_chain(chain: &[(AngleRef, f64)], out: &mut Vec<Violation>) {
    for pair in chain.windows(2) {
        let (lower, a) = pair[0];
        let (upper, b) = pair[1];
        if !(a < b) {
            out.push(Violation::Order { lower, upper });
        }
    }
}

/// `count` strictly increasing points strictly inside `(lo, hi)`, spread by
/// the uniform draws from `draw` (values in `[0, 1)`).
fn fill_gap(lo: f64, hi: f64, count: usize, draw: &mut impl FnMut() -> f64, out: &mut Vec<f64>) {
    let weights: Vec<f64> = (0..=count).map(|_| 0.25 + draw()).collect();
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for w in &weights[..count] {
        acc += w;
        out.push(lo + (hi - lo) * acc / total);
    }
}

/// A point of the interleaved configuration space.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredConfig {
    m: usize,
    n: usize,
    p: f64,
    q: f64,
    phi: Vec<f64>,
    psi: Vec<f64>,
    theta: Vec<f64>,
}

impl StructuredConfig {
    /// Store a configuration as given, with finite angles reduced to `[0, 2π)`.
    /// No validation happens here; see [`validate_structured`].
    pub fn new(m: usize, n: usize, p: f64, q: f64, phi: Vec<f64>, psi: Vec<f64>, theta: Vec<f64>) -> Self {
        let wrap = |v: Vec<f64>| v.into_iter().map(|t| if t.is_finite() { wrap_angle(t) } else { t }).collect();
        Self { m, n, p, q, phi: wrap(phi), psi: wrap(psi), theta: wrap(theta) }
    }

    /// Charges at the roots of ±1, unit charges evenly spaced inside each arc.
    pub fn midpoint(n: usize, m: usize, p: f64, q: f64) -> Self {
        let (phi, psi) = roots_of_plus_minus_one(m);
        Self::new(m, n, p, q, phi, psi, midpoint_theta(n, m))
    }

    /// A random feasible configuration built from uniform `[0, 1)` draws.
    pub fn sample(n: usize, m: usize, p: f64, q: f64, mut draw: impl FnMut() -> f64) -> Self {
        let mut breaks = Vec::with_capacity(2 * m + 1);
        breaks.push(0.0);
        fill_gap(0.0, TAU, 2 * m - 1, &mut draw, &mut breaks);
        breaks.push(TAU);
        let phi = breaks.iter().step_by(2).take(m).copied().collect();
        let psi = breaks.iter().skip(1).step_by(2).copied().collect();
        let mut theta = Vec::with_capacity(2 * m * n);
        for w in breaks.windows(2) {
            fill_gap(w[0], w[1], n, &mut draw, &mut theta);
        }
        Self::new(m, n, p, q, phi, psi, theta)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Number of free angles, `2mn + 2m - 1`.
    pub fn free_count(&self) -> usize {
        2 * self.m * self.n + 2 * self.m - 1
    }

    /// Free angles in mobile order: `phi[1..]`, then `psi`, then `theta`.
    pub fn free_angles(&self) -> Vec<f64> {
        self.phi.iter().skip(1).chain(&self.psi).chain(&self.theta).copied().collect()
    }

    /// Replace the free angles (same order as [`Self::free_angles`]).
    pub fn with_free_angles(&self, angles: &[f64]) -> Self {
        let mut phi = Vec::with_capacity(self.m);
        phi.push(0.0);
        let (rest_phi, rest) = angles.split_at(self.m.saturating_sub(1).min(angles.len()));
        phi.extend_from_slice(rest_phi);
        let (psi, theta) = rest.split_at(self.m.min(rest.len()));
        Self::new(self.m, self.n, self.p, self.q, phi, psi.to_vec(), theta.to_vec())
    }

    pub fn validate(&self) -> Result<()> {
        let violations = validate_structured(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(violations))
        }
    }
}

/// Every failed constraint of the interleaved space; empty means valid.
pub fn validate_structured(cfg: &StructuredConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let StructuredConfig { m, n, p, q, .. } = *cfg;
    check_parameters(m, n, p, q, &mut out);
    let blocks = [("phi", &cfg.phi, m), ("psi", &cfg.psi, m), ("theta", &cfg.theta, 2 * m * n)];
    for (block, values, expected) in blocks {
        if values.len() != expected {
            out.push(Violation::Length { block, expected, found: values.len() });
        }
    }
    if !out.is_empty() {
        return out;
    }
    if cfg.phi[0] != 0.0 {
        out.push(Violation::Gauge { value: cfg.phi[0] });
    }

    let mut chain = Vec::with_capacity(cfg.free_count() + 2);
    for j in 0..m {
        chain.push((AngleRef::Phi(j), cfg.phi[j]));
        for i in 2 * j * n..(2 * j + 1) * n {
            chain.push((AngleRef::Theta(i), cfg.theta[i]));
        }
        chain.push((AngleRef::Psi(j), cfg.psi[j]));
        for i in (2 * j + 1) * n..(2 * j + 2) * n {
            chain.push((AngleRef::Theta(i), cfg.theta[i]));
        }
    }
    for &(a, t) in &chain {
        if !t.is_finite() {
            out.push(Violation::NotFinite(a));
        } else if !(0.0..TAU).contains(&t) {
            out.push(Violation::OutOfRange(a));
        }
    }
    chain.push((AngleRef::FullTurn, TAU));
    check_chain(&chain, &mut out);
    out
}

/// The structured configuration as a general system: one fixed charge `p` at
/// angle 0 and mobile `phi[1..]` (charge p), `psi` (charge q), `theta`
/// (charge 1), in that order.
pub fn to_charge_system(cfg: &StructuredConfig) -> Result<ChargeSystem> {
    cfg.validate()?;
    let mut mobile = Vec::with_capacity(cfg.free_count());
    mobile.extend(cfg.phi[1..].iter().map(|&t| Particle::new(t, cfg.p)));
    mobile.extend(cfg.psi.iter().map(|&t| Particle::new(t, cfg.q)));
    mobile.extend(cfg.theta.iter().map(|&t| Particle::new(t, 1.0)));
    ChargeSystem::new(mobile, alloc::vec![Particle::new(0.0, cfg.p)])
}

/// A point of the fixed-charge slice: only the `2mn` unit charges move.
#[derive(Debug, Clone, PartialEq)]
pub struct HatConfig {
    m: usize,
    n: usize,
    p: f64,
    q: f64,
    theta: Vec<f64>,
}

impl HatConfig {
    /// No validation here; see [`validate_hat`].
    pub fn new(m: usize, n: usize, p: f64, q: f64, theta: Vec<f64>) -> Self {
        let theta = theta.into_iter().map(|t| if t.is_finite() { wrap_angle(t) } else { t }).collect();
        Self { m, n, p, q, theta }
    }

    pub fn midpoint(n: usize, m: usize, p: f64, q: f64) -> Self {
        Self::new(m, n, p, q, midpoint_theta(n, m))
    }

    pub fn sample(n: usize, m: usize, p: f64, q: f64, mut draw: impl FnMut() -> f64) -> Self {
        let mut theta = Vec::with_capacity(2 * m * n);
        for k in 0..2 * m {
            fill_gap(arc_end(k, m), arc_end(k + 1, m), n, &mut draw, &mut theta);
        }
        Self::new(m, n, p, q, theta)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn with_theta(&self, theta: &[f64]) -> Self {
        Self::new(self.m, self.n, self.p, self.q, theta.to_vec())
    }

    pub fn validate(&self) -> Result<()> {
        let violations = validate_hat(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(violations))
        }
    }
}

/// `kπ/m`, with the last endpoint returned exactly as `2π`.
fn arc_end(k: usize, m: usize) -> f64 {
    if k == 2 * m {
        TAU
    } else {
        k as f64 * PI / m as f64
    }
}

/// Every failed constraint of the fixed-charge slice; empty means valid.
pub fn validate_hat(cfg: &HatConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let HatConfig { m, n, p, q, .. } = *cfg;
    check_parameters(m, n, p, q, &mut out);
    if cfg.theta.len() != 2 * m * n {
        out.push(Violation::Length { block: "theta", expected: 2 * m * n, found: cfg.theta.len() });
    }
    if !out.is_empty() {
        return out;
    }
    let mut chain = Vec::with_capacity(2 * m * n + 2 * m + 1);
    for k in 0..2 * m {
        chain.push((AngleRef::ArcEnd(k), arc_end(k, m)));
        for i in k * n..(k + 1) * n {
            let t = cfg.theta[i];
            if !t.is_finite() {
                out.push(Violation::NotFinite(AngleRef::Theta(i)));
            }
            chain.push((AngleRef::Theta(i), t));
        }
    }
    chain.push((AngleRef::ArcEnd(2 * m), TAU));
    check_chain(&chain, &mut out);
    out
}

/// Fixed charges `p` at the m-th roots of 1 and `q` at the m-th roots of -1,
/// with the `2mn` unit charges mobile.
pub fn hat_charge_system(cfg: &HatConfig) -> Result<ChargeSystem> {
    cfg.validate()?;
    let (phi, psi) = roots_of_plus_minus_one(cfg.m);
    let fixed = phi
        .into_iter()
        .map(|t| Particle::new(t, cfg.p))
        .chain(psi.into_iter().map(|t| Particle::new(t, cfg.q)))
        .collect();
    let mobile = cfg.theta.iter().map(|&t| Particle::new(t, 1.0)).collect();
    ChargeSystem::new(mobile, fixed)
}

/// Angles of the m-th roots of 1 (`2πj/m`) and of -1 (`(2j+1)π/m`).
pub fn roots_of_plus_minus_one(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mf = m as f64;
    let phi = (0..m).map(|j| 2.0 * PI * j as f64 / mf).collect();
    let psi = (0..m).map(|j| (2 * j + 1) as f64 * PI / mf).collect();
    (phi, psi)
}

fn midpoint_theta(n: usize, m: usize) -> Vec<f64> {
    let width = PI / m as f64;
    let mut theta = Vec::with_capacity(2 * m * n);
    for k in 0..2 * m {
        let start = arc_end(k, m);
        for i in 0..n {
            theta.push(start + width * (i as f64 + 0.5) / n as f64);
        }
    }
    theta
}
