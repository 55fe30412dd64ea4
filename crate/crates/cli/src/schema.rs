//! JSON documents read and written by the CLI.
//!
//! Every document carries `schema_version`. Configuration documents (the
//! output of `solve` and `optimize`) can be fed back into `verify` and `plot`;
//! extra fields are ignored on input.

use circle_eq_core::model::{roots_of_plus_minus_one, HatConfig, StructuredConfig};
use circle_eq_core::verify::{ParticleResidual, RadialConstants, VerificationReport};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    /// p and q charges mobile (first p charge pinned at angle 0)
    #[default]
    S,
    /// p and q charges fixed at the m-th roots of 1 and -1
    Hat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub q: f64,
}

/// Short verification digest embedded in configuration documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub gradient_supnorm: f64,
    pub max_identity_residual: f64,
    pub max_identity_relative: f64,
    pub max_tangential_relative: f64,
    pub min_dominance_margin: Option<f64>,
    pub radial: Option<RadialDoc>,
    pub q_ode_max_residual: Option<f64>,
}

impl Summary {
    pub fn from_report(report: &VerificationReport) -> Self {
        Self {
            gradient_supnorm: report.gradient_supnorm,
            max_identity_residual: report.max_identity_residual(),
            max_identity_relative: report.max_identity_relative(),
            max_tangential_relative: report.max_tangential_relative(),
            min_dominance_margin: report.min_margin(),
            radial: report.constants.as_ref().map(RadialDoc::from),
            q_ode_max_residual: report.q_ode_max_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialDoc {
    pub c: f64,
    pub c_prime: f64,
    pub c_closed: f64,
    pub c_prime_closed: f64,
    pub c_deviation: f64,
    pub c_prime_deviation: f64,
    pub max_deviation: f64,
    pub spread: f64,
    pub charge_sum_deviation: f64,
}

impl From<&RadialConstants> for RadialDoc {
    fn from(r: &RadialConstants) -> Self {
        Self {
            c: r.c,
            c_prime: r.c_prime,
            c_closed: r.c_closed,
            c_prime_closed: r.c_prime_closed,
            c_deviation: r.c_deviation,
            c_prime_deviation: r.c_prime_deviation,
            max_deviation: r.max_deviation,
            spread: r.spread,
            charge_sum_deviation: r.charge_sum_deviation,
        }
    }
}

/// A configuration: output of `solve`, input of `verify` and `plot`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub schema_version: u32,
    #[serde(default)]
    pub space: Space,
    pub params: Params,
    /// Angles of the p charges; for `hat` these are the pinned roots of 1.
    #[serde(default)]
    pub phi: Vec<f64>,
    /// Angles of the q charges; for `hat` these are the pinned roots of -1.
    #[serde(default)]
    pub psi: Vec<f64>,
    pub theta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub jacobi_zeros: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Summary>,
}

/// Parsed configuration in core types.
pub enum Config {
    Structured(StructuredConfig),
    Hat(HatConfig),
}

impl ConfigDoc {
    pub fn from_structured(cfg: &StructuredConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            space: Space::S,
            params: Params { n: cfg.n(), m: cfg.m(), p: cfg.p(), q: cfg.q() },
            phi: cfg.phi().to_vec(),
            psi: cfg.psi().to_vec(),
            theta: cfg.theta().to_vec(),
            jacobi_zeros: Vec::new(),
            verification: None,
        }
    }

    pub fn from_hat(cfg: &HatConfig) -> Self {
        let (phi, psi) = roots_of_plus_minus_one(cfg.m());
        Self {
            schema_version: SCHEMA_VERSION,
            space: Space::Hat,
            params: Params { n: cfg.n(), m: cfg.m(), p: cfg.p(), q: cfg.q() },
            phi,
            psi,
            theta: cfg.theta().to_vec(),
            jacobi_zeros: Vec::new(),
            verification: None,
        }
    }

    /// Core configuration, unvalidated. For `hat`, `phi` and `psi` are ignored.
    pub fn to_config(&self) -> Config {
        let Params { n, m, p, q } = self.params;
        match self.space {
            Space::S => Config::Structured(StructuredConfig::new(
                m,
                n,
                p,
                q,
                self.phi.clone(),
                self.psi.clone(),
                self.theta.clone(),
            )),
            Space::Hat => Config::Hat(HatConfig::new(m, n, p, q, self.theta.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleDoc {
    pub index: usize,
    /// `phi[k]`, `psi[k]` or `theta[k]`.
    pub angle_name: String,
    pub radial_coefficient: f64,
    pub tangential_residual: f64,
    pub tangential_relative: f64,
    pub identity_residual: Option<f64>,
    pub identity_relative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub gradient_supnorm: f64,
    pub charge_sum_deviation: f64,
    pub per_particle: Vec<ParticleDoc>,
    pub fixed_particles: Vec<ParticleDoc>,
    pub diag_dominance_margins: Vec<f64>,
    pub fixed_curvature: Vec<f64>,
    pub negated_hessian_factorizes: Option<bool>,
    pub constants: Option<RadialDoc>,
    pub q_ode_max_residual: Option<f64>,
}

/// Name of mobile particle `index` in the given space.
pub fn mobile_name(space: Space, m: usize, index: usize) -> String {
    match space {
        Space::Hat => format!("theta[{index}]"),
        Space::S if index + 1 < m => format!("phi[{}]", index + 1),
        Space::S if index < 2 * m - 1 => format!("psi[{}]", index + 1 - m),
        Space::S => format!("theta[{}]", index - (2 * m - 1)),
    }
}

/// Name of fixed particle `index` (global numbering) in the given space.
fn fixed_name(space: Space, m: usize, fixed_index: usize) -> String {
    match space {
        Space::S => "phi[0]".to_string(),
        Space::Hat if fixed_index < m => format!("phi[{fixed_index}]"),
        Space::Hat => format!("psi[{}]", fixed_index - m),
    }
}

impl ReportDoc {
    pub fn new(report: &VerificationReport, space: Space, m: usize) -> Self {
        let mobile_count = report.per_particle.len();
        let particle = |r: &ParticleResidual, name: String| ParticleDoc {
            index: r.index,
            angle_name: name,
            radial_coefficient: r.radial_coefficient,
            tangential_residual: r.tangential_residual,
            tangential_relative: r.tangential_relative,
            identity_residual: r.identity_residual,
            identity_relative: r.identity_relative,
        };
        Self {
            gradient_supnorm: report.gradient_supnorm,
            charge_sum_deviation: report.charge_sum_deviation,
            per_particle: report
                .per_particle
                .iter()
                .map(|r| particle(r, mobile_name(space, m, r.index)))
                .collect(),
            fixed_particles: report
                .fixed_particles
                .iter()
                .map(|r| particle(r, fixed_name(space, m, r.index - mobile_count)))
                .collect(),
            diag_dominance_margins: report.diag_dominance_margins.clone(),
            fixed_curvature: report.fixed_curvature.clone(),
            negated_hessian_factorizes: report.negated_hessian_factorizes,
            constants: report.constants.as_ref().map(RadialDoc::from),
            q_ode_max_residual: report.q_ode_max_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDoc {
    pub schema_version: u32,
    pub space: Space,
    pub params: Params,
    pub threshold: f64,
    pub passed: bool,
    /// Checks that exceeded the threshold.
    pub failures: Vec<String>,
    /// Mobile particle with the largest tangential force.
    pub worst_angle: Option<String>,
    pub report: ReportDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDoc {
    pub start: String,
    pub converged: bool,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub distance_to_analytic: f64,
}

/// Output of `optimize`: the first run's configuration plus per-run stats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeDoc {
    #[serde(flatten)]
    pub config: ConfigDoc,
    pub converged: bool,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub distance_to_analytic: f64,
    pub max_pairwise_distance: f64,
    pub runs: Vec<RunDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub q: f64,
    pub ok: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub grad_supnorm: Option<f64>,
    pub max_tangential: Option<f64>,
    pub max_identity: Option<f64>,
    pub c_dev: Option<f64>,
    pub c_prime_dev: Option<f64>,
    pub q_ode: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDoc {
    pub schema_version: u32,
    pub threshold: f64,
    pub records: Vec<SweepRecord>,
}
