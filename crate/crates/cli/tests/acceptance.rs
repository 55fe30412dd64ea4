//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use circle_eq_core::energy::{hamiltonian_gradient, hamiltonian_hessian, hamiltonian_value};
use circle_eq_core::linalg::Cholesky;
use circle_eq_core::model::{ChargeSystem, HatConfig, Particle, StructuredConfig};
use circle_eq_core::solve::{
    analytic_equilibrium, angle_sup_distance, hat_analytic_equilibrium, maximize, Domain, InitialGuess, SolveOptions,
    SolvedConfig,
};
use circle_eq_core::special::{sym_tridiag_eigenvalues, SymTridiag};
use circle_eq_core::special::{jacobi_derivatives, jacobi_eval, jacobi_zeros, JacobiSpec};
use circle_eq_core::verify::{q_ode_relative_residual, radial_constants};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Outcome = Result<String, String>;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_circle-eq")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// The (n, m, p, q) grid: every (n, m) in {1..4}², five (p, q) in (0, 5]² each.
fn grid() -> Vec<(usize, usize, f64, f64)> {
    let mut rng = StdRng::seed_from_u64(20);
    let mut out = Vec::new();
    for n in 1..=4 {
        for m in 1..=4 {
            for _ in 0..5 {
                let p = 5.0 - rng.gen_range(0.0..5.0);
                let q = 5.0 - rng.gen_range(0.0..5.0);
                out.push((n, m, p, q));
            }
        }
    }
    out
}

fn structured(config: &SolvedConfig) -> &StructuredConfig {
    match config {
        SolvedConfig::Structured(cfg) => cfg,
        _ => panic!("expected a structured configuration"),
    }
}

/// All particles of a structured configuration as (angle, charge), φ₁ first.
fn particles(cfg: &StructuredConfig) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = cfg.phi().iter().map(|&t| (t, cfg.p())).collect();
    out.extend(cfg.psi().iter().map(|&t| (t, cfg.q())));
    out.extend(cfg.theta().iter().map(|&t| (t, 1.0)));
    out
}

fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t)
}

fn criterion_1() -> Outcome {
    let opts = |initial| SolveOptions { initial, ..SolveOptions::default() };
    let mut rng = StdRng::seed_from_u64(21);
    let (mut runs, mut worst, mut max_iter) = (0usize, 0.0f64, 0usize);
    for (n, m, p, q) in grid() {
        let target_s = analytic_equilibrium(n, m, p, q).map_err(|e| e.to_string())?.config.free_angles();
        let target_h = hat_analytic_equilibrium(n, m, p, q).map_err(|e| e.to_string())?.config.free_angles();
        for _ in 0..5 {
            let start_s = StructuredConfig::sample(n, m, p, q, || rng.gen());
            let start_h = HatConfig::sample(n, m, p, q, || rng.gen());
            let cases = [
                (Domain::Structured { n, m, p, q }, InitialGuess::Structured(start_s), &target_s),
                (Domain::Hat { n, m, p, q }, InitialGuess::Hat(start_h), &target_h),
            ];
            for (domain, initial, target) in cases {
                let sol = maximize(&domain, &opts(initial)).map_err(|e| format!("{n},{m},{p},{q}: {e}"))?;
                if !sol.converged {
                    return Err(format!("no convergence at n={n} m={m} p={p} q={q}"));
                }
                let d = angle_sup_distance(&sol.config.free_angles(), target);
                worst = worst.max(d);
                max_iter = max_iter.max(sol.iterations);
                runs += 1;
            }
        }
    }
    if worst <= 1e-8 {
        Ok(format!("{runs} runs converged, max sup-distance {worst:.2e}, max {max_iter} iterations"))
    } else {
        Err(format!("max sup-distance {worst:.2e} > 1e-8"))
    }
}

fn criterion_2() -> Outcome {
    let (mut worst_identity, mut worst_gradient) = (0.0f64, 0.0f64);
    for (n, m, p, q) in grid() {
        let sol = analytic_equilibrium(n, m, p, q).map_err(|e| e.to_string())?;
        let all = particles(structured(&sol.config));
        // every particle but the gauge-fixed φ₁ is mobile
        for (k, &(tk, sk)) in all.iter().enumerate().skip(1) {
            let (mut left, mut scale, mut others, mut grad) = (Complex64::new(0.0, 0.0), 0.0, 0.0, 0.0);
            for (j, &(tj, sj)) in all.iter().enumerate() {
                if j == k {
                    continue;
                }
                let term = sk * sj / (e(tk) - e(tj));
                left += term;
                scale += term.norm();
                others += sj;
                grad += 0.5 * sk * sj / ((tk - tj) / 2.0).tan();
            }
            let right = e(-tk) * (sk * others / 2.0);
            worst_identity = worst_identity.max((left - right).norm() / (scale + right.norm()));
            worst_gradient = worst_gradient.max(grad.abs());
        }
    }
    if worst_identity <= 1e-9 && worst_gradient <= 1e-10 {
        Ok(format!("max identity relative {worst_identity:.2e}, max gradient {worst_gradient:.2e}"))
    } else {
        Err(format!("identity {worst_identity:.2e} (≤ 1e-9), gradient {worst_gradient:.2e} (≤ 1e-10)"))
    }
}

fn closed_forms(n: usize, m: usize, p: f64, q: f64) -> (f64, f64) {
    let (n, m) = (n as f64, m as f64);
    (2.0 * p * n * m + p * q * m + p * p * (m - 1.0), 2.0 * q * n * m + p * q * m + q * q * (m - 1.0))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut params = grid();
    params.push((5, 5, 2.0, 2.5));
    for &(n, m, p, q) in &params {
        let sol = analytic_equilibrium(n, m, p, q).map_err(|e| e.to_string())?;
        let cfg = structured(&sol.config);
        let all = particles(cfg);
        let (c, c_prime) = closed_forms(n, m, p, q);
        for (k, &(tk, sk)) in all.iter().enumerate().take(2 * m) {
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, &(tj, sj)) in all.iter().enumerate() {
                if j != k {
                    sum += 2.0 * sk * sj / (e(tk) - e(tj));
                }
            }
            let extracted = sum * e(tk);
            let closed = if k < m { c } else { c_prime };
            worst = worst.max((extracted - closed).norm() / closed);
        }
        let lib = radial_constants(n, m, p, q, &sol).map_err(|e| e.to_string())?;
        worst = worst.max(lib.max_deviation);
        if (lib.c_closed - c).abs() > 1e-12 * c || (lib.c_prime_closed - c_prime).abs() > 1e-12 * c_prime {
            return Err(format!("library closed forms disagree at n={n} m={m} p={p} q={q}"));
        }
    }
    let (c, c_prime) = closed_forms(5, 5, 2.0, 2.5);
    if c != 141.0 || c_prime != 175.0 {
        return Err(format!("figure parameters give C={c}, C'={c_prime}, expected 141 and 175"));
    }
    if worst <= 1e-8 {
        Ok(format!("C=141, C'=175 at (5,5,2,2.5); max relative deviation {worst:.2e} over {} sets", params.len()))
    } else {
        Err(format!("max relative deviation {worst:.2e} > 1e-8"))
    }
}

/// Random system with M ≤ max_mobile, 1 ≤ K ≤ 3, all gaps ≥ 0.05 rad.
fn random_system(rng: &mut StdRng, max_mobile: usize) -> ChargeSystem {
    loop {
        let mobile_count = rng.gen_range(1..=max_mobile);
        let fixed_count = rng.gen_range(1..=3);
        let mut angles: Vec<f64> = (0..mobile_count + fixed_count).map(|_| rng.gen_range(0.0..TAU)).collect();
        let mut sorted = angles.clone();
        sorted.sort_by(f64::total_cmp);
        let wrap = sorted[0] + TAU - sorted[sorted.len() - 1];
        if sorted.windows(2).map(|w| w[1] - w[0]).chain([wrap]).any(|g| g < 0.05) {
            continue;
        }
        let fixed_angles = angles.split_off(mobile_count);
        let mobile = angles.into_iter().map(|t| Particle::new(t, rng.gen_range(0.2..3.0))).collect();
        let fixed = fixed_angles.into_iter().map(|t| Particle::new(t, rng.gen_range(0.2..3.0))).collect();
        return ChargeSystem::new(mobile, fixed).expect("separated positive charges");
    }
}

fn plain_cholesky(a: &[Vec<f64>]) -> bool {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let (mut worst_error, mut min_margin) = (0.0f64, f64::INFINITY);
    for trial in 0..100 {
        let sys = random_system(&mut rng, 10);
        let h = hamiltonian_hessian(&sys).map_err(|e| e.to_string())?;
        let dim = h.dim();
        let neg: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| -h[(i, j)]).collect()).collect();
        if Cholesky::factor(&h.negated()).is_err() || !plain_cholesky(&neg) {
            return Err(format!("system {trial}: -Hessian is not positive definite"));
        }
        for (k, a) in sys.mobile().iter().enumerate() {
            let off: f64 = (0..dim).filter(|&j| j != k).map(|j| neg[k][j].abs()).sum();
            let margin = neg[k][k].abs() - off;
            let fixed: f64 = sys
                .fixed()
                .iter()
                .map(|b| a.charge * b.charge / 4.0 / ((a.angle - b.angle) / 2.0).sin().powi(2))
                .sum();
            if !(margin > 0.0) {
                return Err(format!("system {trial} row {k}: margin {margin:e} not positive"));
            }
            min_margin = min_margin.min(margin);
            worst_error = worst_error.max((margin - fixed).abs() / fixed);
        }
    }
    if worst_error <= 1e-12 {
        Ok(format!("100 systems factor; min margin {min_margin:.2e}, max margin error {worst_error:.2e}"))
    } else {
        Err(format!("max relative margin error {worst_error:.2e} > 1e-12"))
    }
}

/// `Q_{nm}(z) = z^{mn} P_n((z^m + z^{-m})/2)` from the explicit binomial sum.
fn q_explicit(n: usize, m: usize, alpha: f64, beta: f64, z: Complex64) -> Complex64 {
    let binom = |top: f64, k: usize| (0..k).fold(1.0, |acc, i| acc * (top - i as f64) / (i + 1) as f64);
    let zm = z.powi(m as i32);
    let x = (zm + zm.inv()) / 2.0;
    let mut p = Complex64::new(0.0, 0.0);
    for s in 0..=n {
        p += binom(n as f64 + alpha, n - s) * binom(n as f64 + beta, s) * ((x - 1.0) / 2.0).powi(s as i32)
            * ((x + 1.0) / 2.0).powi((n - s) as i32);
    }
    z.powi((n * m) as i32) * p
}

/// First two derivatives by the Cauchy integral on a circle of radius r.
fn cauchy_derivatives(f: impl Fn(Complex64) -> Complex64, z: Complex64, r: f64) -> (Complex64, Complex64) {
    let points = 64;
    let (mut d1, mut d2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for j in 0..points {
        let w = e(TAU * j as f64 / points as f64);
        let v = f(z + w * r);
        d1 += v * w.inv();
        d2 += v * w.inv() * w.inv();
    }
    (d1 / (points as f64 * r), d2 * 2.0 / (points as f64 * r * r))
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let (mut worst, mut worst_oracle, mut sets) = (0.0f64, 0.0f64, 0usize);
    for n in 1..=5 {
        for m in 1..=4 {
            for _ in 0..3 {
                let alpha = 3.0 - rng.gen_range(0.0..3.5);
                let beta = 3.0 - rng.gen_range(0.0..3.5);
                sets += 1;
                let mut taken = 0;
                while taken < 100 {
                    let z = Complex64::from_polar(rng.gen_range(0.6..1.4), rng.gen_range(0.0..TAU));
                    let zm = z.powi(m as i32);
                    // keep clear of the poles at the 2m-th roots of unity
                    if (zm - 1.0).norm() < 0.05 || (zm + 1.0).norm() < 0.05 {
                        continue;
                    }
                    taken += 1;
                    let rel = q_ode_relative_residual(n, m, alpha, beta, z).map_err(|e| e.to_string())?;
                    worst = worst.max(rel);

                    // independent oracle on every tenth point
                    if taken % 10 == 0 {
                        let f = |w: Complex64| q_explicit(n, m, alpha, beta, w);
                        let (d1, d2) = cauchy_derivatives(f, z, 0.02 * z.norm());
                        let (nf, mf) = (n as f64, m as f64);
                        let c1 = z.powi(m as i32 - 1)
                            * mf
                            * ((2.0 * alpha + 1.0) / (zm - 1.0) - (alpha + beta + 2.0 * nf) / zm
                                + (2.0 * beta + 1.0) / (zm + 1.0))
                            - (mf - 1.0) / z;
                        let u = zm;
                        let t = -nf
                            * ((alpha + beta + 1.0) / (u * u)
                                - (2.0 * (beta - alpha) * u - (alpha + beta + 1.0) * (u * u + 1.0))
                                    / (u * u * (u * u - 1.0)));
                        let c0 = (mf * z.powi(m as i32 - 1)).powi(2) * t;
                        let y = f(z);
                        let terms = [d2, c1 * d1, c0 * y];
                        let scale: f64 = terms.iter().map(|v| v.norm()).sum();
                        worst_oracle = worst_oracle.max((terms[0] + terms[1] + terms[2]).norm() / scale);
                    }
                }
            }
        }
    }
    if worst <= 1e-9 && worst_oracle <= 1e-6 {
        Ok(format!(
            "{} points over {sets} parameter sets, max relative residual {worst:.2e} (quadrature oracle {worst_oracle:.2e})",
            sets * 100
        ))
    } else {
        Err(format!("max relative residual {worst:.2e} (≤ 1e-9), quadrature oracle {worst_oracle:.2e} (≤ 1e-6)"))
    }
}

fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisection_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let bound = diag.iter().map(|d| d.abs()).sum::<f64>() + 2.0 * off.iter().map(|b| b.abs()).sum::<f64>() + 1.0;
    (0..diag.len())
        .map(|k| {
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if sturm_count(diag, off, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst_zero = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=30);
        let alpha = rng.gen_range(-0.95..5.0);
        let beta = rng.gen_range(-0.95..5.0);
        let spec = JacobiSpec::new(n, alpha, beta).map_err(|e| e.to_string())?;
        let xs = jacobi_zeros(spec).map_err(|e| e.to_string())?;
        let next = jacobi_zeros(JacobiSpec::new(n + 1, alpha, beta).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        for k in 0..n {
            if !(next[k] < xs[k] && xs[k] < next[k + 1]) {
                return Err(format!("interlacing fails at n={n} α={alpha} β={beta} k={k}"));
            }
        }
        for &x in &xs {
            let (value, _) = jacobi_eval(spec, x);
            let [_, d1, _] = jacobi_derivatives(spec, x);
            let ratio = value.abs() / d1.abs();
            worst_zero = worst_zero.max(ratio);
            if ratio > 1e-11 {
                return Err(format!("|P(x)|/|P'(x)| = {ratio:e} at n={n} α={alpha} β={beta}"));
            }
        }
        let sym = jacobi_zeros(JacobiSpec::new(n, alpha, alpha).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        for k in 0..n {
            if (sym[k] + sym[n - 1 - k]).abs() > 1e-13 {
                return Err(format!("symmetric zeros not mirrored at n={n} α=β={alpha}"));
            }
        }
    }
    let mut worst_eig = 0.0f64;
    for _ in 0..200 {
        let k = rng.gen_range(1..=50);
        let diag: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let off: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let t = SymTridiag::new(diag.clone(), off.clone()).map_err(|e| e.to_string())?;
        let mut got = sym_tridiag_eigenvalues(&t).map_err(|e| e.to_string())?;
        got.sort_by(f64::total_cmp);
        let want = bisection_eigenvalues(&diag, &off);
        for (a, b) in got.iter().zip(&want) {
            worst_eig = worst_eig.max((a - b).abs());
        }
    }
    if worst_eig <= 1e-10 {
        Ok(format!("max |P/P'| {worst_zero:.2e}; eigensolver vs bisection {worst_eig:.2e}"))
    } else {
        Err(format!("eigensolver vs bisection {worst_eig:.2e} > 1e-10"))
    }
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let (mut worst_g, mut worst_h) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let sys = random_system(&mut rng, 10);
        let angles = sys.mobile_angles();
        let value = |t: &[f64]| hamiltonian_value(&sys.with_mobile_angles(t).expect("separated"));
        let g = hamiltonian_gradient(&sys).map_err(|e| e.to_string())?;
        let hess = hamiltonian_hessian(&sys).map_err(|e| e.to_string())?;
        let shifted = |moves: &[(usize, f64)]| {
            let mut t = angles.clone();
            for &(i, d) in moves {
                t[i] += d;
            }
            value(&t)
        };
        let h = 1e-5;
        for k in 0..angles.len() {
            let fd = (shifted(&[(k, h)]) - shifted(&[(k, -h)])) / (2.0 * h);
            worst_g = worst_g.max((fd - g[k]).abs() / g[k].abs().max(1.0));
        }
        let h = 1e-4;
        let centre = value(&angles);
        for j in 0..angles.len() {
            for k in 0..angles.len() {
                let fd = if j == k {
                    (shifted(&[(j, h)]) - 2.0 * centre + shifted(&[(j, -h)])) / (h * h)
                } else {
                    (shifted(&[(j, h), (k, h)]) - shifted(&[(j, h), (k, -h)]) - shifted(&[(j, -h), (k, h)])
                        + shifted(&[(j, -h), (k, -h)]))
                        / (4.0 * h * h)
                };
                worst_h = worst_h.max((fd - hess[(j, k)]).abs() / hess[(j, k)].abs().max(1.0));
            }
        }
    }
    if worst_g <= 1e-6 && worst_h <= 1e-4 {
        Ok(format!("100 systems; gradient {worst_g:.2e}, Hessian {worst_h:.2e}"))
    } else {
        Err(format!("gradient {worst_g:.2e} (≤ 1e-6), Hessian {worst_h:.2e} (≤ 1e-4)"))
    }
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(bin()).args(args).output().expect("run circle-eq")
}

fn attribute(tag: &str, name: &str) -> Option<f64> {
    let start = tag.find(&format!(" {name}=\""))? + name.len() + 3;
    let rest = &tag[start..];
    rest[..rest.find('"')?].parse().ok()
}

fn criterion_8() -> Outcome {
    let args = ["plot", "--n", "5", "--m", "5", "--p", "2", "--q", "2.5"];
    let first = run(&args);
    let second = run(&args);
    if !first.status.success() {
        return Err(format!("plot exited with {}", first.status));
    }
    if first.stdout != second.stdout {
        return Err("repeat runs differ".into());
    }
    let golden = std::fs::read(golden_dir().join("figure1.svg")).map_err(|e| format!("golden file: {e}"))?;
    if golden != first.stdout {
        return Err("output differs from the golden file".into());
    }
    let svg = String::from_utf8(first.stdout).map_err(|e| e.to_string())?;
    let tags: Vec<&str> = svg.split('<').collect();
    let squares = tags.iter().filter(|t| t.starts_with("rect") && t.contains("class=\"p-charge\"")).count();
    let diamonds = tags.iter().filter(|t| t.starts_with("polygon") && t.contains("class=\"q-charge\"")).count();
    let circles: Vec<&&str> =
        tags.iter().filter(|t| t.starts_with("circle") && t.contains("class=\"unit-charge\"")).collect();
    if (squares, diamonds, circles.len()) != (5, 5, 50) {
        return Err(format!("markers: {squares} squares, {diamonds} diamonds, {} circles", circles.len()));
    }
    let mut per_arc = [0usize; 10];
    for tag in circles {
        let (cx, cy) = (attribute(tag, "cx").ok_or("cx")?, attribute(tag, "cy").ok_or("cy")?);
        let angle = (-cy).atan2(cx).rem_euclid(TAU);
        let scaled = angle / (PI / 5.0);
        let arc = scaled.floor();
        if scaled - arc < 1e-9 || arc + 1.0 - scaled < 1e-9 {
            return Err(format!("circle at angle {angle} sits on an arc end"));
        }
        per_arc[arc as usize % 10] += 1;
    }
    if per_arc.iter().all(|&c| c == 5) {
        Ok("5 squares, 5 diamonds, 50 circles (5 per arc); repeat runs and golden file byte-identical".into())
    } else {
        Err(format!("circles per arc {per_arc:?}"))
    }
}

fn perturbed(doc: &Value, key: &str, index: usize, delta: f64) -> Value {
    let mut out = doc.clone();
    let slot = &mut out[key][index];
    *slot = Value::from(slot.as_f64().expect("angle") + delta);
    out
}

fn verify_exit(dir: &Path, name: &str, doc: &Value) -> Option<i32> {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(doc).expect("json")).ok()?;
    run(&["verify", path.to_str()?]).status.code()
}

fn check_point(dir: &Path, (n, m, p, q): (usize, usize, f64, f64), space: &str) -> Result<usize, String> {
    let tag = format!("{space}-{n}-{m}-{p}-{q}");
    let file = dir.join(format!("{tag}.json"));
    let (n_s, m_s, p_s, q_s) = (n.to_string(), m.to_string(), p.to_string(), q.to_string());
    let out = run(&["solve", "--n", &n_s, "--m", &m_s, "--p", &p_s, "--q", &q_s, "--space", space, "-o", file.to_str().unwrap()]);
    if !out.status.success() {
        return Err(format!("{tag}: solve exited {:?}", out.status.code()));
    }
    let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    match verify_exit(dir, &format!("{tag}-v.json"), &doc) {
        Some(0) => {}
        code => return Err(format!("{tag}: verify exited {code:?}")),
    }
    // φ₁ is the gauge; in the hat space only θ is free
    let keys: &[(&str, usize)] = if space == "s" { &[("phi", 1), ("psi", 0), ("theta", 0)] } else { &[("theta", 0)] };
    let mut flips = 0;
    for &(key, first) in keys {
        let len = doc[key].as_array().map_or(0, Vec::len);
        for i in first..len {
            let up = verify_exit(dir, &format!("{tag}-{key}{i}.json"), &perturbed(&doc, key, i, 1e-3));
            let code = if up == Some(2) {
                verify_exit(dir, &format!("{tag}-{key}{i}.json"), &perturbed(&doc, key, i, -1e-3))
            } else {
                up
            };
            if code != Some(1) {
                return Err(format!("{tag}: perturbing {key}[{i}] gives exit {code:?}"));
            }
            flips += 1;
        }
    }
    Ok(flips)
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let jobs: Vec<_> = grid().into_iter().flat_map(|g| [(g, "s"), (g, "hat")]).collect();
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get()).min(8);
    let results: Vec<Result<usize, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let jobs = &jobs;
                let dir = dir.path();
                scope.spawn(move || {
                    jobs.iter().skip(w).step_by(workers).map(|&(g, space)| check_point(dir, g, space)).collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker")).collect()
    });
    let mut flips = 0;
    for r in results {
        flips += r?;
    }
    Ok(format!("{} solve/verify pairs exit 0; {flips} single-angle perturbations exit 1", jobs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("analytic equals numeric on S and Ŝ", criterion_1),
        ("critical-point identity and gradient", criterion_2),
        ("radial constants", criterion_3),
        ("concavity structure", criterion_4),
        ("Q polynomial ODE", criterion_5),
        ("special-function backend", criterion_6),
        ("derivative correctness", criterion_7),
        ("figure reproduction", criterion_8),
        ("CLI pipeline", criterion_9),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}: {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}: {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of 9 criteria passed in {:.1}s", 9 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
