//! Parameter sweeps: solve and verify every grid point on a bounded worker
//! pool, emitting records in grid order.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::commands::{check_params, emit, solve_and_verify, threshold_failures};
use crate::schema::{Params, Space, SweepDoc, SweepRecord, SCHEMA_VERSION};
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Environment variable capping the number of sweep workers.
pub const THREADS_ENV: &str = "CIRCLE_EQ_THREADS";

fn parse_int_list(flag: &str, spec: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::Input(format!("--{flag}: cannot parse `{spec}`"));
    let spec = spec.trim();
    let bounds = spec.split_once("..=").or_else(|| spec.split_once("..")).or_else(|| spec.split_once(':'));
    let values: Vec<u64> = match bounds {
        Some((lo, hi)) => {
            let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
            (lo..=hi).collect()
        }
        None => spec
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?,
    };
    if values.is_empty() {
        return Err(Failure::Input(format!("--{flag}: empty range `{spec}`")));
    }
    Ok(values)
}

fn parse_real_list(flag: &str, spec: &str) -> Result<Vec<f64>, Failure> {
    let values: Vec<f64> = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| Failure::Input(format!("--{flag}: cannot parse `{s}`"))))
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(Failure::Input(format!("--{flag}: empty list")));
    }
    Ok(values)
}

fn worker_count(jobs: usize) -> usize {
    let available = thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&v| v > 0);
    available.min(cap.unwrap_or(usize::MAX)).min(jobs).max(1)
}

fn evaluate(n: u64, m: u64, p: f64, q: f64, threshold: f64) -> SweepRecord {
    let mut record = SweepRecord {
        n: n as usize,
        m: m as usize,
        p,
        q,
        ok: false,
        passed: false,
        error: None,
        grad_supnorm: None,
        max_tangential: None,
        max_identity: None,
        c_dev: None,
        c_prime_dev: None,
        q_ode: None,
    };
    let outcome = check_params(n, m, p, q).and_then(|params: Params| solve_and_verify(params, Space::S));
    match outcome {
        Ok((_, report)) => {
            record.ok = true;
            record.passed = threshold_failures(&report, threshold).is_empty();
            record.grad_supnorm = Some(report.gradient_supnorm);
            record.max_tangential = Some(report.max_tangential_relative());
            record.max_identity = Some(report.max_identity_relative());
            record.c_dev = report.constants.as_ref().map(|c| c.c_deviation);
            record.c_prime_dev = report.constants.as_ref().map(|c| c.c_prime_deviation);
            record.q_ode = report.q_ode_max_residual;
        }
        Err(Failure::Input(msg) | Failure::Verification(msg) | Failure::NonConvergence(msg)) => {
            record.error = Some(msg);
        }
    }
    record
}

fn csv_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from("n,m,p,q,grad_supnorm,max_tangential,C_dev,C'_dev\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.n,
            r.m,
            r.p,
            r.q,
            csv_cell(r.grad_supnorm),
            csv_cell(r.max_tangential),
            csv_cell(r.c_dev),
            csv_cell(r.c_prime_dev)
        ));
    }
    out
}

pub fn run(
    n: &str,
    m: &str,
    p: &str,
    q: &str,
    format: Format,
    threshold: f64,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let ns = parse_int_list("n", n)?;
    let ms = parse_int_list("m", m)?;
    let ps = parse_real_list("p", p)?;
    let qs = parse_real_list("q", q)?;
    let mut grid = Vec::with_capacity(ns.len() * ms.len() * ps.len() * qs.len());
    for &n in &ns {
        for &m in &ms {
            for &p in &ps {
                for &q in &qs {
                    grid.push((n, m, p, q));
                }
            }
        }
    }

    let slots: Vec<Mutex<Option<SweepRecord>>> = grid.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..worker_count(grid.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(n, m, p, q)) = grid.get(i) else { break };
                let record = evaluate(n, m, p, q, threshold);
                *slots[i].lock().expect("slot lock") = Some(record);
            });
        }
    });
    let records: Vec<SweepRecord> = slots
        .into_iter()
        .map(|s| s.into_inner().expect("slot lock").expect("every grid point evaluated"))
        .collect();

    let text = match format {
        Format::Json => {
            let doc = SweepDoc { schema_version: SCHEMA_VERSION, threshold, records: records.clone() };
            let mut text = serde_json::to_string_pretty(&doc).expect("documents serialize");
            text.push('\n');
            text
        }
        Format::Csv => to_csv(&records),
    };
    emit(&text, output)?;
    if records.iter().all(|r| !r.ok) {
        return Err(Failure::Input("every grid point failed".into()));
    }
    Ok(())
}
