use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use qsine::classical::{FractionalParams, ProblemSpec};
use qsine::experiments::{
    classical_covariance_row, compare_with_matern, loglog_slope, poisson_1d, poisson_1d_errors,
    poisson_1d_inhom_errors, poisson_2d_errors, poisson_2d_reference, quantum_covariance_row,
    ErrorPair,
};
use qsine::reflection::{build_forward_shift, build_reflection_unitary, ShiftImpl};
use qsine::solver::{sample_random_field_quantum, PreparedSolver, SolverOptions};
use qsine::transpile::transpile_count;

use crate::config::{Experiment, ExperimentConfig};

/// Files written by a run, relative to the output directory.
pub struct Outcome {
    pub files: Vec<String>,
    pub exponent_violations: Vec<String>,
}

#[derive(Serialize)]
struct CovarianceRow {
    n: usize,
    beta: f64,
    nu: f64,
    method: &'static str,
    p: Option<usize>,
    amplitude: f64,
    rel_error: f64,
}

#[derive(Serialize)]
struct SampleRow {
    beta: f64,
    sample: usize,
    index: usize,
    x: f64,
    value: f64,
}

#[derive(Serialize)]
struct Fractional2dRow {
    n: usize,
    method: &'static str,
    p: Option<usize>,
    k_split: Option<usize>,
    rel_error_matern: f64,
    rel_error_exact: f64,
}

#[derive(Clone, Serialize)]
struct GateRow {
    series: String,
    n: usize,
    n_qubits: usize,
    n_ancilla: usize,
    cnot: usize,
    u3: usize,
    total: usize,
}

#[derive(Serialize)]
struct ExponentRow {
    series: String,
    exponent: f64,
    bound: f64,
    within_bound: bool,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(!rows.is_empty())
        .from_writer(BufWriter::new(file));
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn solver_options(cfg: &ExperimentConfig, p: usize) -> SolverOptions {
    SolverOptions {
        p,
        partition: cfg.partition.clone(),
        k_split: cfg.k_split_for(p),
        shift: cfg.shift[0],
        flag_mode: cfg.flag_mode,
        keep_state: false,
    }
}

fn grid(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    cfg.p
        .iter()
        .flat_map(|&p| cfg.n.iter().map(move |&n| (n, p)))
        .collect()
}

const ERROR_HEADER: &[&str] = &[
    "n",
    "p",
    "l2_error_quantum",
    "l2_error_classical",
    "success_probability",
];

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let results = cfg.out.join("results.csv");
    let mut files = vec!["results.csv".to_string()];
    let mut exponent_violations = Vec::new();
    match cfg.experiment {
        Experiment::Poisson1d | Experiment::Poisson1dInhom => {
            let f = if cfg.experiment == Experiment::Poisson1d {
                poisson_1d_errors
            } else {
                poisson_1d_inhom_errors
            };
            let rows = grid(cfg)
                .into_par_iter()
                .map(|(n, p)| f(n, &solver_options(cfg, p)))
                .collect::<qsine::Result<Vec<ErrorPair>>>()?;
            write_csv(&results, &rows, ERROR_HEADER)?;
        }
        Experiment::Poisson2d => {
            let reference = poisson_2d_reference(cfg.reference)?;
            let rows = grid(cfg)
                .into_par_iter()
                .map(|(n, p)| {
                    poisson_2d_errors(n, &solver_options(cfg, p), &reference, cfg.reference)
                })
                .collect::<qsine::Result<Vec<ErrorPair>>>()?;
            write_csv(&results, &rows, ERROR_HEADER)?;
        }
        Experiment::Fractional1d => {
            let rows = fractional_1d(cfg)?;
            write_csv(
                &results,
                &rows,
                &["n", "beta", "nu", "method", "p", "amplitude", "rel_error"],
            )?;
            if cfg.samples > 0 {
                let samples = samples_1d(cfg)?;
                write_csv(
                    &cfg.out.join("samples.csv"),
                    &samples,
                    &["beta", "sample", "index", "x", "value"],
                )?;
                files.push("samples.csv".into());
            }
        }
        Experiment::Fractional2d => {
            let rows = fractional_2d(cfg)?;
            write_csv(
                &results,
                &rows,
                &[
                    "n",
                    "method",
                    "p",
                    "k_split",
                    "rel_error_matern",
                    "rel_error_exact",
                ],
            )?;
        }
        Experiment::GatecountUf | Experiment::GatecountUr | Experiment::GatecountSolver => {
            let rows = gate_counts(cfg)?;
            write_csv(
                &results,
                &rows,
                &[
                    "series",
                    "n",
                    "n_qubits",
                    "n_ancilla",
                    "cnot",
                    "u3",
                    "total",
                ],
            )?;
            let exps = exponents(&rows, cfg.exponent_bound);
            for e in exps.iter().filter(|e| !e.within_bound) {
                exponent_violations.push(format!(
                    "{}: exponent {:.3} exceeds {}",
                    e.series, e.exponent, e.bound
                ));
            }
            write_csv(
                &cfg.out.join("exponents.csv"),
                &exps,
                &["series", "exponent", "bound", "within_bound"],
            )?;
            files.push("exponents.csv".into());
        }
        Experiment::Plotdata => unreachable!("plotdata does not run through the experiment driver"),
    }
    Ok(Outcome {
        files,
        exponent_violations,
    })
}

fn fractional_1d(cfg: &ExperimentConfig) -> Result<Vec<CovarianceRow>> {
    let mut jobs: Vec<(usize, f64, Option<usize>)> = Vec::new();
    for &beta in &cfg.beta {
        for &n in &cfg.n {
            jobs.push((n, beta, None));
            for &p in &cfg.p {
                jobs.push((n, beta, Some(p)));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(n, beta, p)| {
            let params = FractionalParams {
                kappa: cfg.kappa,
                beta,
                tau: cfg.tau,
            };
            let row = match p {
                None => classical_covariance_row(1, n, params)?,
                Some(p) => quantum_covariance_row(1, n, params, &solver_options(cfg, p))?,
            };
            let c = compare_with_matern(&row, 1, n, params);
            Ok(CovarianceRow {
                n,
                beta,
                nu: c.nu,
                method: if p.is_some() { "quantum" } else { "classical" },
                p,
                amplitude: c.amplitude,
                rel_error: c.rel_error,
            })
        })
        .collect()
}

fn samples_1d(cfg: &ExperimentConfig) -> Result<Vec<SampleRow>> {
    let m = *cfg.n.iter().min().expect("validated non-empty");
    let mut rows = Vec::new();
    for (b, &beta) in cfg.beta.iter().enumerate() {
        let params = FractionalParams {
            kappa: cfg.kappa,
            beta,
            tau: cfg.tau,
        };
        let spec = ProblemSpec::fractional(1, 1.0, 2 * m, params, vec![0.0; m])?;
        let seed = cfg.seed.wrapping_add(b as u64);
        let draws =
            sample_random_field_quantum(&spec, solver_options(cfg, cfg.p[0]), cfg.samples, seed)?;
        let x = spec.axis();
        for (s, u) in draws.iter().enumerate() {
            for (i, &v) in u.iter().enumerate() {
                rows.push(SampleRow {
                    beta,
                    sample: s,
                    index: i,
                    x: x[i],
                    value: v,
                });
            }
        }
    }
    Ok(rows)
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn fractional_2d(cfg: &ExperimentConfig) -> Result<Vec<Fractional2dRow>> {
    let mut jobs: Vec<(usize, f64, Option<usize>)> = Vec::new();
    for &beta in &cfg.beta {
        for &n in &cfg.n {
            jobs.push((n, beta, None));
            for &p in &cfg.p {
                jobs.push((n, beta, Some(p)));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(n, beta, p)| {
            let params = FractionalParams {
                kappa: cfg.kappa,
                beta,
                tau: cfg.tau,
            };
            let exact = classical_covariance_row(2, n, params)?;
            let row = match p {
                None => exact.clone(),
                Some(p) => quantum_covariance_row(2, n, params, &solver_options(cfg, p))?,
            };
            Ok(Fractional2dRow {
                n,
                method: if p.is_some() { "quantum" } else { "exact" },
                p,
                k_split: p.map(|p| cfg.k_split_for(p)),
                rel_error_matern: compare_with_matern(&row, 2, n, params).rel_error,
                rel_error_exact: rel_diff(&row, &exact),
            })
        })
        .collect()
}

fn solver_series(shift: ShiftImpl) -> String {
    format!("solver/{shift}")
}

fn gate_counts(cfg: &ExperimentConfig) -> Result<Vec<GateRow>> {
    let mut jobs = Vec::new();
    for &shift in &cfg.shift {
        for &n in &cfg.n {
            jobs.push((shift, n));
        }
    }
    jobs.into_par_iter()
        .map(|(shift, n)| {
            let (series, circuit, n_qubits) = match cfg.experiment {
                Experiment::GatecountUf => {
                    (format!("U_F/{shift}"), build_forward_shift(n, shift)?, n)
                }
                Experiment::GatecountUr => (
                    format!("U_R/{shift}"),
                    build_reflection_unitary(n, shift)?.circuit,
                    n,
                ),
                _ => {
                    let spec = poisson_1d(n)?;
                    let opts = SolverOptions {
                        shift,
                        ..solver_options(cfg, cfg.p[0])
                    };
                    let solver = PreparedSolver::new(&spec, opts)?;
                    let qubits = (2 * n).trailing_zeros() as usize;
                    (solver_series(shift), solver.circuit, qubits)
                }
            };
            let count = transpile_count(&circuit)?;
            Ok(GateRow {
                series,
                n,
                n_qubits,
                n_ancilla: circuit.num_qubits() - n_qubits.min(circuit.num_qubits()),
                cnot: count.cnot_count,
                u3: count.u3_count,
                total: count.total,
            })
        })
        .collect()
}

fn exponents(rows: &[GateRow], bound: f64) -> Vec<ExponentRow> {
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if !names.contains(&r.series.as_str()) {
            names.push(&r.series);
        }
    }
    names
        .into_iter()
        .filter_map(|name| {
            let (x, y): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.series == name && r.total > 0)
                .map(|r| (r.n_qubits as f64, r.total as f64))
                .unzip();
            if x.len() < 2 {
                return None;
            }
            let exponent = loglog_slope(&x, &y);
            Some(ExponentRow {
                series: name.to_string(),
                exponent,
                bound,
                within_bound: exponent <= bound,
            })
        })
        .collect()
}
