//! Benchmark problems and error measurements shared by the command-line
//! driver and the acceptance tests.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::classical::lift::{lift_inhomogeneous, Lifted, Lifting};
use crate::classical::matern::{
    covariance_row_with, fit_amplitude, matern_covariance, matern_from_spde,
};
use crate::classical::problems::{self, LIFT_2D_LAPLACIAN};
use crate::classical::solve::{apply_spectral_1d, apply_spectral_2d, l2_error, solve_classical};
use crate::classical::{inverse_diagonal_1d, inverse_diagonal_2d, FractionalParams, ProblemSpec};
use crate::error::{Error, Result};
use crate::solver::{Diagonal, PreparedSolver, SolverOptions};

/// Benchmark 1D Poisson problem with `m` physical points.
pub fn poisson_1d(m: usize) -> Result<ProblemSpec> {
    let f = (0..m)
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                problems::forcing_poisson_1d(j as f64 / m as f64)
            }
        })
        .collect();
    ProblemSpec::poisson(1, 1.0, 2 * m, f)
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorPair {
    pub n: usize,
    pub p: usize,
    pub l2_error_quantum: f64,
    pub l2_error_classical: f64,
    pub success_probability: f64,
}

/// L2 errors of the quantum and classical solutions against the analytic one.
pub fn poisson_1d_errors(m: usize, opts: &SolverOptions) -> Result<ErrorPair> {
    let spec = poisson_1d(m)?;
    let exact: Vec<f64> = spec
        .axis()
        .iter()
        .map(|&x| problems::exact_poisson_1d(x))
        .collect();
    let q = PreparedSolver::new(&spec, opts.clone())?.solve(&spec.forcing)?;
    let c = solve_classical(&spec)?;
    let h = spec.spacing();
    Ok(ErrorPair {
        n: m,
        p: opts.p,
        l2_error_quantum: l2_error(&q.u, &exact, h, 1),
        l2_error_classical: l2_error(&c.u, &exact, h, 1),
        success_probability: q.success_probability,
    })
}

/// Lifted 1D problem with `u(0) = 0.5`, `u(1) = 1`.
pub fn poisson_1d_inhom(m: usize) -> Result<Lifted> {
    let f: Vec<f64> = (0..m)
        .map(|j| problems::forcing_poisson_1d(j as f64 / m as f64))
        .collect();
    let bc = |x: &[f64]| {
        if x[0] == 0.0 {
            problems::BOUNDARY_1D.0
        } else {
            problems::BOUNDARY_1D.1
        }
    };
    let lifting = Lifting {
        g: &|x: &[f64]| problems::lift_1d(x[0]),
        laplacian: &|x: &[f64]| problems::lift_1d_second_derivative(x[0]),
    };
    lift_inhomogeneous(1, 1.0, 2 * m, &f, &bc, &lifting)
}

pub fn poisson_1d_inhom_errors(m: usize, opts: &SolverOptions) -> Result<ErrorPair> {
    let lifted = poisson_1d_inhom(m)?;
    let spec = &lifted.spec;
    let exact: Vec<f64> = spec
        .axis()
        .iter()
        .map(|&x| problems::exact_poisson_1d_inhom(x))
        .collect();
    let q = PreparedSolver::new(spec, opts.clone())?.solve(&spec.forcing)?;
    let uq = lifted.reconstruct(&q.u)?;
    let uc = lifted.reconstruct(&solve_classical(spec)?.u)?;
    let h = spec.spacing();
    Ok(ErrorPair {
        n: m,
        p: opts.p,
        l2_error_quantum: l2_error(&uq, &exact, h, 1),
        l2_error_classical: l2_error(&uc, &exact, h, 1),
        success_probability: q.success_probability,
    })
}

/// Lifted 2D Poisson problem on an `m × m` grid.
pub fn poisson_2d(m: usize) -> Result<Lifted> {
    let h = 1.0 / m as f64;
    let f: Vec<f64> = (0..m * m)
        .map(|i| problems::forcing_poisson_2d(&[(i / m) as f64 * h, (i % m) as f64 * h]))
        .collect();
    let lifting = Lifting {
        g: &problems::lift_2d,
        laplacian: &|_: &[f64]| LIFT_2D_LAPLACIAN,
    };
    lift_inhomogeneous(2, 1.0, 2 * m, &f, &problems::boundary_2d, &lifting)
}

/// Classical 2D Poisson solution on a `fine × fine` grid, including the lift.
pub fn poisson_2d_reference(fine: usize) -> Result<Vec<f64>> {
    let lifted = poisson_2d(fine)?;
    lifted.reconstruct(&solve_classical(&lifted.spec)?.u)
}

/// Samples a fine-grid field at the points of an `m × m` grid.
pub fn restrict_2d(fine: &[f64], n_fine: usize, m: usize) -> Result<Vec<f64>> {
    if !n_fine.is_multiple_of(m) || fine.len() != n_fine * n_fine {
        return Err(Error::Layout(format!(
            "cannot sample a {n_fine}² grid onto {m}²"
        )));
    }
    let r = n_fine / m;
    Ok((0..m * m)
        .map(|i| fine[(i / m) * r * n_fine + (i % m) * r])
        .collect())
}

/// L2 errors of the 2D quantum and classical solutions against `reference`.
pub fn poisson_2d_errors(
    m: usize,
    opts: &SolverOptions,
    reference: &[f64],
    n_fine: usize,
) -> Result<ErrorPair> {
    let lifted = poisson_2d(m)?;
    let spec = &lifted.spec;
    let want = restrict_2d(reference, n_fine, m)?;
    let q = PreparedSolver::new(spec, opts.clone())?.solve(&spec.forcing)?;
    let uq = lifted.reconstruct(&q.u)?;
    let uc = lifted.reconstruct(&solve_classical(spec)?.u)?;
    let h = spec.spacing();
    Ok(ErrorPair {
        n: m,
        p: opts.p,
        l2_error_quantum: l2_error(&uq, &want, h, 2),
        l2_error_classical: l2_error(&uc, &want, h, 2),
        success_probability: q.success_probability,
    })
}

/// Central grid index: `M/2` in 1D, `(M/2, M/2)` in 2D.
pub fn center_index(m: usize, dim: usize) -> usize {
    if dim == 1 {
        m / 2
    } else {
        (m / 2) * m + m / 2
    }
}

/// Matérn covariance between the grid centre and every grid point.
pub fn matern_target(m: usize, dim: usize, nu: f64, ell: f64) -> Vec<f64> {
    let h = 1.0 / m as f64;
    let c = (m / 2) as f64 * h;
    (0..m.pow(dim as u32))
        .map(|i| {
            let r = if dim == 1 {
                (i as f64 * h - c).abs()
            } else {
                let (a, b) = ((i / m) as f64 * h - c, (i % m) as f64 * h - c);
                a.hypot(b)
            };
            matern_covariance(r, nu, ell)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceComparison {
    pub n: usize,
    pub beta: f64,
    pub nu: f64,
    pub amplitude: f64,
    pub rel_error: f64,
}

fn fractional(dim: usize, m: usize, params: FractionalParams) -> Result<ProblemSpec> {
    ProblemSpec::fractional(dim, 1.0, 2 * m, params, vec![0.0; m.pow(dim as u32)])
}

/// Central covariance row of the discrete solution with the exact diagonal.
pub fn classical_covariance_row(
    dim: usize,
    m: usize,
    params: FractionalParams,
) -> Result<Vec<f64>> {
    let spec = fractional(dim, m, params)?;
    let count = spec.forcing.len();
    if dim == 1 {
        let d = inverse_diagonal_1d(&spec)?;
        covariance_row_with(
            &|f: &[f64]| apply_spectral_1d(f, &d),
            count,
            center_index(m, 1),
            params.tau,
        )
    } else {
        let d = inverse_diagonal_2d(&spec)?;
        covariance_row_with(
            &|f: &[f64]| apply_spectral_2d(f, &d),
            count,
            center_index(m, 2),
            params.tau,
        )
    }
}

/// Central covariance row of the quantum solution map (two circuit solves).
pub fn quantum_covariance_row(
    dim: usize,
    m: usize,
    params: FractionalParams,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    let spec = fractional(dim, m, params)?;
    let solver = PreparedSolver::new(&spec, opts.clone())?;
    covariance_row_with(
        &|f: &[f64]| solver.solve(f).map(|r| r.u),
        spec.forcing.len(),
        center_index(m, dim),
        params.tau,
    )
}

/// Compares a central covariance row with the Matérn closed form after a
/// least-squares amplitude fit.
pub fn compare_with_matern(
    row: &[f64],
    dim: usize,
    m: usize,
    params: FractionalParams,
) -> CovarianceComparison {
    let (nu, ell) = matern_from_spde(params.kappa, params.beta, dim);
    let target = matern_target(m, dim, nu, ell);
    let (amplitude, rel_error) = fit_amplitude(row, &target);
    CovarianceComparison {
        n: m,
        beta: params.beta,
        nu,
        amplitude,
        rel_error,
    }
}

/// Empirical covariance `(1/n) Σ u uᵀ` of zero-mean samples.
pub fn empirical_covariance(samples: &[Vec<f64>]) -> DMatrix<f64> {
    let n = samples[0].len();
    let mut c = DMatrix::<f64>::zeros(n, n);
    for s in samples {
        let v = nalgebra::DVector::from_column_slice(s);
        c.ger(1.0, &v, &v, 1.0);
    }
    c / samples.len() as f64
}

/// Mean squared second difference, a roughness measure.
pub fn roughness(u: &[f64]) -> f64 {
    let n = u.len();
    (1..n - 1)
        .map(|i| (u[i + 1] - 2.0 * u[i] + u[i - 1]).powi(2))
        .sum::<f64>()
        / (n - 2) as f64
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Fitted diagonal of a prepared solver, for reports.
pub fn fit_report(diag: &Diagonal) -> Vec<crate::polyenc::FitReportRow> {
    match diag {
        Diagonal::One(d) => d.fit.report.clone(),
        Diagonal::Two(d) => d.fit.report.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [2.0, 4.0, 8.0, 16.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(3)).collect();
        assert!((loglog_slope(&x, &y) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn restriction_picks_coarse_points() {
        let fine: Vec<f64> = (0..16).map(|i| i as f64).collect();
        assert_eq!(restrict_2d(&fine, 4, 2).unwrap(), vec![0.0, 2.0, 8.0, 10.0]);
        assert!(restrict_2d(&fine, 4, 3).is_err());
    }

    #[test]
    fn lifted_2d_boundary_values() {
        let lifted = poisson_2d(8).unwrap();
        let u = lifted.reconstruct(&vec![0.0; 64]).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-15);
        assert!((u[3] - (0.5 + 2.5 * (3.0f64 / 8.0).powi(2))).abs() < 1e-14);
    }

    #[test]
    fn roughness_of_a_line_is_zero() {
        assert_eq!(roughness(&[0.0, 1.0, 2.0, 3.0]), 0.0);
    }
}
