//! Spectral diagonals of the Dirichlet operators in the sine basis.
//!
//! Mode `k` is `sin(kπx/L)`. The solution operator is the inverse diagonal
//! `d(k) = 1 / D(k)`, with `d(0) = 0` since the zero mode never appears in an
//! antisymmetric extension.

use nalgebra::DMatrix;
use std::f64::consts::PI;

use super::{Family, FractionalParams, ProblemSpec};
use crate::error::{Error, Result};

/// `(π/L)² max(k,1)²` for `k = 0..N/2`.
pub fn diagonal_poisson_1d(n_ext: usize, length: f64) -> Vec<f64> {
    let w = (PI / length).powi(2);
    (0..n_ext / 2)
        .map(|k| w * (k.max(1) as f64).powi(2))
        .collect()
}

/// `τ (κ² + (kπ/L)²)^β` for `k = 0..N/2`.
pub fn diagonal_fractional_1d(
    n_ext: usize,
    length: f64,
    kappa: f64,
    beta: f64,
    tau: f64,
) -> Vec<f64> {
    (0..n_ext / 2)
        .map(|k| tau * (kappa * kappa + (k as f64 * PI / length).powi(2)).powf(beta))
        .collect()
}

/// Inverse eigenvalue of one mode (or mode pair) at squared wavenumber `k2`.
pub fn inverse_eigenvalue(
    family: Family,
    params: Option<&FractionalParams>,
    length: f64,
    k2: f64,
) -> f64 {
    if k2 == 0.0 {
        return 0.0;
    }
    let w = (PI / length).powi(2) * k2;
    match (family, params) {
        (Family::Poisson, _) => 1.0 / w,
        (Family::Fractional, Some(p)) => 1.0 / (p.tau * (p.kappa * p.kappa + w).powf(p.beta)),
        (Family::Fractional, None) => f64::NAN,
    }
}

/// `d(k)` for `k = 0..N/2` with `d(0) = 0`.
pub fn inverse_diagonal_1d(spec: &ProblemSpec) -> Result<Vec<f64>> {
    if spec.family == Family::Fractional && spec.params.is_none() {
        return Err(Error::Config(
            "fractional problem without parameters".into(),
        ));
    }
    Ok((0..spec.n_phys())
        .map(|k| {
            inverse_eigenvalue(
                spec.family,
                spec.params.as_ref(),
                spec.length,
                (k * k) as f64,
            )
        })
        .collect())
}

/// `d(k⁰, k¹)` on `[0, N/2)²`, zero when either wavenumber is zero.
pub fn diagonal_2d(
    family: Family,
    n_ext: usize,
    length: f64,
    params: Option<&FractionalParams>,
) -> Result<DMatrix<f64>> {
    if family == Family::Fractional && params.is_none() {
        return Err(Error::Config(
            "fractional problem without parameters".into(),
        ));
    }
    let m = n_ext / 2;
    Ok(DMatrix::from_fn(m, m, |a, b| {
        if a == 0 || b == 0 {
            0.0
        } else {
            inverse_eigenvalue(family, params, length, (a * a + b * b) as f64)
        }
    }))
}

pub fn inverse_diagonal_2d(spec: &ProblemSpec) -> Result<DMatrix<f64>> {
    diagonal_2d(spec.family, spec.n_ext, spec.length, spec.params.as_ref())
}
