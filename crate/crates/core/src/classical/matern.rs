//! Matérn covariance, SPDE parameter mapping and white-noise forcing.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use statrs::function::gamma::gamma;

use super::diag::{inverse_diagonal_1d, inverse_diagonal_2d};
use super::solve::{apply_spectral_1d, apply_spectral_2d};
use super::{Family, FractionalParams, ProblemSpec};
use crate::error::{Error, Result};

/// Modified Bessel function of the second kind, `K_ν(x)` for `x > 0`,
/// from `∫₀^∞ exp(−x cosh t) cosh(νt) dt` by the trapezoidal rule.
///
/// The integrand is analytic and doubly-exponentially decaying, so the
/// trapezoidal sum converges geometrically in the step size.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k needs x > 0");
    let nu = nu.abs();
    let h: f64 = 0.02;
    // Stop once the log-integrand is ~750 below its value at t = 0.
    let mut sum = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let log_term = -x * t.cosh() + nu * t;
        let term = (-x * t.cosh()).exp() * (nu * t).cosh();
        sum += term;
        if log_term < -x - 750.0 || (term == 0.0 && t > 1.0) {
            break;
        }
        t += h;
    }
    sum * h
}

/// `c(r) = (2^{1−ν}/Γ(ν)) (√(2ν) r/ℓ)^ν K_ν(√(2ν) r/ℓ)`, with `c(0) = 1`.
pub fn matern_covariance(r: f64, nu: f64, ell: f64) -> f64 {
    let z = (2.0 * nu).sqrt() * r.abs() / ell;
    if z == 0.0 {
        return 1.0;
    }
    if z > 700.0 {
        return 0.0;
    }
    // Scaled form keeps z^ν K_ν(z) finite for small z.
    let log_pref = (1.0 - nu) * 2f64.ln() - gamma(nu).ln() + nu * z.ln();
    log_pref.exp() * bessel_k(nu, z)
}

/// `(κ, β, τ)` for smoothness `ν`, length scale `ℓ` and dimension `d`.
pub fn spde_params(nu: f64, ell: f64, d: usize) -> Result<FractionalParams> {
    if !(nu > 0.0 && ell > 0.0) || !(d == 1 || d == 2) {
        return Err(Error::Precondition(format!(
            "spde_params needs ν > 0, ℓ > 0, d ∈ {{1, 2}}; got ν={nu}, ℓ={ell}, d={d}"
        )));
    }
    let d = d as f64;
    let kappa = (2.0 * nu).sqrt() / ell;
    let beta = nu / 2.0 + d / 4.0;
    let tau2 = gamma(nu)
        / (gamma(nu + d / 2.0) * (4.0 * std::f64::consts::PI).powf(d / 2.0) * kappa.powf(2.0 * nu));
    Ok(FractionalParams {
        kappa,
        beta,
        tau: tau2.sqrt(),
    })
}

/// `ν = 2β − d/2` and `ℓ = √(2ν)/κ`.
pub fn matern_from_spde(kappa: f64, beta: f64, d: usize) -> (f64, f64) {
    let nu = 2.0 * beta - d as f64 / 2.0;
    (nu, (2.0 * nu).sqrt() / kappa)
}

/// Per-component variance of the discrete white-noise forcing on a grid of
/// `count` points: `1/(τ² count²)`.
pub fn noise_variance(count: usize, tau: f64) -> f64 {
    1.0 / (tau * tau * (count as f64).powi(2))
}

/// White-noise forcing on `n` points: `f_k ~ N(0, 1/τ²)/n`, `f_0 = 0`.
pub fn sample_white_noise(n: usize, tau: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    white_noise_grid(n, 1, tau, &mut rng)
}

/// White noise on an `m^dim` grid with zero boundary samples, divided by the
/// grid point count.
pub fn white_noise_grid<R: rand::Rng>(m: usize, dim: usize, tau: f64, rng: &mut R) -> Vec<f64> {
    let count = m.pow(dim as u32);
    let normal = Normal::new(0.0, 1.0 / tau).expect("finite standard deviation");
    (0..count)
        .map(|i| {
            let v = normal.sample(rng) / count as f64;
            let boundary = if dim == 1 {
                i == 0
            } else {
                i / m == 0 || i % m == 0
            };
            if boundary {
                0.0
            } else {
                v
            }
        })
        .collect()
}

type SolveMap = Box<dyn Fn(&[f64]) -> Result<Vec<f64>>>;

fn solve_map(spec: &ProblemSpec) -> Result<SolveMap> {
    if spec.family != Family::Fractional {
        return Err(Error::Precondition(
            "covariance needs a fractional problem".into(),
        ));
    }
    Ok(if spec.dim == 1 {
        let d = inverse_diagonal_1d(spec)?;
        Box::new(move |f: &[f64]| apply_spectral_1d(f, &d))
    } else {
        let d = inverse_diagonal_2d(spec)?;
        Box::new(move |f: &[f64]| apply_spectral_2d(f, &d))
    })
}

fn tau_of(spec: &ProblemSpec) -> Result<f64> {
    spec.params
        .map(|p| p.tau)
        .ok_or_else(|| Error::Config("fractional problem without parameters".into()))
}

/// Covariance of the discrete solution driven by [`sample_white_noise`]:
/// `σ² A A` with `A` the symmetric solve map.
pub fn covariance_matrix(spec: &ProblemSpec) -> Result<DMatrix<f64>> {
    let solve = solve_map(spec)?;
    let count = spec.forcing.len();
    let s2 = noise_variance(count, tau_of(spec)?);
    let mut a = DMatrix::<f64>::zeros(count, count);
    let mut e = vec![0.0; count];
    for j in 0..count {
        e[j] = 1.0;
        let col = solve(&e)?;
        e[j] = 0.0;
        a.set_column(j, &nalgebra::DVector::from_vec(col));
    }
    Ok(&a * &a * s2)
}

/// Row `j0` of [`covariance_matrix`] by two solves.
pub fn covariance_row(spec: &ProblemSpec, j0: usize) -> Result<Vec<f64>> {
    let solve = solve_map(spec)?;
    covariance_row_with(&*solve, spec.forcing.len(), j0, tau_of(spec)?)
}

/// Covariance row for an arbitrary symmetric solve map.
pub fn covariance_row_with(
    solve: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    count: usize,
    j0: usize,
    tau: f64,
) -> Result<Vec<f64>> {
    if j0 >= count {
        return Err(Error::Index {
            index: j0,
            len: count,
        });
    }
    let mut e = vec![0.0; count];
    e[j0] = 1.0;
    let s2 = noise_variance(count, tau);
    Ok(solve(&solve(&e)?)?.into_iter().map(|v| v * s2).collect())
}

/// Least-squares amplitude `a` minimising `‖a·row − target‖` and the relative
/// error `‖a·row − target‖ / ‖target‖`.
pub fn fit_amplitude(row: &[f64], target: &[f64]) -> (f64, f64) {
    let rr: f64 = row.iter().map(|v| v * v).sum();
    let rt: f64 = row.iter().zip(target).map(|(a, b)| a * b).sum();
    let a = if rr > 0.0 { rt / rr } else { 0.0 };
    let num: f64 = row
        .iter()
        .zip(target)
        .map(|(r, t)| (a * r - t).powi(2))
        .sum();
    let den: f64 = target.iter().map(|t| t * t).sum();
    (a, (num / den).sqrt())
}
