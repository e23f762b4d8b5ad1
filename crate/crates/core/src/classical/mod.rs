//! Classical spectral reference: antisymmetric extension, sine-transform
//! solves, spectral diagonals, boundary lifting and Matérn covariances.

pub mod diag;
pub mod lift;
pub mod matern;
pub mod problems;
pub mod solve;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use diag::{
    diagonal_2d, diagonal_fractional_1d, diagonal_poisson_1d, inverse_diagonal_1d,
    inverse_diagonal_2d,
};
pub use lift::{lift_inhomogeneous, Lifted, Lifting};
pub use matern::{
    bessel_k, covariance_matrix, covariance_row, matern_covariance, sample_white_noise, spde_params,
};
pub use solve::{
    apply_spectral_1d, apply_spectral_2d, dst1, extend_antisymmetric, l2_error, solve_classical,
    solve_extended_1d, SpectralSolution,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Poisson,
    Fractional,
}

/// Coefficients of `(κ² − ∇²)^β u = f / τ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalParams {
    pub kappa: f64,
    pub beta: f64,
    pub tau: f64,
}

/// A homogeneous Dirichlet problem on `(0, L)^dim`.
///
/// `n_ext` counts extended-domain points per axis; the physical grid holds
/// `n_ext / 2` points per axis at `x_j = j L / (n_ext / 2)`, the first being
/// the boundary. 2D forcing is row-major with `x0` the slow index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub family: Family,
    pub dim: usize,
    pub length: f64,
    pub n_ext: usize,
    pub params: Option<FractionalParams>,
    pub forcing: Vec<f64>,
}

impl ProblemSpec {
    pub fn poisson(dim: usize, length: f64, n_ext: usize, forcing: Vec<f64>) -> Result<Self> {
        let s = ProblemSpec {
            family: Family::Poisson,
            dim,
            length,
            n_ext,
            params: None,
            forcing,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn fractional(
        dim: usize,
        length: f64,
        n_ext: usize,
        params: FractionalParams,
        forcing: Vec<f64>,
    ) -> Result<Self> {
        let s = ProblemSpec {
            family: Family::Fractional,
            dim,
            length,
            n_ext,
            params: Some(params),
            forcing,
        };
        s.validate()?;
        Ok(s)
    }

    /// Physical points per axis.
    pub fn n_phys(&self) -> usize {
        self.n_ext / 2
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n_phys() as f64
    }

    /// Grid coordinates along one axis.
    pub fn axis(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_phys()).map(|j| j as f64 * h).collect()
    }

    pub fn with_forcing(&self, forcing: Vec<f64>) -> Result<Self> {
        let s = ProblemSpec {
            forcing,
            ..self.clone()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dim == 1 || self.dim == 2) {
            return Err(Error::Config(format!(
                "dimension {} not supported",
                self.dim
            )));
        }
        if !self.n_ext.is_power_of_two() || self.n_ext < 4 {
            return Err(Error::Config(format!(
                "extended grid size {} must be a power of two ≥ 4",
                self.n_ext
            )));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Config(format!(
                "domain length {} must be positive",
                self.length
            )));
        }
        let m = self.n_phys();
        let want = m.pow(self.dim as u32);
        if self.forcing.len() != want {
            return Err(Error::Layout(format!(
                "forcing has {} samples, expected {want}",
                self.forcing.len()
            )));
        }
        match (self.family, &self.params) {
            (Family::Fractional, None) => {
                return Err(Error::Config("fractional problem without κ, β, τ".into()))
            }
            (Family::Fractional, Some(p)) if !(p.kappa >= 0.0 && p.tau > 0.0 && p.beta > 0.0) => {
                return Err(Error::Config(format!(
                    "invalid fractional parameters {p:?}"
                )))
            }
            _ => {}
        }
        let boundary_nonzero = if self.dim == 1 {
            self.forcing[0] != 0.0
        } else {
            (0..m).any(|j| self.forcing[j] != 0.0 || self.forcing[j * m] != 0.0)
        };
        if boundary_nonzero {
            return Err(Error::Precondition(
                "forcing must vanish at boundary grid points of a homogeneous problem".into(),
            ));
        }
        Ok(())
    }
}
