//! Piecewise-polynomial encodings of spectral diagonals.
//!
//! A diagonal `d(k)` is scaled into `[0, 1]`, transformed by `arcsin` and fitted
//! with piecewise polynomials. The encoding unitary then rotates an ancilla by
//! the polynomial angle so its `|1⟩` amplitude carries `sin(poly(k)) ≈ s·d(k)`.

mod comparator;
mod encode;
mod fit;
mod multinomial;

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;

pub use comparator::{build_comparator, comparator_ancillas, push_comparator};
pub use encode::{
    build_up_bivariate, build_up_univariate, encoding_scratch, push_up_bivariate,
    push_up_univariate, univariate_flag_wires, BivariateLayout, FlagMode, UnivariateLayout,
};
pub use fit::{
    eval_2d, fit_bivariate, fit_univariate, geometric_partition, target_angle, uniform_partition,
    Cell, FitReportRow, PiecewisePolynomial1D, PiecewisePolynomial2D, Segment,
};
pub use multinomial::{
    bit_mask, multinomial_angles, multinomial_angles_2d, multinomial_coefficient, subset_sum,
    subsets_up_to, Subset, SubsetAngle,
};

use crate::classical::{inverse_diagonal_1d, inverse_diagonal_2d, ProblemSpec};
use crate::error::{Error, Result};

/// Tolerance on fitted angles leaving `[0, π/2]` at fitted points.
pub const ANGLE_TOL: f64 = 1e-2;

/// Largest encoded amplitude of a bivariate diagonal. Keeping the peak away
/// from 1 keeps `arcsin` smooth where the diagonal is largest.
pub const PEAK_2D: f64 = 0.5;

fn scale_for(max: f64, peak: f64) -> Result<f64> {
    if !max.is_finite() || max < 0.0 {
        return Err(Error::Encoding(format!(
            "diagonal maximum {max} is not a finite non-negative value"
        )));
    }
    Ok(if max > 0.0 { peak / max } else { 1.0 })
}

fn check_angles(report: &[FitReportRow], angles: impl Iterator<Item = f64>) -> Result<()> {
    for a in angles {
        if !(-ANGLE_TOL..=FRAC_PI_2 + ANGLE_TOL).contains(&a) {
            let worst = report.iter().map(|r| r.max_fit_error).fold(0.0, f64::max);
            return Err(Error::Encoding(format!(
                "fitted angle {a} outside [0, π/2] (max fit error {worst:e})"
            )));
        }
    }
    Ok(())
}

/// Univariate diagonal on `k = 0..2^m` with its scale and fit.
#[derive(Clone, Debug)]
pub struct SpectralDiagonal1D {
    pub exact: Vec<f64>,
    pub scale: f64,
    pub fit: PiecewisePolynomial1D,
}

impl SpectralDiagonal1D {
    /// Fits `exact` (indexed by `k`, with `exact[0]` ignored) on `partition`,
    /// or on [`geometric_partition`] when none is given.
    pub fn fit(exact: Vec<f64>, p: usize, partition: Option<&[(usize, usize)]>) -> Result<Self> {
        let n = exact.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Precondition(format!(
                "diagonal length {n} is not a power of two ≥ 2"
            )));
        }
        let scale = scale_for(exact[1..].iter().copied().fold(0.0, f64::max), 1.0)?;
        let segments = match partition {
            Some(p) => p.to_vec(),
            None => geometric_partition(n, p)?,
        };
        if segments.first().map(|s| s.0) > Some(1) || segments.last().map(|s| s.1) != Some(n) {
            return Err(Error::Fit(format!(
                "partition {segments:?} does not cover 1..{n}"
            )));
        }
        let values = exact.clone();
        let fit = fit_univariate(&|k| values[k], scale, &segments, p)?;
        check_angles(&fit.report, (1..n).map(|k| fit.angle(k)))?;
        Ok(SpectralDiagonal1D { exact, scale, fit })
    }

    pub fn from_spec(
        spec: &ProblemSpec,
        p: usize,
        partition: Option<&[(usize, usize)]>,
    ) -> Result<Self> {
        if spec.dim != 1 {
            return Err(Error::Config(
                "univariate diagonal needs a one-dimensional problem".into(),
            ));
        }
        Self::fit(inverse_diagonal_1d(spec)?, p, partition)
    }

    pub fn num_qubits(&self) -> usize {
        self.exact.len().trailing_zeros() as usize
    }

    /// `sin(poly(k))`, the encoded `|1⟩` amplitude.
    pub fn encoded(&self, k: usize) -> f64 {
        self.fit.angle(k).sin()
    }

    /// Diagonal actually applied by the encoding, back in physical units.
    pub fn fitted_values(&self) -> Vec<f64> {
        (0..self.exact.len())
            .map(|k| self.encoded(k) / self.scale)
            .collect()
    }
}

/// Bivariate diagonal on `(k⁰, k¹) ∈ [0, 2^m)²`.
#[derive(Clone, Debug)]
pub struct SpectralDiagonal2D {
    pub exact: DMatrix<f64>,
    pub scale: f64,
    pub fit: PiecewisePolynomial2D,
}

impl SpectralDiagonal2D {
    /// Fits the cell `[0, k_split)²` and sets every other cell to zero. A split
    /// at or beyond the extent fits the whole domain as one cell.
    pub fn fit_split(exact: DMatrix<f64>, p: usize, k_split: usize) -> Result<Self> {
        let n = exact.nrows();
        if n != exact.ncols() || n < 2 || !n.is_power_of_two() {
            return Err(Error::Precondition(format!(
                "diagonal must be square with power-of-two side, got {n}"
            )));
        }
        let bounds = if k_split >= n {
            vec![0]
        } else {
            vec![0, k_split]
        };
        let cells = [bounds.clone(), bounds];
        Self::fit_cells(exact, p, cells, &|i, j| i == 0 && j == 0)
    }

    /// Fits the selected cells of a general partition.
    pub fn fit_cells(
        exact: DMatrix<f64>,
        p: usize,
        bounds: [Vec<usize>; 2],
        fitted: &dyn Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let n = exact.nrows();
        let mut max = 0.0f64;
        for a in 1..n {
            for b in 1..n {
                max = max.max(exact[(a, b)]);
            }
        }
        let scale = scale_for(max, PEAK_2D)?;
        let values = exact.clone();
        let fit = fit_bivariate(&|a, b| values[(a, b)], scale, bounds, n, p, fitted)?;
        let mut pts = Vec::new();
        for cell in fit.cells.iter().filter(|c| c.coeffs.is_some()) {
            for a in cell.lo[0].max(1)..cell.hi[0] {
                for b in cell.lo[1].max(1)..cell.hi[1] {
                    pts.push(fit.angle(a, b));
                }
            }
        }
        check_angles(&fit.report, pts.into_iter())?;
        Ok(SpectralDiagonal2D { exact, scale, fit })
    }

    pub fn from_spec(spec: &ProblemSpec, p: usize, k_split: usize) -> Result<Self> {
        if spec.dim != 2 {
            return Err(Error::Config(
                "bivariate diagonal needs a two-dimensional problem".into(),
            ));
        }
        Self::fit_split(inverse_diagonal_2d(spec)?, p, k_split)
    }

    pub fn num_qubits_per_axis(&self) -> usize {
        self.exact.nrows().trailing_zeros() as usize
    }

    pub fn encoded(&self, k0: usize, k1: usize) -> f64 {
        self.fit.angle(k0, k1).sin()
    }

    pub fn fitted_values(&self) -> DMatrix<f64> {
        let n = self.exact.nrows();
        DMatrix::from_fn(n, n, |a, b| self.encoded(a, b) / self.scale)
    }
}
