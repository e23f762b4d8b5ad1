//! Sine-transform solves on the physical grid.
//!
//! With `M = N/2` physical points the orthonormal type-I sine transform is
//! `S_{jk} = √(2/M) sin(π j k / M)`; row and column 0 vanish, and `S` is an
//! involution on indices `1..M`. A spectral solve is `u = S d S f`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use super::diag::{inverse_diagonal_1d, inverse_diagonal_2d};
use super::ProblemSpec;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSolution {
    /// Solution on the physical grid (row-major in 2D).
    pub u: Vec<f64>,
    /// Unitary DFT of the antisymmetrically extended solution.
    pub fourier_coeffs: Vec<C64>,
}

/// `(0, f_1, …, f_{M-1}, 0, −f_{M-1}, …, −f_1)`.
pub fn extend_antisymmetric(f: &[f64]) -> Result<Vec<f64>> {
    if f.is_empty() {
        return Err(Error::Precondition("empty grid vector".into()));
    }
    if f[0] != 0.0 {
        return Err(Error::Precondition(format!(
            "boundary sample must be zero, got {}",
            f[0]
        )));
    }
    let m = f.len();
    let mut e = vec![0.0; 2 * m];
    for j in 1..m {
        e[j] = f[j];
        e[2 * m - j] = -f[j];
    }
    Ok(e)
}

/// Planned orthonormal DST-I on `M` points, computed through a length-`2M` FFT.
pub struct Dst1 {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Dst1 {
    pub fn new(m: usize) -> Self {
        Dst1 {
            m,
            fft: FftPlanner::new().plan_fft_forward(2 * m),
        }
    }

    /// `out = S f`; `f[0]` is ignored.
    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        let m = self.m;
        let mut buf = vec![C64::new(0.0, 0.0); 2 * m];
        for j in 1..m {
            buf[j] = C64::new(f[j], 0.0);
            buf[2 * m - j] = C64::new(-f[j], 0.0);
        }
        self.fft.process(&mut buf);
        // FFT(Rf)_k = −2i Σ_j f_j sin(πjk/M)
        let scale = (2.0 / m as f64).sqrt() / 2.0;
        out[0] = 0.0;
        for k in 1..m {
            out[k] = -buf[k].im * scale;
        }
    }
}

/// Orthonormal DST-I of `f` (index 0 is the boundary and maps to 0).
pub fn dst1(f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    Dst1::new(f.len()).apply(f, &mut out);
    out
}

/// `S diag(dinv) S f`.
pub fn apply_spectral_1d(f: &[f64], dinv: &[f64]) -> Result<Vec<f64>> {
    if f.len() != dinv.len() {
        return Err(Error::Layout(format!(
            "{} samples against a diagonal of {}",
            f.len(),
            dinv.len()
        )));
    }
    let t = Dst1::new(f.len());
    let mut hat = vec![0.0; f.len()];
    t.apply(f, &mut hat);
    for (h, d) in hat.iter_mut().zip(dinv) {
        *h *= d;
    }
    let mut u = vec![0.0; f.len()];
    t.apply(&hat, &mut u);
    Ok(u)
}

fn dst_2d(t: &Dst1, f: &mut [f64], m: usize) {
    let mut tmp = vec![0.0; m];
    let mut col = vec![0.0; m];
    for row in f.chunks_mut(m) {
        t.apply(row, &mut tmp);
        row.copy_from_slice(&tmp);
    }
    for c in 0..m {
        for r in 0..m {
            col[r] = f[r * m + c];
        }
        t.apply(&col, &mut tmp);
        for r in 0..m {
            f[r * m + c] = tmp[r];
        }
    }
}

/// `(S⊗S) diag(dinv) (S⊗S) f` on a row-major `M×M` grid; `dinv[(k⁰, k¹)]`.
pub fn apply_spectral_2d(f: &[f64], dinv: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = dinv.nrows();
    if dinv.ncols() != m || f.len() != m * m {
        return Err(Error::Layout(format!(
            "{} samples against a {}×{} diagonal",
            f.len(),
            dinv.nrows(),
            dinv.ncols()
        )));
    }
    let t = Dst1::new(m);
    let mut g = f.to_vec();
    dst_2d(&t, &mut g, m);
    for a in 0..m {
        for b in 0..m {
            g[a * m + b] *= dinv[(a, b)];
        }
    }
    dst_2d(&t, &mut g, m);
    Ok(g)
}

/// Solve through the full extended transform `F† D_E⁻¹ F R f`, restricted
/// to the physical grid. `dinv` is indexed by wavenumber `0..M`.
pub fn solve_extended_1d(f: &[f64], dinv: &[f64]) -> Result<Vec<f64>> {
    let m = f.len();
    let n = 2 * m;
    let mut e: Vec<C64> = extend_antisymmetric(f)?
        .into_iter()
        .map(|v| C64::new(v, 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut e);
    for (k, v) in e.iter_mut().enumerate() {
        let kk = k.min(n - k);
        *v *= if kk < m { dinv[kk] } else { 0.0 };
    }
    planner.plan_fft_inverse(n).process(&mut e);
    Ok(e[..m].iter().map(|v| v.re / n as f64).collect())
}

fn fourier_of_extension(u: &[f64], m: usize, dim: usize) -> Vec<C64> {
    let n = 2 * m;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ext_line = |line: &[f64]| -> Vec<C64> {
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 1..m {
            e[j] = C64::new(line[j], 0.0);
            e[n - j] = C64::new(-line[j], 0.0);
        }
        e
    };
    let norm = 1.0 / (n as f64).sqrt();
    if dim == 1 {
        let mut e = ext_line(u);
        fft.process(&mut e);
        return e.into_iter().map(|z| z * norm).collect();
    }
    // Odd extension along both axes, then a 2D DFT.
    let mut grid = vec![C64::new(0.0, 0.0); n * n];
    for a in 1..m {
        let row = ext_line(&u[a * m..(a + 1) * m]);
        for b in 0..n {
            grid[a * n + b] = row[b];
            grid[(n - a) * n + b] = -row[b];
        }
    }
    for row in grid.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![C64::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            col[r] = grid[r * n + c];
        }
        fft.process(&mut col);
        for r in 0..n {
            grid[r * n + c] = col[r] * norm * norm;
        }
    }
    grid
}

/// Classical spectral solve with the exact inverse diagonal.
pub fn solve_classical(spec: &ProblemSpec) -> Result<SpectralSolution> {
    spec.validate()?;
    let m = spec.n_phys();
    let u = if spec.dim == 1 {
        apply_spectral_1d(&spec.forcing, &inverse_diagonal_1d(spec)?)?
    } else {
        apply_spectral_2d(&spec.forcing, &inverse_diagonal_2d(spec)?)?
    };
    let fourier_coeffs = fourier_of_extension(&u, m, spec.dim);
    Ok(SpectralSolution { u, fourier_coeffs })
}

/// Discrete L2 norm of `a − b` with cell measure `h^dim`.
pub fn l2_error(a: &[f64], b: &[f64], h: f64, dim: usize) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    (h.powi(dim as i32) * s).sqrt()
}
