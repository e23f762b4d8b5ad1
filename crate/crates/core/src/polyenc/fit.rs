//! Piecewise least-squares fits of `arcsin(s·d(k))` over integer wavenumbers.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// One fitted piece. The fit uses integer `k` in `lo..hi`, skipping `k = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub lo: usize,
    pub hi: usize,
    /// Monomial coefficients `α_j` of `Σ α_j k^j`, in absolute `k`.
    pub coeffs: Vec<f64>,
}

impl Segment {
    pub fn eval(&self, k: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * k + a)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReportRow {
    pub segment_lo: usize,
    pub segment_hi: usize,
    pub degree: usize,
    pub max_fit_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePolynomial1D {
    pub segments: Vec<Segment>,
    pub degree: usize,
    pub report: Vec<FitReportRow>,
}

impl PiecewisePolynomial1D {
    /// Index of the piece used at `k`. The first piece extends down to 0 and
    /// the last one up to the register size.
    pub fn segment_of(&self, k: usize) -> usize {
        self.segments.iter().rposition(|s| s.lo <= k).unwrap_or(0)
    }

    pub fn angle(&self, k: usize) -> f64 {
        self.segments[self.segment_of(k)].eval(k as f64)
    }

    /// Lower bounds of every piece after the first.
    pub fn thresholds(&self) -> Vec<usize> {
        self.segments[1..].iter().map(|s| s.lo).collect()
    }

    pub fn max_fit_error(&self) -> f64 {
        self.report
            .iter()
            .map(|r| r.max_fit_error)
            .fold(0.0, f64::max)
    }
}

/// One cell of a bivariate partition; `coeffs[(a, b)]` multiplies
/// `k0^a k1^b`. `None` encodes the zero polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub lo: [usize; 2],
    pub hi: [usize; 2],
    pub coeffs: Option<DMatrix<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePolynomial2D {
    /// Lower bounds of the cells along each axis, starting at 0.
    pub bounds: [Vec<usize>; 2],
    /// Exclusive upper bound on both axes.
    pub extent: usize,
    /// Row-major over `(i0, i1)` cell indices.
    pub cells: Vec<Cell>,
    pub degree: usize,
    pub report: Vec<FitReportRow>,
}

impl PiecewisePolynomial2D {
    pub fn max_fit_error(&self) -> f64 {
        self.report
            .iter()
            .map(|r| r.max_fit_error)
            .fold(0.0, f64::max)
    }

    pub fn cell_index(&self, i0: usize, i1: usize) -> usize {
        i0 * self.bounds[1].len() + i1
    }

    fn axis_cell(&self, axis: usize, k: usize) -> usize {
        self.bounds[axis].iter().rposition(|&b| b <= k).unwrap_or(0)
    }

    pub fn cell_of(&self, k0: usize, k1: usize) -> &Cell {
        &self.cells[self.cell_index(self.axis_cell(0, k0), self.axis_cell(1, k1))]
    }

    pub fn angle(&self, k0: usize, k1: usize) -> f64 {
        match &self.cell_of(k0, k1).coeffs {
            Some(a) => eval_2d(a, k0 as f64, k1 as f64),
            None => 0.0,
        }
    }

    /// Coefficients after two-dimensional differencing: summing the modified
    /// matrices of every cell `(i0', i1') ≤ (i0, i1)` gives cell `(i0, i1)`.
    pub fn differenced(&self) -> Vec<DMatrix<f64>> {
        let (n0, n1) = (self.bounds[0].len(), self.bounds[1].len());
        let p = self.degree;
        let get = |i0: usize, i1: usize| -> DMatrix<f64> {
            self.cells[self.cell_index(i0, i1)]
                .coeffs
                .clone()
                .unwrap_or_else(|| DMatrix::zeros(p + 1, p + 1))
        };
        let mut out = Vec::with_capacity(n0 * n1);
        for i0 in 0..n0 {
            for i1 in 0..n1 {
                let mut d = get(i0, i1);
                if i0 > 0 {
                    d -= get(i0 - 1, i1);
                }
                if i1 > 0 {
                    d -= get(i0, i1 - 1);
                }
                if i0 > 0 && i1 > 0 {
                    d += get(i0 - 1, i1 - 1);
                }
                out.push(d);
            }
        }
        out
    }
}

pub fn eval_2d(a: &DMatrix<f64>, k0: f64, k1: f64) -> f64 {
    let mut total = 0.0;
    for i in (0..a.nrows()).rev() {
        let row = (0..a.ncols())
            .rev()
            .fold(0.0, |acc, j| acc * k1 + a[(i, j)]);
        total = total * k0 + row;
    }
    total
}

/// Segments `lo..hi` covering `1..extent` with boundaries at powers of two.
/// Near the origin, where a power-of-two piece would hold fewer than `p + 1`
/// points, pieces of exactly `p + 1` points are used instead; those interpolate.
pub fn geometric_partition(extent: usize, p: usize) -> Result<Vec<(usize, usize)>> {
    if extent < p + 2 {
        return Err(Error::Fit(format!(
            "{} wavenumbers cannot support a degree-{p} fit",
            extent.saturating_sub(1)
        )));
    }
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut lo = 1;
    while lo < extent {
        let pow = (lo + 1).next_power_of_two();
        let mut hi = if pow - lo > p { pow } else { lo + p + 1 };
        if extent - hi.min(extent) < p + 1 {
            hi = extent;
        }
        out.push((lo, hi));
        lo = hi;
    }
    Ok(out)
}

/// `count` segments of near-equal length covering `1..extent`.
pub fn uniform_partition(extent: usize, count: usize) -> Vec<(usize, usize)> {
    let span = extent - 1;
    (0..count)
        .map(|i| (1 + span * i / count, 1 + span * (i + 1) / count))
        .filter(|(a, b)| b > a)
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Affine map `t = (k − c)/r` onto `[−1, 1]` for the points `lo..hi`.
fn local_frame(lo: usize, hi: usize) -> (f64, f64) {
    let a = lo as f64;
    let b = (hi - 1) as f64;
    let c = 0.5 * (a + b);
    let r = (0.5 * (b - a)).max(1.0);
    (c, r)
}

/// Rewrites `Σ β_j ((k − c)/r)^j` as `Σ α_i k^i`.
fn to_monomials(beta: &[f64], c: f64, r: f64) -> Vec<f64> {
    let p = beta.len() - 1;
    (0..=p)
        .map(|i| {
            (i..=p)
                .map(|j| beta[j] * r.powi(-(j as i32)) * binomial(j, i) * (-c).powi((j - i) as i32))
                .sum()
        })
        .collect()
}

const RANK_TOL: f64 = 1e-12;

fn least_squares(v: DMatrix<f64>, y: DVector<f64>) -> Result<DVector<f64>> {
    let svd = v.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin.partial_cmp(&(RANK_TOL * smax)) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Fit(format!(
            "rank-deficient Vandermonde matrix (σ_min/σ_max = {:e})",
            smin / smax
        )));
    }
    svd.solve(&y, 0.0).map_err(|e| Error::Fit(e.to_string()))
}

/// Target angle `arcsin(s·d)`, clamped into the arcsin domain against
/// rounding at the maximum.
pub fn target_angle(scale: f64, value: f64) -> f64 {
    (scale * value).clamp(-1.0, 1.0).asin()
}

/// Least-squares fit of `arcsin(s·exact(k))` of degree `p` on each segment.
/// Segments must be contiguous and ascending.
pub fn fit_univariate(
    exact: &dyn Fn(usize) -> f64,
    scale: f64,
    segments: &[(usize, usize)],
    p: usize,
) -> Result<PiecewisePolynomial1D> {
    if segments.is_empty() {
        return Err(Error::Fit("empty partition".into()));
    }
    for w in segments.windows(2) {
        if w[0].1 != w[1].0 {
            return Err(Error::Fit(format!(
                "segments {:?} and {:?} are not contiguous",
                w[0], w[1]
            )));
        }
    }
    let mut out = Vec::with_capacity(segments.len());
    let mut report = Vec::with_capacity(segments.len());
    for &(lo, hi) in segments {
        let ks: Vec<usize> = (lo.max(1)..hi).collect();
        if ks.len() < p + 1 {
            return Err(Error::Fit(format!(
                "segment {lo}..{hi} has {} points, degree {p} needs {}",
                ks.len(),
                p + 1
            )));
        }
        let (c, r) = local_frame(ks[0], hi);
        let v = DMatrix::from_fn(ks.len(), p + 1, |i, j| {
            ((ks[i] as f64 - c) / r).powi(j as i32)
        });
        let y = DVector::from_iterator(ks.len(), ks.iter().map(|&k| target_angle(scale, exact(k))));
        let beta = least_squares(v, y.clone())?;
        let seg = Segment {
            lo,
            hi,
            coeffs: to_monomials(beta.as_slice(), c, r),
        };
        let err = ks
            .iter()
            .zip(y.iter())
            .map(|(&k, t)| (seg.eval(k as f64) - t).abs())
            .fold(0.0, f64::max);
        report.push(FitReportRow {
            segment_lo: lo,
            segment_hi: hi,
            degree: p,
            max_fit_error: err,
        });
        out.push(seg);
    }
    Ok(PiecewisePolynomial1D {
        segments: out,
        degree: p,
        report,
    })
}

/// Tensor-product fit of degree `p` per axis on the cells flagged by `fitted`;
/// the other cells carry the zero polynomial. Points on either axis
/// (`k0 = 0` or `k1 = 0`) are left out of every fit.
pub fn fit_bivariate(
    exact: &dyn Fn(usize, usize) -> f64,
    scale: f64,
    bounds: [Vec<usize>; 2],
    extent: usize,
    p: usize,
    fitted: &dyn Fn(usize, usize) -> bool,
) -> Result<PiecewisePolynomial2D> {
    for b in &bounds {
        if b.first() != Some(&0)
            || b.windows(2).any(|w| w[0] >= w[1])
            || *b.last().unwrap() >= extent
        {
            return Err(Error::Fit(format!(
                "invalid cell bounds {b:?} for extent {extent}"
            )));
        }
    }
    let upper = |axis: usize, i: usize| bounds[axis].get(i + 1).copied().unwrap_or(extent);
    let mut cells = Vec::new();
    let mut report = Vec::new();
    for i0 in 0..bounds[0].len() {
        for i1 in 0..bounds[1].len() {
            let lo = [bounds[0][i0], bounds[1][i1]];
            let hi = [upper(0, i0), upper(1, i1)];
            if !fitted(i0, i1) {
                cells.push(Cell {
                    lo,
                    hi,
                    coeffs: None,
                });
                continue;
            }
            let k0s: Vec<usize> = (lo[0].max(1)..hi[0]).collect();
            let k1s: Vec<usize> = (lo[1].max(1)..hi[1]).collect();
            if k0s.len() < p + 1 || k1s.len() < p + 1 {
                return Err(Error::Fit(format!(
                    "cell {lo:?}..{hi:?} is too small for degree {p} per axis"
                )));
            }
            let (c0, r0) = local_frame(k0s[0], hi[0]);
            let (c1, r1) = local_frame(k1s[0], hi[1]);
            let pts: Vec<(usize, usize)> = k0s
                .iter()
                .flat_map(|&a| k1s.iter().map(move |&b| (a, b)))
                .collect();
            let nc = (p + 1) * (p + 1);
            let v = DMatrix::from_fn(pts.len(), nc, |row, col| {
                let (a, b) = pts[row];
                ((a as f64 - c0) / r0).powi((col / (p + 1)) as i32)
                    * ((b as f64 - c1) / r1).powi((col % (p + 1)) as i32)
            });
            let y = DVector::from_iterator(
                pts.len(),
                pts.iter().map(|&(a, b)| target_angle(scale, exact(a, b))),
            );
            let beta = least_squares(v, y.clone())?;
            // Convert each axis in turn: rows first (k0), then columns (k1).
            let mut alpha = DMatrix::<f64>::zeros(p + 1, p + 1);
            let mut tmp = DMatrix::<f64>::zeros(p + 1, p + 1);
            for j in 0..=p {
                let col: Vec<f64> = (0..=p).map(|i| beta[i * (p + 1) + j]).collect();
                for (i, v) in to_monomials(&col, c0, r0).into_iter().enumerate() {
                    tmp[(i, j)] = v;
                }
            }
            for i in 0..=p {
                let row: Vec<f64> = (0..=p).map(|j| tmp[(i, j)]).collect();
                for (j, v) in to_monomials(&row, c1, r1).into_iter().enumerate() {
                    alpha[(i, j)] = v;
                }
            }
            let err = pts
                .iter()
                .zip(y.iter())
                .map(|(&(a, b), t)| (eval_2d(&alpha, a as f64, b as f64) - t).abs())
                .fold(0.0, f64::max);
            report.push(FitReportRow {
                segment_lo: lo[0] * extent + lo[1],
                segment_hi: (hi[0] - 1) * extent + hi[1] - 1,
                degree: p,
                max_fit_error: err,
            });
            cells.push(Cell {
                lo,
                hi,
                coeffs: Some(alpha),
            });
        }
    }
    Ok(PiecewisePolynomial2D {
        bounds,
        extent,
        cells,
        degree: p,
        report,
    })
}
