//! Inhomogeneous Dirichlet data by lifting: `u = v + g` where `g` matches
//! the boundary values and `v` solves the homogeneous problem with forcing
//! `f + ∇²g`.

use super::{Family, ProblemSpec};
use crate::error::{Error, Result};

/// A smooth lift `g` and its Laplacian, both taking a point of `(0, L)^dim`.
pub struct Lifting<'a> {
    pub g: &'a dyn Fn(&[f64]) -> f64,
    pub laplacian: &'a dyn Fn(&[f64]) -> f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lifted {
    /// Homogeneous problem for `v`.
    pub spec: ProblemSpec,
    /// `g` sampled on the physical grid.
    pub g_samples: Vec<f64>,
}

impl Lifted {
    /// `u = v + g`.
    pub fn reconstruct(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.g_samples.len() {
            return Err(Error::Layout(format!(
                "{} solution samples against {} lift samples",
                v.len(),
                self.g_samples.len()
            )));
        }
        Ok(v.iter().zip(&self.g_samples).map(|(a, b)| a + b).collect())
    }
}

const BOUNDARY_TOL: f64 = 1e-9;

/// Lifts a Poisson problem with Dirichlet data `boundary` (evaluated at
/// boundary points only). `forcing` holds samples of `f` on the physical grid,
/// including boundary indices, which need not vanish.
pub fn lift_inhomogeneous(
    dim: usize,
    length: f64,
    n_ext: usize,
    forcing: &[f64],
    boundary: &dyn Fn(&[f64]) -> f64,
    lifting: &Lifting,
) -> Result<Lifted> {
    let m = n_ext / 2;
    let h = length / m as f64;
    // Boundary points: grid indices 0..=m along each axis, on the faces.
    let mut faces: Vec<Vec<f64>> = Vec::new();
    if dim == 1 {
        faces.push(vec![0.0]);
        faces.push(vec![length]);
    } else {
        for j in 0..=m {
            let t = j as f64 * h;
            faces.extend([vec![0.0, t], vec![length, t], vec![t, 0.0], vec![t, length]]);
        }
    }
    for p in &faces {
        let (g, b) = ((lifting.g)(p), boundary(p));
        if (g - b).abs() > BOUNDARY_TOL * (1.0 + b.abs()) {
            return Err(Error::Lift(format!(
                "lift g{p:?} = {g} does not match boundary value {b}"
            )));
        }
    }
    let count = m.pow(dim as u32);
    if forcing.len() != count {
        return Err(Error::Layout(format!(
            "forcing has {} samples, expected {count}",
            forcing.len()
        )));
    }
    let point = |i: usize| -> Vec<f64> {
        if dim == 1 {
            vec![i as f64 * h]
        } else {
            vec![(i / m) as f64 * h, (i % m) as f64 * h]
        }
    };
    let on_boundary = |i: usize| {
        if dim == 1 {
            i == 0
        } else {
            i / m == 0 || i.is_multiple_of(m)
        }
    };
    let mut f = Vec::with_capacity(count);
    let mut g_samples = Vec::with_capacity(count);
    for (i, fi) in forcing.iter().enumerate() {
        let x = point(i);
        g_samples.push((lifting.g)(&x));
        f.push(if on_boundary(i) {
            0.0
        } else {
            fi + (lifting.laplacian)(&x)
        });
    }
    let spec = ProblemSpec {
        family: Family::Poisson,
        dim,
        length,
        n_ext,
        params: None,
        forcing: f,
    };
    spec.validate()?;
    Ok(Lifted { spec, g_samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::problems;

    #[test]
    fn one_dimensional_lift() {
        let lifting = Lifting {
            g: &|x: &[f64]| problems::lift_1d(x[0]),
            laplacian: &|x: &[f64]| problems::lift_1d_second_derivative(x[0]),
        };
        assert!((problems::lift_1d(0.0) - 0.5).abs() < 1e-15);
        assert!((problems::lift_1d(1.0) - 1.0).abs() < 1e-15);
        // g'' by central differences.
        let x = 0.37;
        let e = 1e-4;
        let fd = (problems::lift_1d(x + e) - 2.0 * problems::lift_1d(x) + problems::lift_1d(x - e))
            / (e * e);
        assert!((fd - problems::lift_1d_second_derivative(x)).abs() < 1e-5);

        let f = vec![1.0; 8];
        let bc = |x: &[f64]| if x[0] == 0.0 { 0.5 } else { 1.0 };
        let lifted = lift_inhomogeneous(1, 1.0, 16, &f, &bc, &lifting).unwrap();
        assert_eq!(lifted.spec.forcing[0], 0.0);
        assert!((lifted.spec.forcing[3] - (1.0 + 3.0 * 3.0 / 8.0 + 3.0)).abs() < 1e-14);
        let u = lifted.reconstruct(&[0.0; 8]).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-15);

        let bad = |x: &[f64]| if x[0] == 0.0 { 0.0 } else { 1.0 };
        assert!(matches!(
            lift_inhomogeneous(1, 1.0, 16, &f, &bad, &lifting),
            Err(Error::Lift(_))
        ));
    }

    #[test]
    fn two_dimensional_lift() {
        let lifting = Lifting {
            g: &problems::lift_2d,
            laplacian: &|_: &[f64]| 8.0,
        };
        let m = 8;
        let f = vec![0.0; m * m];
        let lifted =
            lift_inhomogeneous(2, 1.0, 2 * m, &f, &problems::boundary_2d, &lifting).unwrap();
        assert_eq!(lifted.spec.forcing[m + 1], 8.0);
        assert_eq!(lifted.spec.forcing[3], 0.0);
    }

    #[test]
    fn zero_lift_is_identity() {
        let lifting = Lifting {
            g: &|_: &[f64]| 0.0,
            laplacian: &|_: &[f64]| 0.0,
        };
        let f = vec![0.0, 1.0, 2.0, 3.0];
        let lifted = lift_inhomogeneous(1, 1.0, 8, &f, &|_: &[f64]| 0.0, &lifting).unwrap();
        assert_eq!(lifted.spec.forcing, f);
        assert_eq!(lifted.g_samples, vec![0.0; 4]);
    }
}
