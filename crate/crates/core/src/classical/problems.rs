//! Closed-form data of the benchmark problems on the unit interval / square.

use std::f64::consts::PI;

/// `f(x) = 100 cos(2πx) cos(5πx)`.
pub fn forcing_poisson_1d(x: f64) -> f64 {
    100.0 * (2.0 * PI * x).cos() * (5.0 * PI * x).cos()
}

/// Solution of `−u'' = f` with `u(0) = u(1) = 0`.
pub fn exact_poisson_1d(x: f64) -> f64 {
    100.0 * (-58.0 + 116.0 * x + 49.0 * (3.0 * PI * x).cos() + 9.0 * (7.0 * PI * x).cos())
        / (882.0 * PI * PI)
}

/// Solution with `u(0) = 0.5`, `u(1) = 1`.
pub fn exact_poisson_1d_inhom(x: f64) -> f64 {
    0.5 * (x + 1.0) + exact_poisson_1d(x)
}

pub const BOUNDARY_1D: (f64, f64) = (0.5, 1.0);

/// `g(x) = −0.5 (x − 1)³ + x³`.
pub fn lift_1d(x: f64) -> f64 {
    -0.5 * (x - 1.0).powi(3) + x.powi(3)
}

/// `g''(x) = 3x + 3`.
pub fn lift_1d_second_derivative(x: f64) -> f64 {
    3.0 * x + 3.0
}

/// 2D forcing for `−∇²u = f`.
pub fn forcing_poisson_2d(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    13.0 * PI * PI * (2.0 * PI * a).sin() * (3.0 * PI * b).sin()
        + 17.0 * PI * PI * (PI * a).sin() * (4.0 * PI * b).sin()
        - 9.0 * a
        - 15.0 * b
}

/// `g = (3x₀² + 5x₁² + 1) / 2`, with `∇²g = 8`.
pub fn lift_2d(x: &[f64]) -> f64 {
    0.5 * (3.0 * x[0] * x[0] + 5.0 * x[1] * x[1] + 1.0)
}

pub const LIFT_2D_LAPLACIAN: f64 = 8.0;

/// Dirichlet data on the unit square's edges.
pub fn boundary_2d(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    if a == 0.0 {
        0.5 + 2.5 * b * b
    } else if a == 1.0 {
        2.0 + 2.5 * b * b
    } else if b == 0.0 {
        0.5 + 1.5 * a * a
    } else {
        3.0 + 1.5 * a * a
    }
}
