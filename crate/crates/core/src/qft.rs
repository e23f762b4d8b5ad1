//! Quantum Fourier transform circuits and the dense DFT matrix.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Control, GateApplication, GateKind};

#[derive(Clone, Debug)]
pub struct QftCircuit {
    pub n: usize,
    pub include_swaps: bool,
    pub circuit: Circuit,
}

/// QFT on `n` qubits: unitary `(1/√N) ω^{jk}` with `ω = e^{2πi/N}`.
pub fn build_qft(n: usize) -> Result<QftCircuit> {
    build_qft_with(n, true)
}

/// QFT, optionally without the final bit-reversal swaps.
pub fn build_qft_with(n: usize, include_swaps: bool) -> Result<QftCircuit> {
    if n == 0 {
        return Err(Error::Precondition("QFT needs at least one qubit".into()));
    }
    let mut c = Circuit::new(n);
    for j in 0..n {
        c.single(GateKind::H, j);
        for l in 2..=(n - j) {
            c.push(GateApplication::controlled(
                GateKind::p(l as u32),
                &[Control::on(j + l - 1)],
                j,
            ));
        }
    }
    if include_swaps {
        for j in 0..n / 2 {
            c.push(GateApplication::swap(j, n - 1 - j));
        }
    }
    Ok(QftCircuit {
        n,
        include_swaps,
        circuit: c,
    })
}

/// Adjoint of [`build_qft`].
pub fn build_qft_inverse(n: usize) -> Result<QftCircuit> {
    let q = build_qft(n)?;
    Ok(QftCircuit {
        circuit: q.circuit.inverse(),
        ..q
    })
}

/// Unitary DFT matrix `(1/√N) ω_N^{jk}`.
pub fn dft_matrix(n_points: usize) -> Result<DMatrix<C64>> {
    if !n_points.is_power_of_two() {
        return Err(Error::Precondition(format!(
            "{n_points} is not a power of two"
        )));
    }
    let scale = 1.0 / (n_points as f64).sqrt();
    Ok(DMatrix::from_fn(n_points, n_points, |j, k| {
        // Reduce the exponent first: ω^{jk} = ω^{jk mod N}.
        let e = (j * k) % n_points;
        C64::from_polar(scale, 2.0 * PI * e as f64 / n_points as f64)
    }))
}
