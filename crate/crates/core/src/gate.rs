//! Gate kinds used by the solver circuits and their defining matrices.
//!
//! A [`GateApplication`] pairs a [`GateKind`] with its target qubit(s) and an
//! arbitrary list of controls. Each control carries a polarity: a filled
//! control fires on `|1⟩`, an open control fires on `|0⟩`. CNOT, Toffoli and
//! MCX are all `X` with one, two or many controls.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Row-major 2×2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    S,
    Sdg,
    /// `diag(1, e^{iλ})`. The QFT phase `P_l` is `Phase(2π / 2^l)`.
    Phase(f64),
    /// `exp(-i θ Y / 2)`.
    Ry(f64),
    U3 {
        theta: f64,
        phi: f64,
        lambda: f64,
    },
    /// `B = H·S`.
    B,
    Bdg,
    /// Arbitrary single-qubit unitary.
    Unitary(Mat2),
    /// Two-target exchange.
    Swap,
}

impl GateKind {
    /// The controlled-phase kind `P_l = diag(1, e^{2πi/2^l})`.
    pub fn p(l: u32) -> Self {
        GateKind::Phase(2.0 * PI / f64::powi(2.0, l as i32))
    }

    pub fn num_targets(&self) -> usize {
        match self {
            GateKind::Swap => 2,
            _ => 1,
        }
    }

    /// Defining matrix of a single-qubit kind; `None` for `Swap`.
    pub fn matrix(&self) -> Option<Mat2> {
        let h = FRAC_1_SQRT_2;
        let m = match *self {
            GateKind::H => [
                [C64::new(h, 0.0), C64::new(h, 0.0)],
                [C64::new(h, 0.0), C64::new(-h, 0.0)],
            ],
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::S => [[ONE, ZERO], [ZERO, I]],
            GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
            GateKind::Phase(lambda) => [[ONE, ZERO], [ZERO, C64::from_polar(1.0, lambda)]],
            GateKind::Ry(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                [
                    [C64::new(c, 0.0), C64::new(-s, 0.0)],
                    [C64::new(s, 0.0), C64::new(c, 0.0)],
                ]
            }
            GateKind::U3 { theta, phi, lambda } => u3_matrix(theta, phi, lambda),
            // H·S = (1/√2)[[1, i], [1, -i]]
            GateKind::B => [
                [C64::new(h, 0.0), C64::new(0.0, h)],
                [C64::new(h, 0.0), C64::new(0.0, -h)],
            ],
            GateKind::Bdg => [
                [C64::new(h, 0.0), C64::new(h, 0.0)],
                [C64::new(0.0, -h), C64::new(0.0, h)],
            ],
            GateKind::Unitary(m) => m,
            GateKind::Swap => return None,
        };
        Some(m)
    }

    pub fn inverse(&self) -> Self {
        match *self {
            GateKind::H => GateKind::H,
            GateKind::X => GateKind::X,
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::Phase(l) => GateKind::Phase(-l),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::U3 { theta, phi, lambda } => GateKind::U3 {
                theta: -theta,
                phi: -lambda,
                lambda: -phi,
            },
            GateKind::B => GateKind::Bdg,
            GateKind::Bdg => GateKind::B,
            GateKind::Unitary(m) => GateKind::Unitary(adjoint(&m)),
            GateKind::Swap => GateKind::Swap,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::Phase(_) => "p",
            GateKind::Ry(_) => "ry",
            GateKind::U3 { .. } => "u3",
            GateKind::B => "b",
            GateKind::Bdg => "bdg",
            GateKind::Unitary(_) => "unitary",
            GateKind::Swap => "swap",
        }
    }
}

/// `U3(θ, φ, λ)` in the `{CNOT, U3}` basis convention.
pub fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), -C64::from_polar(s, lambda)],
        [C64::from_polar(s, phi), C64::from_polar(c, phi + lambda)],
    ]
}

pub fn adjoint(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

pub fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Control qubit with polarity: `on == true` fires on `|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub on: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Control { qubit, on: true }
    }

    pub fn off(qubit: usize) -> Self {
        Control { qubit, on: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateApplication {
    pub kind: GateKind,
    pub targets: SmallVec<[usize; 2]>,
    pub controls: SmallVec<[Control; 4]>,
}

impl GateApplication {
    pub fn single(kind: GateKind, target: usize) -> Self {
        GateApplication {
            kind,
            targets: smallvec![target],
            controls: SmallVec::new(),
        }
    }

    pub fn controlled(kind: GateKind, controls: &[Control], target: usize) -> Self {
        GateApplication {
            kind,
            targets: smallvec![target],
            controls: SmallVec::from_slice(controls),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::controlled(GateKind::X, &[Control::on(control)], target)
    }

    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Self {
        Self::controlled(GateKind::X, &[Control::on(c0), Control::on(c1)], target)
    }

    /// X on `target` iff every control matches its polarity.
    pub fn mcx(controls: &[Control], target: usize) -> Self {
        Self::controlled(GateKind::X, controls, target)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        GateApplication {
            kind: GateKind::Swap,
            targets: smallvec![a, b],
            controls: SmallVec::new(),
        }
    }

    pub fn u3(theta: f64, phi: f64, lambda: f64, target: usize) -> Self {
        Self::single(GateKind::U3 { theta, phi, lambda }, target)
    }

    pub fn with_control(mut self, control: Control) -> Self {
        self.controls.push(control);
        self
    }

    pub fn inverse(&self) -> Self {
        GateApplication {
            kind: self.kind.inverse(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    /// True for a plain CNOT (X with one `|1⟩` control).
    pub fn is_cnot(&self) -> bool {
        matches!(self.kind, GateKind::X) && self.controls.len() == 1 && self.controls[0].on
    }

    /// True for an uncontrolled U3.
    pub fn is_u3(&self) -> bool {
        matches!(self.kind, GateKind::U3 { .. }) && self.controls.is_empty()
    }

    /// All qubits touched by this gate.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets
            .iter()
            .copied()
            .chain(self.controls.iter().map(|c| c.qubit))
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.num_targets() {
            return Err(Error::Layout(format!(
                "{} expects {} target(s), got {}",
                self.kind.name(),
                self.kind.num_targets(),
                self.targets.len()
            )));
        }
        let mut seen: SmallVec<[usize; 8]> = SmallVec::new();
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(Error::Layout(format!(
                    "qubit {q} outside a {num_qubits}-qubit register"
                )));
            }
            if seen.contains(&q) {
                return Err(Error::Layout(format!(
                    "qubit {q} used twice in one {} gate",
                    self.kind.name()
                )));
            }
            seen.push(q);
        }
        Ok(())
    }
}
