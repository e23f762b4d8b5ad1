//! Antisymmetric-extension unitary `U_R`, forward-shift incrementers and the
//! quantum sine transform.
//!
//! Standalone circuits use a fixed local layout: qubit 0 is the reflection
//! ancilla, qubits `1..n` hold the `n - 1` data bits (most significant first)
//! and any shift scratch wires follow. Callers embed them with
//! [`Circuit::append_mapped`].

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Control, GateApplication, GateKind};
use crate::qft::build_qft;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftImpl {
    /// Cascade of multi-controlled X gates.
    Mcx,
    /// Carry-chain incrementer with restorable carry ancillas.
    Ripple,
}

impl fmt::Display for ShiftImpl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShiftImpl::Mcx => "mcx",
            ShiftImpl::Ripple => "ripple",
        })
    }
}

impl FromStr for ShiftImpl {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mcx" => Ok(ShiftImpl::Mcx),
            "ripple" | "ripple-carry" | "ripplecarry" => Ok(ShiftImpl::Ripple),
            _ => Err(Error::Config(format!("unknown shift implementation '{s}'"))),
        }
    }
}

/// Scratch wires needed by an `m`-bit forward shift.
pub fn shift_ancillas(m: usize, imp: ShiftImpl) -> usize {
    match imp {
        ShiftImpl::Mcx => 0,
        ShiftImpl::Ripple if m >= 3 => m - 1,
        ShiftImpl::Ripple => 0,
    }
}

/// Appends `|k⟩ → |k+1 mod 2^m⟩` on `data` (most significant first),
/// optionally conditioned on `control`. `scratch` must hold at least
/// [`shift_ancillas`] wires in `|0⟩`; they are restored.
pub fn push_forward_shift(
    c: &mut Circuit,
    data: &[usize],
    scratch: &[usize],
    imp: ShiftImpl,
    control: Option<Control>,
) -> Result<()> {
    let m = data.len();
    if m == 0 {
        return Err(Error::Precondition(
            "forward shift needs at least one data qubit".into(),
        ));
    }
    let need = shift_ancillas(m, imp);
    if scratch.len() < need {
        return Err(Error::Layout(format!(
            "{m}-bit ripple shift needs {need} scratch qubits, got {}",
            scratch.len()
        )));
    }
    let ctl = |g: GateApplication| match control {
        Some(cq) => g.with_control(cq),
        None => g,
    };
    match imp {
        ShiftImpl::Mcx => {
            for i in 0..m {
                let cs: Vec<Control> = data[i + 1..].iter().map(|&q| Control::on(q)).collect();
                c.try_push(ctl(GateApplication::mcx(&cs, data[i])))?;
            }
        }
        ShiftImpl::Ripple => {
            // b[i] is the bit of weight 2^i.
            let b: Vec<usize> = data.iter().rev().copied().collect();
            c.try_push(ctl(GateApplication::single(GateKind::X, b[0])))?;
            if m == 1 {
                return Ok(());
            }
            if m == 2 {
                c.try_push(ctl(GateApplication::mcx(&[Control::off(b[0])], b[1])))?;
                return Ok(());
            }
            // a[i-1] carries into bit i.
            let a = &scratch[..m - 1];
            let carry = |c: &mut Circuit, i: usize| -> Result<()> {
                if i == 1 {
                    c.try_push(GateApplication::mcx(&[Control::off(b[0])], a[0]))
                } else {
                    c.try_push(GateApplication::mcx(
                        &[Control::on(a[i - 2]), Control::off(b[i - 1])],
                        a[i - 1],
                    ))
                }
            };
            carry(c, 1)?;
            c.try_push(ctl(GateApplication::cnot(a[0], b[1])))?;
            for i in 2..m {
                carry(c, i)?;
                c.try_push(ctl(GateApplication::cnot(a[i - 1], b[i])))?;
            }
            for i in (1..m).rev() {
                carry(c, i)?;
            }
        }
    }
    Ok(())
}

/// Standalone `m`-bit forward shift; scratch wires follow the data.
pub fn build_forward_shift(m: usize, imp: ShiftImpl) -> Result<Circuit> {
    let anc = shift_ancillas(m, imp);
    let mut c = Circuit::with_ancilla(m + anc, anc);
    let data: Vec<usize> = (0..m).collect();
    let scratch: Vec<usize> = (m..m + anc).collect();
    push_forward_shift(&mut c, &data, &scratch, imp, None)?;
    Ok(c)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "reflection needs n ≥ 2 qubits, got {n}"
        )));
    }
    Ok(())
}

/// `(B X) ⊗ I`.
pub fn build_u_r0(n: usize) -> Result<Circuit> {
    check_n(n)?;
    let mut c = Circuit::new(n);
    c.single(GateKind::X, 0);
    c.single(GateKind::B, 0);
    Ok(c)
}

/// `B†` on the ancilla when every data bit is `|0⟩`.
pub fn build_u_r1(n: usize) -> Result<Circuit> {
    check_n(n)?;
    let mut c = Circuit::new(n);
    let cs: Vec<Control> = (1..n).map(Control::off).collect();
    c.push(GateApplication::controlled(GateKind::Bdg, &cs, 0));
    Ok(c)
}

/// Bitwise complement of the data when the ancilla is `|1⟩`.
pub fn build_u_r2(n: usize) -> Result<Circuit> {
    check_n(n)?;
    let mut c = Circuit::new(n);
    for q in 1..n {
        c.cnot(0, q);
    }
    Ok(c)
}

/// Forward shift of the data when the ancilla is `|1⟩`.
pub fn build_u_r3(n: usize, imp: ShiftImpl) -> Result<Circuit> {
    check_n(n)?;
    let anc = shift_ancillas(n - 1, imp);
    let mut c = Circuit::with_ancilla(n + anc, anc);
    let data: Vec<usize> = (1..n).collect();
    let scratch: Vec<usize> = (n..n + anc).collect();
    push_forward_shift(&mut c, &data, &scratch, imp, Some(Control::on(0)))?;
    Ok(c)
}

#[derive(Clone, Debug)]
pub struct ReflectionCircuit {
    pub n: usize,
    pub shift_impl: ShiftImpl,
    pub circuit: Circuit,
    pub ancilla_count: usize,
}

/// `U_R = U_R3 U_R2 U_R1 U_R0` on `n` qubits plus shift scratch.
pub fn build_reflection_unitary(n: usize, imp: ShiftImpl) -> Result<ReflectionCircuit> {
    let r3 = build_u_r3(n, imp)?;
    let width = r3.num_qubits();
    let anc = width - n;
    let mut c = Circuit::with_ancilla(width, anc);
    for part in [build_u_r0(n)?, build_u_r1(n)?, build_u_r2(n)?] {
        c.append(&part.widened(width)?)?;
    }
    c.append(&r3)?;
    Ok(ReflectionCircuit {
        n,
        shift_impl: imp,
        circuit: c,
        ancilla_count: anc,
    })
}

/// Quantum sine transform: `U_R`, then `F_N` on all `n` qubits, then `U_R†`.
pub fn build_qst(n: usize, imp: ShiftImpl) -> Result<Circuit> {
    let r = build_reflection_unitary(n, imp)?;
    let width = r.circuit.num_qubits();
    let mut c = Circuit::with_ancilla(width, r.ancilla_count);
    c.append(&r.circuit)?;
    let map: Vec<usize> = (0..n).collect();
    c.append_mapped(&build_qft(n)?.circuit, &map)?;
    c.append(&r.circuit.inverse())?;
    Ok(c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalReflection {
    pub n_points: usize,
    /// `N × N/2` with entries in `{-1, 0, 1}`.
    pub matrix: DMatrix<f64>,
}

impl ClassicalReflection {
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.n_points / 2 {
            return Err(Error::Layout(format!(
                "reflection of N = {} expects {} samples, got {}",
                self.n_points,
                self.n_points / 2,
                f.len()
            )));
        }
        Ok((0..self.n_points)
            .map(|r| (0..f.len()).map(|k| self.matrix[(r, k)] * f[k]).sum())
            .collect())
    }
}

/// The antisymmetric extension matrix `R`.
pub fn build_reflection_matrix(n_points: usize) -> Result<ClassicalReflection> {
    if !n_points.is_power_of_two() || n_points < 4 {
        return Err(Error::Precondition(format!(
            "reflection needs N a power of two ≥ 4, got {n_points}"
        )));
    }
    let half = n_points / 2;
    let mut r = DMatrix::<f64>::zeros(n_points, half);
    for k in 1..half {
        r[(k, k)] = 1.0;
        r[(n_points - k, k)] = -1.0;
    }
    Ok(ClassicalReflection {
        n_points,
        matrix: r,
    })
}

/// Explicit `N × N` block-encoding matrix realised by `U_R`.
pub fn expected_reflection_matrix(n_points: usize) -> Result<DMatrix<C64>> {
    let r = build_reflection_matrix(n_points)?;
    let half = n_points / 2;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = DMatrix::<C64>::zeros(n_points, n_points);
    u[(half, 0)] = C64::new(1.0, 0.0);
    u[(0, half)] = C64::new(1.0, 0.0);
    for k in 1..half {
        for row in 0..n_points {
            u[(row, k)] = C64::new(0.0, h * r.matrix[(row, k)]);
            u[(row, half + k)] = C64::new(h * r.matrix[(row, k)].abs(), 0.0);
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::{circuit_unitary, StateVector};

    fn perm_target(c: &Circuit, m: usize, k: usize) -> usize {
        let q = c.num_qubits();
        let anc = q - m;
        let mut s = StateVector::init_basis(q, k << anc).unwrap();
        s.apply_circuit(c).unwrap();
        let (idx, a) = s
            .amplitudes()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap();
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert_eq!(idx & ((1 << anc) - 1), 0, "ancillas not restored");
        idx >> anc
    }

    #[test]
    fn forward_shift_small() {
        for imp in [ShiftImpl::Mcx, ShiftImpl::Ripple] {
            let c = build_forward_shift(3, imp).unwrap();
            assert_eq!(perm_target(&c, 3, 7), 0);
            assert_eq!(perm_target(&c, 3, 2), 3);
            for m in 1..=6 {
                let c = build_forward_shift(m, imp).unwrap();
                for k in 0..1 << m {
                    assert_eq!(
                        perm_target(&c, m, k),
                        (k + 1) % (1 << m),
                        "{imp} m={m} k={k}"
                    );
                }
            }
        }
        assert_eq!(shift_ancillas(3, ShiftImpl::Ripple), 2);
    }

    #[test]
    fn sub_unitaries() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u0 = circuit_unitary(&build_u_r0(3).unwrap()).unwrap();
        assert!((u0[(0, 0)] - C64::new(0.0, h)).norm() < 1e-12);
        assert!((u0[(0, 4)] - C64::new(h, 0.0)).norm() < 1e-12);
        assert!((u0[(4, 0)] - C64::new(0.0, -h)).norm() < 1e-12);
        assert!((u0[(4, 4)] - C64::new(h, 0.0)).norm() < 1e-12);

        let u1 = circuit_unitary(&build_u_r1(3).unwrap()).unwrap();
        assert!((u1[(0, 0)] - C64::new(h, 0.0)).norm() < 1e-12);
        assert!((u1[(0, 4)] - C64::new(h, 0.0)).norm() < 1e-12);
        assert!((u1[(4, 0)] - C64::new(0.0, -h)).norm() < 1e-12);
        assert!((u1[(4, 4)] - C64::new(0.0, h)).norm() < 1e-12);
        assert!((u1[(1, 1)] - C64::new(1.0, 0.0)).norm() < 1e-12);

        let u2 = circuit_unitary(&build_u_r2(3).unwrap()).unwrap();
        assert_eq!(u2[(0b111, 0b100)], C64::new(1.0, 0.0));
        assert_eq!(u2[(0b010, 0b010)], C64::new(1.0, 0.0));
    }

    #[test]
    fn matches_block_encoding() {
        for imp in [ShiftImpl::Mcx, ShiftImpl::Ripple] {
            for n in 2..=5 {
                let r = build_reflection_unitary(n, imp).unwrap();
                let u = circuit_unitary(&r.circuit).unwrap();
                let want = expected_reflection_matrix(1 << n).unwrap();
                let anc = r.ancilla_count;
                for i in 0..1usize << n {
                    for j in 0..1usize << n {
                        let d = (u[(i << anc, j << anc)] - want[(i, j)]).norm();
                        assert!(d < 1e-10, "{imp} n={n} ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn reflection_matrix_examples() {
        let r = build_reflection_matrix(4).unwrap();
        assert_eq!(r.apply(&[0.0, 2.5]).unwrap(), vec![0.0, 2.5, 0.0, -2.5]);
        let r = build_reflection_matrix(8).unwrap();
        assert_eq!(
            r.apply(&[0.0, 1.0, 2.0, 3.0]).unwrap(),
            vec![0.0, 1.0, 2.0, 3.0, 0.0, -3.0, -2.0, -1.0]
        );
        let rtr = r.matrix.transpose() * &r.matrix;
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j && i > 0 { 2.0 } else { 0.0 };
                assert_eq!(rtr[(i, j)], want);
            }
        }
    }

    #[test]
    fn parse_shift() {
        assert_eq!("ripple".parse::<ShiftImpl>().unwrap(), ShiftImpl::Ripple);
        assert_eq!("MCX".parse::<ShiftImpl>().unwrap(), ShiftImpl::Mcx);
        assert!("adder".parse::<ShiftImpl>().is_err());
    }
}
