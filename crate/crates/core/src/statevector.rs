//! Dense state-vector simulator.
//!
//! Qubit 0 is the most significant bit of the basis index, so a register
//! holding `|k_0 k_1 … k_{n-1}⟩` sits at index `Σ k_j 2^{n-1-j}`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use smallvec::SmallVec;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{GateApplication, GateKind, Mat2};

/// Largest register accepted by [`circuit_unitary`].
pub const MAX_UNITARY_QUBITS: usize = 12;

/// Largest register the simulator will allocate (2^30 amplitudes = 16 GiB).
pub const MAX_STATE_QUBITS: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Computational basis state `|k⟩` on `q` qubits.
    pub fn init_basis(q: usize, k: usize) -> Result<Self> {
        check_width(q)?;
        let len = 1usize << q;
        if k >= len {
            return Err(Error::Index { index: k, len });
        }
        let mut amps = vec![C64::new(0.0, 0.0); len];
        amps[k] = C64::new(1.0, 0.0);
        Ok(StateVector {
            num_qubits: q,
            amps,
        })
    }

    /// Normalised copy of `values`, returned with the norm that was divided out.
    pub fn load_amplitudes(q: usize, values: &[C64]) -> Result<(Self, f64)> {
        check_width(q)?;
        if values.len() != 1usize << q {
            return Err(Error::Layout(format!(
                "{} amplitudes supplied for a {q}-qubit register",
                values.len()
            )));
        }
        let norm = values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Degenerate(format!(
                "cannot normalise a vector of norm {norm}"
            )));
        }
        let amps = values.iter().map(|v| v / norm).collect();
        Ok((
            StateVector {
                num_qubits: q,
                amps,
            },
            norm,
        ))
    }

    /// Wraps raw amplitudes without normalising.
    pub fn from_amplitudes(q: usize, amps: Vec<C64>) -> Result<Self> {
        check_width(q)?;
        if amps.len() != 1usize << q {
            return Err(Error::Layout(format!(
                "{} amplitudes supplied for a {q}-qubit register",
                amps.len()
            )));
        }
        Ok(StateVector {
            num_qubits: q,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply_gate(&mut self, gate: &GateApplication) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::Layout(format!(
                "{}-qubit circuit applied to a {}-qubit state",
                circuit.num_qubits(),
                self.num_qubits
            )));
        }
        for g in circuit.gates() {
            self.apply_unchecked(g);
        }
        Ok(())
    }

    fn bit(&self, qubit: usize) -> usize {
        1usize << (self.num_qubits - 1 - qubit)
    }

    fn apply_unchecked(&mut self, gate: &GateApplication) {
        let mut fixed: SmallVec<[usize; 12]> = SmallVec::new();
        let mut ctrl_value = 0usize;
        for c in &gate.controls {
            let b = self.bit(c.qubit);
            fixed.push(b);
            if c.on {
                ctrl_value |= b;
            }
        }
        for &t in &gate.targets {
            fixed.push(self.bit(t));
        }
        fixed.sort_unstable();
        let count = self.amps.len() >> fixed.len();
        let scatter = Scatter::new(&fixed);

        match gate.kind {
            GateKind::Swap => {
                let ba = self.bit(gate.targets[0]);
                let bb = self.bit(gate.targets[1]);
                for base in 0..count {
                    let i = scatter.deposit(base) | ctrl_value;
                    self.amps.swap(i | ba, i | bb);
                }
            }
            GateKind::X => {
                let bt = self.bit(gate.targets[0]);
                for base in 0..count {
                    let i = scatter.deposit(base) | ctrl_value;
                    self.amps.swap(i, i | bt);
                }
            }
            GateKind::S | GateKind::Sdg | GateKind::Phase(_) => {
                let bt = self.bit(gate.targets[0]);
                let phase = gate.kind.matrix().expect("single-qubit kind")[1][1];
                for base in 0..count {
                    let i = scatter.deposit(base) | ctrl_value | bt;
                    self.amps[i] *= phase;
                }
            }
            kind => {
                let bt = self.bit(gate.targets[0]);
                let m: Mat2 = kind.matrix().expect("single-qubit kind");
                for base in 0..count {
                    let i0 = scatter.deposit(base) | ctrl_value;
                    let i1 = i0 | bt;
                    let a0 = self.amps[i0];
                    let a1 = self.amps[i1];
                    self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
                    self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
    }
}

fn check_width(q: usize) -> Result<()> {
    if q == 0 {
        return Err(Error::Layout("register needs at least one qubit".into()));
    }
    if q > MAX_STATE_QUBITS {
        return Err(Error::Resource(format!(
            "{q} qubits exceeds the simulator limit of {MAX_STATE_QUBITS}"
        )));
    }
    Ok(())
}

/// Inserts zero bits at fixed positions: maps a compact counter onto the
/// basis indices whose fixed bits are all clear.
struct Scatter {
    // (low mask, bit) for each fixed bit, ascending.
    steps: SmallVec<[(usize, usize); 12]>,
}

impl Scatter {
    fn new(sorted_bits: &[usize]) -> Self {
        Scatter {
            steps: sorted_bits.iter().map(|&b| (b - 1, b)).collect(),
        }
    }

    #[inline(always)]
    fn deposit(&self, mut x: usize) -> usize {
        for &(low, bit) in &self.steps {
            x = ((x & !low) << 1) | (x & low);
            debug_assert_eq!(x & bit, 0);
        }
        x
    }
}

/// Full `2^q × 2^q` matrix of a circuit, built column by column.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DMatrix<C64>> {
    let q = circuit.num_qubits();
    if q > MAX_UNITARY_QUBITS {
        return Err(Error::Resource(format!(
            "dense unitary of {q} qubits exceeds the {MAX_UNITARY_QUBITS}-qubit limit"
        )));
    }
    let dim = 1usize << q;
    let mut u = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..dim {
        let mut s = StateVector::init_basis(q, k)?;
        s.apply_circuit(circuit)?;
        for (j, a) in s.amps.iter().enumerate() {
            u[(j, k)] = *a;
        }
    }
    Ok(u)
}
