use crate::error::{Error, Result};
use crate::gate::{Control, GateApplication, GateKind};

/// Ordered gate list over a fixed-width register.
///
/// Gates run in insertion order (left to right in a circuit diagram); the
/// equivalent matrix product is right to left. `num_ancilla` records how many
/// of the `num_qubits` wires are work qubits expected in `|0⟩` on entry and exit.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_ancilla: usize,
    gates: Vec<GateApplication>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            num_ancilla: 0,
            gates: Vec::new(),
        }
    }

    pub fn with_ancilla(num_qubits: usize, num_ancilla: usize) -> Self {
        Circuit {
            num_qubits,
            num_ancilla,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_ancilla(&self) -> usize {
        self.num_ancilla
    }

    pub fn set_num_ancilla(&mut self, n: usize) {
        self.num_ancilla = n;
    }

    pub fn gates(&self) -> &[GateApplication] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate. Panics if the gate does not fit the register; builders
    /// in this crate only produce valid gates, so this is an internal bug check.
    pub fn push(&mut self, gate: GateApplication) {
        if let Err(e) = gate.validate(self.num_qubits) {
            panic!("invalid gate pushed to circuit: {e}");
        }
        self.gates.push(gate);
    }

    pub fn try_push(&mut self, gate: GateApplication) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn single(&mut self, kind: GateKind, target: usize) {
        self.push(GateApplication::single(kind, target));
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        self.push(GateApplication::cnot(control, target));
    }

    /// Appends `other`, which must have the same width.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::Layout(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.num_qubits, self.num_qubits
            )));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Appends `other` with its qubit `i` relabelled to `map[i]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() != other.num_qubits {
            return Err(Error::Layout(format!(
                "qubit map has {} entries for a {}-qubit circuit",
                map.len(),
                other.num_qubits
            )));
        }
        for g in &other.gates {
            let mut g = g.clone();
            for t in g.targets.iter_mut() {
                *t = map[*t];
            }
            for c in g.controls.iter_mut() {
                c.qubit = map[c.qubit];
            }
            self.try_push(g)?;
        }
        Ok(())
    }

    /// Adjoint circuit: reversed order, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            num_ancilla: self.num_ancilla,
            gates: self
                .gates
                .iter()
                .rev()
                .map(GateApplication::inverse)
                .collect(),
        }
    }

    /// Adds `control` to every gate.
    pub fn controlled(&self, control: Control) -> Result<Circuit> {
        let mut out = Circuit::with_ancilla(self.num_qubits, self.num_ancilla);
        for g in &self.gates {
            out.try_push(g.clone().with_control(control))?;
        }
        Ok(out)
    }

    /// Same gates on a wider register; new wires are appended at the end.
    pub fn widened(&self, num_qubits: usize) -> Result<Circuit> {
        if num_qubits < self.num_qubits {
            return Err(Error::Layout(format!(
                "cannot narrow a {}-qubit circuit to {num_qubits}",
                self.num_qubits
            )));
        }
        Ok(Circuit {
            num_qubits,
            num_ancilla: self.num_ancilla,
            gates: self.gates.clone(),
        })
    }
}

impl Extend<GateApplication> for Circuit {
    fn extend<T: IntoIterator<Item = GateApplication>>(&mut self, iter: T) {
        for g in iter {
            self.push(g);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_reverses_and_daggers() {
        let mut c = Circuit::new(2);
        c.single(GateKind::S, 0);
        c.cnot(0, 1);
        let inv = c.inverse();
        assert!(inv.gates()[0].is_cnot());
        assert_eq!(inv.gates()[1].kind, GateKind::Sdg);
    }

    #[test]
    fn mapped_append_relabels() {
        let mut small = Circuit::new(2);
        small.cnot(0, 1);
        let mut big = Circuit::new(4);
        big.append_mapped(&small, &[3, 1]).unwrap();
        assert_eq!(big.gates()[0].targets[0], 1);
        assert_eq!(big.gates()[0].controls[0].qubit, 3);
        assert!(big.append(&small).is_err());
    }
}
