//! Reversible comparison of a register against a classical constant.
//!
//! `k ≥ t` is the carry out of `k + (2^m − t)`. With one addend fixed, each
//! carry step is either `k_i ∨ c` or `k_i ∧ c`, so the chain needs only
//! Toffolis with mixed polarities and one scratch wire per intermediate carry.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Control, GateApplication, GateKind};

/// A carry held on a wire, true when the wire equals `on`.
#[derive(Clone, Copy, Debug)]
enum Carry {
    False,
    Lit(Control),
}

fn negate(c: Control) -> Control {
    Control {
        qubit: c.qubit,
        on: !c.on,
    }
}

fn check(m: usize, threshold: usize) -> Result<()> {
    if m == 0 || m >= usize::BITS as usize || threshold == 0 || threshold >= 1 << m {
        return Err(Error::Precondition(format!(
            "comparator needs 0 < threshold < 2^m; got threshold {threshold}, m {m}"
        )));
    }
    Ok(())
}

/// Scratch wires needed to compare an `m`-bit register with `threshold`.
pub fn comparator_ancillas(m: usize, threshold: usize) -> usize {
    let c = (1usize << m) - threshold;
    let first = c.trailing_zeros() as usize;
    // Bits above the first set bit of c each combine one carry; the last
    // combination lands on the flag.
    (m - 1 - first).saturating_sub(1)
}

/// Appends `flag ^= [k ≥ threshold]` where `data` holds `k` most significant
/// first. `scratch` wires start and end in `|0⟩`.
pub fn push_comparator(
    c: &mut Circuit,
    data: &[usize],
    flag: usize,
    scratch: &[usize],
    threshold: usize,
) -> Result<()> {
    let m = data.len();
    check(m, threshold)?;
    let need = comparator_ancillas(m, threshold);
    if scratch.len() < need {
        return Err(Error::Layout(format!(
            "comparator against {threshold} needs {need} scratch qubits, got {}",
            scratch.len()
        )));
    }
    let addend = (1usize << m) - threshold;
    let bit = |i: usize| Control::on(data[m - 1 - i]);
    let mut carry = Carry::False;
    let mut compute: Vec<GateApplication> = Vec::new();
    let mut used = 0;
    for i in 0..m {
        let one = addend >> i & 1 == 1;
        let last = i == m - 1;
        carry = match (carry, one) {
            (Carry::False, false) => Carry::False,
            (Carry::False, true) if !last => Carry::Lit(bit(i)),
            (Carry::False, true) => {
                compute.push(GateApplication::mcx(&[bit(i)], flag));
                break;
            }
            (Carry::Lit(prev), _) => {
                let target = if last { flag } else { scratch[used] };
                if one {
                    // k ∨ c = ¬(¬k ∧ ¬c)
                    compute.push(GateApplication::single(GateKind::X, target));
                    compute.push(GateApplication::mcx(
                        &[negate(bit(i)), negate(prev)],
                        target,
                    ));
                } else {
                    compute.push(GateApplication::mcx(&[bit(i), prev], target));
                }
                if last {
                    break;
                }
                used += 1;
                Carry::Lit(Control::on(target))
            }
        };
    }
    // The flag update is the tail; everything before it is scratch work to undo.
    let tail = compute
        .iter()
        .rposition(|g| g.targets[0] != flag)
        .map_or(0, |i| i + 1);
    for g in &compute {
        c.try_push(g.clone())?;
    }
    for g in compute[..tail].iter().rev() {
        c.try_push(g.inverse())?;
    }
    Ok(())
}

/// Standalone comparator: qubits `0..n` hold `k` (most significant first),
/// qubit `n` is the flag and scratch wires follow.
pub fn build_comparator(n: usize, threshold: usize) -> Result<Circuit> {
    check(n, threshold)?;
    let anc = comparator_ancillas(n, threshold);
    let mut c = Circuit::with_ancilla(n + 1 + anc, anc);
    let data: Vec<usize> = (0..n).collect();
    let scratch: Vec<usize> = (n + 1..n + 1 + anc).collect();
    push_comparator(&mut c, &data, n, &scratch, threshold)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::StateVector;

    fn run(c: &Circuit, input: usize) -> usize {
        let mut s = StateVector::init_basis(c.num_qubits(), input).unwrap();
        s.apply_circuit(c).unwrap();
        let amps = s.amplitudes();
        let out = (0..amps.len()).find(|&i| amps[i].norm() > 0.5).unwrap();
        assert!((amps[out].norm() - 1.0).abs() < 1e-12);
        out
    }

    #[test]
    fn exhaustive_small_registers() {
        for n in 1..=6 {
            for t in 1..1usize << n {
                let c = build_comparator(n, t).unwrap();
                let w = c.num_qubits();
                let anc = w - n - 1;
                for k in 0..1usize << n {
                    for flag in 0..2 {
                        let input = (k << (w - n)) | (flag << anc);
                        let want = (k << (w - n)) | ((flag ^ usize::from(k >= t)) << anc);
                        assert_eq!(run(&c, input), want, "n={n} t={t} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn power_of_two_is_one_cnot() {
        for n in 1..=8 {
            let c = build_comparator(n, 1 << (n - 1)).unwrap();
            assert_eq!(c.len(), 1);
            assert!(c.gates()[0].is_cnot());
            assert_eq!(c.num_qubits(), n + 1);
        }
    }

    #[test]
    fn three_bit_threshold_three() {
        let c = build_comparator(3, 3).unwrap();
        let w = c.num_qubits();
        let flag = |k: usize| run(&c, k << (w - 3)) >> (w - 4) & 1;
        assert_eq!(flag(2), 0);
        assert_eq!(flag(3), 1);
        assert_eq!(flag(7), 1);
    }

    #[test]
    fn self_inverse_composition() {
        let c = build_comparator(5, 11).unwrap();
        let mut both = c.clone();
        both.append(&c.inverse()).unwrap();
        for k in 0..1usize << both.num_qubits() {
            assert_eq!(run(&both, k), k);
        }
    }

    #[test]
    fn rejects_bad_thresholds() {
        assert!(build_comparator(3, 0).is_err());
        assert!(build_comparator(3, 8).is_err());
    }
}
