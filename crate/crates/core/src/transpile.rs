//! Lowering to the universal `{CNOT, U3}` basis and gate counting.
//!
//! Every rule here is exact up to one global phase for the whole circuit:
//! a phase is only ever discarded from an uncontrolled single-qubit gate.
//! Multi-controlled gates borrow idle register wires as dirty ancillas, so
//! no clean work qubits are assumed.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use serde::Serialize;
use smallvec::SmallVec;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{adjoint, matmul2, Control, GateApplication, GateKind, Mat2};

const EPS: f64 = 1e-13;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateCount {
    pub cnot_count: usize,
    pub u3_count: usize,
    pub total: usize,
    pub num_ancilla: usize,
}

/// Receives lowered gates one at a time.
pub trait GateSink {
    fn emit(&mut self, gate: GateApplication);
}

impl GateSink for Vec<GateApplication> {
    fn emit(&mut self, gate: GateApplication) {
        self.push(gate);
    }
}

/// Counts lowered gates without storing them.
#[derive(Default)]
struct Counter {
    cnot: usize,
    u3: usize,
}

impl GateSink for Counter {
    fn emit(&mut self, gate: GateApplication) {
        if gate.is_cnot() {
            self.cnot += 1;
        } else {
            self.u3 += 1;
        }
    }
}

/// Rewrites `circuit` using only CNOT and U3.
pub fn transpile(circuit: &Circuit) -> Result<Circuit> {
    let mut gates = Vec::new();
    lower_circuit(circuit, &mut gates)?;
    let mut out = Circuit::with_ancilla(circuit.num_qubits(), circuit.num_ancilla());
    out.extend(gates);
    Ok(out)
}

/// Gate count of `transpile(circuit)`, computed by streaming.
pub fn transpile_count(circuit: &Circuit) -> Result<GateCount> {
    let mut c = Counter::default();
    lower_circuit(circuit, &mut c)?;
    Ok(GateCount {
        cnot_count: c.cnot,
        u3_count: c.u3,
        total: c.cnot + c.u3,
        num_ancilla: circuit.num_ancilla(),
    })
}

/// Lowers each gate of `circuit` into `sink`.
pub fn lower_circuit<S: GateSink>(circuit: &Circuit, sink: &mut S) -> Result<()> {
    let pool: Vec<usize> = (0..circuit.num_qubits()).collect();
    for g in circuit.gates() {
        lower(g, &pool, sink)?;
    }
    Ok(())
}

/// Counts an already transpiled circuit.
pub fn count_gates(circuit: &Circuit) -> Result<GateCount> {
    let mut cnot = 0;
    let mut u3 = 0;
    for g in circuit.gates() {
        if g.is_cnot() {
            cnot += 1;
        } else if g.is_u3() {
            u3 += 1;
        } else {
            return Err(Error::Count(format!(
                "{} gate with {} control(s) is not in the {{CNOT, U3}} basis",
                g.kind.name(),
                g.controls.len()
            )));
        }
    }
    Ok(GateCount {
        cnot_count: cnot,
        u3_count: u3,
        total: cnot + u3,
        num_ancilla: circuit.num_ancilla(),
    })
}

/// Multi-controlled X over `m` controls (qubits `0..m`), target `m`, and
/// `ancilla_budget` work qubits after it, lowered to `{CNOT, U3}`.
///
/// With at least `m - 2` clean ancillas a Toffoli v-chain is used and the
/// ancillas are returned to `|0⟩`; otherwise the ancilla-free recursion runs
/// on the control and target wires alone.
pub fn decompose_mcx(m: usize, ancilla_budget: usize) -> Result<Circuit> {
    if m == 0 {
        return Err(Error::Precondition(
            "decompose_mcx needs at least one control".into(),
        ));
    }
    let width = m + 1 + ancilla_budget;
    let controls: Vec<usize> = (0..m).collect();
    let target = m;
    let mut gates = Vec::new();
    if m >= 3 && ancilla_budget >= m - 2 {
        let anc: Vec<usize> = (m + 1..m + 1 + (m - 2)).collect();
        let mut chain = vec![(controls[0], controls[1], anc[0])];
        for i in 1..m - 2 {
            chain.push((controls[i + 1], anc[i - 1], anc[i]));
        }
        let pool = Vec::new();
        for &(a, b, t) in &chain {
            lower(&GateApplication::toffoli(a, b, t), &pool, &mut gates)?;
        }
        lower(
            &GateApplication::toffoli(controls[m - 1], anc[m - 3], target),
            &pool,
            &mut gates,
        )?;
        for &(a, b, t) in chain.iter().rev() {
            lower(&GateApplication::toffoli(a, b, t), &pool, &mut gates)?;
        }
    } else {
        let pool: Vec<usize> = (0..=m).collect();
        let cs: Vec<Control> = controls.iter().map(|&q| Control::on(q)).collect();
        lower(&GateApplication::mcx(&cs, target), &pool, &mut gates)?;
    }
    let mut out = Circuit::with_ancilla(width, ancilla_budget);
    out.extend(gates);
    Ok(out)
}

/// `(θ, φ, λ, γ)` with `m = e^{iγ} U3(θ, φ, λ)`.
pub fn u3_params(m: &Mat2) -> (f64, f64, f64, f64) {
    let a00 = m[0][0].norm();
    let a10 = m[1][0].norm();
    let theta = 2.0 * a10.atan2(a00);
    if a10 < EPS {
        let g = m[0][0].arg();
        return (0.0, 0.0, wrap(m[1][1].arg() - g), g);
    }
    if a00 < EPS {
        let g = m[1][0].arg();
        return (PI, 0.0, wrap((-m[0][1]).arg() - g), g);
    }
    let g = m[0][0].arg();
    (
        theta,
        wrap(m[1][0].arg() - g),
        wrap((-m[0][1]).arg() - g),
        g,
    )
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// A square root of a 2×2 unitary.
pub fn sqrt_unitary(m: &Mat2) -> Mat2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let tr = m[0][0] + m[1][1];
    let s0 = det.sqrt();
    let s = if (tr + 2.0 * s0).norm() >= (tr - 2.0 * s0).norm() {
        s0
    } else {
        -s0
    };
    let t = (tr + 2.0 * s).sqrt();
    [
        [(m[0][0] + s) / t, m[0][1] / t],
        [m[1][0] / t, (m[1][1] + s) / t],
    ]
}

fn rz(a: f64) -> Mat2 {
    let z = C64::new(0.0, 0.0);
    [
        [C64::from_polar(1.0, -a / 2.0), z],
        [z, C64::from_polar(1.0, a / 2.0)],
    ]
}

fn ry(a: f64) -> Mat2 {
    GateKind::Ry(a).matrix().expect("ry is single-qubit")
}

fn is_identity_up_to_phase(m: &Mat2) -> bool {
    let p = m[0][0];
    m[0][1].norm() < EPS
        && m[1][0].norm() < EPS
        && (m[1][1] - p).norm() < EPS
        && (p.norm() - 1.0).abs() < EPS
}

fn emit_u3<S: GateSink>(m: &Mat2, q: usize, sink: &mut S) {
    if is_identity_up_to_phase(m) {
        return;
    }
    let (theta, phi, lambda, _) = u3_params(m);
    sink.emit(GateApplication::u3(theta, phi, lambda, q));
}

fn emit_h<S: GateSink>(q: usize, sink: &mut S) {
    sink.emit(GateApplication::u3(FRAC_PI_2, 0.0, PI, q));
}

fn emit_x<S: GateSink>(q: usize, sink: &mut S) {
    sink.emit(GateApplication::u3(PI, 0.0, PI, q));
}

fn emit_phase<S: GateSink>(lambda: f64, q: usize, sink: &mut S) {
    sink.emit(GateApplication::u3(0.0, 0.0, lambda, q));
}

fn emit_toffoli<S: GateSink>(a: usize, b: usize, t: usize, sink: &mut S) {
    emit_h(t, sink);
    sink.emit(GateApplication::cnot(b, t));
    emit_phase(-FRAC_PI_4, t, sink);
    sink.emit(GateApplication::cnot(a, t));
    emit_phase(FRAC_PI_4, t, sink);
    sink.emit(GateApplication::cnot(b, t));
    emit_phase(-FRAC_PI_4, t, sink);
    sink.emit(GateApplication::cnot(a, t));
    emit_phase(FRAC_PI_4, b, sink);
    emit_phase(FRAC_PI_4, t, sink);
    emit_h(t, sink);
    sink.emit(GateApplication::cnot(a, b));
    emit_phase(FRAC_PI_4, a, sink);
    emit_phase(-FRAC_PI_4, b, sink);
    sink.emit(GateApplication::cnot(a, b));
}

/// Singly controlled `W` by the `A X B X C` construction.
fn emit_controlled_unitary<S: GateSink>(w: &Mat2, c: usize, t: usize, sink: &mut S) {
    let (gamma, beta, delta, g) = u3_params(w);
    let alpha = g + (beta + delta) / 2.0;
    let a = matmul2(&rz(beta), &ry(gamma / 2.0));
    let b = matmul2(&ry(-gamma / 2.0), &rz(-(delta + beta) / 2.0));
    let cm = rz((delta - beta) / 2.0);
    emit_u3(&cm, t, sink);
    sink.emit(GateApplication::cnot(c, t));
    emit_u3(&b, t, sink);
    sink.emit(GateApplication::cnot(c, t));
    emit_u3(&a, t, sink);
    if alpha
        .rem_euclid(2.0 * PI)
        .min((-alpha).rem_euclid(2.0 * PI))
        > EPS
    {
        emit_phase(alpha, c, sink);
    }
}

fn idle_qubits(pool: &[usize], busy: &[usize]) -> SmallVec<[usize; 16]> {
    pool.iter().copied().filter(|q| !busy.contains(q)).collect()
}

fn lower<S: GateSink>(g: &GateApplication, pool: &[usize], sink: &mut S) -> Result<()> {
    if g.is_cnot() || (g.is_u3()) {
        sink.emit(g.clone());
        return Ok(());
    }
    // Open controls: conjugate with X.
    let open: SmallVec<[usize; 4]> = g
        .controls
        .iter()
        .filter(|c| !c.on)
        .map(|c| c.qubit)
        .collect();
    if !open.is_empty() {
        for &q in &open {
            emit_x(q, sink);
        }
        let mut closed = g.clone();
        for c in closed.controls.iter_mut() {
            c.on = true;
        }
        lower(&closed, pool, sink)?;
        for &q in &open {
            emit_x(q, sink);
        }
        return Ok(());
    }
    let ctrls: SmallVec<[usize; 8]> = g.controls.iter().map(|c| c.qubit).collect();

    if let GateKind::Swap = g.kind {
        let (a, b) = (g.targets[0], g.targets[1]);
        let mut mid = GateApplication::cnot(a, b);
        mid.controls.extend(g.controls.iter().copied());
        sink.emit(GateApplication::cnot(b, a));
        lower(&mid, pool, sink)?;
        sink.emit(GateApplication::cnot(b, a));
        return Ok(());
    }

    let t = g.targets[0];
    let w = g
        .kind
        .matrix()
        .ok_or_else(|| Error::Transpile(format!("unsupported gate {}", g.kind.name())))?;
    match (g.kind, ctrls.len()) {
        (_, 0) => emit_u3(&w, t, sink),
        (GateKind::X, 1) => sink.emit(GateApplication::cnot(ctrls[0], t)),
        (_, 1) => emit_controlled_unitary(&w, ctrls[0], t, sink),
        (GateKind::X, 2) => emit_toffoli(ctrls[0], ctrls[1], t, sink),
        (GateKind::X, _) => lower_mcx(&ctrls, t, pool, sink)?,
        (GateKind::Ry(theta), _) => {
            let on: SmallVec<[Control; 8]> = ctrls.iter().map(|&q| Control::on(q)).collect();
            emit_u3(&ry(theta / 2.0), t, sink);
            lower(&GateApplication::mcx(&on, t), pool, sink)?;
            emit_u3(&ry(-theta / 2.0), t, sink);
            lower(&GateApplication::mcx(&on, t), pool, sink)?;
        }
        _ => lower_multi_controlled(&w, &ctrls, t, pool, sink)?,
    }
    Ok(())
}

/// `C^k X` for `k ≥ 3` using dirty borrowed wires where available.
fn lower_mcx<S: GateSink>(ctrls: &[usize], t: usize, pool: &[usize], sink: &mut S) -> Result<()> {
    let k = ctrls.len();
    let mut busy: SmallVec<[usize; 16]> = SmallVec::from_slice(ctrls);
    busy.push(t);
    let idle = idle_qubits(pool, &busy);
    if idle.len() >= k - 2 {
        let a = &idle[..k - 2];
        // Chain of Toffolis ending on the target; x1·x2 enters at the bottom.
        let step = |j: usize, sink: &mut S| {
            if j == k - 3 {
                emit_toffoli(ctrls[k - 1], a[k - 3], t, sink);
            } else {
                emit_toffoli(ctrls[j + 2], a[j], a[j + 1], sink);
            }
        };
        let base = |sink: &mut S| emit_toffoli(ctrls[0], ctrls[1], a[0], sink);
        for j in (0..k - 2).rev() {
            step(j, sink);
        }
        base(sink);
        for j in 0..k - 2 {
            step(j, sink);
        }
        for j in (0..k - 3).rev() {
            step(j, sink);
        }
        base(sink);
        for j in 0..k - 3 {
            step(j, sink);
        }
        return Ok(());
    }
    if let Some(&a) = idle.first() {
        let h = k.div_ceil(2);
        let first: SmallVec<[Control; 8]> = ctrls[..h].iter().map(|&q| Control::on(q)).collect();
        let mut second: SmallVec<[Control; 8]> =
            ctrls[h..].iter().map(|&q| Control::on(q)).collect();
        second.push(Control::on(a));
        let g1 = GateApplication::mcx(&first, a);
        let g2 = GateApplication::mcx(&second, t);
        for _ in 0..2 {
            lower(&g1, pool, sink)?;
            lower(&g2, pool, sink)?;
        }
        return Ok(());
    }
    let x = GateKind::X.matrix().expect("x is single-qubit");
    lower_multi_controlled(&x, ctrls, t, pool, sink)
}

/// `C^k W` for `k ≥ 2` by the square-root recursion.
fn lower_multi_controlled<S: GateSink>(
    w: &Mat2,
    ctrls: &[usize],
    t: usize,
    pool: &[usize],
    sink: &mut S,
) -> Result<()> {
    let k = ctrls.len();
    let v = sqrt_unitary(w);
    let vd = adjoint(&v);
    let last = ctrls[k - 1];
    let rest: SmallVec<[Control; 8]> = ctrls[..k - 1].iter().map(|&q| Control::on(q)).collect();
    // Sub-gates act inside the original gate's wires plus the pool.
    emit_controlled_unitary(&v, last, t, sink);
    lower(
        &GateApplication::mcx(&rest, last),
        pool_with(pool, t).as_slice(),
        sink,
    )?;
    emit_controlled_unitary(&vd, last, t, sink);
    lower(
        &GateApplication::mcx(&rest, last),
        pool_with(pool, t).as_slice(),
        sink,
    )?;
    lower(
        &GateApplication::controlled(GateKind::Unitary(v), &rest, t),
        pool,
        sink,
    )
}

fn pool_with(pool: &[usize], q: usize) -> Vec<usize> {
    let mut p = pool.to_vec();
    if !p.contains(&q) {
        p.push(q);
    }
    p
}
