//! Controlled-`R_Y` encodings `|k⟩|0⟩ → |k⟩(cos θ(k)|0⟩ + sin θ(k)|1⟩)` for
//! piecewise polynomial angles `θ`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::comparator::{comparator_ancillas, push_comparator};
use super::fit::{PiecewisePolynomial1D, PiecewisePolynomial2D};
use super::multinomial::{multinomial_angles, multinomial_angles_2d, subset_positions, Subset};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Control, GateApplication, GateKind};

/// How a rotation block is restricted to its piece of the partition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlagMode {
    /// Each piece's own polynomial, gated on `k ≥ lo` and `k < hi`.
    #[default]
    Window,
    /// Differenced polynomials, each gated on the single flag `k ≥ lo`.
    Cumulative,
}

impl FromStr for FlagMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "window" => Ok(FlagMode::Window),
            "cumulative" => Ok(FlagMode::Cumulative),
            _ => Err(Error::Config(format!("unknown flag mode '{s}'"))),
        }
    }
}

/// Wires used by a univariate encoding inside a larger register.
#[derive(Clone, Debug)]
pub struct UnivariateLayout {
    pub rot: usize,
    /// Wavenumber register, most significant first.
    pub data: Vec<usize>,
    /// Flag wires, see [`univariate_flag_wires`].
    pub flags: Vec<usize>,
    pub scratch: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct BivariateLayout {
    pub rot: usize,
    pub k0: Vec<usize>,
    pub k1: Vec<usize>,
    pub flags0: Vec<usize>,
    pub flags1: Vec<usize>,
    pub scratch: Vec<usize>,
}

/// Scratch wires the comparators of `thresholds` need on an `m`-bit register.
pub fn encoding_scratch(m: usize, thresholds: &[usize]) -> usize {
    thresholds
        .iter()
        .map(|&t| comparator_ancillas(m, t))
        .max()
        .unwrap_or(0)
}

fn push_rotations(
    c: &mut Circuit,
    rot: usize,
    terms: impl Iterator<Item = (Vec<Control>, f64)>,
) -> Result<()> {
    for (controls, theta) in terms {
        if theta == 0.0 {
            continue;
        }
        c.try_push(GateApplication::controlled(
            GateKind::Ry(2.0 * theta),
            &controls,
            rot,
        ))?;
    }
    Ok(())
}

fn bit_controls(subset: Subset, wires: &[usize]) -> impl Iterator<Item = Control> + '_ {
    subset_positions(subset).map(move |s| Control::on(wires[s]))
}

fn window_flags(flags: &[usize], i: usize) -> Vec<Control> {
    let mut out = Vec::with_capacity(2);
    if i > 0 {
        out.push(Control::on(flags[i - 1]));
    }
    if i < flags.len() {
        out.push(Control::off(flags[i]));
    }
    out
}

fn comparator_block(
    width: usize,
    data: &[usize],
    flags: &[usize],
    scratch: &[usize],
    thresholds: &[usize],
) -> Result<Circuit> {
    let mut c = Circuit::new(width);
    for (&t, &f) in thresholds.iter().zip(flags) {
        push_comparator(&mut c, data, f, scratch, t)?;
    }
    Ok(c)
}

fn check_register(m: usize, extent: usize) -> Result<()> {
    if m == 0 || 1usize << m != extent {
        return Err(Error::Layout(format!(
            "{m}-qubit register does not index {extent} wavenumbers"
        )));
    }
    Ok(())
}

/// Flag wires a univariate encoding needs for `thresholds` comparators. Flags
/// are computed just before the pieces that read them and cleared right after,
/// so at most two are live at once.
pub fn univariate_flag_wires(thresholds: usize, mode: FlagMode) -> usize {
    match mode {
        FlagMode::Window => thresholds.min(2),
        FlagMode::Cumulative => thresholds.min(1),
    }
}

/// Appends the univariate encoding of `fit` on the wires of `layout`.
pub fn push_up_univariate(
    c: &mut Circuit,
    fit: &PiecewisePolynomial1D,
    layout: &UnivariateLayout,
    mode: FlagMode,
) -> Result<()> {
    let m = layout.data.len();
    let thresholds = fit.thresholds();
    let nf = univariate_flag_wires(thresholds.len(), mode);
    if layout.flags.len() != nf {
        return Err(Error::Layout(format!(
            "{} pieces need {nf} flag wires, got {}",
            fit.segments.len(),
            layout.flags.len()
        )));
    }
    if let Some(&t) = thresholds.iter().find(|&&t| t == 0 || t >> m != 0) {
        return Err(Error::Encoding(format!(
            "threshold {t} outside a {m}-bit register"
        )));
    }
    let wire = |i: usize| layout.flags[i % nf.max(1)];
    let toggle = |c: &mut Circuit, i: usize| {
        push_comparator(c, &layout.data, wire(i), &layout.scratch, thresholds[i])
    };
    for (i, seg) in fit.segments.iter().enumerate() {
        let (coeffs, gate): (Vec<f64>, Vec<Control>) = match mode {
            FlagMode::Window => {
                if i < thresholds.len() {
                    toggle(c, i)?;
                }
                let mut g = Vec::with_capacity(2);
                if i > 0 {
                    g.push(Control::on(wire(i - 1)));
                }
                if i < thresholds.len() {
                    g.push(Control::off(wire(i)));
                }
                (seg.coeffs.clone(), g)
            }
            FlagMode::Cumulative => {
                let d = match i {
                    0 => seg.coeffs.clone(),
                    _ => {
                        toggle(c, i - 1)?;
                        let prev = &fit.segments[i - 1].coeffs;
                        seg.coeffs.iter().zip(prev).map(|(a, b)| a - b).collect()
                    }
                };
                let g = if i > 0 {
                    vec![Control::on(wire(i - 1))]
                } else {
                    vec![]
                };
                (d, g)
            }
        };
        let terms = multinomial_angles(&coeffs, m).into_iter().map(|a| {
            let mut ctl: Vec<Control> = bit_controls(a.subset, &layout.data).collect();
            ctl.extend(&gate);
            (ctl, a.angle)
        });
        push_rotations(c, layout.rot, terms)?;
        if i > 0 {
            toggle(c, i - 1)?;
        }
    }
    Ok(())
}

/// Standalone `U_P`: qubit 0 is the rotation ancilla, qubits `1..=n` hold `k`,
/// then the flag wires and the comparator scratch.
pub fn build_up_univariate(
    fit: &PiecewisePolynomial1D,
    n: usize,
    mode: FlagMode,
) -> Result<Circuit> {
    let thresholds = fit.thresholds();
    let nf = univariate_flag_wires(thresholds.len(), mode);
    let ns = encoding_scratch(n, &thresholds);
    let width = 1 + n + nf + ns;
    let layout = UnivariateLayout {
        rot: 0,
        data: (1..=n).collect(),
        flags: (n + 1..n + 1 + nf).collect(),
        scratch: (n + 1 + nf..width).collect(),
    };
    let mut c = Circuit::with_ancilla(width, nf + ns);
    push_up_univariate(&mut c, fit, &layout, mode)?;
    Ok(c)
}

/// Appends the bivariate encoding of `fit` on the wires of `layout`.
pub fn push_up_bivariate(
    c: &mut Circuit,
    fit: &PiecewisePolynomial2D,
    layout: &BivariateLayout,
    mode: FlagMode,
) -> Result<()> {
    let m = layout.k0.len();
    check_register(m, fit.extent)?;
    if layout.k1.len() != m {
        return Err(Error::Layout(
            "both wavenumber registers must have equal width".into(),
        ));
    }
    let t0 = &fit.bounds[0][1..];
    let t1 = &fit.bounds[1][1..];
    if layout.flags0.len() != t0.len() || layout.flags1.len() != t1.len() {
        return Err(Error::Layout(
            "flag count does not match the cell partition".into(),
        ));
    }
    let mut flags = comparator_block(
        c.num_qubits(),
        &layout.k0,
        &layout.flags0,
        &layout.scratch,
        t0,
    )?;
    flags.append(&comparator_block(
        c.num_qubits(),
        &layout.k1,
        &layout.flags1,
        &layout.scratch,
        t1,
    )?)?;
    c.append(&flags)?;
    let n1 = fit.bounds[1].len();
    let differenced = match mode {
        FlagMode::Window => None,
        FlagMode::Cumulative => Some(fit.differenced()),
    };
    for (idx, cell) in fit.cells.iter().enumerate() {
        let (i0, i1) = (idx / n1, idx % n1);
        let (coeffs, gate) = match &differenced {
            None => match &cell.coeffs {
                Some(a) => {
                    let mut g = window_flags(&layout.flags0, i0);
                    g.extend(window_flags(&layout.flags1, i1));
                    (a.clone(), g)
                }
                None => continue,
            },
            Some(d) => {
                let mut g = Vec::new();
                if i0 > 0 {
                    g.push(Control::on(layout.flags0[i0 - 1]));
                }
                if i1 > 0 {
                    g.push(Control::on(layout.flags1[i1 - 1]));
                }
                (d[idx].clone(), g)
            }
        };
        if coeffs.iter().all(|&a| a == 0.0) {
            continue;
        }
        let terms = multinomial_angles_2d(&coeffs, m)
            .into_iter()
            .map(|(s0, s1, angle)| {
                let mut ctl: Vec<Control> = bit_controls(s0, &layout.k0).collect();
                ctl.extend(bit_controls(s1, &layout.k1));
                ctl.extend(&gate);
                (ctl, angle)
            });
        push_rotations(c, layout.rot, terms)?;
    }
    c.append(&flags.inverse())?;
    Ok(())
}

/// Standalone bivariate `U_P`: qubit 0 is the rotation ancilla, then the `k¹`
/// register, then `k⁰`, then flags for axis 0 and axis 1, then scratch.
pub fn build_up_bivariate(
    fit: &PiecewisePolynomial2D,
    n_per_axis: usize,
    mode: FlagMode,
) -> Result<Circuit> {
    let m = n_per_axis;
    let t0 = &fit.bounds[0][1..];
    let t1 = &fit.bounds[1][1..];
    let ns = encoding_scratch(m, t0).max(encoding_scratch(m, t1));
    let nf = t0.len() + t1.len();
    let width = 1 + 2 * m + nf + ns;
    let base = 1 + 2 * m;
    let layout = BivariateLayout {
        rot: 0,
        k1: (1..=m).collect(),
        k0: (m + 1..=2 * m).collect(),
        flags0: (base..base + t0.len()).collect(),
        flags1: (base + t0.len()..base + nf).collect(),
        scratch: (base + nf..width).collect(),
    };
    let mut c = Circuit::with_ancilla(width, nf + ns);
    push_up_bivariate(&mut c, fit, &layout, mode)?;
    Ok(c)
}
