//! End-to-end quantum pipelines: load `f`, apply `U_S`, `U_P`, `U_S†`, read the
//! success branch and undo the normalisations.
//!
//! One-dimensional register: rotation ancilla, reflection ancilla, `n − 1`
//! data qubits, then a shared pool for shift carries, segment flags and
//! comparator scratch. Two-dimensional register: rotation ancilla, then the
//! axis-1 block (reflection ancilla and `k¹`), then the axis-0 block
//! (reflection ancilla and `k⁰`), then the pool.

use num_complex::Complex64 as C64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::classical::matern::white_noise_grid;
use crate::classical::{Family, ProblemSpec};
use crate::error::{Error, Result};
use crate::polyenc::{
    encoding_scratch, push_up_bivariate, push_up_univariate, univariate_flag_wires,
    BivariateLayout, FlagMode, SpectralDiagonal1D, SpectralDiagonal2D, UnivariateLayout,
};
use crate::reflection::{build_qst, shift_ancillas, ShiftImpl};
use crate::statevector::StateVector;

/// Success-branch norms below this are rejected.
pub const MIN_BRANCH_NORM: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleFactor {
    pub name: String,
    pub factor: f64,
}

/// `u` is the product of the scale-chain factors times the normalised
/// success-branch amplitudes (rotation ancilla `|1⟩`, every other ancilla `|0⟩`).
#[derive(Clone, Debug)]
pub struct QuantumSolveResult {
    pub u: Vec<f64>,
    pub scale_chain: Vec<ScaleFactor>,
    pub raw_state: Option<StateVector>,
    /// Probability of the success branch.
    pub success_probability: f64,
    /// Probability on states with a dirty ancilla.
    pub stray_probability: f64,
}

impl QuantumSolveResult {
    pub fn scale(&self) -> f64 {
        self.scale_chain.iter().map(|s| s.factor).product()
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Polynomial degree.
    pub p: usize,
    /// 1D segment partition; geometric by default.
    pub partition: Option<Vec<(usize, usize)>>,
    /// 2D: side of the fitted low-wavenumber cell.
    pub k_split: usize,
    pub shift: ShiftImpl,
    pub flag_mode: FlagMode,
    /// Keep the final state in the result.
    pub keep_state: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            p: 4,
            partition: None,
            k_split: 8,
            shift: ShiftImpl::Ripple,
            flag_mode: FlagMode::Window,
            keep_state: false,
        }
    }
}

/// Fitted diagonal for either dimension.
#[derive(Clone, Debug)]
pub enum Diagonal {
    One(SpectralDiagonal1D),
    Two(SpectralDiagonal2D),
}

impl Diagonal {
    pub fn fit(spec: &ProblemSpec, opts: &SolverOptions) -> Result<Self> {
        Ok(match spec.dim {
            1 => Diagonal::One(SpectralDiagonal1D::from_spec(
                spec,
                opts.p,
                opts.partition.as_deref(),
            )?),
            _ => Diagonal::Two(SpectralDiagonal2D::from_spec(spec, opts.p, opts.k_split)?),
        })
    }

    pub fn scale(&self) -> f64 {
        match self {
            Diagonal::One(d) => d.scale,
            Diagonal::Two(d) => d.scale,
        }
    }

    pub fn max_fit_error(&self) -> f64 {
        match self {
            Diagonal::One(d) => d.fit.max_fit_error(),
            Diagonal::Two(d) => d.fit.max_fit_error(),
        }
    }
}

/// Wire assignment of a solver circuit.
#[derive(Clone, Debug)]
pub struct SolverLayout {
    pub num_qubits: usize,
    pub rot: usize,
    /// Per axis (axis 0 first): reflection ancilla followed by data qubits.
    pub blocks: Vec<Vec<usize>>,
    pub pool: Vec<usize>,
}

impl SolverLayout {
    fn bit(&self, q: usize) -> usize {
        1 << (self.num_qubits - 1 - q)
    }

    fn data_index(&self, block: &[usize], j: usize) -> usize {
        let m = block.len() - 1;
        (0..m)
            .filter(|&s| j >> (m - 1 - s) & 1 == 1)
            .map(|s| self.bit(block[1 + s]))
            .sum()
    }

    /// Basis index of grid point `idx` (row-major for 2D) with ancillas clear.
    pub fn grid_index(&self, idx: usize) -> usize {
        let m = 1usize << (self.blocks[0].len() - 1);
        match self.blocks.len() {
            1 => self.data_index(&self.blocks[0], idx),
            _ => {
                self.data_index(&self.blocks[0], idx / m)
                    + self.data_index(&self.blocks[1], idx % m)
            }
        }
    }

    pub fn rot_bit(&self) -> usize {
        self.bit(self.rot)
    }

    /// Mask of every wire that must be `|0⟩` in the success branch.
    pub fn ancilla_mask(&self) -> usize {
        let mut m: usize = self.pool.iter().map(|&q| self.bit(q)).sum();
        for b in &self.blocks {
            m |= self.bit(b[0]);
        }
        m
    }
}

/// A solver circuit ready to be applied to many forcings.
#[derive(Clone, Debug)]
pub struct PreparedSolver {
    pub spec: ProblemSpec,
    pub diag: Diagonal,
    pub circuit: Circuit,
    pub layout: SolverLayout,
    pub options: SolverOptions,
}

fn qst_into(
    c: &mut Circuit,
    n: usize,
    block: &[usize],
    pool: &[usize],
    imp: ShiftImpl,
    inverse: bool,
) -> Result<()> {
    let qst = build_qst(n, imp)?;
    let map: Vec<usize> = (0..qst.num_qubits())
        .map(|i| if i < n { block[i] } else { pool[i - n] })
        .collect();
    let qst = if inverse { qst.inverse() } else { qst };
    c.append_mapped(&qst, &map)
}

fn axis_qubits(spec: &ProblemSpec) -> Result<usize> {
    if spec.n_ext < 4 || !spec.n_ext.is_power_of_two() {
        return Err(Error::Config(format!(
            "extended grid {} is not a power of two ≥ 4",
            spec.n_ext
        )));
    }
    Ok(spec.n_ext.trailing_zeros() as usize)
}

/// `U_S`, then `U_P`, then `U_S†` for a one-dimensional problem.
pub fn build_solver_circuit_1d(
    spec: &ProblemSpec,
    diag: &SpectralDiagonal1D,
    shift: ShiftImpl,
    mode: FlagMode,
) -> Result<(Circuit, SolverLayout)> {
    if spec.dim != 1 {
        return Err(Error::Config("one-dimensional solver needs dim = 1".into()));
    }
    let n = axis_qubits(spec)?;
    let m = n - 1;
    if diag.num_qubits() != m {
        return Err(Error::Config(format!(
            "diagonal fitted for {} data qubits, problem has {m}",
            diag.num_qubits()
        )));
    }
    let thresholds = diag.fit.thresholds();
    let nf = univariate_flag_wires(thresholds.len(), mode);
    let pool_len = shift_ancillas(m, shift).max(nf + encoding_scratch(m, &thresholds));
    let width = 1 + n + pool_len;
    let block: Vec<usize> = (1..=n).collect();
    let pool: Vec<usize> = (1 + n..width).collect();
    let mut c = Circuit::with_ancilla(width, width - 1 - m);
    qst_into(&mut c, n, &block, &pool, shift, false)?;
    let enc = UnivariateLayout {
        rot: 0,
        data: block[1..].to_vec(),
        flags: pool[..nf].to_vec(),
        scratch: pool[nf..].to_vec(),
    };
    push_up_univariate(&mut c, &diag.fit, &enc, mode)?;
    qst_into(&mut c, n, &block, &pool, shift, true)?;
    let layout = SolverLayout {
        num_qubits: width,
        rot: 0,
        blocks: vec![block],
        pool,
    };
    Ok((c, layout))
}

/// Per-axis `U_S`, one bivariate `U_P`, per-axis `U_S†`.
pub fn build_solver_circuit_2d(
    spec: &ProblemSpec,
    diag: &SpectralDiagonal2D,
    shift: ShiftImpl,
    mode: FlagMode,
) -> Result<(Circuit, SolverLayout)> {
    if spec.dim != 2 {
        return Err(Error::Config("two-dimensional solver needs dim = 2".into()));
    }
    let n = axis_qubits(spec)?;
    let m = n - 1;
    if diag.num_qubits_per_axis() != m {
        return Err(Error::Config(format!(
            "diagonal fitted for {} qubits per axis, problem has {m}",
            diag.num_qubits_per_axis()
        )));
    }
    let t0 = &diag.fit.bounds[0][1..];
    let t1 = &diag.fit.bounds[1][1..];
    let nf = t0.len() + t1.len();
    let scratch = encoding_scratch(m, t0).max(encoding_scratch(m, t1));
    let pool_len = shift_ancillas(m, shift).max(nf + scratch);
    let width = 1 + 2 * n + pool_len;
    let block1: Vec<usize> = (1..=n).collect();
    let block0: Vec<usize> = (n + 1..=2 * n).collect();
    let pool: Vec<usize> = (2 * n + 1..width).collect();
    let mut c = Circuit::with_ancilla(width, width - 1 - 2 * m);
    for b in [&block0, &block1] {
        qst_into(&mut c, n, b, &pool, shift, false)?;
    }
    let enc = BivariateLayout {
        rot: 0,
        k0: block0[1..].to_vec(),
        k1: block1[1..].to_vec(),
        flags0: pool[..t0.len()].to_vec(),
        flags1: pool[t0.len()..nf].to_vec(),
        scratch: pool[nf..].to_vec(),
    };
    push_up_bivariate(&mut c, &diag.fit, &enc, mode)?;
    for b in [&block0, &block1] {
        qst_into(&mut c, n, b, &pool, shift, true)?;
    }
    let layout = SolverLayout {
        num_qubits: width,
        rot: 0,
        blocks: vec![block0, block1],
        pool,
    };
    Ok((c, layout))
}

impl PreparedSolver {
    /// Fits the diagonal of `spec` and builds the circuit.
    pub fn new(spec: &ProblemSpec, options: SolverOptions) -> Result<Self> {
        spec.validate()?;
        let diag = Diagonal::fit(spec, &options)?;
        Self::with_diagonal(spec, diag, options)
    }

    pub fn with_diagonal(
        spec: &ProblemSpec,
        diag: Diagonal,
        options: SolverOptions,
    ) -> Result<Self> {
        let (circuit, layout) = match &diag {
            Diagonal::One(d) => build_solver_circuit_1d(spec, d, options.shift, options.flag_mode)?,
            Diagonal::Two(d) => build_solver_circuit_2d(spec, d, options.shift, options.flag_mode)?,
        };
        Ok(PreparedSolver {
            spec: spec.clone(),
            diag,
            circuit,
            layout,
            options,
        })
    }

    /// Runs the circuit on `forcing` (same grid as the prepared problem).
    pub fn solve(&self, forcing: &[f64]) -> Result<QuantumSolveResult> {
        let count = self.spec.forcing.len();
        if forcing.len() != count {
            return Err(Error::Layout(format!(
                "forcing has {} samples, expected {count}",
                forcing.len()
            )));
        }
        let norm = forcing.iter().map(|v| v * v).sum::<f64>().sqrt();
        let inv_scale = 1.0 / self.diag.scale();
        if norm == 0.0 {
            return Ok(QuantumSolveResult {
                u: vec![0.0; count],
                scale_chain: chain(0.0, inv_scale, 0.0),
                raw_state: None,
                success_probability: 0.0,
                stray_probability: 0.0,
            });
        }
        let q = self.layout.num_qubits;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << q];
        for (i, v) in forcing.iter().enumerate() {
            amps[self.layout.grid_index(i)] = C64::new(v / norm, 0.0);
        }
        let mut state = StateVector::from_amplitudes(q, amps)?;
        state.apply_circuit(&self.circuit)?;
        let a = state.amplitudes();
        let rot = self.layout.rot_bit();
        let dirty = self.layout.ancilla_mask();
        let stray: f64 = a
            .iter()
            .enumerate()
            .filter(|(i, _)| i & dirty != 0)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        let branch: Vec<C64> = (0..count)
            .map(|i| a[rot | self.layout.grid_index(i)])
            .collect();
        let branch_norm = branch.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if branch_norm < MIN_BRANCH_NORM {
            return Err(Error::Postselection(branch_norm));
        }
        let scale_chain = chain(norm, inv_scale, branch_norm);
        let factor: f64 = scale_chain.iter().map(|s| s.factor).product();
        let m = self.spec.n_phys();
        let dim = self.spec.dim;
        // Rows of the sine transform vanish on the boundary; drop rounding residue there.
        let u = branch
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let boundary = if dim == 1 {
                    i == 0
                } else {
                    i / m == 0 || i % m == 0
                };
                if boundary {
                    0.0
                } else {
                    factor * z.re / branch_norm
                }
            })
            .collect();
        Ok(QuantumSolveResult {
            u,
            scale_chain,
            raw_state: self.options.keep_state.then_some(state),
            success_probability: branch_norm * branch_norm,
            stray_probability: stray,
        })
    }
}

fn chain(norm: f64, inv_scale: f64, branch: f64) -> Vec<ScaleFactor> {
    [
        ("input_norm", norm),
        ("inverse_scale", inv_scale),
        ("branch_norm", branch),
    ]
    .into_iter()
    .map(|(n, f)| ScaleFactor {
        name: n.into(),
        factor: f,
    })
    .collect()
}

/// Fits, builds and simulates the solver for `spec.forcing`.
pub fn quantum_solve(spec: &ProblemSpec, options: SolverOptions) -> Result<QuantumSolveResult> {
    PreparedSolver::new(spec, options)?.solve(&spec.forcing)
}

/// Classical pipeline with the fitted diagonal in place of the exact one.
pub fn classical_with_fitted(spec: &ProblemSpec, diag: &Diagonal) -> Result<Vec<f64>> {
    use crate::classical::solve::{apply_spectral_1d, apply_spectral_2d};
    match diag {
        Diagonal::One(d) => apply_spectral_1d(&spec.forcing, &d.fitted_values()),
        Diagonal::Two(d) => apply_spectral_2d(&spec.forcing, &d.fitted_values()),
    }
}

/// Independent white-noise draws solved through the quantum circuit. Draws are
/// seeded sequentially from `seed`, so the sample set does not depend on the
/// thread count.
pub fn sample_random_field_quantum(
    spec: &ProblemSpec,
    options: SolverOptions,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if spec.family != Family::Fractional {
        return Err(Error::Precondition(
            "random fields need a fractional problem".into(),
        ));
    }
    let tau = spec
        .params
        .map(|p| p.tau)
        .ok_or_else(|| Error::Config("fractional problem without parameters".into()))?;
    let solver = PreparedSolver::new(spec, options)?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..n_samples).map(|_| master.next_u64()).collect();
    let m = spec.n_phys();
    seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let f = white_noise_grid(m, spec.dim, tau, &mut rng);
            solver.solve(&f).map(|r| r.u)
        })
        .collect()
}
