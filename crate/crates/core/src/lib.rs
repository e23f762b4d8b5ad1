//! Quantum sine-transform spectral solver.
//!
//! Circuit builders for the quantum Fourier and sine transforms, the
//! antisymmetric reflection unitary and piecewise-polynomial diagonal
//! encodings; a dense state-vector simulator; a `{CNOT, U3}` transpiler with
//! gate counting; and a classical spectral reference for Dirichlet problems.

pub mod circuit;
pub mod classical;
pub mod error;
pub mod experiments;
pub mod gate;
pub mod io;
pub mod polyenc;
pub mod qft;
pub mod reflection;
pub mod solver;
pub mod statevector;
pub mod transpile;

pub use circuit::Circuit;
pub use error::{Error, Result};
pub use gate::{Control, GateApplication, GateKind};
pub use statevector::StateVector;
