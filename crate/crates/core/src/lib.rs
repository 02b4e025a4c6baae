//! Coined discrete-time quantum walks on port-labeled graphs.
//!
//! The walker lives on the `N * d` dimensional space spanned by `|j, k>`
//! (vertex `j`, coin/port `k`), flattened vertex-major as `j * d + k`.
//! One time step is a coin toss followed by a conditional shift. A qubit
//! meter coupled to the coin with strength `beta` in `[0, 1]` turns the
//! unitary walk (`beta = 0`) continuously into the classical random walk
//! (`beta = 1`).
//!
//! Modules:
//! - [`graph`]: port-labeled graphs and the half-edge pairing.
//! - [`state`]: pure states, density operators, marginals, partial trace.
//! - [`coin`]: per-vertex coin blocks and the block-diagonal coin operator.
//! - [`shift`]: port-swapping and direction-preserving shifts.
//! - [`meter`]: the coin-meter coupling and its dephasing Kraus form.
//! - [`evolution`]: step maps, density evolution and trajectory sampling.
//! - [`classical`]: the classical random-walk oracle.
//! - [`analysis`]: distances, mixing curves and the complementarity sweep.

pub mod analysis;
pub mod classical;
pub mod coin;
mod error;
pub mod evolution;
pub mod graph;
pub mod meter;
pub mod rng;
pub mod shift;
pub mod state;
mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Crate version, recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
