use serde::{Deserialize, Serialize};

/// Numerical tolerances used by validation routines.
///
/// Defaults match the invariants documented on each type; tests may tighten
/// them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed deviation of a pure state's squared norm from 1.
    pub norm: f64,
    /// Allowed deviation of a density operator's trace from 1.
    pub trace: f64,
    /// Largest allowed `|rho - rho^dagger|` entry.
    pub hermiticity: f64,
    /// Smallest allowed eigenvalue of a density operator (negative slack).
    pub min_eigenvalue: f64,
    /// Marginal entries in `[-marginal_clamp, 0)` are clamped to zero.
    pub marginal_clamp: f64,
    /// Largest allowed entry of `U^dagger U - I` for coin blocks.
    pub unitarity: f64,
    /// Smallest norm a trajectory branch may have before renormalizing.
    pub renormalization_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: 1e-10,
            trace: 1e-10,
            hermiticity: 1e-10,
            min_eigenvalue: 1e-10,
            marginal_clamp: 1e-12,
            unitarity: 1e-10,
            renormalization_floor: 1e-14,
        }
    }
}
