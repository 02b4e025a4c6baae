use thiserror::Error;

use crate::graph::GraphError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),

    #[error("port {port} at vertex {vertex} is not in use")]
    UnusedPort { vertex: usize, port: usize },

    #[error("basis index ({vertex}, {port}) out of range for N = {num_vertices}, d = {degree}")]
    IndexOutOfRange {
        vertex: usize,
        port: usize,
        num_vertices: usize,
        degree: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("{name} = {value} is outside [0, 1]")]
    OutOfUnitInterval { name: &'static str, value: f64 },

    #[error("invalid coin block at vertex {vertex}: {reason}")]
    Coin { vertex: usize, reason: String },

    #[error("invalid coin specification: {0}")]
    CoinSpec(String),

    #[error("numerical invariant violated: {0}")]
    Numerical(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a numerical invariant rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfUnitInterval { name, value })
    }
}
