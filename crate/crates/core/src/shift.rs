//! Conditional shifts.
//!
//! Two conventions are supported. The port-swapping shift follows the
//! half-edge pairing, `S|j,k> = |zeta(j,k)>`, and is its own inverse. The
//! direction-preserving shift on a cycle keeps the coin state and moves
//! `|j,0>` one way and `|j,1>` the other, so repeated steps keep travelling.

use serde::{Deserialize, Serialize};

use crate::graph::{GraphError, PortGraph};
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftKind {
    PortSwap,
    DirectionPreserving,
}

impl std::str::FromStr for ShiftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "port-swap" => Ok(Self::PortSwap),
            "direction-preserving" => Ok(Self::DirectionPreserving),
            other => Err(Error::Parse(format!(
                "unknown shift `{other}` (expected port-swap or direction-preserving)"
            ))),
        }
    }
}

impl std::fmt::Display for ShiftKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::PortSwap => "port-swap",
            Self::DirectionPreserving => "direction-preserving",
        })
    }
}

/// Which way coin state 0 travels on the direction-preserving cycle shift.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleOrientation {
    /// `|j,0> -> |j+1,0>`, `|j,1> -> |j-1,1>`.
    #[default]
    Increasing,
    /// `|j,0> -> |j-1,0>`, `|j,1> -> |j+1,1>`; the mirror image.
    Decreasing,
}

/// Permutation of the flat basis `j * d + k`.
///
/// Basis states on unused ports map to themselves; they never carry weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftOperator {
    targets: Vec<usize>,
    kind: ShiftKind,
    num_vertices: usize,
    degree: usize,
}

impl ShiftOperator {
    /// Port-swapping shift `S|j,k> = |zeta(j,k)>`.
    pub fn port_swap(graph: &PortGraph) -> Self {
        let mut targets: Vec<usize> = (0..graph.dim()).collect();
        for (from, to) in graph.half_edges() {
            targets[graph.flat_index(from.vertex, from.port)] =
                graph.flat_index(to.vertex, to.port);
        }
        Self {
            targets,
            kind: ShiftKind::PortSwap,
            num_vertices: graph.num_vertices(),
            degree: graph.degree(),
        }
    }

    /// Direction-preserving shift on the `n`-cycle with coin state 0 moving
    /// to increasing vertex index.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        Self::cycle_oriented(n, CycleOrientation::Increasing)
    }

    pub fn cycle_oriented(n: usize, orientation: CycleOrientation) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::CycleTooSmall(n));
        }
        if 2 * n as u128 > crate::graph::MAX_DIMENSION as u128 {
            return Err(GraphError::TooLarge(2 * n as u128));
        }
        let (up, down) = match orientation {
            CycleOrientation::Increasing => (0, 1),
            CycleOrientation::Decreasing => (1, 0),
        };
        let mut targets = vec![0; 2 * n];
        for j in 0..n {
            targets[2 * j + up] = 2 * ((j + 1) % n) + up;
            targets[2 * j + down] = 2 * ((j + n - 1) % n) + down;
        }
        Ok(Self {
            targets,
            kind: ShiftKind::DirectionPreserving,
            num_vertices: n,
            degree: 2,
        })
    }

    /// Shift of the given kind for `graph`. The direction-preserving kind is
    /// only defined on cycles built by [`PortGraph::cycle`].
    pub fn for_graph(graph: &PortGraph, kind: ShiftKind) -> Result<Self> {
        match kind {
            ShiftKind::PortSwap => Ok(Self::port_swap(graph)),
            ShiftKind::DirectionPreserving => {
                let n = graph.num_vertices();
                match PortGraph::cycle(n) {
                    Ok(cycle) if &cycle == graph => Ok(Self::cycle(n)?),
                    _ => Err(Error::Contract(
                        "the direction-preserving shift needs a cycle graph".into(),
                    )),
                }
            }
        }
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.targets.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Flat index that basis state `index` is sent to.
    pub fn target(&self, index: usize) -> usize {
        self.targets[index]
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn apply(&self, psi: &CVector) -> CVector {
        let mut out = CVector::zeros(psi.len());
        for (i, &t) in self.targets.iter().enumerate() {
            out[t] = psi[i];
        }
        out
    }

    /// `rho -> S rho S^dagger`.
    pub fn conjugate(&self, rho: &CMatrix) -> CMatrix {
        let n = rho.nrows();
        let mut out = CMatrix::zeros(n, n);
        for b in 0..n {
            let tb = self.targets[b];
            for a in 0..n {
                out[(self.targets[a], tb)] = rho[(a, b)];
            }
        }
        out
    }

    pub fn to_matrix(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (i, &t) in self.targets.iter().enumerate() {
            m[(t, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &ShiftOperator) -> ShiftOperator {
        ShiftOperator {
            targets: self.targets.iter().map(|&t| other.targets[t]).collect(),
            ..self.clone()
        }
    }

    pub fn is_identity(&self) -> bool {
        self.targets.iter().enumerate().all(|(i, &t)| i == t)
    }

    pub fn is_involution(&self) -> bool {
        self.then(self).is_identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::assign_ports;

    #[test]
    fn port_swap_on_cycle() {
        let g = PortGraph::cycle(3).unwrap();
        let s = ShiftOperator::port_swap(&g);
        // zeta(0,0) = (1,1)
        assert_eq!(s.target(0), 3);
        assert!(s.is_involution());
    }

    #[test]
    fn port_swap_involution_on_general_graph() {
        let g = PortGraph::from_edge_list(
            &assign_ports(&[
                (0, 1),
                (0, 2),
                (0, 3),
                (0, 4),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
            ])
            .unwrap(),
        )
        .unwrap();
        let s = ShiftOperator::port_swap(&g);
        assert!(s.is_involution());
        let m = s.to_matrix();
        assert_eq!(&m * &m, CMatrix::identity(g.dim(), g.dim()));
    }

    #[test]
    fn direction_preserving_steps() {
        let s = ShiftOperator::cycle(7).unwrap();
        assert_eq!(s.target(0), 2); // |0,0> -> |1,0>
        assert_eq!(s.target(1), 13); // |0,1> -> |6,1>
        let s2 = s.then(&s);
        assert_eq!(s2.target(0), 4); // |2,0>
        assert!(!s.is_involution());
    }

    #[test]
    fn full_loop_is_identity() {
        let s = ShiftOperator::cycle(3).unwrap();
        assert!(s.then(&s).then(&s).is_identity());
    }

    #[test]
    fn decreasing_orientation_mirrors() {
        let s = ShiftOperator::cycle_oriented(7, CycleOrientation::Decreasing).unwrap();
        assert_eq!(s.target(0), 12); // |0,0> -> |6,0>
        assert_eq!(s.target(1), 3); // |0,1> -> |1,1>
    }

    #[test]
    fn small_cycle_rejected() {
        assert!(ShiftOperator::cycle(2).is_err());
    }

    #[test]
    fn direction_preserving_needs_cycle() {
        let path = PortGraph::from_edge_list(&assign_ports(&[(0, 1), (1, 2)]).unwrap()).unwrap();
        assert!(ShiftOperator::for_graph(&path, ShiftKind::DirectionPreserving).is_err());
        let cycle = PortGraph::cycle(5).unwrap();
        assert!(ShiftOperator::for_graph(&cycle, ShiftKind::DirectionPreserving).is_ok());
    }

    #[test]
    fn conjugate_matches_dense() {
        let s = ShiftOperator::cycle(4).unwrap();
        let rho = CMatrix::from_fn(8, 8, |a, b| C64::new(a as f64, b as f64));
        let m = s.to_matrix();
        assert_eq!(s.conjugate(&rho), &m * &rho * m.adjoint());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "port-swap".parse::<ShiftKind>().unwrap(),
            ShiftKind::PortSwap
        );
        assert!("sideways".parse::<ShiftKind>().is_err());
    }
}
