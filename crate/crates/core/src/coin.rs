//! Coin blocks and the block-diagonal coin operator.
//!
//! A coin block is the matrix acting on the coin amplitudes of one vertex:
//! `psi'_{j,k'} = sum_k U^j_{k' k} psi_{j,k}`. Rows and columns belonging
//! to ports a vertex does not use are zero, so the coin never creates
//! amplitude on a half-edge the shift cannot move.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::graph::PortGraph;
use crate::{CMatrix, CVector, Error, Result, Tolerances, C64};

/// A square coin matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinBlock(CMatrix);

impl CoinBlock {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::CoinSpec(format!(
                "coin block must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self(matrix))
    }

    /// Generalized Hadamard `(1/sqrt 2) [[1, -i e^{i phi}], [i e^{-i phi}, -1]]`.
    pub fn hadamard(phi: f64) -> Self {
        let i = C64::i();
        let s = FRAC_1_SQRT_2;
        Self(CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(s, 0.0),
                -i * C64::from_polar(s, phi),
                i * C64::from_polar(s, -phi),
                C64::new(-s, 0.0),
            ],
        ))
    }

    /// Discrete Fourier transform coin `(1/sqrt d) e^{2 pi i k k' / d}`.
    pub fn dft(d: usize) -> Self {
        let norm = 1.0 / (d as f64).sqrt();
        Self(CMatrix::from_fn(d, d, |a, b| {
            C64::from_polar(norm, 2.0 * PI * ((a * b) % d) as f64 / d as f64)
        }))
    }

    pub fn identity(d: usize) -> Self {
        Self(CMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    /// Largest entry of `U^dagger U - I`.
    pub fn unitarity_error(&self) -> f64 {
        unitarity_error(&self.0)
    }
}

pub(crate) fn unitarity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let gram = m.adjoint() * m;
    (gram - CMatrix::identity(n, n)).camax()
}

/// Coin blocks for a graph: one shared block or one per vertex.
#[derive(Debug, Clone, PartialEq)]
pub enum CoinSpec {
    Shared(CoinBlock),
    PerVertex(Vec<CoinBlock>),
}

/// Block-diagonal coin operator on the walker-plus-coin space.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinOperator {
    // d x d blocks, already zero-padded on unused ports
    blocks: Vec<CMatrix>,
    degree: usize,
}

impl CoinOperator {
    /// Checks each block against its vertex's used ports and assembles the
    /// operator.
    ///
    /// A vertex with `d_j < d` accepts either a `d_j x d_j` unitary, which is
    /// embedded on the used ports in ascending order, or a full `d x d` block
    /// whose unused rows and columns are zero.
    pub fn build(graph: &PortGraph, spec: &CoinSpec) -> Result<Self> {
        Self::build_with(graph, spec, &Tolerances::default())
    }

    pub fn build_with(graph: &PortGraph, spec: &CoinSpec, tol: &Tolerances) -> Result<Self> {
        let n = graph.num_vertices();
        let blocks = match spec {
            CoinSpec::Shared(block) => {
                if !graph.is_regular() {
                    return Err(Error::CoinSpec(
                        "a shared coin block needs every vertex to have the graph degree".into(),
                    ));
                }
                let embedded = embed_block(graph, 0, block, tol)?;
                vec![embedded; n]
            }
            CoinSpec::PerVertex(blocks) => {
                if blocks.len() != n {
                    return Err(Error::CoinSpec(format!(
                        "expected {n} coin blocks, got {}",
                        blocks.len()
                    )));
                }
                blocks
                    .iter()
                    .enumerate()
                    .map(|(j, b)| embed_block(graph, j, b, tol))
                    .collect::<Result<_>>()?
            }
        };
        Ok(Self {
            blocks,
            degree: graph.degree(),
        })
    }

    /// Default coin: `H_{pi/2}` on cycles and other 2-regular graphs, the
    /// `d_j`-point DFT at each vertex otherwise.
    pub fn default_for(graph: &PortGraph) -> Result<Self> {
        let spec = if graph.degree() == 2 && graph.is_regular() {
            CoinSpec::Shared(CoinBlock::hadamard(PI / 2.0))
        } else {
            dft_spec(graph)
        };
        Self::build(graph, &spec)
    }

    pub fn num_vertices(&self) -> usize {
        self.blocks.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.blocks.len() * self.degree
    }

    /// Embedded `d x d` block at `vertex`.
    pub fn block(&self, vertex: usize) -> &CMatrix {
        &self.blocks[vertex]
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    /// Dense `N d x N d` matrix.
    pub fn to_matrix(&self) -> CMatrix {
        let d = self.degree;
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for (j, b) in self.blocks.iter().enumerate() {
            m.view_mut((j * d, j * d), (d, d)).copy_from(b);
        }
        m
    }

    pub fn apply(&self, psi: &CVector) -> CVector {
        let d = self.degree;
        let mut out = CVector::zeros(psi.len());
        for (j, b) in self.blocks.iter().enumerate() {
            let r = j * d..(j + 1) * d;
            out.rows_mut(r.start, d)
                .copy_from(&(b * psi.rows(r.start, d)));
        }
        out
    }

    /// `rho -> C rho C^dagger`, block by block.
    pub fn conjugate(&self, rho: &mut CMatrix) {
        let d = self.degree;
        let n = self.blocks.len();
        for a in 0..n {
            for b in 0..n {
                let mut view = rho.view_mut((a * d, b * d), (d, d));
                let updated = &self.blocks[a] * &view * self.blocks[b].adjoint();
                view.copy_from(&updated);
            }
        }
    }
}

fn embed_block(
    graph: &PortGraph,
    vertex: usize,
    block: &CoinBlock,
    tol: &Tolerances,
) -> Result<CMatrix> {
    let d = graph.degree();
    let used: Vec<usize> = graph.used_ports(vertex).collect();
    let dj = used.len();
    let m = block.matrix();
    let coin_err = |reason: String| Error::Coin { vertex, reason };

    let embedded = if m.nrows() == dj {
        let mut full = CMatrix::zeros(d, d);
        for (a, &pa) in used.iter().enumerate() {
            for (b, &pb) in used.iter().enumerate() {
                full[(pa, pb)] = m[(a, b)];
            }
        }
        full
    } else if m.nrows() == d {
        for k in (0..d).filter(|k| !used.contains(k)) {
            let row_zero = m.row(k).iter().all(|z| z.norm() == 0.0);
            let col_zero = m.column(k).iter().all(|z| z.norm() == 0.0);
            if !(row_zero && col_zero) {
                return Err(coin_err(format!(
                    "port {k} is unused but its row or column is nonzero"
                )));
            }
        }
        m.clone()
    } else {
        return Err(coin_err(format!(
            "block is {0}x{0}, vertex degree is {dj} and graph degree is {d}",
            m.nrows()
        )));
    };

    let restricted = CMatrix::from_fn(dj, dj, |a, b| embedded[(used[a], used[b])]);
    let err = unitarity_error(&restricted);
    if err > tol.unitarity {
        return Err(coin_err(format!(
            "not unitary on the used ports (error {err:e})"
        )));
    }
    Ok(embedded)
}

/// Per-vertex DFT coins sized to each vertex degree.
pub fn dft_spec(graph: &PortGraph) -> CoinSpec {
    CoinSpec::PerVertex(
        graph
            .vertex_degrees()
            .iter()
            .map(|&dj| CoinBlock::dft(dj))
            .collect(),
    )
}

/// Coin choice as written in configuration files.
///
/// Complex entries are `[re, im]` pairs; `blocks` holds either one shared
/// block or one block per vertex, each a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoinConfig {
    Hadamard {
        #[serde(default = "default_phi")]
        phi: f64,
    },
    Dft {},
    Custom {
        blocks: Vec<Vec<Vec<[f64; 2]>>>,
    },
}

fn default_phi() -> f64 {
    PI / 2.0
}

impl Default for CoinConfig {
    fn default() -> Self {
        Self::Hadamard { phi: default_phi() }
    }
}

impl CoinConfig {
    pub fn to_spec(&self, graph: &PortGraph) -> Result<CoinSpec> {
        match self {
            Self::Hadamard { phi } => {
                if !phi.is_finite() {
                    return Err(Error::CoinSpec(format!("phi must be finite, got {phi}")));
                }
                if graph.degree() != 2 || !graph.is_regular() {
                    return Err(Error::CoinSpec(
                        "the Hadamard coin needs every vertex to have degree 2".into(),
                    ));
                }
                Ok(CoinSpec::Shared(CoinBlock::hadamard(*phi)))
            }
            Self::Dft {} => Ok(dft_spec(graph)),
            Self::Custom { blocks } => {
                let parsed = blocks
                    .iter()
                    .enumerate()
                    .map(|(i, rows)| parse_block(i, rows))
                    .collect::<Result<Vec<_>>>()?;
                match parsed.len() {
                    0 => Err(Error::CoinSpec("custom coin has no blocks".into())),
                    1 if graph.num_vertices() != 1 => Ok(CoinSpec::Shared(
                        parsed.into_iter().next().expect("one block"),
                    )),
                    _ => Ok(CoinSpec::PerVertex(parsed)),
                }
            }
        }
    }

    pub fn build(&self, graph: &PortGraph) -> Result<CoinOperator> {
        CoinOperator::build(graph, &self.to_spec(graph)?)
    }
}

fn parse_block(index: usize, rows: &[Vec<[f64; 2]>]) -> Result<CoinBlock> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::CoinSpec(format!("block {index} is empty")));
    }
    if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != n) {
        return Err(Error::CoinSpec(format!(
            "block {index} row {r} has {} entries, expected {n}",
            row.len()
        )));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::CoinSpec(format!(
            "block {index} has a non-finite entry"
        )));
    }
    CoinBlock::new(CMatrix::from_fn(n, n, |a, b| {
        let [re, im] = rows[a][b];
        C64::new(re, im)
    }))
}

/// Parses a coin configuration from JSON.
pub fn parse_coin_json(text: &str) -> Result<CoinConfig> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("coin specification: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{assign_ports, PortGraph};
    use approx::assert_abs_diff_eq;

    fn close(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).camax()
    }

    #[test]
    fn hadamard_at_half_pi_is_real_hadamard() {
        let s = FRAC_1_SQRT_2;
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(s, 0.0),
                C64::new(s, 0.0),
                C64::new(s, 0.0),
                C64::new(-s, 0.0),
            ],
        );
        assert!(close(CoinBlock::hadamard(PI / 2.0).matrix(), &expected) < 1e-15);
    }

    #[test]
    fn hadamard_at_zero() {
        let s = FRAC_1_SQRT_2;
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(s, 0.0),
                C64::new(0.0, -s),
                C64::new(0.0, s),
                C64::new(-s, 0.0),
            ],
        );
        assert!(close(CoinBlock::hadamard(0.0).matrix(), &expected) < 1e-15);
    }

    #[test]
    fn hadamard_unitary_for_any_phase() {
        for i in 0..50 {
            let phi = -7.0 + 0.29 * i as f64;
            assert!(CoinBlock::hadamard(phi).unitarity_error() < 1e-12);
        }
    }

    #[test]
    fn dft_small_cases() {
        assert_eq!(CoinBlock::dft(1).matrix(), &CMatrix::identity(1, 1));
        let h = CoinBlock::hadamard(PI / 2.0);
        assert!(close(CoinBlock::dft(2).matrix(), h.matrix()) < 1e-15);
        for d in 3..=8 {
            assert!(CoinBlock::dft(d).unitarity_error() < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn cycle_coin_operator() {
        let g = PortGraph::cycle(3).unwrap();
        let c = CoinOperator::build(&g, &CoinSpec::Shared(CoinBlock::hadamard(PI / 2.0))).unwrap();
        let m = c.to_matrix();
        assert_eq!(m.nrows(), 6);
        assert!(unitarity_error(&m) < 1e-12);
        for j in 0..3 {
            assert!(close(&m.view((2 * j, 2 * j), (2, 2)).into_owned(), c.block(0)) == 0.0);
        }
        // off-diagonal blocks are zero
        assert_eq!(m.view((0, 2), (2, 4)).camax(), 0.0);
    }

    #[test]
    fn shared_equals_per_vertex() {
        let g = PortGraph::cycle(5).unwrap();
        let h = CoinBlock::hadamard(0.3);
        let shared = CoinOperator::build(&g, &CoinSpec::Shared(h.clone())).unwrap();
        let per = CoinOperator::build(&g, &CoinSpec::PerVertex(vec![h; 5])).unwrap();
        assert_eq!(shared, per);
    }

    #[test]
    fn reduced_degree_vertex_rejects_full_hadamard() {
        // path 0 - 1 - 2, d = 2, vertices 0 and 2 have degree 1
        let g = PortGraph::from_edge_list(&assign_ports(&[(0, 1), (1, 2)]).unwrap()).unwrap();
        let h = CoinBlock::hadamard(PI / 2.0);
        let err = CoinOperator::build(&g, &CoinSpec::PerVertex(vec![h.clone(); 3])).unwrap_err();
        assert!(matches!(err, Error::Coin { vertex: 0, .. }), "{err}");
        assert!(CoinOperator::build(&g, &CoinSpec::Shared(h.clone())).is_err());

        let ok = CoinOperator::build(
            &g,
            &CoinSpec::PerVertex(vec![CoinBlock::identity(1), h, CoinBlock::identity(1)]),
        )
        .unwrap();
        assert_eq!(ok.block(0)[(1, 1)], C64::new(0.0, 0.0));
        assert_eq!(ok.block(0)[(0, 0)], C64::new(1.0, 0.0));
    }

    #[test]
    fn non_unitary_block_rejected() {
        let g = PortGraph::cycle(3).unwrap();
        let bad = CoinBlock::new(CMatrix::from_element(2, 2, C64::new(0.5, 0.0))).unwrap();
        assert!(matches!(
            CoinOperator::build(&g, &CoinSpec::Shared(bad)),
            Err(Error::Coin { .. })
        ));
    }

    #[test]
    fn coin_preserves_vertex_marginal() {
        let g = PortGraph::cycle(4).unwrap();
        let c = CoinOperator::default_for(&g).unwrap();
        let psi = CVector::from_fn(8, |i, _| C64::new(i as f64, 1.0 - i as f64));
        let out = c.apply(&psi);
        for j in 0..4 {
            let before: f64 = (0..2).map(|k| psi[2 * j + k].norm_sqr()).sum();
            let after: f64 = (0..2).map(|k| out[2 * j + k].norm_sqr()).sum();
            assert_abs_diff_eq!(before, after, epsilon = 1e-12);
        }
    }

    #[test]
    fn conjugate_matches_dense_product() {
        let g = PortGraph::from_edge_list(
            &assign_ports(&[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]).unwrap(),
        )
        .unwrap();
        let c = CoinOperator::default_for(&g).unwrap();
        let n = g.dim();
        let mut rho = CMatrix::from_fn(n, n, |a, b| {
            C64::new((a * 3 + b) as f64, a as f64 - b as f64)
        });
        let dense = c.to_matrix() * &rho * c.to_matrix().adjoint();
        c.conjugate(&mut rho);
        assert!(close(&rho, &dense) < 1e-10);
    }

    #[test]
    fn config_parsing() {
        let c = parse_coin_json(r#"{"type": "hadamard", "phi": 0.25}"#).unwrap();
        assert_eq!(c, CoinConfig::Hadamard { phi: 0.25 });
        assert_eq!(
            parse_coin_json(r#"{"type": "dft"}"#).unwrap(),
            CoinConfig::Dft {}
        );
        let custom =
            parse_coin_json(r#"{"type": "custom", "blocks": [[[[0,0],[1,0]],[[1,0],[0,0]]]]}"#)
                .unwrap();
        let g = PortGraph::cycle(3).unwrap();
        let op = custom.build(&g).unwrap();
        assert_eq!(op.block(2)[(0, 1)], C64::new(1.0, 0.0));
        assert!(parse_coin_json(r#"{"type": "biased"}"#).is_err());
        assert!(parse_coin_json(r#"{"type": "dft", "extra": 1}"#).is_err());
    }

    #[test]
    fn ragged_custom_block_rejected() {
        let cfg = CoinConfig::Custom {
            blocks: vec![vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0]]]],
        };
        let g = PortGraph::cycle(3).unwrap();
        assert!(matches!(cfg.to_spec(&g), Err(Error::CoinSpec(_))));
    }

    #[test]
    fn hadamard_config_needs_degree_two() {
        let g = PortGraph::from_edge_list(&assign_ports(&[(0, 1), (1, 2)]).unwrap()).unwrap();
        assert!(CoinConfig::default().to_spec(&g).is_err());
    }
}
