//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use coinwalk::graph::{assign_ports, PortGraph};
use coinwalk::{CMatrix, CVector, C64};
use rand::Rng;

/// Six vertices, eight edges; vertex 0 has degree four, vertex 5 degree one.
pub const SAMPLE_ADJACENCY: [(usize, usize); 8] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (1, 2),
    (2, 3),
    (3, 4),
    (4, 5),
];

pub fn sample_graph() -> PortGraph {
    PortGraph::from_edge_list(&assign_ports(&SAMPLE_ADJACENCY).unwrap()).unwrap()
}

/// Neighbour lists of an undirected simple graph given as pairs.
pub fn adjacency_lists(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

pub fn cycle_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|j| (j, (j + 1) % n)).collect()
}

/// Simple random walk: uniform move to a neighbour.
pub fn random_walk_step(p: &[f64], adj: &[Vec<usize>]) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    for (u, nbrs) in adj.iter().enumerate() {
        if nbrs.is_empty() {
            out[u] += p[u];
            continue;
        }
        let share = p[u] / nbrs.len() as f64;
        for &v in nbrs {
            out[v] += share;
        }
    }
    out
}

pub fn tvd(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let norm = v.norm();
    v.unscale(norm)
}

/// `A A^dagger / tr`, full rank with probability one.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho.unscale(tr.re)
}

/// `Tr_m` of a (coin (x) meter) operator, meter dimension 2.
pub fn trace_out_meter(joint: &CMatrix) -> CMatrix {
    let n = joint.nrows() / 2;
    CMatrix::from_fn(n, n, |a, b| {
        joint[(2 * a, 2 * b)] + joint[(2 * a + 1, 2 * b + 1)]
    })
}

/// Random density matrix supported on the used half-edges of `g`.
pub fn random_density_on_used<R: Rng>(rng: &mut R, g: &coinwalk::graph::PortGraph) -> CMatrix {
    let d = g.degree();
    let used: Vec<usize> = (0..g.dim()).filter(|&a| g.is_used(a / d, a % d)).collect();
    let small = random_density(rng, used.len());
    let mut m = CMatrix::zeros(g.dim(), g.dim());
    for (i, &a) in used.iter().enumerate() {
        for (j, &b) in used.iter().enumerate() {
            m[(a, b)] = small[(i, j)];
        }
    }
    m
}

/// Projector onto the used half-edges of `g`.
pub fn used_projector(g: &coinwalk::graph::PortGraph) -> CMatrix {
    let d = g.degree();
    CMatrix::from_fn(g.dim(), g.dim(), |a, b| {
        if a == b && g.is_used(a / d, a % d) {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
