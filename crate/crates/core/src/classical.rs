//! Classical random walks: the fully measured limit of the quantum walk.

use serde::Serialize;

use crate::coin::CoinOperator;
use crate::graph::PortGraph;
use crate::shift::ShiftOperator;
use crate::{Error, Result};

/// Probability distribution over vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    probabilities: Vec<f64>,
}

impl Distribution {
    /// Validates nonnegativity and normalization (to 1e-12).
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::Empty("distribution"));
        }
        if let Some((j, p)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::Numerical(format!("probability {p} at vertex {j}")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical(format!("probabilities sum to {total}")));
        }
        Ok(Self { probabilities })
    }

    pub(crate) fn from_raw(probabilities: Vec<f64>) -> Self {
        Self { probabilities }
    }

    /// Point mass at `vertex`.
    pub fn delta(len: usize, vertex: usize) -> Self {
        let mut probabilities = vec![0.0; len];
        probabilities[vertex] = 1.0;
        Self { probabilities }
    }

    pub fn uniform(len: usize) -> Self {
        Self {
            probabilities: vec![1.0 / len as f64; len],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.probabilities[j]
    }
}

/// One step of the unbiased walk: mass at `j` splits evenly over its edges.
/// Mass on an isolated vertex stays put.
pub fn classical_step(p: &Distribution, graph: &PortGraph) -> Distribution {
    let mut next = vec![0.0; graph.num_vertices()];
    for (j, &mass) in p.probabilities().iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let neighbors = graph.neighbors(j);
        if neighbors.is_empty() {
            next[j] += mass;
            continue;
        }
        let share = mass / neighbors.len() as f64;
        for nb in neighbors {
            next[nb] += share;
        }
    }
    Distribution::from_raw(next)
}

pub fn classical_run(p0: &Distribution, graph: &PortGraph, steps: usize) -> Distribution {
    (0..steps).fold(p0.clone(), |p, _| classical_step(&p, graph))
}

/// All marginals `p_0, ..., p_steps`.
pub fn classical_trajectory(
    p0: &Distribution,
    graph: &PortGraph,
    steps: usize,
) -> Vec<Distribution> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(p0.clone());
    for _ in 0..steps {
        let next = classical_step(out.last().expect("nonempty"), graph);
        out.push(next);
    }
    out
}

/// Markov chain on half-edges obtained by measuring the coin completely
/// after every toss.
///
/// From `|j, k>` the coin moves to `|j, k'>` with probability
/// `|U^j_{k' k}|^2`, then the shift carries it along. For unbiased coins the
/// vertex marginal agrees with [`classical_step`]; biased coins give the
/// matching biased chain.
#[derive(Debug, Clone)]
pub struct HalfEdgeChain {
    num_vertices: usize,
    degree: usize,
    // (target flat index, probability) per source flat index
    transitions: Vec<Vec<(usize, f64)>>,
}

impl HalfEdgeChain {
    pub fn new(coin: &CoinOperator, shift: &ShiftOperator) -> Result<Self> {
        if coin.dim() != shift.dim() {
            return Err(Error::Dimension {
                expected: coin.dim(),
                actual: shift.dim(),
            });
        }
        let d = coin.degree();
        let transitions = (0..coin.dim())
            .map(|src| {
                let (j, k) = (src / d, src % d);
                let block = coin.block(j);
                (0..d)
                    .filter_map(|out| {
                        let w = block[(out, k)].norm_sqr();
                        (w > 0.0).then(|| (shift.target(j * d + out), w))
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            num_vertices: coin.num_vertices(),
            degree: d,
            transitions,
        })
    }

    pub fn step(&self, p: &[f64]) -> Vec<f64> {
        let mut next = vec![0.0; p.len()];
        for (src, &mass) in p.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for &(dst, w) in &self.transitions[src] {
                next[dst] += mass * w;
            }
        }
        next
    }

    /// Vertex marginals at times `0..=steps`, starting from `|vertex, port>`.
    pub fn run_from(&self, vertex: usize, port: usize, steps: usize) -> Vec<Distribution> {
        let mut p = vec![0.0; self.num_vertices * self.degree];
        p[vertex * self.degree + port] = 1.0;
        let mut out = vec![self.vertex_marginal(&p)];
        for _ in 0..steps {
            p = self.step(&p);
            out.push(self.vertex_marginal(&p));
        }
        out
    }

    pub fn vertex_marginal(&self, p: &[f64]) -> Distribution {
        Distribution::from_raw(p.chunks(self.degree).map(|b| b.iter().sum()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn binomial(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    // p_t(j) = sum over m right-moves of C(t, m) / 2^t at position 2m - t mod N
    fn cycle_closed_form(n: usize, t: usize) -> Vec<f64> {
        let mut p = vec![0.0; n];
        for m in 0..=t {
            let pos = (2 * m as i64 - t as i64).rem_euclid(n as i64) as usize;
            p[pos] += binomial(t as u64, m as u64) / 2f64.powi(t as i32);
        }
        p
    }

    #[test]
    fn one_step_on_cycle() {
        let g = PortGraph::cycle(7).unwrap();
        let p = classical_step(&Distribution::delta(7, 0), &g);
        assert_eq!(p[1], 0.5);
        assert_eq!(p[6], 0.5);
        assert_abs_diff_eq!(p.total(), 1.0);
    }

    #[test]
    fn two_steps_on_cycle() {
        let g = PortGraph::cycle(7).unwrap();
        let p = classical_run(&Distribution::delta(7, 0), &g, 2);
        assert_eq!(p.probabilities(), &[0.5, 0.0, 0.25, 0.0, 0.0, 0.25, 0.0]);
    }

    #[test]
    fn zero_steps_is_identity() {
        let g = PortGraph::cycle(5).unwrap();
        let p0 = Distribution::new(vec![0.1, 0.2, 0.3, 0.4, 0.0]).unwrap();
        assert_eq!(classical_run(&p0, &g, 0), p0);
    }

    #[test]
    fn uniform_is_stationary_on_regular_graphs() {
        let g = PortGraph::cycle(9).unwrap();
        let u = Distribution::uniform(9);
        let p = classical_step(&u, &g);
        for j in 0..9 {
            assert_abs_diff_eq!(p[j], u[j], epsilon = 1e-15);
        }
    }

    #[test]
    fn matches_binomial_closed_form() {
        for n in 3..=9 {
            let g = PortGraph::cycle(n).unwrap();
            let mut p = Distribution::delta(n, 0);
            for t in 0..=40 {
                let expect = cycle_closed_form(n, t);
                for j in 0..n {
                    assert_abs_diff_eq!(p[j], expect[j], epsilon = 1e-12);
                }
                p = classical_step(&p, &g);
            }
        }
    }

    #[test]
    fn odd_cycle_mixes() {
        let g = PortGraph::cycle(7).unwrap();
        let p = classical_run(&Distribution::delta(7, 0), &g, 200);
        let tvd: f64 = p
            .probabilities()
            .iter()
            .map(|x| (x - 1.0 / 7.0).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tvd < 0.01, "tvd {tvd}");
    }

    #[test]
    fn even_cycle_oscillates() {
        let g = PortGraph::cycle(6).unwrap();
        let p = classical_run(&Distribution::delta(6, 0), &g, 501);
        // odd time: all mass on odd vertices
        let even_mass: f64 = (0..6).step_by(2).map(|j| p[j]).sum();
        assert_abs_diff_eq!(even_mass, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(vec![f64::NAN, 1.0]).is_err());
        assert!(Distribution::new(vec![]).is_err());
    }
}
