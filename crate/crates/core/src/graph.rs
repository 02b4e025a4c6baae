//! Undirected graphs with labeled edge ends ("ports").
//!
//! Every edge has two ends, each identified by a `(vertex, port)` pair. The
//! pairing map `zeta` sends one end of an edge to the other; it is a fixed-point
//! free involution on the set of used ports. Port labels are arbitrary but
//! fixed for the lifetime of the graph, and they select the coin state that
//! moves the walker along the edge.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Error, Result};

/// One end of an edge: a vertex together with the port label at that vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfEdge {
    pub vertex: usize,
    pub port: usize,
}

impl HalfEdge {
    pub const fn new(vertex: usize, port: usize) -> Self {
        Self { vertex, port }
    }
}

impl fmt::Display for HalfEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.vertex, self.port)
    }
}

/// An edge between `(u, pu)` and `(v, pv)`. Field names follow the graph file
/// format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: usize,
    pub pu: usize,
    pub v: usize,
    pub pv: usize,
}

impl EdgeRecord {
    pub const fn new(u: usize, pu: usize, v: usize, pv: usize) -> Self {
        Self { u, pu, v, pv }
    }

    pub fn ends(&self) -> (HalfEdge, HalfEdge) {
        (
            HalfEdge::new(self.u, self.pu),
            HalfEdge::new(self.v, self.pv),
        )
    }
}

/// Serialization form of an edge set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeList {
    pub edges: Vec<EdgeRecord>,
}

impl EdgeList {
    pub fn new(edges: Vec<EdgeRecord>) -> Self {
        Self { edges }
    }
}

/// A single violated structural invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphViolation {
    VertexOutOfRange { vertex: usize, num_vertices: usize },
    SelfLoop { vertex: usize },
    DuplicateHalfEdge(HalfEdge),
    ParallelEdge { u: usize, v: usize },
    PortOutOfRange { end: HalfEdge, degree: usize },
    DegreeMismatch { declared: usize, actual: usize },
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VertexOutOfRange {
                vertex,
                num_vertices,
            } => write!(f, "vertex {vertex} out of range (N = {num_vertices})"),
            Self::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            Self::DuplicateHalfEdge(end) => write!(f, "(vertex, port) {end} used more than once"),
            Self::ParallelEdge { u, v } => write!(f, "more than one edge between {u} and {v}"),
            Self::PortOutOfRange { end, degree } => {
                write!(f, "port of {end} is not below the degree {degree}")
            }
            Self::DegreeMismatch { declared, actual } => write!(
                f,
                "declared degree {declared} differs from the largest vertex degree {actual}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("cycle needs at least 3 vertices, got {0}")]
    CycleTooSmall(usize),

    #[error("graph must have at least one vertex and one edge")]
    Empty,

    #[error("graph has {0} half-edge slots; the limit is {MAX_DIMENSION}")]
    TooLarge(u128),

    #[error("invalid graph: {}", join_violations(.0))]
    Invalid(Vec<GraphViolation>),

    #[error("graph file: {message} (line {line}, column {column})")]
    Parse {
        message: String,
        line: usize,
        column: usize,
    },
}

fn join_violations(v: &[GraphViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Largest supported `N * d`. Operators are dense, so anything near this is
/// already far beyond what fits in memory; the cap keeps a malformed input
/// from triggering a huge allocation before validation.
pub const MAX_DIMENSION: usize = 1 << 20;

fn check_size(num_vertices: usize, degree: usize) -> Result<(), GraphError> {
    let slots = num_vertices as u128 * degree.max(1) as u128;
    if slots > MAX_DIMENSION as u128 {
        return Err(GraphError::TooLarge(slots));
    }
    Ok(())
}

/// An undirected simple graph with port labels.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortGraph {
    num_vertices: usize,
    degree: usize,
    vertex_degrees: Vec<usize>,
    // flat j * degree + k -> partner end, None for unused ports
    zeta: Vec<Option<HalfEdge>>,
    edges: Vec<EdgeRecord>,
}

impl PortGraph {
    /// Cycle on `n` vertices with `zeta(j, 0) = (j + 1, 1)`.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::CycleTooSmall(n));
        }
        check_size(n, 2)?;
        let edges = (0..n)
            .map(|j| EdgeRecord::new(j, 0, (j + 1) % n, 1))
            .collect();
        Self::from_parts(n, Some(2), &EdgeList::new(edges))
    }

    /// Builds a graph from an edge list, inferring `N` as one past the largest
    /// vertex index and `d` as the largest vertex degree.
    pub fn from_edge_list(list: &EdgeList) -> Result<Self, GraphError> {
        let n = list
            .edges
            .iter()
            .map(|e| e.u.max(e.v) + 1)
            .max()
            .unwrap_or(0);
        Self::from_parts(n, None, list)
    }

    /// Builds a graph with an explicit vertex count and, optionally, a
    /// declared degree that must match the largest vertex degree.
    ///
    /// All violated invariants are reported together.
    pub fn from_parts(
        num_vertices: usize,
        declared_degree: Option<usize>,
        list: &EdgeList,
    ) -> Result<Self, GraphError> {
        if num_vertices == 0 || list.edges.is_empty() {
            return Err(GraphError::Empty);
        }
        check_size(num_vertices, declared_degree.unwrap_or(1))?;

        let mut violations = Vec::new();
        let mut seen_ends = HashSet::new();
        let mut seen_pairs = HashSet::new();
        let mut vertex_degrees = vec![0usize; num_vertices];

        for e in &list.edges {
            let (a, b) = e.ends();
            let mut in_range = true;
            for end in [a, b] {
                if end.vertex >= num_vertices {
                    violations.push(GraphViolation::VertexOutOfRange {
                        vertex: end.vertex,
                        num_vertices,
                    });
                    in_range = false;
                }
            }
            if a.vertex == b.vertex {
                violations.push(GraphViolation::SelfLoop { vertex: a.vertex });
            }
            for end in [a, b] {
                if !seen_ends.insert(end) {
                    violations.push(GraphViolation::DuplicateHalfEdge(end));
                }
            }
            let pair = (a.vertex.min(b.vertex), a.vertex.max(b.vertex));
            if a.vertex != b.vertex && !seen_pairs.insert(pair) {
                violations.push(GraphViolation::ParallelEdge {
                    u: pair.0,
                    v: pair.1,
                });
            }
            if in_range {
                vertex_degrees[a.vertex] += 1;
                vertex_degrees[b.vertex] += 1;
            }
        }

        let actual = vertex_degrees.iter().copied().max().unwrap_or(0);
        let degree = match declared_degree {
            Some(declared) => {
                if declared != actual {
                    violations.push(GraphViolation::DegreeMismatch { declared, actual });
                }
                declared
            }
            None => actual,
        };
        for e in &list.edges {
            let (a, b) = e.ends();
            for end in [a, b] {
                if end.port >= degree {
                    violations.push(GraphViolation::PortOutOfRange { end, degree });
                }
            }
        }

        if !violations.is_empty() {
            return Err(GraphError::Invalid(violations));
        }
        check_size(num_vertices, degree)?;

        let mut zeta = vec![None; num_vertices * degree];
        for e in &list.edges {
            let (a, b) = e.ends();
            zeta[a.vertex * degree + a.port] = Some(b);
            zeta[b.vertex * degree + b.port] = Some(a);
        }

        let graph = Self {
            num_vertices,
            degree,
            vertex_degrees,
            zeta,
            edges: list.edges.clone(),
        };
        for j in graph.isolated_vertices() {
            log::warn!("vertex {j} has no edges; a walker starting there never moves");
        }
        Ok(graph)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Graph degree `d`, the largest vertex degree.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Dimension `N * d` of the walker-plus-coin space.
    pub fn dim(&self) -> usize {
        self.num_vertices * self.degree
    }

    pub fn vertex_degree(&self, vertex: usize) -> usize {
        self.vertex_degrees[vertex]
    }

    pub fn vertex_degrees(&self) -> &[usize] {
        &self.vertex_degrees
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_regular(&self) -> bool {
        self.vertex_degrees.iter().all(|&dj| dj == self.degree)
    }

    pub fn isolated_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertex_degrees
            .iter()
            .enumerate()
            .filter(|(_, &dj)| dj == 0)
            .map(|(j, _)| j)
    }

    pub fn flat_index(&self, vertex: usize, port: usize) -> usize {
        vertex * self.degree + port
    }

    pub fn is_used(&self, vertex: usize, port: usize) -> bool {
        vertex < self.num_vertices
            && port < self.degree
            && self.zeta[self.flat_index(vertex, port)].is_some()
    }

    /// The other end of the edge leaving `vertex` through `port`.
    pub fn zeta(&self, vertex: usize, port: usize) -> Result<HalfEdge> {
        if vertex >= self.num_vertices || port >= self.degree {
            return Err(Error::IndexOutOfRange {
                vertex,
                port,
                num_vertices: self.num_vertices,
                degree: self.degree,
            });
        }
        self.zeta[self.flat_index(vertex, port)].ok_or(Error::UnusedPort { vertex, port })
    }

    /// Used ports at `vertex`, ascending.
    pub fn used_ports(&self, vertex: usize) -> impl Iterator<Item = usize> + '_ {
        let base = vertex * self.degree;
        (0..self.degree).filter(move |&k| self.zeta[base + k].is_some())
    }

    /// All used half-edges in flat-index order.
    pub fn half_edges(&self) -> impl Iterator<Item = (HalfEdge, HalfEdge)> + '_ {
        self.zeta
            .iter()
            .enumerate()
            .filter_map(move |(idx, partner)| {
                partner.map(|p| (HalfEdge::new(idx / self.degree, idx % self.degree), p))
            })
    }

    /// Neighbors of `vertex` ordered by port.
    pub fn neighbors(&self, vertex: usize) -> Vec<usize> {
        self.used_ports(vertex)
            .map(|k| self.zeta[self.flat_index(vertex, k)].map_or(vertex, |h| h.vertex))
            .collect()
    }

    /// Edge list in construction order; `from_parts` on it reproduces `self`.
    pub fn to_edge_list(&self) -> EdgeList {
        EdgeList::new(self.edges.clone())
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self.num_vertices,
            degree: self.degree,
            edges: self.edges.clone(),
        }
    }
}

/// Greedy, deterministic port assignment for a plain adjacency list.
///
/// Edges are processed in sorted `(min, max)` order and each endpoint takes
/// the smallest unused port at its vertex.
pub fn assign_ports(adjacency: &[(usize, usize)]) -> Result<EdgeList, GraphError> {
    let mut violations = Vec::new();
    let mut pairs = BTreeSet::new();
    for &(a, b) in adjacency {
        if a == b {
            violations.push(GraphViolation::SelfLoop { vertex: a });
            continue;
        }
        if !pairs.insert((a.min(b), a.max(b))) {
            violations.push(GraphViolation::ParallelEdge {
                u: a.min(b),
                v: a.max(b),
            });
        }
    }
    if !violations.is_empty() {
        return Err(GraphError::Invalid(violations));
    }

    let n = pairs.iter().map(|&(_, b)| b + 1).max().unwrap_or(0);
    let mut next_port = vec![0usize; n];
    let edges = pairs
        .into_iter()
        .map(|(a, b)| {
            let pa = next_port[a];
            let pb = next_port[b];
            next_port[a] += 1;
            next_port[b] += 1;
            EdgeRecord::new(a, pa, b, pb)
        })
        .collect();
    Ok(EdgeList::new(edges))
}

/// On-disk JSON graph description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: usize,
    pub degree: usize,
    pub edges: Vec<EdgeRecord>,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<PortGraph, GraphError> {
        PortGraph::from_parts(self.vertices, Some(self.degree), &EdgeList::new(self.edges))
    }
}

/// Parses and validates a JSON graph file.
pub fn parse_graph_json(text: &str) -> Result<PortGraph, GraphError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Parse {
        message: e.to_string(),
        line: e.line(),
        column: e.column(),
    })?;
    file.into_graph()
}
