//! Walker-plus-coin states on the basis `|j, k>`, flattened as `j * d + k`.

use nalgebra::SymmetricEigen;

use crate::classical::Distribution;
use crate::graph::PortGraph;
use crate::{CMatrix, CVector, Error, Result, Tolerances, C64};

/// Basis label `|j, k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub vertex: usize,
    pub port: usize,
}

impl BasisIndex {
    pub fn new(vertex: usize, port: usize) -> Self {
        Self { vertex, port }
    }

    pub fn flat(&self, degree: usize) -> usize {
        self.vertex * degree + self.port
    }

    pub fn from_flat(index: usize, degree: usize) -> Self {
        Self::new(index / degree, index % degree)
    }
}

/// Normalized state vector of length `N * d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    num_vertices: usize,
    degree: usize,
}

impl PureState {
    /// `|j, k>` for a used port `(j, k)` of `graph`.
    pub fn basis(graph: &PortGraph, vertex: usize, port: usize) -> Result<Self> {
        if vertex >= graph.num_vertices() || port >= graph.degree() {
            return Err(Error::IndexOutOfRange {
                vertex,
                port,
                num_vertices: graph.num_vertices(),
                degree: graph.degree(),
            });
        }
        if !graph.is_used(vertex, port) {
            return Err(Error::UnusedPort { vertex, port });
        }
        let mut amplitudes = CVector::zeros(graph.dim());
        amplitudes[graph.flat_index(vertex, port)] = C64::new(1.0, 0.0);
        Ok(Self {
            amplitudes,
            num_vertices: graph.num_vertices(),
            degree: graph.degree(),
        })
    }

    /// Wraps an amplitude vector, checking its length and norm.
    pub fn new(num_vertices: usize, degree: usize, amplitudes: CVector) -> Result<Self> {
        Self::with_tolerances(num_vertices, degree, amplitudes, &Tolerances::default())
    }

    pub fn with_tolerances(
        num_vertices: usize,
        degree: usize,
        amplitudes: CVector,
        tol: &Tolerances,
    ) -> Result<Self> {
        let expected = num_vertices * degree;
        if amplitudes.len() != expected {
            return Err(Error::Dimension {
                expected,
                actual: amplitudes.len(),
            });
        }
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > tol.norm {
            return Err(Error::Numerical(format!(
                "state norm squared {norm_sqr} differs from 1"
            )));
        }
        Ok(Self {
            amplitudes,
            num_vertices,
            degree,
        })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(num_vertices: usize, degree: usize, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numerical("cannot normalize a zero vector".into()));
        }
        Self::new(num_vertices, degree, amplitudes.unscale(norm))
    }

    pub(crate) fn from_raw(num_vertices: usize, degree: usize, amplitudes: CVector) -> Self {
        Self {
            amplitudes,
            num_vertices,
            degree,
        }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude(&self, vertex: usize, port: usize) -> C64 {
        self.amplitudes[vertex * self.degree + port]
    }

    /// `|psi><psi|`.
    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_raw(
            self.num_vertices,
            self.degree,
            &self.amplitudes * self.amplitudes.adjoint(),
        )
    }

    /// `P(j) = sum_k |psi_{j,k}|^2`.
    pub fn position_marginal(&self) -> Distribution {
        let probs = self
            .amplitudes
            .as_slice()
            .chunks(self.degree)
            .map(|block| block.iter().map(|a| a.norm_sqr()).sum())
            .collect();
        Distribution::from_raw(probs)
    }
}

/// Deviations of a density operator from the physical constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl InvariantReport {
    pub fn within(&self, tol: &Tolerances) -> bool {
        self.trace_error <= tol.trace
            && self.hermiticity_error <= tol.hermiticity
            && self.min_eigenvalue >= -tol.min_eigenvalue
    }
}

/// Density operator on the walker-plus-coin space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    num_vertices: usize,
    degree: usize,
}

impl DensityOperator {
    /// Wraps a matrix after checking Hermiticity, trace and positivity.
    pub fn new(num_vertices: usize, degree: usize, matrix: CMatrix) -> Result<Self> {
        Self::with_tolerances(num_vertices, degree, matrix, &Tolerances::default())
    }

    pub fn with_tolerances(
        num_vertices: usize,
        degree: usize,
        matrix: CMatrix,
        tol: &Tolerances,
    ) -> Result<Self> {
        let expected = num_vertices * degree;
        if matrix.nrows() != expected || matrix.ncols() != expected {
            return Err(Error::Dimension {
                expected,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        let rho = Self::from_raw(num_vertices, degree, matrix);
        rho.validate(tol)?;
        Ok(rho)
    }

    pub(crate) fn from_raw(num_vertices: usize, degree: usize, matrix: CMatrix) -> Self {
        Self {
            matrix,
            num_vertices,
            degree,
        }
    }

    /// `I / (N d)`.
    pub fn maximally_mixed(num_vertices: usize, degree: usize) -> Self {
        let dim = num_vertices * degree;
        Self::from_raw(
            num_vertices,
            degree,
            CMatrix::identity(dim, dim).unscale(dim as f64),
        )
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn element(&self, row: BasisIndex, col: BasisIndex) -> C64 {
        self.matrix[(row.flat(self.degree), col.flat(self.degree))]
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        // tr(rho^2) = sum |rho_ab|^2 for Hermitian rho
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                worst = worst.max((self.matrix[(a, b)] - self.matrix[(b, a)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()).scale(0.5);
        SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn invariants(&self) -> InvariantReport {
        let tr = self.trace();
        InvariantReport {
            trace_error: (tr - C64::new(1.0, 0.0)).norm(),
            hermiticity_error: self.hermiticity_error(),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let report = self.invariants();
        if report.within(tol) {
            Ok(())
        } else {
            Err(Error::Numerical(format!(
                "density operator out of tolerance: trace error {:e}, hermiticity error {:e}, \
                 min eigenvalue {:e}",
                report.trace_error, report.hermiticity_error, report.min_eigenvalue
            )))
        }
    }

    /// `P(j) = sum_k rho[(j,k),(j,k)]` with roundoff-level negatives clamped.
    pub fn position_marginal(&self) -> Result<Distribution> {
        self.position_marginal_with(&Tolerances::default())
    }

    pub fn position_marginal_with(&self, tol: &Tolerances) -> Result<Distribution> {
        let d = self.degree;
        let mut probs = Vec::with_capacity(self.num_vertices);
        for j in 0..self.num_vertices {
            let p: f64 = (0..d).map(|k| self.matrix[(j * d + k, j * d + k)].re).sum();
            if p < -tol.marginal_clamp {
                return Err(Error::Numerical(format!(
                    "negative probability {p:e} at vertex {j}"
                )));
            }
            probs.push(p.max(0.0));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol.trace {
            return Err(Error::Numerical(format!("marginal sums to {total}")));
        }
        Ok(Distribution::from_raw(probs))
    }

    /// Sum of `|rho_ab|` over `a != b` inside each vertex's coin block.
    pub fn coin_block_coherence(&self) -> f64 {
        let d = self.degree;
        let mut total = 0.0;
        for j in 0..self.num_vertices {
            for a in 0..d {
                for b in 0..d {
                    if a != b {
                        total += self.matrix[(j * d + a, j * d + b)].norm();
                    }
                }
            }
        }
        total
    }
}

/// Kronecker product `a (x) b`, with `a` the left (slow) factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Traces out the right tensor factor of a `system (x) meter` operator.
pub fn partial_trace_meter(
    joint: &CMatrix,
    system_dim: usize,
    meter_dim: usize,
) -> Result<CMatrix> {
    let expected = system_dim * meter_dim;
    if joint.nrows() != expected || joint.ncols() != expected {
        return Err(Error::Dimension {
            expected,
            actual: joint.nrows().max(joint.ncols()),
        });
    }
    Ok(CMatrix::from_fn(system_dim, system_dim, |a, b| {
        (0..meter_dim)
            .map(|m| joint[(a * meter_dim + m, b * meter_dim + m)])
            .sum()
    }))
}
