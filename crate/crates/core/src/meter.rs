//! Variable-strength measurement of a qubit coin by a qubit meter.
//!
//! The meter starts in `|0>_m` and interacts with the coin through a two-qubit
//! unitary `W(beta)` built from five exponential factors. Afterwards the
//! meter's state depends on the coin's basis state, `W|k>|0>_m = |k>|m_k>`, with
//! overlap `<m_0|m_1> = cos(beta pi / 2)`. Tracing the meter out multiplies
//! the coin's off-diagonal elements by that overlap: `beta = 0` leaves the coin
//! untouched and `beta = 1` is a sharp (CNOT-like) measurement.
//!
//! Tensor ordering is coin (x) meter everywhere: index `2 * coin + meter`.
//!
//! Generators are the Pauli-normalized operators built from the raising
//! operator `s+ = |1><0|`: `x = s+ + s-`, `y = i (s+ - s-)`, `z = [s+, s-]`
//! (so `z = |1><1| - |0><0|`). Each squares to the identity, so every factor
//! is `exp(i t G) = cos t I + i sin t G` in closed form.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::SymmetricEigen;

use crate::error::check_unit_interval;
use crate::state::partial_trace_meter;
use crate::{CMatrix, CVector, Error, Result, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn identity2() -> CMatrix {
    CMatrix::identity(2, 2)
}

/// `s+ + s-`.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

/// `i (s+ - s-)`.
pub fn pauli_y() -> CMatrix {
    let i = C64::i();
    CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)])
}

/// `[s+, s-] = |1><1| - |0><0|`.
pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(-1.0), c(0.0), c(0.0), c(1.0)])
}

/// `exp(i t G)` for any `G` with `G^2 = I`.
fn exp_involution(t: f64, generator: &CMatrix) -> CMatrix {
    let n = generator.nrows();
    CMatrix::identity(n, n).scale(t.cos()) + generator * C64::new(0.0, t.sin())
}

/// Off-diagonal decay factor `cos(beta pi / 2)`.
pub fn coherence_factor(beta: f64) -> f64 {
    half_angle(beta).1
}

/// `(sin, cos)` of `beta pi / 2`, exact at the endpoints so that `beta = 1`
/// is a projective measurement.
pub(crate) fn half_angle(beta: f64) -> (f64, f64) {
    if beta == 1.0 {
        (1.0, 0.0)
    } else {
        (beta * FRAC_PI_2).sin_cos()
    }
}

/// The coin-meter interaction at a fixed strength.
#[derive(Debug, Clone, PartialEq)]
pub struct MeterCoupling {
    beta: f64,
    unitary: CMatrix,
}

impl MeterCoupling {
    /// Builds `W(beta)` as the ordered product of its five factors.
    pub fn new(beta: f64) -> Result<Self> {
        check_unit_interval("beta", beta)?;
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        let id = identity2();

        let f1 = exp_involution(FRAC_PI_4, &y).kronecker(&exp_involution(-FRAC_PI_4, &x));
        let f2 = exp_involution(-beta * FRAC_PI_4, &x.kronecker(&x));
        let f3 = exp_involution(-FRAC_PI_4, &y).kronecker(&exp_involution(-FRAC_PI_4, &z));
        let f4 = id.kronecker(&exp_involution(-PI * (1.0 - beta) / 4.0, &y));
        let f5 = id.kronecker(&exp_involution(-FRAC_PI_4, &z));

        Ok(Self {
            beta,
            unitary: f1 * f2 * f3 * f4 * f5,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The 4x4 matrix of `W(beta)`, coin (x) meter.
    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    /// `W(beta) (coin (x) |0>_m)`.
    pub fn couple(&self, coin: &CVector) -> Result<CVector> {
        if coin.len() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                actual: coin.len(),
            });
        }
        let meter0 = CVector::from_vec(vec![c(1.0), c(0.0)]);
        Ok(&self.unitary * coin.kronecker(&meter0))
    }

    /// Meter state `|m_k>` left behind when the coin is in basis state `k`.
    pub fn conditional_meter_state(&self, coin_state: usize) -> CVector {
        // column for |k>|0>_m, meter amplitudes of the |k> coin component
        let col = self.unitary.column(2 * coin_state);
        CVector::from_iterator(2, (0..2).map(|m| col[2 * coin_state + m]))
    }

    /// Amplitude `W|k>|0>` leaks onto the other coin state; zero when the
    /// coupling does not disturb the coin's basis states.
    pub fn coin_disturbance(&self) -> f64 {
        (0..2)
            .flat_map(|k| {
                let col = self.unitary.column(2 * k);
                let other = 1 - k;
                [col[2 * other].norm(), col[2 * other + 1].norm()]
            })
            .fold(0.0, f64::max)
    }

    /// Interference visibility `|<m_0|m_1>|`.
    pub fn visibility(&self) -> f64 {
        self.conditional_meter_state(0)
            .dotc(&self.conditional_meter_state(1))
            .norm()
    }

    /// Which-path distinguishability: trace distance between the two
    /// conditional meter states.
    pub fn distinguishability(&self) -> f64 {
        let m0 = self.conditional_meter_state(0);
        let m1 = self.conditional_meter_state(1);
        let diff = &m0 * m0.adjoint() - &m1 * m1.adjoint();
        let herm = (&diff + diff.adjoint()).scale(0.5);
        0.5 * SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .sum::<f64>()
    }

    /// `Tr_m[W (rho (x) |0><0|) W^dagger]` for a 2x2 coin density matrix.
    pub fn induced_coin_channel(&self, coin_rho: &CMatrix) -> Result<CMatrix> {
        if coin_rho.nrows() != 2 || coin_rho.ncols() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                actual: coin_rho.nrows().max(coin_rho.ncols()),
            });
        }
        let mut meter0 = CMatrix::zeros(2, 2);
        meter0[(0, 0)] = c(1.0);
        let joint = &self.unitary * coin_rho.kronecker(&meter0) * self.unitary.adjoint();
        partial_trace_meter(&joint, 2, 2)
    }

    /// Kraus operators obtained by reading the meter out in the pointer basis
    /// `{|m_0(1)>, |m_1(1)>}` of the sharp coupling:
    /// `K_i = sum_k <b_i|m_k> |k><k|`.
    pub fn readout_kraus(&self) -> Result<[CMatrix; 2]> {
        let basis = pointer_basis()?;
        let m = [
            self.conditional_meter_state(0),
            self.conditional_meter_state(1),
        ];
        Ok([0, 1].map(|i| {
            CMatrix::from_fn(
                2,
                2,
                |a, b| {
                    if a == b {
                        basis[i].dotc(&m[a])
                    } else {
                        c(0.0)
                    }
                },
            )
        }))
    }
}

/// The meter readout basis: conditional meter states of the sharp coupling.
pub fn pointer_basis() -> Result<[CVector; 2]> {
    let sharp = MeterCoupling::new(1.0)?;
    Ok([
        sharp.conditional_meter_state(0),
        sharp.conditional_meter_state(1),
    ])
}

/// Frame change on the meter taking `|i>_m` to the pointer state `|b_i>`.
pub fn pointer_frame() -> Result<CMatrix> {
    let [b0, b1] = pointer_basis()?;
    Ok(CMatrix::from_columns(&[b0, b1]))
}

/// Diagonal Kraus operators of the coin dephasing channel, one per meter
/// outcome.
///
/// For a qubit coin these are `K_0 = diag(1, cos)` and `K_1 = diag(0, sin)`
/// at angle `beta pi / 2`. Outcome 1 certifies that the coin was in `|1>`.
///
/// For `d > 2` the operators come from meter states with pairwise overlap
/// `cos(beta pi / 2)`: `K_i = diag(L_{0i}, ..., L_{d-1,i})` where `L` is the
/// Cholesky factor of the overlap matrix `(1 - c) I + c J`. This reduces to the
/// qubit form at `d = 2`, is the identity channel at `beta = 0` and a
/// projective coin measurement at `beta = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingKraus {
    factor: f64,
    // diagonals of K_i
    diagonals: Vec<Vec<f64>>,
}

impl DephasingKraus {
    pub fn qubit(beta: f64) -> Result<Self> {
        Self::new(2, beta)
    }

    pub fn new(dim: usize, beta: f64) -> Result<Self> {
        check_unit_interval("beta", beta)?;
        if dim == 2 {
            let (s, cs) = half_angle(beta);
            return Ok(Self {
                factor: cs,
                diagonals: vec![vec![1.0, cs], vec![0.0, s]],
            });
        }
        Self::with_factor(dim, coherence_factor(beta))
    }

    /// Channel multiplying every off-diagonal coin element by `factor`.
    pub fn with_factor(dim: usize, factor: f64) -> Result<Self> {
        check_unit_interval("dephasing factor", factor)?;
        if dim == 0 {
            return Err(Error::Empty("coin dimension"));
        }
        // Cholesky of (1 - c) I + c J. Every column i has a common
        // subdiagonal value l_i; sum_prev = sum_{m < i} l_m^2.
        let mut diagonals = vec![vec![0.0; dim]; dim];
        let mut sum_prev: f64 = 0.0;
        for (i, column) in diagonals.iter_mut().enumerate() {
            let pivot = (1.0 - sum_prev).max(0.0).sqrt();
            let sub = if pivot > 1e-300 {
                (factor - sum_prev) / pivot
            } else {
                0.0
            };
            column[i] = pivot;
            for row in column.iter_mut().skip(i + 1) {
                *row = sub;
            }
            sum_prev += sub * sub;
        }
        Ok(Self { factor, diagonals })
    }

    pub fn dim(&self) -> usize {
        self.diagonals.first().map_or(0, Vec::len)
    }

    pub fn num_outcomes(&self) -> usize {
        self.diagonals.len()
    }

    /// Off-diagonal multiplier of the channel.
    pub fn factor(&self) -> f64 {
        self.factor
    }

    /// `K_i[k][k]`.
    pub fn diagonal(&self, outcome: usize) -> &[f64] {
        &self.diagonals[outcome]
    }

    pub fn operator(&self, outcome: usize) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            self.dim(),
            self.diagonals[outcome].iter().map(|&x| c(x)),
        ))
    }

    pub fn operators(&self) -> Vec<CMatrix> {
        (0..self.num_outcomes()).map(|i| self.operator(i)).collect()
    }

    /// `sum_i K_i rho K_i^dagger`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        self.operators()
            .iter()
            .map(|k| k * rho * k.adjoint())
            .fold(CMatrix::zeros(rho.nrows(), rho.ncols()), |acc, t| acc + t)
    }

    /// Largest entry of `sum_i K_i^dagger K_i - I`.
    pub fn completeness_error(&self) -> f64 {
        let d = self.dim();
        let sum = self
            .operators()
            .iter()
            .map(|k| k.adjoint() * k)
            .fold(CMatrix::zeros(d, d), |acc, t| acc + t);
        (sum - CMatrix::identity(d, d)).camax()
    }

    /// Element-wise multiplier `sum_i K_i[a] K_i[b]` for coin entry `(a, b)`.
    pub(crate) fn overlap(&self, a: usize, b: usize) -> f64 {
        self.diagonals.iter().map(|k| k[a] * k[b]).sum()
    }
}

/// Convenience wrapper for [`MeterCoupling::new`].
pub fn build_meter_unitary(beta: f64) -> Result<MeterCoupling> {
    MeterCoupling::new(beta)
}

/// Convenience wrapper for [`DephasingKraus::qubit`].
pub fn dephasing_kraus(beta: f64) -> Result<DephasingKraus> {
    DephasingKraus::qubit(beta)
}
