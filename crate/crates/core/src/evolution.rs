//! Step maps and time evolution.
//!
//! One step applies, in order: the coin unitary, the optional coin
//! measurement (dephasing Kraus operators `I_N (x) K_i`), the optional vertex
//! dephasing, and the shift. Vertex dephasing can be moved after the shift.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classical::Distribution;
use crate::coin::CoinOperator;
use crate::error::check_unit_interval;
use crate::meter::DephasingKraus;
use crate::rng;
use crate::shift::ShiftOperator;
use crate::state::{DensityOperator, PureState};
use crate::{CMatrix, CVector, Error, Result, Tolerances, C64};

/// Where vertex dephasing sits relative to the shift.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DephasingPlacement {
    #[default]
    BeforeShift,
    AfterShift,
}

/// Vertex-occupation dephasing of strength `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexDephasing {
    pub strength: f64,
    pub placement: DephasingPlacement,
}

/// The per-step map `T`.
#[derive(Debug, Clone)]
pub struct StepMap {
    coin: CoinOperator,
    shift: ShiftOperator,
    coin_kraus: Option<DephasingKraus>,
    vertex_dephasing: Option<VertexDephasing>,
}

impl StepMap {
    /// Unitary step `T = S C`.
    pub fn unitary(coin: CoinOperator, shift: ShiftOperator) -> Result<Self> {
        if coin.dim() != shift.dim() {
            return Err(Error::Dimension {
                expected: coin.dim(),
                actual: shift.dim(),
            });
        }
        Ok(Self {
            coin,
            shift,
            coin_kraus: None,
            vertex_dephasing: None,
        })
    }

    /// Adds a coin measurement of strength `beta`.
    pub fn with_coin_measurement(mut self, beta: f64) -> Result<Self> {
        self.coin_kraus = Some(DephasingKraus::new(self.coin.degree(), beta)?);
        Ok(self)
    }

    pub fn with_coin_kraus(mut self, kraus: DephasingKraus) -> Result<Self> {
        if kraus.dim() != self.coin.degree() {
            return Err(Error::Dimension {
                expected: self.coin.degree(),
                actual: kraus.dim(),
            });
        }
        self.coin_kraus = Some(kraus);
        Ok(self)
    }

    pub fn with_vertex_dephasing(
        mut self,
        strength: f64,
        placement: DephasingPlacement,
    ) -> Result<Self> {
        check_unit_interval("vertex dephasing", strength)?;
        self.vertex_dephasing = Some(VertexDephasing {
            strength,
            placement,
        });
        Ok(self)
    }

    pub fn coin(&self) -> &CoinOperator {
        &self.coin
    }

    pub fn shift(&self) -> &ShiftOperator {
        &self.shift
    }

    pub fn coin_kraus(&self) -> Option<&DephasingKraus> {
        self.coin_kraus.as_ref()
    }

    pub fn vertex_dephasing(&self) -> Option<VertexDephasing> {
        self.vertex_dephasing
    }

    pub fn num_vertices(&self) -> usize {
        self.coin.num_vertices()
    }

    pub fn degree(&self) -> usize {
        self.coin.degree()
    }

    pub fn dim(&self) -> usize {
        self.coin.dim()
    }

    pub fn is_unitary(&self) -> bool {
        self.coin_kraus.is_none() && self.vertex_dephasing.is_none()
    }

    /// Full Kraus set `{S V_l (I (x) K_i) C}` as dense matrices, with
    /// `V_0 = sqrt(1-p) I` and `V_{j+1} = sqrt(p) |j><j| (x) I` for vertex
    /// dephasing.
    pub fn kraus_operators(&self) -> Vec<CMatrix> {
        let n = self.dim();
        let d = self.degree();
        let coin = self.coin.to_matrix();
        let shift = self.shift.to_matrix();

        let coin_ops: Vec<CMatrix> = match &self.coin_kraus {
            None => vec![coin],
            Some(k) => (0..k.num_outcomes())
                .map(|i| {
                    let diag = CVector::from_fn(n, |a, _| C64::new(k.diagonal(i)[a % d], 0.0));
                    CMatrix::from_diagonal(&diag) * &coin
                })
                .collect(),
        };

        let vertex_ops: Vec<CMatrix> = match self.vertex_dephasing {
            None => vec![CMatrix::identity(n, n)],
            Some(vd) => {
                let mut ops = vec![CMatrix::identity(n, n).scale((1.0 - vd.strength).sqrt())];
                for j in 0..self.num_vertices() {
                    let mut proj = CMatrix::zeros(n, n);
                    for k in 0..d {
                        proj[(j * d + k, j * d + k)] = C64::new(vd.strength.sqrt(), 0.0);
                    }
                    ops.push(proj);
                }
                ops
            }
        };

        let after = matches!(
            self.vertex_dephasing,
            Some(VertexDephasing {
                placement: DephasingPlacement::AfterShift,
                ..
            })
        );
        let mut out = Vec::with_capacity(coin_ops.len() * vertex_ops.len());
        for v in &vertex_ops {
            for c in &coin_ops {
                out.push(if after {
                    v * &shift * c
                } else {
                    &shift * v * c
                });
            }
        }
        out
    }
}

/// `psi -> S C psi`.
pub fn unitary_step(psi: &PureState, step: &StepMap) -> Result<PureState> {
    if !step.is_unitary() {
        return Err(Error::Contract(
            "unitary_step called on a step with measurement".into(),
        ));
    }
    check_dim(psi.dim(), step.dim())?;
    let next = step.shift.apply(&step.coin.apply(psi.amplitudes()));
    Ok(PureState::from_raw(psi.num_vertices(), psi.degree(), next))
}

/// Applies the coin measurement channel in place: entry `((j,k),(j',k'))`
/// is multiplied by `sum_i K_i[k] K_i[k']`.
fn dephase_coin(m: &mut CMatrix, kraus: &DephasingKraus, d: usize) {
    let weights = CMatrix::from_fn(d, d, |a, b| C64::new(kraus.overlap(a, b), 0.0));
    let n = m.nrows();
    for col in 0..n {
        for row in 0..n {
            m[(row, col)] *= weights[(row % d, col % d)];
        }
    }
}

fn dephase_vertices(m: &mut CMatrix, strength: f64, d: usize) {
    let keep = 1.0 - strength;
    let n = m.nrows();
    for col in 0..n {
        for row in 0..n {
            if row / d != col / d {
                m[(row, col)] *= keep;
            }
        }
    }
}

/// Multiplies every element between different vertices by `1 - p`.
pub fn vertex_dephasing(rho: &DensityOperator, p: f64) -> Result<DensityOperator> {
    check_unit_interval("vertex dephasing", p)?;
    let mut m = rho.matrix().clone();
    dephase_vertices(&mut m, p, rho.degree());
    Ok(DensityOperator::from_raw(
        rho.num_vertices(),
        rho.degree(),
        m,
    ))
}

/// One application of the CP map.
pub fn cp_step(rho: &DensityOperator, step: &StepMap) -> Result<DensityOperator> {
    check_dim(rho.dim(), step.dim())?;
    let d = step.degree();
    let mut m = rho.matrix().clone();
    step.coin.conjugate(&mut m);
    if let Some(k) = &step.coin_kraus {
        dephase_coin(&mut m, k, d);
    }
    if let Some(vd) = step.vertex_dephasing {
        if vd.placement == DephasingPlacement::BeforeShift {
            dephase_vertices(&mut m, vd.strength, d);
        }
    }
    let mut m = step.shift.conjugate(&m);
    if let Some(vd) = step.vertex_dephasing {
        if vd.placement == DephasingPlacement::AfterShift {
            dephase_vertices(&mut m, vd.strength, d);
        }
    }
    Ok(DensityOperator::from_raw(
        rho.num_vertices(),
        rho.degree(),
        m,
    ))
}

/// `cp_step` followed by validation of trace, Hermiticity and positivity.
pub fn cp_step_checked(
    rho: &DensityOperator,
    step: &StepMap,
    tol: &Tolerances,
) -> Result<DensityOperator> {
    let next = cp_step(rho, step)?;
    next.validate(tol)?;
    Ok(next)
}

/// `rho(t) = T^t |psi0><psi0|`.
pub fn run(psi0: &PureState, step: &StepMap, steps: usize) -> Result<DensityOperator> {
    let mut rho = psi0.to_density();
    for _ in 0..steps {
        rho = cp_step(&rho, step)?;
    }
    Ok(rho)
}

/// Position marginals at every time `0..=steps` plus the final state. Each
/// intermediate state is validated against `tol`.
pub fn run_marginals(
    psi0: &PureState,
    step: &StepMap,
    steps: usize,
    tol: &Tolerances,
) -> Result<(Vec<Distribution>, DensityOperator)> {
    let mut rho = psi0.to_density();
    let mut marginals = Vec::with_capacity(steps + 1);
    marginals.push(rho.position_marginal_with(tol)?);
    for _ in 0..steps {
        rho = cp_step_checked(&rho, step, tol)?;
        marginals.push(rho.position_marginal_with(tol)?);
    }
    Ok((marginals, rho))
}

/// Pure-state evolution, returning the states at times `0..=steps`.
pub fn evolve_pure(psi0: &PureState, step: &StepMap, steps: usize) -> Result<Vec<PureState>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(psi0.clone());
    for _ in 0..steps {
        let next = unitary_step(out.last().expect("nonempty"), step)?;
        out.push(next);
    }
    Ok(out)
}

fn check_dim(actual: usize, expected: usize) -> Result<()> {
    if actual == expected {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}

/// Measurement record of one sampled trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    /// Meter outcome per step.
    pub outcomes: Vec<usize>,
    /// Probability of the observed outcome, conditioned on the record so far.
    pub outcome_probabilities: Vec<f64>,
    /// Vertex readings per step when full vertex dephasing is configured;
    /// empty otherwise.
    pub vertex_readings: Vec<usize>,
}

fn apply_coin_outcome(phi: &CVector, kraus: &DephasingKraus, outcome: usize, d: usize) -> CVector {
    let diag = kraus.diagonal(outcome);
    CVector::from_fn(phi.len(), |a, _| phi[a] * diag[a % d])
}

fn sample_index<R: Rng>(rng: &mut R, probabilities: &[f64]) -> usize {
    let total: f64 = probabilities.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

fn renormalize(v: CVector, tol: &Tolerances) -> Result<CVector> {
    let norm = v.norm();
    if norm < tol.renormalization_floor {
        return Err(Error::Numerical(format!(
            "branch norm {norm:e} too small to renormalize"
        )));
    }
    Ok(v.unscale(norm))
}

fn measure_vertex<R: Rng>(
    psi: CVector,
    d: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<(CVector, usize)> {
    let probs: Vec<f64> = psi
        .as_slice()
        .chunks(d)
        .map(|b| b.iter().map(|a| a.norm_sqr()).sum())
        .collect();
    let j = sample_index(rng, &probs);
    let projected = CVector::from_fn(psi.len(), |a, _| {
        if a / d == j {
            psi[a]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok((renormalize(projected, tol)?, j))
}

/// Samples one measurement record and the conditional final state.
///
/// Needs a coin measurement; vertex dephasing, if present, must be 0 or 1
/// (a pure-state unraveling of partial dephasing is not provided).
pub fn sample_trajectory(
    psi0: &PureState,
    step: &StepMap,
    steps: usize,
    seed: u64,
) -> Result<(PureState, TrajectoryRecord)> {
    sample_trajectory_with(psi0, step, steps, seed, &Tolerances::default())
}

pub fn sample_trajectory_with(
    psi0: &PureState,
    step: &StepMap,
    steps: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<(PureState, TrajectoryRecord)> {
    let kraus = step
        .coin_kraus
        .as_ref()
        .ok_or_else(|| Error::Contract("trajectory sampling needs a coin measurement".into()))?;
    let vertex_measure = match step.vertex_dephasing {
        None => None,
        Some(vd) if vd.strength == 0.0 => None,
        Some(vd) if vd.strength == 1.0 => Some(vd.placement),
        Some(vd) => {
            return Err(Error::Contract(format!(
                "trajectory sampling supports vertex dephasing 0 or 1, got {}",
                vd.strength
            )))
        }
    };
    check_dim(psi0.dim(), step.dim())?;

    let d = step.degree();
    let mut rng = rng::seeded(seed);
    let mut psi = psi0.amplitudes().clone();
    let mut record = TrajectoryRecord {
        seed,
        outcomes: Vec::with_capacity(steps),
        outcome_probabilities: Vec::with_capacity(steps),
        vertex_readings: Vec::new(),
    };

    for _ in 0..steps {
        let phi = step.coin.apply(&psi);
        let branches: Vec<CVector> = (0..kraus.num_outcomes())
            .map(|i| apply_coin_outcome(&phi, kraus, i, d))
            .collect();
        let probs: Vec<f64> = branches.iter().map(|b| b.norm_squared()).collect();
        let i = sample_index(&mut rng, &probs);
        record.outcomes.push(i);
        record.outcome_probabilities.push(probs[i].clamp(0.0, 1.0));
        let mut next = renormalize(branches[i].clone(), tol)?;

        if vertex_measure == Some(DephasingPlacement::BeforeShift) {
            let (collapsed, j) = measure_vertex(next, d, &mut rng, tol)?;
            record.vertex_readings.push(j);
            next = collapsed;
        }
        next = step.shift.apply(&next);
        if vertex_measure == Some(DephasingPlacement::AfterShift) {
            let (collapsed, j) = measure_vertex(next, d, &mut rng, tol)?;
            record.vertex_readings.push(j);
            next = collapsed;
        }
        psi = next;
    }

    Ok((
        PureState::from_raw(psi0.num_vertices(), psi0.degree(), psi),
        record,
    ))
}

/// Vertex path implied by a record of sharp coin readings from a known start:
/// the walker leaves each vertex through the port it was read out in.
pub fn reconstruct_path(
    start_vertex: usize,
    outcomes: &[usize],
    shift: &ShiftOperator,
) -> Vec<usize> {
    let d = shift.degree();
    let mut path = Vec::with_capacity(outcomes.len() + 1);
    path.push(start_vertex);
    let mut j = start_vertex;
    for &k in outcomes {
        j = shift.target(j * d + k) / d;
        path.push(j);
    }
    path
}

/// One branch of the exact outcome tree.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcomes: Vec<usize>,
    pub weight: f64,
    pub state: PureState,
}

/// Enumerates every measurement record with nonzero probability. The number of
/// branches grows as `outcomes^steps`.
pub fn enumerate_branches(psi0: &PureState, step: &StepMap, steps: usize) -> Result<Vec<Branch>> {
    let kraus = step
        .coin_kraus
        .as_ref()
        .ok_or_else(|| Error::Contract("branch enumeration needs a coin measurement".into()))?;
    if step.vertex_dephasing.is_some_and(|vd| vd.strength != 0.0) {
        return Err(Error::Contract(
            "branch enumeration does not cover vertex dephasing".into(),
        ));
    }
    check_dim(psi0.dim(), step.dim())?;
    let d = step.degree();

    // unnormalized branch vectors; weight = squared norm
    let mut frontier: Vec<(Vec<usize>, CVector)> = vec![(Vec::new(), psi0.amplitudes().clone())];
    for _ in 0..steps {
        let mut next = Vec::with_capacity(frontier.len() * kraus.num_outcomes());
        for (record, psi) in frontier {
            let phi = step.coin.apply(&psi);
            for i in 0..kraus.num_outcomes() {
                let branch = apply_coin_outcome(&phi, kraus, i, d);
                if branch.norm_squared() == 0.0 {
                    continue;
                }
                let mut rec = record.clone();
                rec.push(i);
                next.push((rec, step.shift.apply(&branch)));
            }
        }
        frontier = next;
    }

    Ok(frontier
        .into_iter()
        .map(|(outcomes, v)| {
            let weight = v.norm_squared();
            let state =
                PureState::from_raw(psi0.num_vertices(), psi0.degree(), v.unscale(weight.sqrt()));
            Branch {
                outcomes,
                weight,
                state,
            }
        })
        .collect())
}

/// `sum_b w_b |psi_b><psi_b|`.
pub fn branch_mixture(branches: &[Branch]) -> Result<DensityOperator> {
    let first = branches.first().ok_or(Error::Empty("branch list"))?;
    let (n, d) = (first.state.num_vertices(), first.state.degree());
    let dim = first.state.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for b in branches {
        let a = b.state.amplitudes();
        m += (a * a.adjoint()).scale(b.weight);
    }
    Ok(DensityOperator::from_raw(n, d, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::{CoinBlock, CoinSpec};
    use crate::graph::PortGraph;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn cycle_walk(n: usize) -> (PortGraph, StepMap) {
        let g = PortGraph::cycle(n).unwrap();
        let coin =
            CoinOperator::build(&g, &CoinSpec::Shared(CoinBlock::hadamard(FRAC_PI_2))).unwrap();
        let step = StepMap::unitary(coin, ShiftOperator::cycle(n).unwrap()).unwrap();
        (g, step)
    }

    #[test]
    fn one_hadamard_step() {
        let (g, step) = cycle_walk(7);
        let psi = unitary_step(&PureState::basis(&g, 0, 0).unwrap(), &step).unwrap();
        assert_abs_diff_eq!(psi.amplitude(1, 0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitude(6, 1).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        let p = psi.position_marginal();
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[6], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn identity_coin_circulates() {
        let g = PortGraph::cycle(5).unwrap();
        let coin = CoinOperator::build(&g, &CoinSpec::Shared(CoinBlock::identity(2))).unwrap();
        let step = StepMap::unitary(coin, ShiftOperator::cycle(5).unwrap()).unwrap();
        let states = evolve_pure(&PureState::basis(&g, 0, 0).unwrap(), &step, 12).unwrap();
        for (t, s) in states.iter().enumerate() {
            assert_eq!(s.position_marginal()[t % 5], 1.0);
        }
    }

    #[test]
    fn unitary_step_rejects_measured_step() {
        let (g, step) = cycle_walk(5);
        let step = step.with_coin_measurement(0.0).unwrap();
        let psi = PureState::basis(&g, 0, 0).unwrap();
        assert!(matches!(unitary_step(&psi, &step), Err(Error::Contract(_))));
    }

    #[test]
    fn run_zero_steps() {
        let (g, step) = cycle_walk(7);
        let psi = PureState::basis(&g, 0, 0).unwrap();
        assert_eq!(run(&psi, &step, 0).unwrap(), psi.to_density());
    }

    #[test]
    fn vertex_dephasing_limits() {
        let (g, step) = cycle_walk(5);
        let psi = unitary_step(&PureState::basis(&g, 0, 0).unwrap(), &step).unwrap();
        let rho = psi.to_density();
        assert_eq!(vertex_dephasing(&rho, 0.0).unwrap(), rho);
        let full = vertex_dephasing(&rho, 1.0).unwrap();
        for a in 0..10 {
            for b in 0..10 {
                if a / 2 != b / 2 {
                    assert_eq!(full.matrix()[(a, b)], C64::new(0.0, 0.0));
                } else {
                    assert_eq!(full.matrix()[(a, b)], rho.matrix()[(a, b)]);
                }
            }
        }
        assert!(vertex_dephasing(&rho, 1.1).is_err());
    }

    #[test]
    fn measured_step_scales_coin_coherence() {
        let (_, step) = cycle_walk(7);
        let step = step.with_coin_measurement(0.5).unwrap();
        let mut v = CVector::zeros(14);
        v[0] = C64::new(1.0, 0.0);
        v[1] = C64::new(1.0, 0.0);
        let rho = PureState::normalized(7, 2, v).unwrap().to_density();

        let mut before = rho.matrix().clone();
        step.coin().conjugate(&mut before);
        let mut after = before.clone();
        dephase_coin(&mut after, step.coin_kraus().unwrap(), 2);
        let factor = (0.5 * FRAC_PI_2).cos();
        assert_abs_diff_eq!(
            (after[(0, 1)] - before[(0, 1)] * factor).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_eq!(after[(0, 0)], before[(0, 0)]);
    }

    #[test]
    fn kraus_completeness() {
        let (_, step) = cycle_walk(5);
        let step = step
            .with_coin_measurement(0.3)
            .unwrap()
            .with_vertex_dephasing(0.4, DephasingPlacement::AfterShift)
            .unwrap();
        let sum = step
            .kraus_operators()
            .iter()
            .map(|k| k.adjoint() * k)
            .fold(CMatrix::zeros(10, 10), |a, b| a + b);
        assert!((sum - CMatrix::identity(10, 10)).camax() < 1e-12);
    }

    #[test]
    fn sharp_record_reconstructs_path() {
        let (g, step) = cycle_walk(7);
        let step = step.with_coin_measurement(1.0).unwrap();
        let psi0 = PureState::basis(&g, 0, 0).unwrap();
        for seed in 0..20 {
            let (psi, record) = sample_trajectory(&psi0, &step, 15, seed).unwrap();
            let path = reconstruct_path(0, &record.outcomes, step.shift());
            assert_eq!(psi.position_marginal()[*path.last().unwrap()], 1.0);
        }
    }

    #[test]
    fn trajectory_requires_measurement() {
        let (g, step) = cycle_walk(7);
        let psi0 = PureState::basis(&g, 0, 0).unwrap();
        assert!(matches!(
            sample_trajectory(&psi0, &step, 3, 0),
            Err(Error::Contract(_))
        ));
        let partial = step
            .with_coin_measurement(0.5)
            .unwrap()
            .with_vertex_dephasing(0.5, DephasingPlacement::BeforeShift)
            .unwrap();
        assert!(sample_trajectory(&psi0, &partial, 3, 0).is_err());
    }

    #[test]
    fn zero_strength_trajectory_is_unitary() {
        let (g, step) = cycle_walk(7);
        let psi0 = PureState::basis(&g, 0, 0).unwrap();
        let unitary = evolve_pure(&psi0, &step, 8).unwrap();
        let measured = step.with_coin_measurement(0.0).unwrap();
        let (psi, record) = sample_trajectory(&psi0, &measured, 8, 99).unwrap();
        assert!(record.outcomes.iter().all(|&i| i == 0));
        assert!(record
            .outcome_probabilities
            .iter()
            .all(|&p| (p - 1.0).abs() < 1e-12));
        assert!((psi.amplitudes() - unitary[8].amplitudes()).camax() < 1e-12);
    }

    #[test]
    fn trajectories_are_reproducible() {
        let (g, step) = cycle_walk(7);
        let step = step.with_coin_measurement(0.6).unwrap();
        let psi0 = PureState::basis(&g, 0, 0).unwrap();
        let a = sample_trajectory(&psi0, &step, 10, 5).unwrap();
        let b = sample_trajectory(&psi0, &step, 10, 5).unwrap();
        assert_eq!(a.1, b.1);
        assert_eq!(a.0, b.0);
    }
}
