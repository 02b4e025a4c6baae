//! Distances, mixing curves and the which-path/visibility trade-off.

use serde::{Deserialize, Serialize};

use crate::classical::{Distribution, HalfEdgeChain};
use crate::evolution::{self, StepMap};
use crate::meter::half_angle;
use crate::state::{DensityOperator, PureState};
use crate::{Error, Result, Tolerances};

/// Total variation distance `(1/2) sum_j |p_j - q_j|`.
pub fn tvd(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            actual: q.len(),
        });
    }
    let sum: f64 = p
        .probabilities()
        .iter()
        .zip(q.probabilities())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

/// Cesàro mean of a sequence of distributions.
pub fn time_averaged_distribution(marginals: &[Distribution]) -> Result<Distribution> {
    let first = marginals.first().ok_or(Error::Empty("marginal sequence"))?;
    let mut acc = vec![0.0; first.len()];
    for m in marginals {
        if m.len() != acc.len() {
            return Err(Error::Dimension {
                expected: acc.len(),
                actual: m.len(),
            });
        }
        for (a, p) in acc.iter_mut().zip(m.probabilities()) {
            *a += p;
        }
    }
    let t = marginals.len() as f64;
    Ok(Distribution::from_raw(
        acc.into_iter().map(|a| a / t).collect(),
    ))
}

/// `sum_{a != b} |rho_ab|` over the full walker-plus-coin basis.
pub fn coherence_l1(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    let n = m.nrows();
    let mut total = 0.0;
    for b in 0..n {
        for a in 0..n {
            if a != b {
                total += m[(a, b)].norm();
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixingVariant {
    Instantaneous,
    TimeAveraged,
}

/// TVD to the uniform distribution over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingCurve {
    pub times: Vec<usize>,
    pub tvd_to_uniform: Vec<f64>,
    pub variant: MixingVariant,
}

impl MixingCurve {
    /// Curve over `marginals[t]`, `t = 0, 1, ...`.
    pub fn from_marginals(marginals: &[Distribution], variant: MixingVariant) -> Result<Self> {
        let first = marginals.first().ok_or(Error::Empty("marginal sequence"))?;
        let uniform = Distribution::uniform(first.len());
        let mut running = vec![0.0; first.len()];
        let mut tvds = Vec::with_capacity(marginals.len());
        for (t, m) in marginals.iter().enumerate() {
            let value = match variant {
                MixingVariant::Instantaneous => tvd(m, &uniform)?,
                MixingVariant::TimeAveraged => {
                    for (r, p) in running.iter_mut().zip(m.probabilities()) {
                        *r += p;
                    }
                    let avg = running.iter().map(|r| r / (t + 1) as f64).collect();
                    tvd(&Distribution::from_raw(avg), &uniform)?
                }
            };
            tvds.push(value);
        }
        Ok(Self {
            times: (0..marginals.len()).collect(),
            tvd_to_uniform: tvds,
            variant,
        })
    }

    /// First time with TVD at most `epsilon`.
    pub fn first_crossing(&self, epsilon: f64) -> Option<usize> {
        self.times
            .iter()
            .zip(&self.tvd_to_uniform)
            .find(|(_, &v)| v <= epsilon)
            .map(|(&t, _)| t)
    }
}

/// One point of the complementarity curve.
///
/// `visibility` is `cos(beta pi / 2)` and `distinguishability` is
/// `sin(beta pi / 2)`, the overlap and trace distance of the two conditional
/// meter states; `tvd_to_unitary` compares the final position marginal with the
/// unmeasured walk and `tvd_to_classical` with the fully measured
/// (classical) chain. `coherence_l1` is the off-diagonal mass of the final
/// state. The two interference proxies are reported side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplementarityPoint {
    pub beta: f64,
    pub visibility: f64,
    pub distinguishability: f64,
    pub tvd_to_unitary: f64,
    pub tvd_to_classical: f64,
    pub coherence_l1: f64,
}

/// Reference marginals shared by all points of a sweep.
#[derive(Debug, Clone)]
pub struct SweepReference {
    pub unmeasured: Distribution,
    pub classical: Distribution,
}

impl SweepReference {
    /// `template` is the step without coin measurement. The classical chain
    /// starts from `|psi0|^2` over half-edges; it is the exact `beta = 1`
    /// limit when `psi0` is a basis state.
    pub fn new(template: &StepMap, psi0: &PureState, steps: usize) -> Result<Self> {
        let unmeasured = evolution::run(psi0, template, steps)?.position_marginal()?;
        let chain = HalfEdgeChain::new(template.coin(), template.shift())?;
        let mut p: Vec<f64> = psi0.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        for _ in 0..steps {
            p = chain.step(&p);
        }
        Ok(Self {
            unmeasured,
            classical: chain.vertex_marginal(&p),
        })
    }
}

/// Evaluates a single sweep point.
pub fn complementarity_point(
    template: &StepMap,
    psi0: &PureState,
    steps: usize,
    beta: f64,
    reference: &SweepReference,
    tol: &Tolerances,
) -> Result<ComplementarityPoint> {
    let step = template.clone().with_coin_measurement(beta)?;
    let (marginals, rho) = evolution::run_marginals(psi0, &step, steps, tol)?;
    let last = marginals.last().expect("at least the initial marginal");
    Ok(ComplementarityPoint {
        beta,
        visibility: half_angle(beta).1,
        distinguishability: half_angle(beta).0,
        tvd_to_unitary: tvd(last, &reference.unmeasured)?,
        tvd_to_classical: tvd(last, &reference.classical)?,
        coherence_l1: coherence_l1(&rho),
    })
}

/// Runs the walk at every `beta` in `betas`, in the given order.
pub fn complementarity_sweep(
    template: &StepMap,
    psi0: &PureState,
    steps: usize,
    betas: &[f64],
) -> Result<Vec<ComplementarityPoint>> {
    let tol = Tolerances::default();
    let reference = SweepReference::new(template, psi0, steps)?;
    betas
        .iter()
        .map(|&beta| complementarity_point(template, psi0, steps, beta, &reference, &tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dist(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn tvd_basics() {
        let p = dist(&[0.25, 0.5, 0.25, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(tvd(&p, &p).unwrap(), 0.0);
        assert_eq!(
            tvd(&Distribution::delta(3, 0), &Distribution::delta(3, 1)).unwrap(),
            1.0
        );
        // (1/2)(|1/4-1/7| + |1/2-1/7| + |1/4-1/7| + 4/7) = 4/7
        assert_abs_diff_eq!(
            tvd(&p, &Distribution::uniform(7)).unwrap(),
            4.0 / 7.0,
            epsilon = 1e-15
        );
        assert!(tvd(&p, &Distribution::uniform(6)).is_err());
    }

    #[test]
    fn time_average_basics() {
        let p = dist(&[0.2, 0.8]);
        assert_eq!(time_averaged_distribution(std::slice::from_ref(&p)).unwrap(), p);
        let avg =
            time_averaged_distribution(&[Distribution::delta(3, 0), Distribution::delta(3, 1)])
                .unwrap();
        assert_eq!(avg.probabilities(), &[0.5, 0.5, 0.0]);
        assert!(time_averaged_distribution(&[]).is_err());
    }

    #[test]
    fn coherence_of_coin_superposition() {
        let mut v = crate::CVector::zeros(4);
        v[0] = crate::C64::new(1.0, 0.0);
        v[1] = crate::C64::new(1.0, 0.0);
        let rho = PureState::normalized(2, 2, v).unwrap().to_density();
        assert_abs_diff_eq!(coherence_l1(&rho), 1.0, epsilon = 1e-15);
        assert_eq!(coherence_l1(&DensityOperator::maximally_mixed(2, 2)), 0.0);
    }

    #[test]
    fn crossing_detection() {
        let curve = MixingCurve {
            times: vec![0, 1, 2, 3],
            tvd_to_uniform: vec![0.9, 0.5, 0.04, 0.06],
            variant: MixingVariant::Instantaneous,
        };
        assert_eq!(curve.first_crossing(0.05), Some(2));
        assert_eq!(curve.first_crossing(1.0), Some(0));
        assert_eq!(curve.first_crossing(0.01), None);
    }
}
