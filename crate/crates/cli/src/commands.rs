//! The subcommands. Each computes everything in memory, then commits its
//! output files together.

use std::path::Path;

use coinwalk::analysis::{complementarity_point, MixingCurve, MixingVariant, SweepReference};
use coinwalk::classical::{Distribution, HalfEdgeChain};
use coinwalk::evolution;
use coinwalk::Tolerances;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Prepared, WalkConfig};
use crate::error::CliError;
use crate::output::{
    csv_bytes, meta_path, sibling, CommandRecord, Metadata, MixSummary, OutputSet,
};

/// Files to write plus lines to print once they are written.
#[derive(Debug)]
pub struct Report {
    pub outputs: OutputSet,
    pub summary: Vec<String>,
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    if jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("--jobs: {e}")))
}

/// Position marginals at `t = 0..=steps` under the configured step.
fn marginals(p: &Prepared, steps: usize, tol: &Tolerances) -> Result<Vec<Distribution>, CliError> {
    if !p.step.is_unitary() {
        let (m, _) = evolution::run_marginals(&p.psi0, &p.step, steps, tol)?;
        return Ok(m);
    }
    let states = evolution::evolve_pure(&p.psi0, &p.step, steps)?;
    states
        .iter()
        .enumerate()
        .map(|(t, s)| {
            let drift = (s.amplitudes().norm() - 1.0).abs();
            if drift > tol.norm {
                return Err(CliError::Numerical(format!(
                    "numerical invariant violated: norm drifted by {drift:e} at step {t}"
                )));
            }
            Ok(s.position_marginal())
        })
        .collect()
}

/// Runs a recorded command. Shared by the subcommands and `replay`.
pub fn execute(
    command: &CommandRecord,
    config: &WalkConfig,
    out: &Path,
    jobs: Option<usize>,
) -> Result<Report, CliError> {
    let prepared = config.prepare()?;
    log::info!(
        "{} vertices, degree {}, {} steps, beta {}",
        prepared.graph.num_vertices(),
        prepared.graph.degree(),
        config.steps,
        config.beta
    );
    let tol = Tolerances::default();
    let mut meta = Metadata::new(command.clone(), config.clone());
    let mut outputs = OutputSet::default();
    let mut summary = Vec::new();

    match command {
        CommandRecord::Run {} => {
            outputs.add(out.to_path_buf(), run(&prepared, &tol)?);
        }
        CommandRecord::Sweep { betas } => {
            outputs.add(out.to_path_buf(), sweep(&prepared, betas, jobs, &tol)?);
        }
        CommandRecord::Mix { epsilon } => {
            let (bytes, result) = mix(&prepared, *epsilon, &tol)?;
            let show =
                |c: Option<usize>| c.map_or("no crossing".to_string(), |t| format!("t = {t}"));
            summary.push(format!(
                "quantum time-averaged: {}",
                show(result.quantum_time_averaged)
            ));
            summary.push(format!(
                "quantum instantaneous: {}",
                show(result.quantum_instantaneous)
            ));
            summary.push(format!(
                "classical instantaneous: {}",
                show(result.classical_instantaneous)
            ));
            summary.push(format!(
                "classical time-averaged: {}",
                show(result.classical_time_averaged)
            ));
            summary.push(format!("first to cross: {}", result.first_to_cross));
            meta.mix = Some(result);
            outputs.add(out.to_path_buf(), bytes);
        }
        CommandRecord::Trajectory { samples, seed } => {
            let (records, histogram) = trajectory(&prepared, *samples, *seed, jobs)?;
            outputs.add(out.to_path_buf(), records);
            outputs.add(sibling(out, ".histogram.csv"), histogram);
            summary.push(format!("seed {seed}"));
        }
    }
    outputs.add(meta_path(out), meta.to_json());
    Ok(Report { outputs, summary })
}

#[derive(Serialize)]
struct RunRow {
    t: usize,
    vertex: usize,
    probability: f64,
}

fn run(p: &Prepared, tol: &Tolerances) -> Result<Vec<u8>, CliError> {
    let rows: Vec<RunRow> = marginals(p, p.config.steps, tol)?
        .iter()
        .enumerate()
        .flat_map(|(t, m)| {
            m.probabilities()
                .iter()
                .enumerate()
                .filter(|(_, &q)| q != 0.0)
                .map(move |(vertex, &probability)| RunRow {
                    t,
                    vertex,
                    probability,
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(csv_bytes(&rows))
}

/// Evenly spaced grid of `n` points over [0, 1].
pub fn beta_grid(n: usize) -> Result<Vec<f64>, CliError> {
    match n {
        0 => Err(CliError::Config("--grid needs at least one point".into())),
        1 => Ok(vec![0.0]),
        _ => Ok((0..n).map(|i| i as f64 / (n - 1) as f64).collect()),
    }
}

/// Checks a beta list and puts it in ascending order without repeats.
pub fn normalize_betas(mut betas: Vec<f64>) -> Result<Vec<f64>, CliError> {
    if betas.is_empty() {
        return Err(CliError::Config("--betas is empty".into()));
    }
    if let Some(b) = betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        return Err(CliError::Config(format!("--betas: {b} is outside [0, 1]")));
    }
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    Ok(betas)
}

fn sweep(
    p: &Prepared,
    betas: &[f64],
    jobs: Option<usize>,
    tol: &Tolerances,
) -> Result<Vec<u8>, CliError> {
    let betas = normalize_betas(betas.to_vec())?;
    let c = &p.config;
    let mut template = p.template.clone();
    if c.vertex_dephasing != 0.0 {
        template = template.with_vertex_dephasing(c.vertex_dephasing, c.dephasing_placement)?;
    }
    let reference = SweepReference::new(&template, &p.psi0, c.steps)?;
    log::info!("sweeping {} beta values", betas.len());
    let points = pool(jobs)?.install(|| {
        betas
            .par_iter()
            .map(|&beta| complementarity_point(&template, &p.psi0, c.steps, beta, &reference, tol))
            .collect::<coinwalk::Result<Vec<_>>>()
    })?;
    Ok(csv_bytes(&points))
}

#[derive(Serialize)]
struct MixRow {
    t: usize,
    quantum_instantaneous: f64,
    quantum_time_averaged: f64,
    classical_instantaneous: f64,
    classical_time_averaged: f64,
}

fn mix(p: &Prepared, epsilon: f64, tol: &Tolerances) -> Result<(Vec<u8>, MixSummary), CliError> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(CliError::Config(format!(
            "--epsilon must be in (0, 1], got {epsilon}"
        )));
    }
    let steps = p.config.steps;
    if steps == 0 {
        return Err(CliError::Config("mix needs --steps of at least 1".into()));
    }
    let quantum = marginals(p, steps, tol)?;
    let start = p.config.start;
    let classical = HalfEdgeChain::new(p.step.coin(), p.step.shift())?.run_from(
        start.vertex,
        start.port,
        steps,
    );

    let curve = |m: &[Distribution], v| MixingCurve::from_marginals(m, v);
    let qi = curve(&quantum, MixingVariant::Instantaneous)?;
    let qa = curve(&quantum, MixingVariant::TimeAveraged)?;
    let ci = curve(&classical, MixingVariant::Instantaneous)?;
    let ca = curve(&classical, MixingVariant::TimeAveraged)?;

    let rows: Vec<MixRow> = (0..=steps)
        .map(|t| MixRow {
            t,
            quantum_instantaneous: qi.tvd_to_uniform[t],
            quantum_time_averaged: qa.tvd_to_uniform[t],
            classical_instantaneous: ci.tvd_to_uniform[t],
            classical_time_averaged: ca.tvd_to_uniform[t],
        })
        .collect();

    let q = qa.first_crossing(epsilon);
    let c = ci.first_crossing(epsilon);
    let first_to_cross = match (q, c) {
        (None, None) => "neither",
        (Some(_), None) => "quantum",
        (None, Some(_)) => "classical",
        (Some(a), Some(b)) if a < b => "quantum",
        (Some(a), Some(b)) if a > b => "classical",
        _ => "tie",
    };
    let summary = MixSummary {
        quantum_time_averaged: q,
        quantum_instantaneous: qi.first_crossing(epsilon),
        classical_instantaneous: c,
        classical_time_averaged: ca.first_crossing(epsilon),
        first_to_cross: first_to_cross.into(),
    };
    Ok((csv_bytes(&rows), summary))
}

#[derive(Serialize)]
struct RecordRow {
    sample: usize,
    seed: u64,
    step: usize,
    outcome: usize,
    probability: f64,
    /// Vertex after this step when the record is sharp enough to fix it.
    vertex: Option<usize>,
}

#[derive(Serialize)]
struct HistogramRow {
    vertex: usize,
    probability: f64,
}

fn trajectory(
    p: &Prepared,
    samples: usize,
    seed: u64,
    jobs: Option<usize>,
) -> Result<(Vec<u8>, Vec<u8>), CliError> {
    let kraus = p.step.coin_kraus().ok_or_else(|| {
        CliError::Config(
            "trajectory sampling needs --beta > 0: without a coin measurement there is a single \
             branch; use `coinwalk run` for the unmeasured walk"
                .into(),
        )
    })?;
    if samples == 0 {
        return Err(CliError::Config("--samples must be at least 1".into()));
    }
    let sharp = kraus.factor() == 0.0;
    let steps = p.config.steps;
    let seeds = coinwalk::rng::derive_seeds(seed, samples);
    log::info!("sampling {samples} trajectories from seed {seed}");
    let results = pool(jobs)?.install(|| {
        seeds
            .par_iter()
            .map(|&s| evolution::sample_trajectory(&p.psi0, &p.step, steps, s))
            .collect::<coinwalk::Result<Vec<_>>>()
    })?;

    let n = p.graph.num_vertices();
    let mut histogram = vec![0.0; n];
    let mut rows = Vec::with_capacity(samples * steps);
    for (i, (state, record)) in results.iter().enumerate() {
        let path = sharp.then(|| {
            evolution::reconstruct_path(p.config.start.vertex, &record.outcomes, p.step.shift())
        });
        for (s, (&outcome, &probability)) in record
            .outcomes
            .iter()
            .zip(&record.outcome_probabilities)
            .enumerate()
        {
            rows.push(RecordRow {
                sample: i,
                seed: record.seed,
                step: s + 1,
                outcome,
                probability,
                vertex: path.as_ref().map(|v| v[s + 1]),
            });
        }
        for (h, q) in histogram
            .iter_mut()
            .zip(state.position_marginal().probabilities())
        {
            *h += q;
        }
    }
    let hist_rows: Vec<HistogramRow> = histogram
        .into_iter()
        .enumerate()
        .map(|(vertex, h)| HistogramRow {
            vertex,
            probability: h / samples as f64,
        })
        .collect();
    Ok((csv_bytes(&rows), csv_bytes(&hist_rows)))
}
