//! Deterministic information bottleneck.
//!
//! The solver alternates two steps until the assignment stops changing:
//!
//! 1. recompute `q(z)` and `q(y|z)` from the current assignment;
//! 2. move every item to `argmax_z [ log2 q(z) + weight · Σ_y p(y|x) log2 q(y|z) ]`.
//!
//! Each pass maximizes a lower bound on `weight · I(Y;Z) − H(Z)` that is tight
//! at the current statistics, so the objective never decreases. Empty clusters
//! are dropped and labels compacted after every pass. Argmax ties go to the
//! lowest cluster id.
//!
//! When `Y` is a deterministic function of `X`, an item can never join a
//! cluster whose predictive has no mass on its own reward level (the score is
//! `-inf`). Hard starts such as the identity encoder therefore only merge
//! items with equal rewards; coarser solutions come from random soft starts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoder::{compact_labels, Encoder};
use crate::error::{Error, Result};
use crate::joint::JointDistribution;

pub const DEFAULT_MAX_ITERS: usize = 500;

/// Starting point for a single solver run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Init {
    /// One cluster per item.
    Identity,
    /// Random soft assignment over as many clusters as items, drawn from a
    /// seeded generator. The first pass hardens it.
    Random(u64),
    /// Start from an existing hard labelling (annealing warm start).
    Warm(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DibParams {
    /// Multiplier on informativeness; roughly the reciprocal of the usual β.
    pub weight: f64,
    pub max_iters: usize,
    /// Extra random restarts on top of the primary `Init`.
    pub restarts: usize,
    /// Seed for the restarts. Restart `r` uses ChaCha stream `r + 1` of this seed.
    pub restart_seed: u64,
}

impl DibParams {
    pub fn new(weight: f64) -> Self {
        Self {
            weight,
            max_iters: DEFAULT_MAX_ITERS,
            restarts: 0,
            restart_seed: 0,
        }
    }

    pub fn restarts(mut self, restarts: usize, seed: u64) -> Self {
        self.restarts = restarts;
        self.restart_seed = seed;
        self
    }

    pub fn max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.weight.is_finite() && self.weight > 0.0) {
            return Err(Error::validation(format!(
                "trade-off weight must be positive and finite, got {}",
                self.weight
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::validation("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Outcome of one solver run from one starting point.
#[derive(Debug, Clone)]
pub struct DibRun {
    pub encoder: Encoder,
    pub converged: bool,
    pub iterations: usize,
    /// Objective after every statistics recomputation. For hard starts the
    /// first entry is the starting encoder.
    pub objective_trace: Vec<f64>,
}

impl DibRun {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("at least one pass")
    }
}

/// Solves from `init` plus `params.restarts` random restarts and returns the
/// run with the highest objective (earliest run on ties).
pub fn solve_dib(joint: &JointDistribution, init: &Init, params: &DibParams) -> Result<DibRun> {
    let runs = solve_dib_all(joint, init, params)?;
    Ok(best_run(runs))
}

/// Every run performed by [`solve_dib`], primary first.
pub fn solve_dib_all(joint: &JointDistribution, init: &Init, params: &DibParams) -> Result<Vec<DibRun>> {
    params.validate()?;
    let mut runs = Vec::with_capacity(params.restarts + 1);
    runs.push(run_dib(joint, init, params.weight, params.max_iters)?);
    for r in 0..params.restarts {
        let start = Start::Soft(random_soft_start(joint.n_items(), params.restart_seed, r as u64 + 1));
        runs.push(iterate(joint, start, params.weight, params.max_iters));
    }
    Ok(runs)
}

pub(crate) fn best_run(runs: Vec<DibRun>) -> DibRun {
    let mut best: Option<DibRun> = None;
    for run in runs {
        match &best {
            Some(b) if run.objective() <= b.objective() => {}
            _ => best = Some(run),
        }
    }
    best.expect("at least one run")
}

/// A single solver run from `init`.
pub fn run_dib(joint: &JointDistribution, init: &Init, weight: f64, max_iters: usize) -> Result<DibRun> {
    DibParams {
        weight,
        max_iters,
        restarts: 0,
        restart_seed: 0,
    }
    .validate()?;
    let start = match init {
        Init::Identity => Start::Hard((0..joint.n_items()).collect()),
        Init::Warm(labels) => {
            if labels.len() != joint.n_items() {
                return Err(Error::mismatch(format!(
                    "warm start labels {} items, joint has {}",
                    labels.len(),
                    joint.n_items()
                )));
            }
            Start::Hard(labels.clone())
        }
        Init::Random(seed) => Start::Soft(random_soft_start(joint.n_items(), *seed, 0)),
    };
    Ok(iterate(joint, start, weight, max_iters))
}

/// A single run from a random soft start on ChaCha stream `stream` of `seed`.
pub fn run_random(joint: &JointDistribution, seed: u64, stream: u64, weight: f64, max_iters: usize) -> DibRun {
    iterate(joint, Start::Soft(random_soft_start(joint.n_items(), seed, stream)), weight, max_iters)
}

enum Start {
    Hard(Vec<usize>),
    /// Row-stochastic `q(z|x)`, rows indexed by item.
    Soft(Vec<Vec<f64>>),
}

fn random_soft_start(n_items: usize, seed: u64, stream: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..n_items)
        .map(|_| {
            // Strictly positive weights keep every q(y|z) non-zero for the first pass.
            let row: Vec<f64> = (0..n_items).map(|_| 1.0 - rng.random::<f64>()).collect();
            let total: f64 = row.iter().sum();
            row.into_iter().map(|w| w / total).collect()
        })
        .collect()
}

/// Cluster statistics in the form the assignment step needs.
struct Stats {
    log_prior: Vec<f64>,
    log_predictive: Vec<Vec<f64>>,
}

impl Stats {
    fn from_soft(joint: &JointDistribution, soft: &[Vec<f64>]) -> Self {
        let k = soft.first().map_or(0, Vec::len);
        let mut prior = vec![0.0; k];
        let mut mass = vec![vec![0.0; joint.n_levels()]; k];
        for (x, row) in soft.iter().enumerate() {
            let px = joint.px()[x];
            for (z, &w) in row.iter().enumerate() {
                prior[z] += px * w;
                for (acc, &pxy) in mass[z].iter_mut().zip(joint.row(x)) {
                    *acc += pxy * w;
                }
            }
        }
        Self::from_mass(&prior, &mass)
    }

    fn from_encoder(enc: &Encoder) -> Self {
        Self {
            log_prior: enc.cluster_prior().iter().map(|q| q.log2()).collect(),
            log_predictive: enc
                .cluster_predictive()
                .iter()
                .map(|row| row.iter().map(|q| q.log2()).collect())
                .collect(),
        }
    }

    fn from_mass(prior: &[f64], mass: &[Vec<f64>]) -> Self {
        Self {
            log_prior: prior.iter().map(|q| q.log2()).collect(),
            log_predictive: mass
                .iter()
                .zip(prior)
                .map(|(row, &qz)| row.iter().map(|m| (m / qz).log2()).collect())
                .collect(),
        }
    }
}

/// Sparse `p(y|x)` rows.
fn conditionals(joint: &JointDistribution) -> Vec<Vec<(usize, f64)>> {
    (0..joint.n_items())
        .map(|x| {
            let px = joint.px()[x];
            joint
                .row(x)
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(y, &p)| (y, p / px))
                .collect()
        })
        .collect()
}

fn assign(cond: &[Vec<(usize, f64)>], stats: &Stats, weight: f64) -> Vec<usize> {
    cond.iter()
        .map(|row| {
            let mut best = 0;
            let mut best_score = f64::NEG_INFINITY;
            for (z, (&lp, lpred)) in stats.log_prior.iter().zip(&stats.log_predictive).enumerate() {
                let fit: f64 = row.iter().map(|&(y, p)| p * lpred[y]).sum();
                let score = lp + weight * fit;
                if score > best_score {
                    best = z;
                    best_score = score;
                }
            }
            best
        })
        .collect()
}

fn iterate(joint: &JointDistribution, start: Start, weight: f64, max_iters: usize) -> DibRun {
    let cond = conditionals(joint);
    let label = "dib";
    let mut trace = Vec::new();
    let (mut current, mut stats) = match start {
        Start::Hard(labels) => {
            let enc = Encoder::from_assignments(joint, &compact_labels(&labels), label).expect("sizes match");
            trace.push(enc.dib_objective(weight));
            let stats = Stats::from_encoder(&enc);
            (Some(enc), stats)
        }
        Start::Soft(soft) => (None, Stats::from_soft(joint, &soft)),
    };
    let mut best: Option<(f64, Encoder)> = current.as_ref().map(|e| (trace[0], e.clone()));
    for iteration in 1..=max_iters {
        let labels = compact_labels(&assign(&cond, &stats, weight));
        if let Some(enc) = &current {
            if enc.assignments() == labels.as_slice() {
                return DibRun {
                    encoder: enc.clone(),
                    converged: true,
                    iterations: iteration,
                    objective_trace: trace,
                };
            }
        }
        let enc = Encoder::from_assignments(joint, &labels, label).expect("sizes match");
        let objective = enc.dib_objective(weight);
        trace.push(objective);
        if best.as_ref().is_none_or(|(b, _)| objective > *b) {
            best = Some((objective, enc.clone()));
        }
        stats = Stats::from_encoder(&enc);
        current = Some(enc);
    }
    let (_, encoder) = best.expect("at least one pass");
    DibRun {
        encoder,
        converged: false,
        iterations: max_iters,
        objective_trace: trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manhattan_like() -> JointDistribution {
        JointDistribution::from_deterministic(&[1.0, 0.5, 0.5, 0.0, 0.0, 0.0, -0.5, -1.0]).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        let joint = manhattan_like();
        assert!(solve_dib(&joint, &Init::Identity, &DibParams::new(0.0)).is_err());
        assert!(solve_dib(&joint, &Init::Identity, &DibParams::new(f64::NAN)).is_err());
        assert!(solve_dib(&joint, &Init::Identity, &DibParams::new(1.0).max_iters(0)).is_err());
        assert!(run_dib(&joint, &Init::Warm(vec![0, 1]), 1.0, 10).is_err());
    }

    #[test]
    fn identity_start_collapses_to_value_partition() {
        let joint = manhattan_like();
        let run = solve_dib(&joint, &Init::Identity, &DibParams::new(1e3)).unwrap();
        assert!(run.converged);
        assert_eq!(run.encoder.assignments(), Encoder::by_value(&joint, "").assignments());
    }

    #[test]
    fn tiny_weight_with_restart_gives_one_cluster() {
        let joint = manhattan_like();
        let run = solve_dib(&joint, &Init::Identity, &DibParams::new(1e-3).restarts(1, 5)).unwrap();
        assert_eq!(run.encoder.n_clusters(), 1);
        assert_eq!(run.encoder.entropy(), 0.0);
    }

    #[test]
    fn random_start_is_seed_deterministic() {
        let joint = manhattan_like();
        let a = run_dib(&joint, &Init::Random(11), 1.3, 50).unwrap();
        let b = run_dib(&joint, &Init::Random(11), 1.3, 50).unwrap();
        assert_eq!(a.encoder, b.encoder);
        assert_eq!(a.objective_trace, b.objective_trace);
    }

    #[test]
    fn single_item_is_single_cluster() {
        let joint = JointDistribution::from_deterministic(&[0.4]).unwrap();
        let run = solve_dib(&joint, &Init::Identity, &DibParams::new(2.0).restarts(2, 0)).unwrap();
        assert_eq!(run.encoder.n_clusters(), 1);
        assert!(run.converged);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let joint = manhattan_like();
        // A random soft start always needs at least one hardening pass plus a
        // confirming pass, so one iteration cannot converge.
        let run = run_dib(&joint, &Init::Random(3), 1.0, 1).unwrap();
        assert!(!run.converged);
        assert_eq!(run.iterations, 1);
        assert_eq!(run.objective_trace.len(), 1);
    }
}
