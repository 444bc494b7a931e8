//! Complexity–distortion frontiers traced by sweeping the trade-off weight.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dib::{self, DibRun, Init, DEFAULT_MAX_ITERS};
use crate::domains::RewardModel;
use crate::encoder::Encoder;
use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::joint::JointDistribution;
use crate::metrics;

pub const FRONTIER_CSV_HEADER: &str = "weight,n_clusters,complexity_bits,informativeness_bits,distortion_mse";

/// Complexities closer than this are the same point on the frontier.
const COMPLEXITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint {
    /// Trade-off weight on informativeness that produced this encoder.
    pub weight: f64,
    pub n_clusters: usize,
    pub complexity_bits: f64,
    pub informativeness_bits: f64,
    pub distortion_mse: f64,
    pub encoder: Encoder,
}

impl FrontierPoint {
    /// Scores an encoder on the joint it was trained on.
    pub fn from_encoder(weight: f64, encoder: Encoder, joint: &JointDistribution) -> Self {
        Self {
            weight,
            n_clusters: encoder.n_clusters(),
            complexity_bits: encoder.entropy(),
            informativeness_bits: encoder.informativeness(),
            distortion_mse: metrics::distortion_on_joint(&encoder, joint),
            encoder,
        }
    }

    /// Same point with distortion measured against a different reward over
    /// the same items.
    pub fn against(&self, target: &RewardModel) -> Result<Self> {
        Ok(Self {
            distortion_mse: metrics::distortion(&self.encoder, target)?,
            ..self.clone()
        })
    }
}

/// Sweep settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Ascending, positive.
    pub weights: Vec<f64>,
    /// Random soft restarts per weight, in addition to the annealed run.
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            weights: geometric_grid(1e-3, 1e3, 200),
            restarts: 8,
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
        }
    }
}

/// `count` points spaced geometrically from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln() / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo * (ratio * i as f64).exp() })
                .collect()
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::validation("weight grid is empty"));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::validation("weights must be positive and finite"));
        }
        if self.weights.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("weight grid must be strictly ascending"));
        }
        if self.max_iters == 0 {
            return Err(Error::validation("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Every solver run of a sweep, indexed like `config.weights`.
///
/// Runs at each weight are the annealed run (warm-started from the solution
/// at the next larger weight, the largest starting from the identity
/// encoder) followed by `restarts` random soft starts. Restart `r` at weight
/// index `i` uses ChaCha stream `1 + i * restarts + r` of `config.seed`.
pub fn sweep_runs(joint: &JointDistribution, config: &SweepConfig) -> Result<Vec<Vec<DibRun>>> {
    config.validate()?;
    let n = config.weights.len();
    let mut annealed: Vec<Option<DibRun>> = vec![None; n];
    let mut init = Init::Identity;
    for i in (0..n).rev() {
        let run = dib::run_dib(joint, &init, config.weights[i], config.max_iters)?;
        init = Init::Warm(run.encoder.assignments().to_vec());
        annealed[i] = Some(run);
    }
    let restarts: Vec<Vec<DibRun>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..config.restarts)
                .map(|r| {
                    let stream = 1 + (i * config.restarts + r) as u64;
                    dib::run_random(joint, config.seed, stream, config.weights[i], config.max_iters)
                })
                .collect()
        })
        .collect();
    Ok(annealed
        .into_iter()
        .zip(restarts)
        .map(|(a, mut rest)| {
            rest.insert(0, a.expect("filled"));
            rest
        })
        .collect())
}

/// Pareto frontier of all distinct fixed points found by the sweep, scored
/// on the training joint.
pub fn sweep_frontier(joint: &JointDistribution, config: &SweepConfig, objective: &str) -> Result<Vec<FrontierPoint>> {
    let runs = sweep_runs(joint, config)?;
    let mut seen = HashSet::new();
    let mut candidates: Vec<FrontierPoint> = Vec::new();
    for (weight, runs_at) in config.weights.iter().zip(runs) {
        for run in runs_at {
            if !seen.insert(run.encoder.assignments().to_vec()) {
                continue;
            }
            let encoder = run.encoder.with_objective(objective);
            candidates.push(FrontierPoint::from_encoder(*weight, encoder, joint));
        }
    }
    Ok(pareto_prune(candidates))
}

/// Keeps points not dominated in (complexity lower, distortion lower),
/// sorted by complexity; distortion strictly decreases along the result.
pub fn pareto_prune(mut points: Vec<FrontierPoint>) -> Vec<FrontierPoint> {
    points.sort_by(|a, b| {
        a.complexity_bits
            .total_cmp(&b.complexity_bits)
            .then(a.distortion_mse.total_cmp(&b.distortion_mse))
            .then(a.n_clusters.cmp(&b.n_clusters))
            .then(a.weight.total_cmp(&b.weight))
            .then_with(|| a.encoder.assignments().cmp(b.encoder.assignments()))
    });
    let mut front: Vec<FrontierPoint> = Vec::new();
    for p in points {
        match front.last_mut() {
            None => front.push(p),
            Some(last) if p.distortion_mse < last.distortion_mse => {
                if p.complexity_bits - last.complexity_bits <= COMPLEXITY_TOLERANCE {
                    *last = p;
                } else {
                    front.push(p);
                }
            }
            Some(_) => {}
        }
    }
    front
}

/// For each target cluster count, the frontier point with the nearest count
/// (lower complexity on ties). Repeated picks are dropped, first kept.
pub fn select_checkpoints<'a>(frontier: &'a [FrontierPoint], targets: &[usize]) -> Result<Vec<&'a FrontierPoint>> {
    if frontier.is_empty() {
        return Err(Error::validation("frontier is empty"));
    }
    if targets.contains(&0) {
        return Err(Error::validation("checkpoint targets must be at least 1"));
    }
    let mut picked: Vec<usize> = Vec::new();
    for &t in targets {
        let best = frontier
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.n_clusters
                    .abs_diff(t)
                    .cmp(&b.n_clusters.abs_diff(t))
                    .then(a.complexity_bits.total_cmp(&b.complexity_bits))
            })
            .map(|(i, _)| i)
            .expect("non-empty");
        if !picked.contains(&best) {
            picked.push(best);
        }
    }
    Ok(picked.into_iter().map(|i| &frontier[i]).collect())
}

/// The scalar columns of a frontier point, as stored in frontier CSVs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub weight: f64,
    pub n_clusters: usize,
    pub complexity_bits: f64,
    pub informativeness_bits: f64,
    pub distortion_mse: f64,
}

impl From<&FrontierPoint> for FrontierRow {
    fn from(p: &FrontierPoint) -> Self {
        Self {
            weight: p.weight,
            n_clusters: p.n_clusters,
            complexity_bits: p.complexity_bits,
            informativeness_bits: p.informativeness_bits,
            distortion_mse: p.distortion_mse,
        }
    }
}

pub fn rows_of(points: &[FrontierPoint]) -> Vec<FrontierRow> {
    points.iter().map(FrontierRow::from).collect()
}

/// Frontier CSV with 12 significant digits.
pub fn frontier_csv(points: &[FrontierPoint]) -> String {
    rows_csv(&rows_of(points))
}

pub fn rows_csv(rows: &[FrontierRow]) -> String {
    let mut out = String::from(FRONTIER_CSV_HEADER);
    out.push('\n');
    for p in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            sig(p.weight, 12),
            p.n_clusters,
            sig(p.complexity_bits, 12),
            sig(p.informativeness_bits, 12),
            sig(p.distortion_mse, 12)
        ));
    }
    out
}

/// Reads a frontier CSV written by [`frontier_csv`].
pub fn parse_frontier_csv(text: &str, origin: &str) -> Result<Vec<FrontierRow>> {
    let parse_err = |message: String| Error::Parse {
        path: origin.to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>().join(",") != FRONTIER_CSV_HEADER {
        return Err(parse_err(format!("expected header `{FRONTIER_CSV_HEADER}`")));
    }
    reader
        .deserialize::<FrontierRow>()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| parse_err(format!("row {}: {e}", i + 2))))
        .collect()
}

/// Distortion of the best frontier point whose complexity does not exceed
/// `complexity`, i.e. the frontier read as a step function.
pub fn distortion_at(frontier: &[FrontierPoint], complexity: f64) -> Option<f64> {
    frontier
        .iter()
        .filter(|p| p.complexity_bits <= complexity + COMPLEXITY_TOLERANCE)
        .map(|p| p.distortion_mse)
        .reduce(f64::min)
}
