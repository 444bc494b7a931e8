//! Evaluation quantities for an abstraction: complexity, reward distortion,
//! feature-rank agreement, best-demonstration score, and Spearman correlation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::domains::RewardModel;
use crate::encoder::{induced_xz_table, Encoder};
use crate::error::{Error, Result};
use crate::info;
use crate::joint::JointDistribution;
use crate::tasks::{path_value, Demonstration, PathTask};

/// Slack allowed when a respondent's path scores marginally outside
/// `[worst, optimal]` because of floating-point summation, relative to
/// `1 + (optimal - worst)`.
pub const BD_TOLERANCE: f64 = 1e-9;

/// `I(X; Z)` of the `(X, Z)` joint induced by the encoder on `joint`.
pub fn complexity(encoder: &Encoder, joint: &JointDistribution) -> Result<f64> {
    if encoder.n_items() != joint.n_items() {
        return Err(Error::mismatch(format!(
            "encoder covers {} items, joint has {}",
            encoder.n_items(),
            joint.n_items()
        )));
    }
    info::mutual_information(&induced_xz_table(joint.px(), encoder.assignments()))
}

/// Mean of `target` over each cluster's members.
pub fn cluster_means(encoder: &Encoder, target: &RewardModel) -> Result<Vec<f64>> {
    check_cover(encoder, target)?;
    let mut sums = vec![0.0; encoder.n_clusters()];
    let mut counts = vec![0usize; encoder.n_clusters()];
    for (x, &z) in encoder.assignments().iter().enumerate() {
        sums[z] += target.value(x);
        counts[z] += 1;
    }
    Ok(sums.iter().zip(&counts).map(|(s, &n)| s / n as f64).collect())
}

/// Mean squared error of predicting `target` by its per-cluster mean.
pub fn distortion(encoder: &Encoder, target: &RewardModel) -> Result<f64> {
    let means = cluster_means(encoder, target)?;
    Ok(mse_with_means(encoder, target, &means))
}

pub(crate) fn mse_with_means(encoder: &Encoder, target: &RewardModel, means: &[f64]) -> f64 {
    let total: f64 = encoder
        .assignments()
        .iter()
        .enumerate()
        .map(|(x, &z)| (means[z] - target.value(x)).powi(2))
        .sum();
    total / encoder.n_items() as f64
}

/// Expected squared error of `E[Y|z]` under a general joint, where the encoder
/// was fitted on that joint. Agrees with [`distortion`] for uniform,
/// deterministic joints.
pub fn distortion_on_joint(encoder: &Encoder, joint: &JointDistribution) -> f64 {
    encoder
        .assignments()
        .iter()
        .enumerate()
        .map(|(x, &z)| {
            let mean = encoder.cluster_mean()[z];
            joint
                .row(x)
                .iter()
                .zip(joint.y_support())
                .map(|(p, y)| p * (mean - y).powi(2))
                .sum::<f64>()
        })
        .sum()
}

fn check_cover(encoder: &Encoder, target: &RewardModel) -> Result<()> {
    if encoder.n_items() != target.len() {
        return Err(Error::mismatch(format!(
            "encoder covers {} items, target reward has {}",
            encoder.n_items(),
            target.len()
        )));
    }
    Ok(())
}

/// What to compare when ranking items.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankBy {
    /// Signed reward value.
    #[default]
    Value,
    /// Absolute value, the reading used for signed linear feature weights.
    Magnitude,
}

/// Set of ordered pairs `(a, b)` meaning `a` is ranked strictly above `b`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankingSet {
    pairs: BTreeSet<(usize, usize)>,
}

impl RankingSet {
    /// Builds a set from explicit pairs, rejecting pairs in both directions
    /// and self-pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        for &(a, b) in &pairs {
            if a == b {
                return Err(Error::validation(format!("item {a} ranked above itself")));
            }
            if pairs.contains(&(b, a)) {
                return Err(Error::validation(format!("items {a} and {b} ranked both ways")));
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, above: usize, below: usize) -> bool {
        self.pairs.contains(&(above, below))
    }
}

/// All strict pairwise orderings among `query` items. Equal values yield no pair.
pub fn pairwise_ranking(values: &[f64], query: &[usize], rank_by: RankBy) -> Result<RankingSet> {
    let mut distinct = BTreeSet::new();
    for &item in query {
        if item >= values.len() {
            return Err(Error::mismatch(format!("no value for query item {item}")));
        }
        if !distinct.insert(item) {
            return Err(Error::validation(format!("query item {item} appears twice")));
        }
    }
    let key = |item: usize| match rank_by {
        RankBy::Value => values[item],
        RankBy::Magnitude => values[item].abs(),
    };
    let mut pairs = BTreeSet::new();
    for &a in query {
        for &b in query {
            if key(a) > key(b) {
                pairs.insert((a, b));
            }
        }
    }
    Ok(RankingSet { pairs })
}

/// Intersection over union of two ranking sets; 1 when both are empty.
pub fn feature_rank(human: &RankingSet, ground_truth: &RankingSet) -> f64 {
    let union = human.pairs.union(&ground_truth.pairs).count();
    if union == 0 {
        return 1.0;
    }
    let inter = human.pairs.intersection(&ground_truth.pairs).count();
    inter as f64 / union as f64
}

/// `1 - (R* - R_h) / (R* - R_worst)` from the three path rewards.
pub fn best_demonstration_score(optimal: f64, human: f64, worst: f64) -> Result<f64> {
    if optimal == worst {
        return Err(Error::DegenerateTask(optimal));
    }
    if optimal < worst {
        return Err(Error::Contract(format!(
            "optimal reward {optimal} is below worst reward {worst}"
        )));
    }
    let slack = BD_TOLERANCE * (1.0 + (optimal - worst));
    if human > optimal + slack || human < worst - slack {
        return Err(Error::Contract(format!(
            "demonstration reward {human} outside [{worst}, {optimal}]"
        )));
    }
    let human = human.clamp(worst, optimal);
    Ok(1.0 - (optimal - human) / (optimal - worst))
}

/// Best-demonstration score of `human` on `task`, all paths scored under `target`.
pub fn best_demonstration(
    task: &PathTask,
    optimal: &Demonstration,
    human: &Demonstration,
    worst: &Demonstration,
    target: &RewardModel,
) -> Result<f64> {
    best_demonstration_score(
        path_value(task, optimal, target)?,
        path_value(task, human, target)?,
        path_value(task, worst, target)?,
    )
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::validation(format!(
            "spearman needs equal lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::validation("spearman needs at least 3 observations"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::validation("spearman inputs must be finite"));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end share their average.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("a ranked input has zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Every metric for one abstraction evaluated against one target reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub encoder: String,
    pub objective: String,
    pub target: String,
    pub n_clusters: usize,
    pub complexity_bits: f64,
    pub informativeness_bits: f64,
    pub distortion_mse: f64,
    pub feature_rank: f64,
    /// `None` when every configured task was degenerate.
    pub best_demonstration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

pub const BATCH_CSV_HEADER: &str =
    "encoder,objective,target,n_clusters,complexity_bits,distortion_mse,feature_rank,best_demonstration";

impl MetricReport {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.complexity_bits,
            self.informativeness_bits,
            self.distortion_mse,
            self.feature_rank,
        ]
        .iter()
        .chain(self.best_demonstration.iter())
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::validation("metric report has non-finite fields"));
        }
        let unit = 0.0..=1.0;
        if !unit.contains(&self.feature_rank) || self.best_demonstration.is_some_and(|b| !unit.contains(&b)) {
            return Err(Error::validation("feature rank and best demonstration must lie in [0, 1]"));
        }
        Ok(())
    }

    /// One row of the batch CSV. An empty last field means no usable task.
    pub fn csv_row(&self) -> String {
        let g = |v: f64| crate::fmt::sig(v, 12);
        format!(
            "{},{},{},{},{},{},{},{}",
            self.encoder,
            self.objective,
            self.target,
            self.n_clusters,
            g(self.complexity_bits),
            g(self.distortion_mse),
            g(self.feature_rank),
            self.best_demonstration.map(g).unwrap_or_default()
        )
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
