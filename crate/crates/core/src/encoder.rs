use crate::error::{Error, Result};
use crate::info;
use crate::joint::JointDistribution;

/// Deterministic abstraction `z(x)` together with the cluster statistics it
/// induces on the joint it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    assignments: Vec<usize>,
    cluster_prior: Vec<f64>,
    cluster_predictive: Vec<Vec<f64>>,
    cluster_mean: Vec<f64>,
    objective: String,
}

impl Encoder {
    /// Builds an encoder from a raw cluster labelling of the joint's items
    /// (indexed by position in `x_support`).
    ///
    /// Labels are compacted to `0..K` in order of first appearance.
    pub fn from_assignments(
        joint: &JointDistribution,
        assignments: &[usize],
        objective: impl Into<String>,
    ) -> Result<Self> {
        if assignments.len() != joint.n_items() {
            return Err(Error::mismatch(format!(
                "encoder assigns {} items, joint has {}",
                assignments.len(),
                joint.n_items()
            )));
        }
        let assignments = compact_labels(assignments);
        let k = assignments.iter().max().map_or(0, |m| m + 1);
        let mut prior = vec![0.0; k];
        let mut mass = vec![vec![0.0; joint.n_levels()]; k];
        for (x, &z) in assignments.iter().enumerate() {
            prior[z] += joint.px()[x];
            for (acc, &p) in mass[z].iter_mut().zip(joint.row(x)) {
                *acc += p;
            }
        }
        let predictive: Vec<Vec<f64>> = mass
            .iter()
            .zip(&prior)
            .map(|(row, &qz)| row.iter().map(|p| p / qz).collect())
            .collect();
        let cluster_mean = predictive
            .iter()
            .map(|row| row.iter().zip(joint.y_support()).map(|(q, y)| q * y).sum())
            .collect();
        Ok(Self {
            assignments,
            cluster_prior: prior,
            cluster_predictive: predictive,
            cluster_mean,
            objective: objective.into(),
        })
    }

    /// One cluster per item.
    pub fn identity(joint: &JointDistribution, objective: impl Into<String>) -> Self {
        let labels: Vec<usize> = (0..joint.n_items()).collect();
        Self::from_assignments(joint, &labels, objective).expect("sizes match")
    }

    /// Every item in one cluster.
    pub fn single_cluster(joint: &JointDistribution, objective: impl Into<String>) -> Self {
        Self::from_assignments(joint, &vec![0; joint.n_items()], objective).expect("sizes match")
    }

    /// Groups items whose conditional `p(y|x)` rows are identical. For a
    /// deterministic joint this is the partition by reward value.
    pub fn by_value(joint: &JointDistribution, objective: impl Into<String>) -> Self {
        let mut keys: Vec<Vec<u64>> = Vec::new();
        let labels: Vec<usize> = (0..joint.n_items())
            .map(|x| {
                let px = joint.px()[x];
                let key: Vec<u64> = joint.row(x).iter().map(|p| (p / px).to_bits()).collect();
                match keys.iter().position(|k| *k == key) {
                    Some(i) => i,
                    None => {
                        keys.push(key);
                        keys.len() - 1
                    }
                }
            })
            .collect();
        Self::from_assignments(joint, &labels, objective).expect("sizes match")
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn cluster_of(&self, item: usize) -> usize {
        self.assignments[item]
    }

    pub fn n_items(&self) -> usize {
        self.assignments.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.cluster_prior.len()
    }

    pub fn cluster_prior(&self) -> &[f64] {
        &self.cluster_prior
    }

    pub fn cluster_predictive(&self) -> &[Vec<f64>] {
        &self.cluster_predictive
    }

    /// `E[Y | z]` under the training joint.
    pub fn cluster_mean(&self) -> &[f64] {
        &self.cluster_mean
    }

    pub fn objective(&self) -> &str {
        &self.objective
    }

    pub fn with_objective(mut self, objective: impl Into<String>) -> Self {
        self.objective = objective.into();
        self
    }

    /// `H(Z)`, which equals `I(X; Z)` for a deterministic encoder.
    pub fn entropy(&self) -> f64 {
        info::entropy_unchecked(&self.cluster_prior)
    }

    /// `I(Y; Z)` on the training joint.
    pub fn informativeness(&self) -> f64 {
        let rows: Vec<Vec<f64>> = self
            .cluster_predictive
            .iter()
            .zip(&self.cluster_prior)
            .map(|(row, &qz)| row.iter().map(|q| q * qz).collect())
            .collect();
        info::mutual_information_unchecked(&rows)
    }

    /// `weight · I(Y;Z) − H(Z)`, the quantity the solver maximizes.
    pub fn dib_objective(&self, weight: f64) -> f64 {
        weight * self.informativeness() - self.entropy()
    }

    /// Item positions grouped by cluster.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.n_clusters()];
        for (x, &z) in self.assignments.iter().enumerate() {
            groups[z].push(x);
        }
        groups
    }
}

/// Relabels clusters to `0..K` in order of first appearance.
pub fn compact_labels(labels: &[usize]) -> Vec<usize> {
    let mut map: Vec<(usize, usize)> = Vec::new();
    labels
        .iter()
        .map(|&l| match map.iter().find(|(from, _)| *from == l) {
            Some(&(_, to)) => to,
            None => {
                let to = map.len();
                map.push((l, to));
                to
            }
        })
        .collect()
}

/// The `p(x, z)` table induced by a labelling, with rows indexed by item.
pub fn induced_xz_table(px: &[f64], assignments: &[usize]) -> Vec<Vec<f64>> {
    let k = assignments.iter().max().map_or(0, |m| m + 1);
    px.iter()
        .zip(assignments)
        .map(|(&p, &z)| {
            let mut row = vec![0.0; k];
            row[z] = p;
            row
        })
        .collect()
}
