use crate::error::{Error, Result};
use crate::info;

/// Tolerance on the total mass of a constructed joint.
pub const JOINT_TOLERANCE: f64 = 1e-12;

/// Discrete joint distribution `p(x, y)` over item ids `x` and reward levels `y`.
///
/// Rows are indexed by position in `x_support`, columns by position in
/// `y_support`. Every row has positive marginal mass.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    x_support: Vec<usize>,
    y_support: Vec<f64>,
    table: Vec<Vec<f64>>,
    px: Vec<f64>,
    py: Vec<f64>,
}

impl JointDistribution {
    pub fn new(x_support: Vec<usize>, y_support: Vec<f64>, table: Vec<Vec<f64>>) -> Result<Self> {
        if x_support.is_empty() || y_support.is_empty() {
            return Err(Error::validation("joint distribution needs non-empty supports"));
        }
        if table.len() != x_support.len() {
            return Err(Error::validation(format!(
                "joint table has {} rows for {} items",
                table.len(),
                x_support.len()
            )));
        }
        let mut seen_x = x_support.clone();
        seen_x.sort_unstable();
        if seen_x.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::validation("x_support contains duplicate ids"));
        }
        let mut seen_y = y_support.clone();
        seen_y.sort_by(f64::total_cmp);
        if seen_y.iter().any(|y| !y.is_finite()) {
            return Err(Error::validation("y_support entries must be finite"));
        }
        if seen_y.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::validation("y_support entries must be distinct"));
        }
        let mut total = 0.0;
        for (i, row) in table.iter().enumerate() {
            if row.len() != y_support.len() {
                return Err(Error::validation(format!(
                    "joint row {i} has {} entries for {} reward levels",
                    row.len(),
                    y_support.len()
                )));
            }
            for &p in row {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::validation(format!("joint row {i} has invalid mass {p}")));
                }
                total += p;
            }
            if row.iter().all(|&p| p == 0.0) {
                return Err(Error::validation(format!("item {} has zero marginal mass", x_support[i])));
            }
        }
        if (total - 1.0).abs() > JOINT_TOLERANCE {
            return Err(Error::validation(format!("joint mass sums to {total}, expected 1")));
        }
        let px = table.iter().map(|r| r.iter().sum()).collect();
        let mut py = vec![0.0; y_support.len()];
        for row in &table {
            for (acc, &p) in py.iter_mut().zip(row) {
                *acc += p;
            }
        }
        Ok(Self {
            x_support,
            y_support,
            table,
            px,
            py,
        })
    }

    /// Uniform `p(x)` over items `0..values.len()` with `Y = values[x]` deterministic.
    ///
    /// The reward levels are the distinct values, sorted ascending.
    pub fn from_deterministic(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("cannot build a joint over zero items"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::validation(format!("reward value {v} is not finite")));
        }
        let levels = distinct_sorted(values);
        let mass = 1.0 / values.len() as f64;
        let table = values
            .iter()
            .map(|v| {
                let mut row = vec![0.0; levels.len()];
                row[level_index(&levels, *v)] = mass;
                row
            })
            .collect();
        Self::new((0..values.len()).collect(), levels, table)
    }

    pub fn x_support(&self) -> &[usize] {
        &self.x_support
    }

    pub fn y_support(&self) -> &[f64] {
        &self.y_support
    }

    pub fn n_items(&self) -> usize {
        self.x_support.len()
    }

    pub fn n_levels(&self) -> usize {
        self.y_support.len()
    }

    /// Row of `p(x, ·)` for the item at position `row`.
    pub fn row(&self, row: usize) -> &[f64] {
        &self.table[row]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.table
    }

    pub fn px(&self) -> &[f64] {
        &self.px
    }

    pub fn py(&self) -> &[f64] {
        &self.py
    }

    /// `E[Y | x]` for the item at position `row`.
    pub fn conditional_mean(&self, row: usize) -> f64 {
        let px = self.px[row];
        self.table[row]
            .iter()
            .zip(&self.y_support)
            .map(|(p, y)| p / px * y)
            .sum()
    }

    pub fn entropy_x(&self) -> f64 {
        info::entropy_unchecked(&self.px)
    }

    pub fn entropy_y(&self) -> f64 {
        info::entropy_unchecked(&self.py)
    }

    /// `I(X; Y)` in bits.
    pub fn mutual_information(&self) -> f64 {
        info::mutual_information_unchecked(&self.table)
    }
}

pub(crate) fn distinct_sorted(values: &[f64]) -> Vec<f64> {
    let mut levels = values.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
}

fn level_index(levels: &[f64], v: f64) -> usize {
    levels
        .binary_search_by(|probe| probe.total_cmp(&v))
        .expect("value drawn from the same table")
}
