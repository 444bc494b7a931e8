//! Reward domains: 5×5 grids and color charts, each with a tabular reward.
//!
//! Items are numbered `0..n`. For grids an item is a cell with id
//! `y * width + x` (x = column left to right, y = row bottom to top); for
//! charts it is the chip's row position in the chart.

mod color;
mod grid;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use color::{bin_index, default_color_chart, load_color_chart, parse_color_chart, Color, ColorChart, DISCONTINUOUS_BIN_REWARDS};
pub use grid::{
    build_coordinate_grid, build_manhattan_grid, build_random_grid, Axis, GridWorld, GRID_SIZE, MANHATTAN_DECREMENT,
    MANHATTAN_PEAK,
};

use crate::error::{Error, Result};
use crate::joint::JointDistribution;

/// Tabular reward `R(x) = ω · onehot(x) = weights[x]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RewardModel {
    weights: Vec<f64>,
}

impl RewardModel {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::validation("reward model has no features"));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::validation(format!("reward for item {i} is not finite")));
        }
        Ok(Self { weights })
    }

    pub fn value(&self, item: usize) -> f64 {
        self.weights[item]
    }

    pub fn values(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn feature_ids(&self) -> std::ops::Range<usize> {
        0..self.weights.len()
    }

    pub fn mean(&self) -> f64 {
        self.weights.iter().sum::<f64>() / self.weights.len() as f64
    }

    /// Population variance of the table.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.weights.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / self.weights.len() as f64
    }

    pub fn n_distinct(&self) -> usize {
        crate::joint::distinct_sorted(&self.weights).len()
    }
}

/// Uniform `p(x)` over the reward's items with `Y = R(x)`.
pub fn to_joint(reward: &RewardModel) -> JointDistribution {
    JointDistribution::from_deterministic(reward.values()).expect("reward model values are finite and non-empty")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Grid,
    Color,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Manhattan,
    Random,
    XCoord,
    YCoord,
    BlueContinuous,
    BlueDiscontinuous,
    RedContinuous,
}

impl Objective {
    pub const ALL: [Objective; 7] = [
        Objective::Manhattan,
        Objective::Random,
        Objective::XCoord,
        Objective::YCoord,
        Objective::BlueContinuous,
        Objective::BlueDiscontinuous,
        Objective::RedContinuous,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Objective::Manhattan => "manhattan",
            Objective::Random => "random",
            Objective::XCoord => "x_coord",
            Objective::YCoord => "y_coord",
            Objective::BlueContinuous => "blue_continuous",
            Objective::BlueDiscontinuous => "blue_discontinuous",
            Objective::RedContinuous => "red_continuous",
        }
    }

    pub fn kind(self) -> DomainKind {
        match self {
            Objective::Manhattan | Objective::Random | Objective::XCoord | Objective::YCoord => DomainKind::Grid,
            _ => DomainKind::Color,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Objective::ALL
            .into_iter()
            .find(|o| o.label() == s)
            .ok_or_else(|| Error::validation(format!("unknown objective `{s}`")))
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::Grid => "grid",
            DomainKind::Color => "color",
        })
    }
}

impl FromStr for DomainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(DomainKind::Grid),
            "color" => Ok(DomainKind::Color),
            _ => Err(Error::validation(format!("unknown domain kind `{s}`"))),
        }
    }
}

/// Which reward to build on which kind of domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub objective: Objective,
    /// Only used by the random grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl DomainSpec {
    pub fn new(kind: DomainKind, objective: Objective, seed: Option<u64>) -> Result<Self> {
        let spec = Self { kind, objective, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.kind() != self.kind {
            return Err(Error::validation(format!(
                "objective `{}` is not defined on {} domains",
                self.objective, self.kind
            )));
        }
        if self.objective == Objective::Random && self.seed.is_none() {
            return Err(Error::validation("the random objective requires an explicit seed"));
        }
        if self.objective != Objective::Random && self.seed.is_some() {
            return Err(Error::validation(format!("objective `{}` does not take a seed", self.objective)));
        }
        Ok(())
    }

    /// Short label, e.g. `random(7)` or `manhattan`.
    pub fn label(&self) -> String {
        match self.seed {
            Some(seed) => format!("{}({seed})", self.objective),
            None => self.objective.to_string(),
        }
    }
}

/// Spatial arrangement of a domain's items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Layout {
    Grid { width: usize, height: usize },
    Chart { colors: Vec<Color> },
}

impl Layout {
    pub fn n_items(&self) -> usize {
        match self {
            Layout::Grid { width, height } => width * height,
            Layout::Chart { colors } => colors.len(),
        }
    }

    /// Identifies the item set; two domains with equal signatures can
    /// evaluate each other's abstractions.
    pub fn signature(&self) -> String {
        match self {
            Layout::Grid { width, height } => format!("grid:{width}x{height}"),
            Layout::Chart { colors } => format!("chart:{}", colors.len()),
        }
    }
}

/// A fully materialized domain: layout plus the pinned reward table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    #[serde(flatten)]
    pub spec: DomainSpec,
    pub layout: Layout,
    pub rewards: RewardModel,
}

impl Domain {
    /// Builds a domain. Color domains use `chart`, or the default chart when `None`.
    pub fn build(spec: DomainSpec, chart: Option<&ColorChart>) -> Result<Self> {
        spec.validate()?;
        match spec.kind {
            DomainKind::Grid => {
                let grid = match spec.objective {
                    Objective::Manhattan => build_manhattan_grid(),
                    Objective::Random => build_random_grid(spec.seed.expect("validated")),
                    Objective::XCoord => build_coordinate_grid(Axis::X),
                    Objective::YCoord => build_coordinate_grid(Axis::Y),
                    _ => unreachable!("validated grid objective"),
                };
                Ok(Self {
                    spec,
                    layout: Layout::Grid {
                        width: grid.width(),
                        height: grid.height(),
                    },
                    rewards: grid.reward().clone(),
                })
            }
            DomainKind::Color => {
                let chart = match chart {
                    Some(chart) => chart.clone(),
                    None => default_color_chart(),
                };
                let rewards = color::build_color_reward(&chart, spec.objective)?;
                Ok(Self {
                    spec,
                    layout: Layout::Chart {
                        colors: chart.colors().to_vec(),
                    },
                    rewards,
                })
            }
        }
    }

    pub fn n_items(&self) -> usize {
        self.rewards.len()
    }

    pub fn signature(&self) -> String {
        self.layout.signature()
    }

    pub fn joint(&self) -> JointDistribution {
        to_joint(&self.rewards)
    }

    /// Errors unless `other` is defined over the same items.
    pub fn check_compatible(&self, other: &Domain) -> Result<()> {
        if self.signature() != other.signature() {
            return Err(Error::mismatch(format!(
                "domain {} ({}) and domain {} ({}) have different items",
                self.spec.label(),
                self.signature(),
                other.spec.label(),
                other.signature()
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let expected = self.layout.n_items();
        if expected != self.rewards.len() {
            return Err(Error::validation(format!(
                "layout {} has {expected} items but the reward table has {}",
                self.signature(),
                self.rewards.len()
            )));
        }
        match (&self.layout, self.spec.kind) {
            (Layout::Grid { .. }, DomainKind::Grid) => {}
            (Layout::Chart { colors }, DomainKind::Color) => {
                ColorChart::new(colors.clone())?;
            }
            _ => return Err(Error::validation("layout does not match the domain kind")),
        }
        if let Some(i) = self.rewards.values().iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!("reward for item {i} is not finite")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("domain serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let domain: Domain = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        // RewardModel is transparent, so re-check what its constructor enforces.
        RewardModel::new(domain.rewards.values().to_vec())?;
        domain.validate()?;
        Ok(domain)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }
}
