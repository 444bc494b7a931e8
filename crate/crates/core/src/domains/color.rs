use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Objective, RewardModel};
use crate::error::{Error, Result};

/// Rewards of the eight equal-width blue bins, lowest bin first.
pub const DISCONTINUOUS_BIN_REWARDS: [f64; 8] = [0.5, -0.5, 0.0, 0.75, 1.0, -1.0, 0.25, -0.75];

/// Number of red and blue steps in the default chart's lattice.
const LATTICE_STEPS: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Color {
    pub id: usize,
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

/// Ordered set of color chips with RGB channels in `[0, 1]`; chip ids equal
/// their position.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorChart {
    colors: Vec<Color>,
}

impl ColorChart {
    pub fn new(colors: Vec<Color>) -> Result<Self> {
        if colors.is_empty() {
            return Err(Error::validation("no colors"));
        }
        for (i, c) in colors.iter().enumerate() {
            if c.id != i {
                return Err(Error::validation(format!("color at position {i} has id {}", c.id)));
            }
            for (name, v) in [("r", c.r), ("g", c.g), ("b", c.b)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::validation(format!(
                        "color {i} has channel {name} = {v}, outside [0, 1]"
                    )));
                }
            }
        }
        Ok(Self { colors })
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,r,g,b\n");
        for c in &self.colors {
            out.push_str(&format!("{},{},{},{}\n", c.id, c.r, c.g, c.b));
        }
        out
    }
}

/// Bin of a blue value: `floor(b / 0.125)`, with `b = 1.0` in the top bin.
pub fn bin_index(blue: f64) -> usize {
    ((blue / 0.125).floor() as usize).min(7)
}

pub(super) fn build_color_reward(chart: &ColorChart, objective: Objective) -> Result<RewardModel> {
    let value = |c: &Color| match objective {
        Objective::BlueContinuous => Ok(c.b),
        Objective::RedContinuous => Ok(c.r),
        Objective::BlueDiscontinuous => Ok(DISCONTINUOUS_BIN_REWARDS[bin_index(c.b)]),
        other => Err(Error::validation(format!("objective `{other}` is not a color reward"))),
    };
    RewardModel::new(chart.colors.iter().map(value).collect::<Result<_>>()?)
}

/// Synthetic 122-chip chart.
///
/// Chips 0..121 form an 11×11 lattice over red and blue in steps of 0.1 with
/// green fixed at 0.5 (chip `11 i + j` has `r = i / 10`, `b = j / 10`). Chip
/// 121 is `(0.5, 1.0, 0.5)`. Every red level carries the same blue values, so
/// red and blue are orthogonal, and every discontinuous blue bin is occupied.
pub fn default_color_chart() -> ColorChart {
    let step = (LATTICE_STEPS - 1) as f64;
    let mut colors: Vec<Color> = (0..LATTICE_STEPS * LATTICE_STEPS)
        .map(|id| Color {
            id,
            r: (id / LATTICE_STEPS) as f64 / step,
            g: 0.5,
            b: (id % LATTICE_STEPS) as f64 / step,
        })
        .collect();
    colors.push(Color {
        id: colors.len(),
        r: 0.5,
        g: 1.0,
        b: 0.5,
    });
    ColorChart::new(colors).expect("lattice channels are in range")
}

#[derive(Debug, Deserialize)]
struct ChartRow {
    id: i64,
    r: f64,
    g: f64,
    b: f64,
}

/// Parses chart CSV text (`id,r,g,b`). Row order defines the chip ids; the
/// `id` column must be unique.
pub fn parse_color_chart(text: &str, origin: &str) -> Result<ColorChart> {
    let parse_err = |message: String| Error::Parse {
        path: origin.to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["id", "r", "g", "b"] {
        if headers.is_empty() {
            return Err(parse_err("no colors".into()));
        }
        return Err(parse_err(format!("expected header `id,r,g,b`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut colors = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (i, record) in reader.deserialize::<ChartRow>().enumerate() {
        // Line 1 is the header.
        let line = i + 2;
        let row = record.map_err(|e| parse_err(format!("row {line}: {e}")))?;
        for (name, v) in [("r", row.r), ("g", row.g), ("b", row.b)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(parse_err(format!("row {line}: channel {name} = {v} is outside [0, 1]")));
            }
        }
        if !seen.insert(row.id) {
            return Err(parse_err(format!("row {line}: duplicate id {}", row.id)));
        }
        colors.push(Color {
            id: colors.len(),
            r: row.r,
            g: row.g,
            b: row.b,
        });
    }
    if colors.is_empty() {
        return Err(parse_err("no colors".into()));
    }
    ColorChart::new(colors)
}

pub fn load_color_chart(path: &Path) -> Result<ColorChart> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_color_chart(&text, &path.display().to_string())
}
