//! Grid path tasks, optimal and worst demonstrations, and simulated
//! respondents who act on an abstraction instead of the true reward.
//!
//! Demonstrations are monotone shortest paths: every step moves one cell
//! toward the goal along x or y. Both endpoints count toward a path's value.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::RewardModel;
use crate::encoder::Encoder;
use crate::error::{Error, Result};
use crate::metrics::{self, RankBy, RankingSet};

/// Two path values closer than this are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// Navigation task on a `width × height` grid. Cell `(x, y)` has id
/// `y * width + x`; `items[cell]`, when present, names the domain item
/// collected on that cell (colour tasks), otherwise the item is the cell id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathTask {
    pub width: usize,
    pub height: usize,
    pub start: (usize, usize),
    pub goal: (usize, usize),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub items: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Best,
    Worst,
}

/// Ordered cells from start to goal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demonstration {
    pub cells: Vec<usize>,
}

impl PathTask {
    pub fn new(width: usize, height: usize, start: (usize, usize), goal: (usize, usize)) -> Result<Self> {
        let task = Self {
            width,
            height,
            start,
            goal,
            items: None,
        };
        task.validate()?;
        Ok(task)
    }

    /// Task whose cells carry `width * height` distinct items drawn without
    /// replacement from `0..n_items` by a ChaCha8 generator seeded with `seed`.
    pub fn with_sampled_items(
        width: usize,
        height: usize,
        start: (usize, usize),
        goal: (usize, usize),
        n_items: usize,
        seed: u64,
    ) -> Result<Self> {
        let cells = width * height;
        if n_items < cells {
            return Err(Error::validation(format!(
                "cannot place {n_items} items on {cells} cells without repeats"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let items = rand::seq::index::sample(&mut rng, n_items, cells).into_vec();
        let task = Self {
            width,
            height,
            start,
            goal,
            items: Some(items),
        };
        task.validate()?;
        Ok(task)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::validation("task grid must be non-empty"));
        }
        for (name, (x, y)) in [("start", self.start), ("goal", self.goal)] {
            if x >= self.width || y >= self.height {
                return Err(Error::validation(format!(
                    "{name} ({x}, {y}) is outside the {}x{} grid",
                    self.width, self.height
                )));
            }
        }
        if self.start == self.goal {
            return Err(Error::validation("start and goal must differ"));
        }
        if let Some(items) = &self.items {
            if items.len() != self.width * self.height {
                return Err(Error::validation(format!(
                    "task maps {} cells to items, grid has {}",
                    items.len(),
                    self.width * self.height
                )));
            }
        }
        Ok(())
    }

    pub fn cell_id(&self, (x, y): (usize, usize)) -> usize {
        y * self.width + x
    }

    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.width, cell / self.width)
    }

    pub fn item(&self, cell: usize) -> usize {
        match &self.items {
            Some(items) => items[cell],
            None => cell,
        }
    }

    /// Manhattan distance from start to goal, i.e. the number of steps.
    pub fn steps(&self) -> usize {
        self.start.0.abs_diff(self.goal.0) + self.start.1.abs_diff(self.goal.1)
    }

    fn distance_to_goal(&self, cell: usize) -> usize {
        let (x, y) = self.coords(cell);
        x.abs_diff(self.goal.0) + y.abs_diff(self.goal.1)
    }

    /// Cells reachable in one monotone step, in increasing id order.
    pub fn successors(&self, cell: usize) -> Vec<usize> {
        let (x, y) = self.coords(cell);
        let step = |from: usize, to: usize| match from.cmp(&to) {
            std::cmp::Ordering::Less => Some(from + 1),
            std::cmp::Ordering::Greater => Some(from - 1),
            std::cmp::Ordering::Equal => None,
        };
        let mut next = Vec::with_capacity(2);
        if let Some(nx) = step(x, self.goal.0) {
            next.push(self.cell_id((nx, y)));
        }
        if let Some(ny) = step(y, self.goal.1) {
            next.push(self.cell_id((x, ny)));
        }
        next.sort_unstable();
        next
    }

    /// Cells inside the start/goal bounding box, ordered goal first by distance.
    fn cells_by_distance(&self) -> Vec<usize> {
        let (x0, x1) = (self.start.0.min(self.goal.0), self.start.0.max(self.goal.0));
        let (y0, y1) = (self.start.1.min(self.goal.1), self.start.1.max(self.goal.1));
        let mut cells: Vec<usize> = (y0..=y1)
            .flat_map(|y| (x0..=x1).map(move |x| (x, y)))
            .map(|c| self.cell_id(c))
            .collect();
        cells.sort_by_key(|&c| (self.distance_to_goal(c), c));
        cells
    }

    pub fn check_covers(&self, reward: &RewardModel) -> Result<()> {
        let max_item = (0..self.width * self.height).map(|c| self.item(c)).max().unwrap_or(0);
        if max_item >= reward.len() {
            return Err(Error::mismatch(format!(
                "task references item {max_item}, reward covers {} items",
                reward.len()
            )));
        }
        Ok(())
    }

    pub fn validate_demo(&self, demo: &Demonstration) -> Result<()> {
        let cells = &demo.cells;
        if cells.len() != self.steps() + 1 {
            return Err(Error::validation(format!(
                "demonstration has {} cells, task needs {}",
                cells.len(),
                self.steps() + 1
            )));
        }
        if cells.first() != Some(&self.cell_id(self.start)) || cells.last() != Some(&self.cell_id(self.goal)) {
            return Err(Error::validation("demonstration must run from start to goal"));
        }
        for pair in cells.windows(2) {
            if !self.successors(pair[0]).contains(&pair[1]) {
                return Err(Error::validation(format!(
                    "step {} -> {} is not a monotone move toward the goal",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("task serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let task: PathTask = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        task.validate()?;
        Ok(task)
    }
}

/// Sum of `reward` over every cell of the demonstration.
pub fn path_value(task: &PathTask, demo: &Demonstration, reward: &RewardModel) -> Result<f64> {
    task.validate_demo(demo)?;
    task.check_covers(reward)?;
    Ok(exact_sum(demo.cells.iter().map(|&c| reward.value(task.item(c)))))
}

/// Correctly rounded sum (Shewchuk's algorithm, as in Python's `math.fsum`),
/// so paths visiting the same multiset of values score identically.
fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    let Some(mut hi) = partials.pop() else {
        return 0.0;
    };
    let mut lo = 0.0;
    while let Some(y) = partials.pop() {
        let x = hi;
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    // Round half-way cases the way exact arithmetic would.
    if let Some(&next) = partials.last() {
        if (lo < 0.0 && next < 0.0) || (lo > 0.0 && next > 0.0) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
    }
    hi
}

/// Per-cell table of optimal values-to-go and the co-optimal successors.
struct PathTable {
    successors: Vec<Vec<usize>>,
}

fn path_table(task: &PathTask, value: impl Fn(usize) -> f64, sense: Sense) -> PathTable {
    let n = task.width * task.height;
    let mut to_go = vec![f64::NAN; n];
    let mut successors = vec![Vec::new(); n];
    for cell in task.cells_by_distance() {
        let next = task.successors(cell);
        if next.is_empty() {
            to_go[cell] = value(cell);
            continue;
        }
        let pick = |a: f64, b: f64| match sense {
            Sense::Best => a.max(b),
            Sense::Worst => a.min(b),
        };
        let target = next.iter().map(|&c| to_go[c]).reduce(pick).expect("non-empty");
        successors[cell] = next
            .into_iter()
            .filter(|&c| (to_go[c] - target).abs() <= TIE_TOLERANCE)
            .collect();
        to_go[cell] = value(cell) + target;
    }
    PathTable { successors }
}

fn walk(task: &PathTask, table: &PathTable, mut choose: impl FnMut(usize, &[usize]) -> usize) -> Demonstration {
    let goal = task.cell_id(task.goal);
    let mut cell = task.cell_id(task.start);
    let mut cells = vec![cell];
    while cell != goal {
        cell = choose(cell, &table.successors[cell]);
        cells.push(cell);
    }
    Demonstration { cells }
}

/// Highest (or lowest) value monotone path by dynamic programming over cells
/// ordered by distance to goal. Co-optimal paths resolve to the
/// lexicographically smallest cell sequence.
pub fn extremal_path(task: &PathTask, reward: &RewardModel, sense: Sense) -> Result<Demonstration> {
    task.validate()?;
    task.check_covers(reward)?;
    let table = path_table(task, |c| reward.value(task.item(c)), sense);
    Ok(walk(task, &table, |_, next| next[0]))
}

/// How a respondent picks among paths that look equally good to them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "seed")]
pub enum TiePolicy {
    Lexicographic,
    /// Uniform over all co-optimal paths, using this seed.
    SeededUniform(u64),
}

/// Simulated participant who only knows an abstraction: each item is worth
/// the mean target reward of its cluster.
#[derive(Debug, Clone)]
pub struct Respondent {
    pub encoder: Encoder,
    pub tie_policy: TiePolicy,
}

impl Respondent {
    pub fn new(encoder: Encoder, tie_policy: TiePolicy) -> Self {
        Self { encoder, tie_policy }
    }

    /// Per-item surrogate reward `mean_target[z(x)]`.
    pub fn surrogate(&self, target: &RewardModel) -> Result<RewardModel> {
        let means = metrics::cluster_means(&self.encoder, target)?;
        RewardModel::new(self.encoder.assignments().iter().map(|&z| means[z]).collect())
    }
}

/// The respondent's best path under their surrogate reward.
pub fn respondent_demonstration(resp: &Respondent, task: &PathTask, target: &RewardModel) -> Result<Demonstration> {
    task.validate()?;
    let surrogate = resp.surrogate(target)?;
    task.check_covers(&surrogate)?;
    let table = path_table(task, |c| surrogate.value(task.item(c)), Sense::Best);
    Ok(match resp.tie_policy {
        TiePolicy::Lexicographic => walk(task, &table, |_, next| next[0]),
        TiePolicy::SeededUniform(seed) => {
            let counts = path_counts(task, &table);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            walk(task, &table, |_, next| {
                let total: f64 = next.iter().map(|&c| counts[c]).sum();
                let mut pick = rng.random::<f64>() * total;
                for &c in next {
                    if pick < counts[c] {
                        return c;
                    }
                    pick -= counts[c];
                }
                *next.last().expect("non-empty")
            })
        }
    })
}

/// Number of co-optimal paths from each cell to the goal.
fn path_counts(task: &PathTask, table: &PathTable) -> Vec<f64> {
    let mut counts = vec![0.0; task.width * task.height];
    for cell in task.cells_by_distance() {
        counts[cell] = if table.successors[cell].is_empty() {
            1.0
        } else {
            table.successors[cell].iter().map(|&c| counts[c]).sum()
        };
    }
    counts
}

/// The respondent's pairwise ranking of `query` items by surrogate value.
pub fn respondent_ranking(resp: &Respondent, query: &[usize], target: &RewardModel, rank_by: RankBy) -> Result<RankingSet> {
    let surrogate = resp.surrogate(target)?;
    metrics::pairwise_ranking(surrogate.values(), query, rank_by)
}
