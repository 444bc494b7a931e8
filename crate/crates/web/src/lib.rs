//! Browser bindings for the abstraction explorer.
//!
//! An [`Explorer`] sweeps the frontier of one training objective, scores each
//! abstraction against a target reward and serves three operations to the
//! page: the frontier plot, a heat map of any abstraction, and a metric probe
//! on a path task. The plain Rust methods are what the native tests call; the
//! `#[wasm_bindgen]` wrappers only translate errors.

use ibx::frontier::{geometric_grid, rows_of, FrontierRow};
use ibx::metrics::{self, RankBy};
use ibx::render::{frontier_svg, Heatmap, Raster, Series};
use ibx::suite::default_query;
use ibx::tasks::{extremal_path, respondent_demonstration, PathTask, Respondent, Sense, TiePolicy};
use ibx::{Domain, DomainSpec, Error, FrontierPoint, Objective, Result, SweepConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Side of the task grid laid over chart domains.
const CHART_TASK_SIZE: usize = 5;

/// A lighter sweep than the command-line default so the page stays responsive.
fn demo_sweep(seed: u64) -> SweepConfig {
    SweepConfig {
        weights: geometric_grid(1e-3, 1e3, 80),
        restarts: 3,
        seed,
        ..SweepConfig::default()
    }
}

fn domain(label: &str, seed: u64) -> Result<Domain> {
    let objective: Objective = label.parse()?;
    let seed = (objective == Objective::Random).then_some(seed);
    Domain::build(DomainSpec::new(objective.kind(), objective, seed)?, None)
}

/// Metrics of one abstraction on one task, plus the two paths to draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe {
    pub n_clusters: usize,
    pub complexity_bits: f64,
    pub distortion_mse: f64,
    pub feature_rank: f64,
    /// `None` when the task's best and worst paths tie.
    pub best_demonstration: Option<f64>,
    /// Task cells, `y * width + x` with `y` counted from the bottom.
    pub optimal_path: Vec<usize>,
    pub respondent_path: Vec<usize>,
}

#[wasm_bindgen]
pub struct Explorer {
    target: Domain,
    objective: String,
    /// Frontier of the training objective, distortions measured on the target.
    points: Vec<FrontierPoint>,
    /// Reward-optimal frontier of the target, for comparison.
    optimal: Vec<FrontierPoint>,
}

impl Explorer {
    /// Sweeps `objective` and scores it on `target`. `seed` drives the
    /// random grid and the solver restarts.
    pub fn build(target: &str, objective: &str, seed: u64) -> Result<Self> {
        let target = domain(target, seed)?;
        let trained = domain(objective, seed)?;
        target.check_compatible(&trained)?;
        let config = demo_sweep(seed);
        let points = ibx::sweep_frontier(&trained.joint(), &config, objective)?
            .iter()
            .map(|p| p.against(&target.rewards))
            .collect::<Result<Vec<_>>>()?;
        let optimal = ibx::sweep_frontier(&target.joint(), &config, &target.spec.label())?;
        Ok(Self {
            target,
            objective: objective.to_string(),
            points,
            optimal,
        })
    }

    pub fn rows(&self) -> Vec<FrontierRow> {
        rows_of(&self.points)
    }

    /// Both frontiers in one SVG.
    pub fn svg(&self) -> Result<String> {
        let trained = rows_of(&self.points);
        let optimal = rows_of(&self.optimal);
        let trained_label = format!("{} on {}", self.objective, self.target.spec.label());
        let optimal_label = format!("{} optimal", self.target.spec.label());
        frontier_svg(&[
            Series { label: &trained_label, points: &trained },
            Series { label: &optimal_label, points: &optimal },
        ])
    }

    fn point(&self, index: usize) -> Result<&FrontierPoint> {
        self.points.get(index).ok_or_else(|| {
            Error::validation(format!("point {index} out of range, frontier has {}", self.points.len()))
        })
    }

    /// Cluster-mean heat map of one abstraction; `None` paints the true reward.
    pub fn raster(&self, index: Option<usize>) -> Result<Raster> {
        let heat = match index {
            Some(i) => Heatmap::cluster_mean(&self.target, &self.point(i)?.encoder)?,
            None => Heatmap::true_reward(&self.target)?,
        };
        Ok(heat.rasterize())
    }

    /// Scores abstraction `index` on the target with a task from `start` to
    /// `goal`. Chart domains lay `task_seed`-sampled chips on a 5×5 grid.
    pub fn probe(&self, index: usize, start: (usize, usize), goal: (usize, usize), task_seed: u64) -> Result<Probe> {
        let point = self.point(index)?;
        let task = match self.target.layout {
            ibx::domains::Layout::Grid { width, height } => PathTask::new(width, height, start, goal)?,
            ibx::domains::Layout::Chart { .. } => PathTask::with_sampled_items(
                CHART_TASK_SIZE,
                CHART_TASK_SIZE,
                start,
                goal,
                self.target.layout.n_items(),
                task_seed,
            )?,
        };
        let rewards = &self.target.rewards;
        let resp = Respondent::new(point.encoder.clone(), TiePolicy::Lexicographic);
        let query = default_query(&self.target.layout);
        let truth = metrics::pairwise_ranking(rewards.values(), &query, RankBy::Value)?;
        let human = ibx::tasks::respondent_ranking(&resp, &query, rewards, RankBy::Value)?;
        let best = extremal_path(&task, rewards, Sense::Best)?;
        let worst = extremal_path(&task, rewards, Sense::Worst)?;
        let shown = respondent_demonstration(&resp, &task, rewards)?;
        let best_demonstration = match metrics::best_demonstration(&task, &best, &shown, &worst, rewards) {
            Ok(score) => Some(score),
            Err(Error::DegenerateTask(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Probe {
            n_clusters: point.n_clusters,
            complexity_bits: point.complexity_bits,
            distortion_mse: point.distortion_mse,
            feature_rank: metrics::feature_rank(&human, &truth),
            best_demonstration,
            optimal_path: best.cells,
            respondent_path: shown.cells,
        })
    }
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
impl Explorer {
    #[wasm_bindgen(constructor)]
    pub fn new(target: &str, objective: &str, seed: u32) -> std::result::Result<Explorer, JsError> {
        Self::build(target, objective, seed.into()).map_err(js)
    }

    #[wasm_bindgen(js_name = pointCount)]
    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    /// Frontier rows as a JSON array.
    #[wasm_bindgen(js_name = pointsJson)]
    pub fn points_json(&self) -> String {
        serde_json::to_string(&self.rows()).expect("rows serialize")
    }

    #[wasm_bindgen(js_name = frontierSvg)]
    pub fn frontier_svg(&self) -> std::result::Result<String, JsError> {
        self.svg().map_err(js)
    }

    /// `[width, height]` of every heat map of this domain.
    #[wasm_bindgen(js_name = heatmapSize)]
    pub fn heatmap_size(&self) -> std::result::Result<Vec<u32>, JsError> {
        let r = self.raster(None).map_err(js)?;
        Ok(vec![r.width() as u32, r.height() as u32])
    }

    /// RGBA pixels for an `ImageData`. A negative index paints the true reward.
    #[wasm_bindgen(js_name = heatmapRgba)]
    pub fn heatmap_rgba(&self, index: i32) -> std::result::Result<Vec<u8>, JsError> {
        let index = usize::try_from(index).ok();
        self.raster(index).map(|r| r.to_rgba()).map_err(js)
    }

    /// Probe result as JSON.
    #[wasm_bindgen(js_name = probeJson)]
    pub fn probe_json(
        &self,
        index: usize,
        start_x: usize,
        start_y: usize,
        goal_x: usize,
        goal_y: usize,
        task_seed: u32,
    ) -> std::result::Result<String, JsError> {
        let probe = self
            .probe(index, (start_x, start_y), (goal_x, goal_y), task_seed.into())
            .map_err(js)?;
        Ok(serde_json::to_string(&probe).expect("probe serializes"))
    }
}
