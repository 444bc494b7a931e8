//! Simulated survey: abstractions at several complexities are shown to
//! respondents who rank probe items and pick paths, and their understanding
//! is correlated with distortion.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifacts::{config_hash, EncoderRecord};
use crate::domains::{load_color_chart, Color, ColorChart, Domain, DomainKind, DomainSpec, Layout, Objective};
use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::frontier::{geometric_grid, select_checkpoints, sweep_frontier, SweepConfig};
use crate::metrics::{self, MetricReport, RankBy, BATCH_CSV_HEADER};
use crate::tasks::{self, extremal_path, respondent_demonstration, respondent_ranking, Demonstration, PathTask, Respondent, Sense, TiePolicy};

/// Default cluster-count targets.
pub const DEFAULT_CHECKPOINTS: [usize; 5] = [1, 2, 3, 5, 8];
/// Grid probe cells: the four corners and the centre of a 5×5 grid.
pub const DEFAULT_GRID_QUERY: [usize; 5] = [20, 24, 12, 0, 4];
/// Side of the grid on which color samples are laid out.
pub const COLOR_TASK_SIZE: usize = 5;

/// Weight grid and solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSettings {
    pub weight_min: f64,
    pub weight_max: f64,
    pub points: usize,
    pub restarts: usize,
    pub max_iters: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        let d = SweepConfig::default();
        Self {
            weight_min: 1e-3,
            weight_max: 1e3,
            points: d.weights.len(),
            restarts: d.restarts,
            max_iters: d.max_iters,
        }
    }
}

impl SweepSettings {
    pub fn to_config(&self, seed: u64) -> SweepConfig {
        SweepConfig {
            weights: geometric_grid(self.weight_min, self.weight_max, self.points),
            restarts: self.restarts,
            max_iters: self.max_iters,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieSetting {
    #[default]
    Lexicographic,
    SeededUniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RespondentSettings {
    pub count: usize,
    pub tie_policy: TieSetting,
    /// Respondent `r` under `seeded_uniform` uses seed `seed + r`.
    pub seed: u64,
}

impl Default for RespondentSettings {
    fn default() -> Self {
        Self {
            count: 1,
            tie_policy: TieSetting::Lexicographic,
            seed: 0,
        }
    }
}

impl RespondentSettings {
    pub fn policy(&self, respondent: usize) -> TiePolicy {
        match self.tie_policy {
            TieSetting::Lexicographic => TiePolicy::Lexicographic,
            TieSetting::SeededUniform => TiePolicy::SeededUniform(self.seed.wrapping_add(respondent as u64)),
        }
    }
}

/// A path task in a scenario. Color scenarios place chips on the cells:
/// either the explicit `items` or a sample drawn with `item_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSettings {
    pub start: (usize, usize),
    pub goal: (usize, usize),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub items: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item_seed: Option<u64>,
}

impl TaskSettings {
    fn corner(start: (usize, usize), goal: (usize, usize)) -> Self {
        Self {
            start,
            goal,
            items: None,
            item_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSettings {
    pub name: String,
    pub kind: DomainKind,
    /// Reward being explained.
    pub target: Objective,
    /// Seed for `random` rewards, shared by target and objectives.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Training objectives whose abstractions are shown.
    pub objectives: Vec<Objective>,
    /// Color chart CSV, relative to the config file; default chart if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tasks: Option<Vec<TaskSettings>>,
}

/// Whole suite, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: Vec<usize>,
    #[serde(default)]
    pub rank_by: RankBy,
    #[serde(default)]
    pub sweep: SweepSettings,
    #[serde(default)]
    pub respondents: RespondentSettings,
    #[serde(rename = "scenario", default)]
    pub scenarios: Vec<ScenarioSettings>,
}

fn default_checkpoints() -> Vec<usize> {
    DEFAULT_CHECKPOINTS.to_vec()
}

impl SuiteConfig {
    /// Four scenarios of three objectives at five checkpoints each: the
    /// Manhattan and random grids and both blue color rewards.
    pub fn survey() -> Self {
        let grid = |name: &str, target: Objective, seed: Option<u64>| ScenarioSettings {
            name: name.into(),
            kind: DomainKind::Grid,
            target,
            seed,
            objectives: vec![target, Objective::XCoord, Objective::YCoord],
            chart: None,
            query: None,
            tasks: None,
        };
        let color = |name: &str, target: Objective| ScenarioSettings {
            name: name.into(),
            kind: DomainKind::Color,
            target,
            seed: None,
            objectives: vec![Objective::BlueContinuous, Objective::BlueDiscontinuous, Objective::RedContinuous],
            chart: None,
            query: None,
            tasks: None,
        };
        Self {
            seed: 0,
            checkpoints: default_checkpoints(),
            rank_by: RankBy::Value,
            sweep: SweepSettings::default(),
            respondents: RespondentSettings::default(),
            scenarios: vec![
                grid("manhattan", Objective::Manhattan, None),
                grid("random", Objective::Random, Some(0)),
                color("blue_continuous", Objective::BlueContinuous),
                color("blue_discontinuous", Objective::BlueDiscontinuous),
            ],
        }
    }

    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that does not need files; reports every problem.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.checkpoints.is_empty() {
            problems.push("checkpoints is empty".to_string());
        }
        if self.checkpoints.contains(&0) {
            problems.push("checkpoints must be at least 1".to_string());
        }
        if self.respondents.count == 0 {
            problems.push("respondents.count must be at least 1".to_string());
        }
        let s = &self.sweep;
        if !(s.weight_min.is_finite() && s.weight_min > 0.0 && s.weight_max.is_finite() && s.weight_max > s.weight_min) {
            problems.push("sweep weights need 0 < weight_min < weight_max".to_string());
        }
        if s.points < 2 {
            problems.push("sweep.points must be at least 2".to_string());
        }
        if s.max_iters == 0 {
            problems.push("sweep.max_iters must be at least 1".to_string());
        }
        if self.scenarios.is_empty() {
            problems.push("no scenarios".to_string());
        }
        let mut names = BTreeSet::new();
        for sc in &self.scenarios {
            let at = format!("scenario `{}`", sc.name);
            if !names.insert(sc.name.as_str()) {
                problems.push(format!("{at}: duplicate name"));
            }
            if sc.name.is_empty() || sc.name.contains(['/', '\\', ',']) {
                problems.push(format!("{at}: name must be non-empty without `/`, `\\` or `,`"));
            }
            if sc.objectives.is_empty() {
                problems.push(format!("{at}: no objectives"));
            }
            for obj in std::iter::once(&sc.target).chain(&sc.objectives) {
                if obj.kind() != sc.kind {
                    problems.push(format!("{at}: objective `{obj}` does not apply to {:?} domains", sc.kind));
                }
            }
            let uses_seed = sc.target == Objective::Random || sc.objectives.contains(&Objective::Random);
            match (uses_seed, sc.seed) {
                (true, None) => problems.push(format!("{at}: random rewards need a seed")),
                (false, Some(_)) => problems.push(format!("{at}: seed is only used by random rewards")),
                _ => {}
            }
            if sc.kind == DomainKind::Grid && sc.chart.is_some() {
                problems.push(format!("{at}: grid scenarios take no chart"));
            }
            if let Some(q) = &sc.query {
                if q.len() < 2 {
                    problems.push(format!("{at}: query needs at least two items"));
                }
                if q.iter().collect::<BTreeSet<_>>().len() != q.len() {
                    problems.push(format!("{at}: query repeats an item"));
                }
            }
            if let Some(tasks) = &sc.tasks {
                if tasks.is_empty() {
                    problems.push(format!("{at}: tasks is empty"));
                }
                for (i, t) in tasks.iter().enumerate() {
                    if sc.kind == DomainKind::Grid && (t.items.is_some() || t.item_seed.is_some()) {
                        problems.push(format!("{at}: task {i} places items on a grid domain"));
                    }
                    if t.items.is_some() && t.item_seed.is_some() {
                        problems.push(format!("{at}: task {i} gives both items and item_seed"));
                    }
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems.join("; ")))
        }
    }

    /// Loads charts and materializes every scenario's domains and probes.
    /// `base` resolves relative chart paths.
    pub fn prepare(&self, base: &Path) -> Result<Vec<Scenario>> {
        self.validate()?;
        let mut problems = Vec::new();
        let mut out = Vec::new();
        for (si, sc) in self.scenarios.iter().enumerate() {
            let chart = match &sc.chart {
                Some(p) => Some(load_color_chart(&base.join(p))?),
                None => None,
            };
            match Scenario::build(self, si, sc, chart.as_ref()) {
                Ok(s) => out.push(s),
                Err(Error::Validation(m)) => problems.push(format!("scenario `{}`: {m}", sc.name)),
                Err(e) => return Err(e),
            }
        }
        if problems.is_empty() {
            Ok(out)
        } else {
            Err(Error::Validation(problems.join("; ")))
        }
    }
}

/// A scenario with its domains and probes built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub target: Domain,
    pub objectives: Vec<Domain>,
    pub query: Vec<usize>,
    pub tasks: Vec<PathTask>,
}

impl Scenario {
    fn build(config: &SuiteConfig, index: usize, sc: &ScenarioSettings, chart: Option<&ColorChart>) -> Result<Self> {
        let spec = |objective: Objective| {
            let seed = if objective == Objective::Random { sc.seed } else { None };
            DomainSpec::new(sc.kind, objective, seed)
        };
        let target = Domain::build(spec(sc.target)?, chart)?;
        let objectives = sc
            .objectives
            .iter()
            .map(|&o| Domain::build(spec(o)?, chart))
            .collect::<Result<Vec<_>>>()?;
        let n = target.n_items();
        let query = match &sc.query {
            Some(q) => q.clone(),
            None => default_query(&target.layout),
        };
        let mut problems = Vec::new();
        if let Some(bad) = query.iter().find(|&&q| q >= n) {
            problems.push(format!("query item {bad} is outside 0..{n}"));
        }
        let task_settings = match &sc.tasks {
            Some(t) => t.clone(),
            None => default_tasks(&target.layout),
        };
        let mut tasks = Vec::new();
        for (i, t) in task_settings.iter().enumerate() {
            let built = match &target.layout {
                Layout::Grid { width, height } => PathTask::new(*width, *height, t.start, t.goal),
                Layout::Chart { .. } => match &t.items {
                    Some(items) => {
                        let task = PathTask {
                            width: COLOR_TASK_SIZE,
                            height: COLOR_TASK_SIZE,
                            start: t.start,
                            goal: t.goal,
                            items: Some(items.clone()),
                        };
                        task.validate().map(|_| task)
                    }
                    None => {
                        let seed = t.item_seed.unwrap_or_else(|| config.seed.wrapping_add((index * 1000 + i) as u64));
                        PathTask::with_sampled_items(COLOR_TASK_SIZE, COLOR_TASK_SIZE, t.start, t.goal, n, seed)
                    }
                },
            };
            match built.and_then(|task| task.check_covers(&target.rewards).map(|_| task)) {
                Ok(task) => tasks.push(task),
                Err(e) => problems.push(format!("task {i}: {}", message(&e))),
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems.join("; ")));
        }
        Ok(Self {
            name: sc.name.clone(),
            target,
            objectives,
            query,
            tasks,
        })
    }
}

fn message(e: &Error) -> String {
    match e {
        Error::Validation(m) | Error::SupportMismatch(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Grid: corners and centre. Chart: five chips at evenly spaced ranks of blue.
pub fn default_query(layout: &Layout) -> Vec<usize> {
    match layout {
        Layout::Grid { width, height } if (*width, *height) == (5, 5) => DEFAULT_GRID_QUERY.to_vec(),
        Layout::Grid { width, height } => {
            let (w, h) = (*width, *height);
            let mut q = vec![(h - 1) * w, h * w - 1, (h / 2) * w + w / 2, 0, w - 1];
            dedup_keep_first(&mut q);
            q
        }
        Layout::Chart { colors } => blue_spread(colors),
    }
}

fn blue_spread(colors: &[Color]) -> Vec<usize> {
    let mut by_blue: Vec<&Color> = colors.iter().collect();
    by_blue.sort_by(|a, b| a.b.total_cmp(&b.b).then(a.id.cmp(&b.id)));
    let last = by_blue.len() - 1;
    let mut q: Vec<usize> = (0..5).map(|i| by_blue[(i * last + 2) / 4].id).collect();
    dedup_keep_first(&mut q);
    q
}

fn dedup_keep_first(items: &mut Vec<usize>) {
    let mut seen = BTreeSet::new();
    items.retain(|i| seen.insert(*i));
}

/// Both diagonals of the task grid, bottom corners to top corners.
pub fn default_tasks(layout: &Layout) -> Vec<TaskSettings> {
    let (w, h) = match layout {
        Layout::Grid { width, height } => (*width, *height),
        Layout::Chart { .. } => (COLOR_TASK_SIZE, COLOR_TASK_SIZE),
    };
    vec![
        TaskSettings::corner((0, 0), (w - 1, h - 1)),
        TaskSettings::corner((w - 1, 0), (0, h - 1)),
    ]
}

/// One abstraction chosen for the survey.
#[derive(Debug, Clone)]
pub struct Abstraction {
    pub scenario: String,
    /// `<objective>@k<clusters>`.
    pub name: String,
    pub record: EncoderRecord,
}

/// One respondent's answers to one abstraction.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub scenario: String,
    pub respondent: usize,
    pub report: MetricReport,
}

/// Correlations for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub target: String,
    pub rows: usize,
    /// Tasks whose best and worst paths tie under the target.
    pub degenerate_tasks: usize,
    pub spearman_fr_distortion: Option<f64>,
    pub spearman_bd_distortion: Option<f64>,
    /// Rows left out of the BD correlation because no task was usable.
    pub bd_rows_excluded: usize,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub config_hash: String,
    pub abstractions: Vec<Abstraction>,
    pub rows: Vec<SuiteRow>,
    pub summaries: Vec<ScenarioSummary>,
}

impl SuiteResult {
    /// Batch CSV; the encoder column is `<scenario>/<objective>@k<clusters>`,
    /// with `#r<respondent>` appended when there are several respondents.
    pub fn results_csv(&self) -> String {
        let mut out = String::from(BATCH_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.report.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            config_hash: &'a str,
            scenarios: &'a [ScenarioSummary],
        }
        let mut s = serde_json::to_string_pretty(&Summary {
            config_hash: &self.config_hash,
            scenarios: &self.summaries,
        })
        .expect("summary serializes");
        s.push('\n');
        s
    }

    /// Plain-text table of the summary.
    pub fn summary_text(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| sig(x, 6)).unwrap_or_else(|| "undefined".into());
        let mut out = String::from("scenario,target,rows,degenerate_tasks,spearman_fr_distortion,spearman_bd_distortion,bd_rows_excluded\n");
        for s in &self.summaries {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.scenario,
                s.target,
                s.rows,
                s.degenerate_tasks,
                opt(s.spearman_fr_distortion),
                opt(s.spearman_bd_distortion),
                s.bd_rows_excluded
            ));
        }
        out
    }
}

/// Optimal and worst paths of every task under the target; `None` for
/// degenerate tasks.
fn reference_paths(sc: &Scenario) -> Result<Vec<Option<(Demonstration, Demonstration)>>> {
    sc.tasks
        .iter()
        .map(|task| {
            let best = extremal_path(task, &sc.target.rewards, Sense::Best)?;
            let worst = extremal_path(task, &sc.target.rewards, Sense::Worst)?;
            let vb = tasks::path_value(task, &best, &sc.target.rewards)?;
            let vw = tasks::path_value(task, &worst, &sc.target.rewards)?;
            Ok((vb != vw).then_some((best, worst)))
        })
        .collect()
}

/// Scores one encoder for one respondent: FR on the query and BD averaged
/// over the non-degenerate tasks.
pub fn evaluate_respondent(
    resp: &Respondent,
    target: &Domain,
    query: &[usize],
    tasks: &[PathTask],
    rank_by: RankBy,
) -> Result<(f64, Option<f64>)> {
    let truth = metrics::pairwise_ranking(target.rewards.values(), query, rank_by)?;
    let fr = metrics::feature_rank(&respondent_ranking(resp, query, &target.rewards, rank_by)?, &truth);
    let mut scores = Vec::new();
    for task in tasks {
        let best = extremal_path(task, &target.rewards, Sense::Best)?;
        let worst = extremal_path(task, &target.rewards, Sense::Worst)?;
        let human = respondent_demonstration(resp, task, &target.rewards)?;
        match metrics::best_demonstration(task, &best, &human, &worst, &target.rewards) {
            Ok(s) => scores.push(s),
            Err(Error::DegenerateTask(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let bd = (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64);
    Ok((fr, bd))
}

/// Full metric report for one encoder against a target domain.
pub fn evaluate(
    label: &str,
    resp: &Respondent,
    target: &Domain,
    query: &[usize],
    tasks: &[PathTask],
    rank_by: RankBy,
    config_hash: Option<String>,
) -> Result<MetricReport> {
    let enc = &resp.encoder;
    let (feature_rank, best_demonstration) = evaluate_respondent(resp, target, query, tasks, rank_by)?;
    let joint = target.joint();
    let report = MetricReport {
        encoder: label.to_string(),
        objective: enc.objective().to_string(),
        target: target.spec.label(),
        n_clusters: enc.n_clusters(),
        complexity_bits: metrics::complexity(enc, &joint)?,
        informativeness_bits: crate::encoder::Encoder::from_assignments(&joint, enc.assignments(), "")?.informativeness(),
        distortion_mse: metrics::distortion(enc, &target.rewards)?,
        feature_rank,
        best_demonstration,
        config_hash,
    };
    report.validate()?;
    Ok(report)
}

/// Runs every scenario. `config_bytes` is hashed into the artifacts.
pub fn run_simulation_suite(config: &SuiteConfig, scenarios: &[Scenario], config_bytes: &[u8]) -> Result<SuiteResult> {
    let hash = config_hash(config_bytes);
    let sweep = config.sweep.to_config(config.seed);

    // Every (scenario, objective) sweep, in config order.
    let jobs: Vec<(usize, usize)> = scenarios
        .iter()
        .enumerate()
        .flat_map(|(si, sc)| (0..sc.objectives.len()).map(move |oi| (si, oi)))
        .collect();
    let picked: Vec<Vec<Abstraction>> = jobs
        .par_iter()
        .map(|&(si, oi)| {
            let sc = &scenarios[si];
            let domain = &sc.objectives[oi];
            let label = domain.spec.label();
            let front = sweep_frontier(&domain.joint(), &sweep, &label)?;
            select_checkpoints(&front, &config.checkpoints)?
                .into_iter()
                .map(|p| {
                    Ok(Abstraction {
                        scenario: sc.name.clone(),
                        name: format!("{label}@k{}", p.n_clusters),
                        record: EncoderRecord::from_point(p, domain, Some(hash.clone()))?,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let abstractions: Vec<Abstraction> = picked.into_iter().flatten().collect();

    let by_name: std::collections::HashMap<&str, &Scenario> = scenarios.iter().map(|s| (s.name.as_str(), s)).collect();
    let count = config.respondents.count;
    let cells: Vec<(usize, usize)> = (0..abstractions.len()).flat_map(|a| (0..count).map(move |r| (a, r))).collect();
    let rows: Vec<SuiteRow> = cells
        .par_iter()
        .map(|&(a, r)| {
            let abs = &abstractions[a];
            let sc = by_name[abs.scenario.as_str()];
            let encoder = abs.record.to_encoder(&sc.target)?;
            let resp = Respondent::new(encoder, config.respondents.policy(r));
            let mut label = format!("{}/{}", abs.scenario, abs.name);
            if count > 1 {
                label.push_str(&format!("#r{r}"));
            }
            let report = evaluate(&label, &resp, &sc.target, &sc.query, &sc.tasks, config.rank_by, Some(hash.clone()))?;
            Ok(SuiteRow {
                scenario: abs.scenario.clone(),
                respondent: r,
                report,
            })
        })
        .collect::<Result<_>>()?;

    let summaries = scenarios
        .iter()
        .map(|sc| summarize(sc, &rows))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteResult {
        config_hash: hash,
        abstractions,
        rows,
        summaries,
    })
}

fn summarize(sc: &Scenario, rows: &[SuiteRow]) -> Result<ScenarioSummary> {
    let mine: Vec<&MetricReport> = rows.iter().filter(|r| r.scenario == sc.name).map(|r| &r.report).collect();
    let dist: Vec<f64> = mine.iter().map(|r| r.distortion_mse).collect();
    let fr: Vec<f64> = mine.iter().map(|r| r.feature_rank).collect();
    let with_bd: Vec<(f64, f64)> = mine
        .iter()
        .filter_map(|r| r.best_demonstration.map(|b| (b, r.distortion_mse)))
        .collect();
    let (bd, bd_dist): (Vec<f64>, Vec<f64>) = with_bd.into_iter().unzip();
    let degenerate_tasks = reference_paths(sc)?.iter().filter(|p| p.is_none()).count();
    Ok(ScenarioSummary {
        scenario: sc.name.clone(),
        target: sc.target.spec.label(),
        rows: mine.len(),
        degenerate_tasks,
        spearman_fr_distortion: metrics::spearman(&fr, &dist).ok(),
        spearman_bd_distortion: metrics::spearman(&bd, &bd_dist).ok(),
        bd_rows_excluded: mine.len() - bd.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(mut config: SuiteConfig) -> SuiteConfig {
        config.sweep.points = 40;
        config.sweep.restarts = 2;
        config
    }

    #[test]
    fn survey_config_round_trips_through_toml() {
        let config = SuiteConfig::survey();
        config.validate().unwrap();
        let back = SuiteConfig::from_toml(&config.to_toml(), "mem").unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn shipped_configs_parse() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let survey = std::fs::read_to_string(dir.join("survey.toml")).unwrap();
        assert_eq!(SuiteConfig::from_toml(&survey, "survey.toml").unwrap(), SuiteConfig::survey());
        let grid = std::fs::read_to_string(dir.join("grid.toml")).unwrap();
        let grid = SuiteConfig::from_toml(&grid, "grid.toml").unwrap();
        grid.prepare(&dir).unwrap();
    }

    #[test]
    fn validation_lists_every_problem() {
        let mut config = SuiteConfig::survey();
        config.respondents.count = 0;
        config.checkpoints = vec![0];
        config.scenarios[1].seed = None;
        let err = config.validate().unwrap_err().to_string();
        assert!(err.contains("respondents.count"), "{err}");
        assert!(err.contains("checkpoints"), "{err}");
        assert!(err.contains("need a seed"), "{err}");
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        assert!(matches!(
            SuiteConfig::from_toml("seed = 1\nbogus = 2\n", "mem"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn default_probes() {
        let grid = Layout::Grid { width: 5, height: 5 };
        assert_eq!(default_query(&grid), vec![20, 24, 12, 0, 4]);
        let chart = Layout::Chart {
            colors: crate::domains::default_color_chart().colors().to_vec(),
        };
        let q = default_query(&chart);
        assert_eq!(q.len(), 5);
        let blues: Vec<f64> = q.iter().map(|&i| crate::domains::default_color_chart().colors()[i].b).collect();
        assert_eq!(blues.first(), Some(&0.0));
        assert_eq!(blues.last(), Some(&1.0));
        assert!(blues.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn bad_query_is_a_validation_error() {
        let mut config = SuiteConfig::survey();
        config.scenarios[0].query = Some(vec![0, 99]);
        let err = config.prepare(Path::new(".")).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("99"));
    }

    #[test]
    fn zero_distortion_rows_score_perfectly() {
        let mut config = quick(SuiteConfig::survey());
        config.scenarios.truncate(1);
        config.checkpoints = vec![8];
        let scenarios = config.prepare(Path::new(".")).unwrap();
        let result = run_simulation_suite(&config, &scenarios, b"x").unwrap();
        let row = result
            .rows
            .iter()
            .find(|r| r.report.objective == "manhattan")
            .unwrap();
        assert!(row.report.distortion_mse < 1e-12);
        assert_eq!(row.report.feature_rank, 1.0);
        assert_eq!(row.report.best_demonstration, Some(1.0));
    }
}
