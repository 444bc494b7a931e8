use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ibx::artifacts::{config_hash, EncoderRecord};
use ibx::domains::{load_color_chart, Domain, DomainKind, DomainSpec, Objective};
use ibx::frontier::{geometric_grid, parse_frontier_csv, rows_csv, select_checkpoints, sweep_frontier, FrontierRow, SweepConfig};
use ibx::metrics::{RankBy, BATCH_CSV_HEADER};
use ibx::render::{render_frontier, render_heatmap, Heatmap, Series};
use ibx::suite::{self, SuiteConfig};
use ibx::tasks::{PathTask, Respondent, TiePolicy};
use ibx::{Encoder, Error};

#[derive(Parser)]
#[command(name = "ibx", version, about = "Information-bottleneck abstractions of reward functions")]
struct Cli {
    /// Directory against which every relative path is resolved.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a domain and write its reward table.
    Domain(DomainArgs),
    /// Trace the complexity-distortion frontier and save checkpoint encoders.
    Sweep(SweepArgs),
    /// Score one encoder against a target domain.
    Eval(EvalArgs),
    /// Run a simulated survey from a config file.
    Simulate(SimulateArgs),
    /// Draw heat maps or frontier curves.
    #[command(subcommand)]
    Render(RenderCommand),
}

#[derive(Args)]
struct DomainArgs {
    #[arg(long)]
    kind: DomainKind,
    #[arg(long)]
    objective: Objective,
    /// Seed for the random grid.
    #[arg(long)]
    seed: Option<u64>,
    /// Color chart CSV (`id,r,g,b`); the built-in chart when omitted.
    #[arg(long)]
    chart: Option<PathBuf>,
    /// Output file; defaults to `<objective>.json`.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Cluster-count targets for the saved encoders.
    #[arg(long, value_delimiter = ',', default_values_t = suite::DEFAULT_CHECKPOINTS)]
    targets: Vec<usize>,
    /// Also score the frontier against these domains.
    #[arg(long)]
    against: Vec<PathBuf>,
    #[arg(long, default_value_t = 1e-3)]
    weight_min: f64,
    #[arg(long, default_value_t = 1e3)]
    weight_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, default_value_t = SweepConfig::default().restarts)]
    restarts: usize,
    #[arg(long, default_value_t = SweepConfig::default().max_iters)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file prefix; defaults to the domain's objective.
    #[arg(long)]
    prefix: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RankByArg {
    Value,
    Magnitude,
}

impl From<RankByArg> for RankBy {
    fn from(r: RankByArg) -> Self {
        match r {
            RankByArg::Value => RankBy::Value,
            RankByArg::Magnitude => RankBy::Magnitude,
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    encoder: PathBuf,
    #[arg(long)]
    target: PathBuf,
    /// Probe items for feature rank; the domain default when omitted.
    #[arg(long, value_delimiter = ',')]
    query: Option<Vec<usize>>,
    /// Task files (JSON); the domain default tasks when omitted.
    #[arg(long)]
    task: Vec<PathBuf>,
    /// Take probes, ranking and ties from this suite config...
    #[arg(long, requires = "scenario", conflicts_with_all = ["query", "task", "rank_by", "respondent_seed"])]
    config: Option<PathBuf>,
    /// ...using this scenario's probes.
    #[arg(long, requires = "config")]
    scenario: Option<String>,
    #[arg(long, value_enum)]
    rank_by: Option<RankByArg>,
    /// Break path ties uniformly at random with this seed instead of
    /// lexicographically.
    #[arg(long)]
    respondent_seed: Option<u64>,
    /// Report label; defaults to the encoder file stem.
    #[arg(long)]
    label: Option<String>,
    #[arg(long, default_value = "report.json")]
    output: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Suite config (TOML).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum RenderCommand {
    /// The domain's reward, or one map per encoder colored by cluster mean.
    Heatmap {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        encoder: Vec<PathBuf>,
        /// Output for the reward map; encoder maps are named after the encoder.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Frontier curves from sweep CSVs, one polyline per input.
    Frontier {
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        /// One label per input; file stems when omitted.
        #[arg(long)]
        label: Vec<String>,
        #[arg(long, default_value = "frontier.svg")]
        output: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = configure_threads().and_then(|_| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io { .. } => 3,
                _ => 2,
            })
        }
    }
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var("IBX_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("IBX_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Outcome {
    let ctx = Context { root: cli.out_dir };
    match cli.command {
        Command::Domain(a) => cmd_domain(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::Eval(a) => cmd_eval(&ctx, a),
        Command::Simulate(a) => cmd_simulate(&ctx, a),
        Command::Render(r) => cmd_render(&ctx, r),
    }
}

struct Context {
    root: PathBuf,
}

impl Context {
    fn path(&self, p: &Path) -> PathBuf {
        self.root.join(p)
    }

    fn read(&self, p: &Path) -> Outcome<Vec<u8>> {
        let path = self.path(p);
        Ok(std::fs::read(&path).map_err(|e| Error::io(&path, e))?)
    }

    fn write(&self, p: &Path, bytes: &[u8]) -> Outcome<PathBuf> {
        let path = self.path(p);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    fn ensure_root(&self) -> Outcome {
        std::fs::create_dir_all(&self.root).map_err(|e| Error::io(&self.root, e))?;
        Ok(())
    }

    fn domain(&self, p: &Path) -> Outcome<Domain> {
        Ok(Domain::load(&self.path(p))?)
    }
}

fn file_safe(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '-' })
        .collect();
    s.trim_matches('-').to_string()
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn cmd_domain(ctx: &Context, a: DomainArgs) -> Outcome {
    let spec = DomainSpec::new(a.kind, a.objective, a.seed).map_err(|e| Failure::Usage(e.to_string()))?;
    if a.chart.is_some() && a.kind != DomainKind::Color {
        return Err(Failure::Usage("--chart only applies to color domains".into()));
    }
    let chart = match &a.chart {
        Some(p) => Some(load_color_chart(&ctx.path(p))?),
        None => None,
    };
    let domain = Domain::build(spec, chart.as_ref())?;
    let output = a
        .output
        .unwrap_or_else(|| PathBuf::from(format!("{}.json", file_safe(&domain.spec.label()))));
    ctx.write(&output, domain.to_json().as_bytes())?;
    Ok(())
}

fn cmd_sweep(ctx: &Context, a: SweepArgs) -> Outcome {
    let domain_bytes = ctx.read(&a.domain)?;
    let domain = ctx.domain(&a.domain)?;
    let against = a.against.iter().map(|p| ctx.domain(p)).collect::<Outcome<Vec<_>>>()?;
    for other in &against {
        domain.check_compatible(other)?;
    }
    if a.targets.is_empty() || a.targets.contains(&0) {
        return Err(Failure::Usage("--targets must list cluster counts of at least 1".into()));
    }
    if !(a.weight_min > 0.0 && a.weight_max > a.weight_min) || a.points < 2 {
        return Err(Failure::Usage("need 0 < --weight-min < --weight-max and --points >= 2".into()));
    }
    let config = SweepConfig {
        weights: geometric_grid(a.weight_min, a.weight_max, a.points),
        restarts: a.restarts,
        max_iters: a.max_iters,
        seed: a.seed,
    };
    let mut provenance = domain_bytes;
    provenance.extend(
        format!(
            "\nsweep weight_min={} weight_max={} points={} restarts={} max_iters={} seed={}\n",
            a.weight_min, a.weight_max, a.points, a.restarts, a.max_iters, a.seed
        )
        .bytes(),
    );
    let hash = config_hash(&provenance);

    let label = domain.spec.label();
    let prefix = a.prefix.unwrap_or_else(|| file_safe(&label));
    let joint = domain.joint();
    let front = sweep_frontier(&joint, &config, &label)?;
    ctx.write(Path::new(&format!("{prefix}.frontier.csv")), ibx::frontier::frontier_csv(&front).as_bytes())?;
    for other in &against {
        let other_joint = other.joint();
        let rows = front
            .iter()
            .map(|p| {
                let on_other = Encoder::from_assignments(&other_joint, p.encoder.assignments(), label.as_str())?;
                Ok(FrontierRow {
                    informativeness_bits: on_other.informativeness(),
                    distortion_mse: ibx::metrics::distortion(&p.encoder, &other.rewards)?,
                    ..FrontierRow::from(p)
                })
            })
            .collect::<ibx::Result<Vec<_>>>()?;
        let name = format!("{prefix}.frontier.against-{}.csv", file_safe(&other.spec.label()));
        ctx.write(Path::new(&name), rows_csv(&rows).as_bytes())?;
    }
    for p in select_checkpoints(&front, &a.targets)? {
        let record = EncoderRecord::from_point(p, &domain, Some(hash.clone()))?;
        ctx.write(Path::new(&format!("{prefix}.k{}.json", p.n_clusters)), record.to_json().as_bytes())?;
    }
    Ok(())
}

fn cmd_eval(ctx: &Context, a: EvalArgs) -> Outcome {
    let record = EncoderRecord::load(&ctx.path(&a.encoder))?;
    let target = ctx.domain(&a.target)?;
    let encoder = record.to_encoder(&target)?;
    let label = a.label.unwrap_or_else(|| stem(&a.encoder));

    let (query, tasks, rank_by, policy, hash) = match (&a.config, &a.scenario) {
        (Some(config_path), Some(name)) => {
            let bytes = ctx.read(config_path)?;
            let text = String::from_utf8_lossy(&bytes);
            let config = SuiteConfig::from_toml(&text, &ctx.path(config_path).display().to_string())?;
            let base = ctx.path(config_path).parent().map(Path::to_path_buf).unwrap_or_default();
            let scenario = config
                .prepare(&base)?
                .into_iter()
                .find(|s| &s.name == name)
                .ok_or_else(|| Failure::Usage(format!("config has no scenario `{name}`")))?;
            if scenario.target.rewards != target.rewards || scenario.target.signature() != target.signature() {
                return Err(Error::mismatch(format!(
                    "target domain {} differs from scenario `{name}` target {}",
                    target.spec.label(),
                    scenario.target.spec.label()
                ))
                .into());
            }
            let policy = config.respondents.policy(0);
            (scenario.query, scenario.tasks, config.rank_by, policy, Some(config_hash(&bytes)))
        }
        _ => {
            let query = a.query.unwrap_or_else(|| suite::default_query(&target.layout));
            let tasks = if a.task.is_empty() {
                default_tasks(&target)?
            } else {
                a.task
                    .iter()
                    .map(|p| PathTask::load(&ctx.path(p)))
                    .collect::<ibx::Result<Vec<_>>>()?
            };
            let policy = match a.respondent_seed {
                Some(seed) => TiePolicy::SeededUniform(seed),
                None => TiePolicy::Lexicographic,
            };
            let rank_by = a.rank_by.map(RankBy::from).unwrap_or_default();
            (query, tasks, rank_by, policy, record.config_hash.clone())
        }
    };
    let resp = Respondent::new(encoder, policy);
    let report = suite::evaluate(&label, &resp, &target, &query, &tasks, rank_by, hash)?;
    ctx.write(&a.output, report.to_json().as_bytes())?;
    println!("{BATCH_CSV_HEADER}\n{}", report.csv_row());
    Ok(())
}

/// Default tasks of a domain, with color items drawn as in a one-scenario suite.
fn default_tasks(target: &Domain) -> Outcome<Vec<PathTask>> {
    let n = target.n_items();
    suite::default_tasks(&target.layout)
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let task = match &target.layout {
                ibx::domains::Layout::Grid { width, height } => PathTask::new(*width, *height, t.start, t.goal),
                ibx::domains::Layout::Chart { .. } => PathTask::with_sampled_items(
                    suite::COLOR_TASK_SIZE,
                    suite::COLOR_TASK_SIZE,
                    t.start,
                    t.goal,
                    n,
                    i as u64,
                ),
            };
            Ok(task?)
        })
        .collect()
}

fn cmd_simulate(ctx: &Context, a: SimulateArgs) -> Outcome {
    let bytes = ctx.read(&a.config)?;
    let origin = ctx.path(&a.config).display().to_string();
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse {
        path: origin.clone(),
        message: e.to_string(),
    })?;
    let config = SuiteConfig::from_toml(text, &origin)?;
    let base = ctx.path(&a.config).parent().map(Path::to_path_buf).unwrap_or_default();
    let scenarios = config.prepare(&base)?;
    let result = suite::run_simulation_suite(&config, &scenarios, &bytes)?;
    ctx.ensure_root()?;
    for abs in &result.abstractions {
        let file = format!("{}.k{}.json", file_safe(&abs.record.objective), abs.record.n_clusters);
        let path = PathBuf::from("encoders").join(&abs.scenario).join(file);
        ctx.write(&path, abs.record.to_json().as_bytes())?;
    }
    ctx.write(Path::new("results.csv"), result.results_csv().as_bytes())?;
    ctx.write(Path::new("summary.csv"), result.summary_text().as_bytes())?;
    ctx.write(Path::new("summary.json"), result.summary_json().as_bytes())?;
    print!("{}", result.summary_text());
    Ok(())
}

fn cmd_render(ctx: &Context, r: RenderCommand) -> Outcome {
    match r {
        RenderCommand::Heatmap { domain, encoder, output } => {
            let d = ctx.domain(&domain)?;
            if encoder.is_empty() || output.is_some() {
                let out = output.unwrap_or_else(|| PathBuf::from(format!("{}.ppm", stem(&domain))));
                let path = ctx.path(&out);
                render_heatmap(&Heatmap::true_reward(&d)?, &path)?;
                println!("wrote {}", path.display());
            }
            for e in &encoder {
                let record = EncoderRecord::load(&ctx.path(e))?;
                let enc = record.to_encoder(&d)?;
                let path = ctx.path(&e.with_extension("ppm"));
                render_heatmap(&Heatmap::cluster_mean(&d, &enc)?, &path)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        RenderCommand::Frontier { input, label, output } => {
            if !label.is_empty() && label.len() != input.len() {
                return Err(Failure::Usage(format!(
                    "got {} labels for {} inputs",
                    label.len(),
                    input.len()
                )));
            }
            let rows = input
                .iter()
                .map(|p| {
                    let path = ctx.path(p);
                    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                    Ok(parse_frontier_csv(&text, &path.display().to_string())?)
                })
                .collect::<Outcome<Vec<_>>>()?;
            let labels: Vec<String> = if label.is_empty() { input.iter().map(|p| stem(p)).collect() } else { label };
            let series: Vec<Series> = labels
                .iter()
                .zip(&rows)
                .map(|(l, r)| Series { label: l, points: r })
                .collect();
            let out = ctx.path(&output);
            for csv in render_frontier(&series, &out)? {
                println!("wrote {}", csv.display());
            }
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}
