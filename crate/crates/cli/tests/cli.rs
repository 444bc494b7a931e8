use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ibx::artifacts::EncoderRecord;
use ibx::domains::Domain;
use ibx::frontier::{parse_frontier_csv, FrontierRow};
use ibx::metrics::MetricReport;

const QUICK_SWEEP: [&str; 4] = ["--points", "60", "--restarts", "3"];

fn ibx(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ibx"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = ibx(dir, args);
    assert!(
        out.status.success(),
        "ibx {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

fn read(path: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn frontier(path: PathBuf) -> Vec<FrontierRow> {
    parse_frontier_csv(&String::from_utf8(read(&path)).unwrap(), "test").unwrap()
}

/// Checkpoint encoder files written by a sweep with this prefix, by cluster count.
fn checkpoints(dir: &Path, prefix: &str) -> Vec<(usize, String)> {
    let mut found: Vec<(usize, String)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter_map(|n| {
            let k = n.strip_prefix(&format!("{prefix}.k"))?.strip_suffix(".json")?.parse().ok()?;
            Some((k, n))
        })
        .collect();
    found.sort();
    found
}

fn report(path: PathBuf) -> MetricReport {
    serde_json::from_slice(&read(path)).unwrap()
}

fn small_suite(extra: &str) -> String {
    format!(
        r#"
seed = 0
{extra}
[sweep]
points = 60
restarts = 3

[[scenario]]
name = "manhattan"
kind = "grid"
target = "manhattan"
objectives = ["manhattan", "x_coord", "y_coord"]

[[scenario]]
name = "random"
kind = "grid"
target = "random"
seed = 0
objectives = ["random", "x_coord", "y_coord"]
"#
    )
}

#[test]
fn domain_manhattan_peak() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["domain", "--kind", "grid", "--objective", "manhattan"]);
    let d = Domain::load(&dir.path().join("manhattan.json")).unwrap();
    // Cell (1, 3) has id 3 * 5 + 1.
    assert_eq!(d.rewards.value(16), 1.0);
}

#[test]
fn domain_random_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["domain", "--kind", "grid", "--objective", "random", "--seed", "7"];
    ok(dir.path(), &[&args[..], &["--output", "a.json"]].concat());
    ok(dir.path(), &[&args[..], &["--output", "b.json"]].concat());
    assert_eq!(read(dir.path().join("a.json")), read(dir.path().join("b.json")));
}

#[test]
fn domain_discontinuous_blue_has_eight_levels() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["domain", "--kind", "color", "--objective", "blue_discontinuous"]);
    let d = Domain::load(&dir.path().join("blue_discontinuous.json")).unwrap();
    assert_eq!(d.rewards.n_distinct(), 8);
}

#[test]
fn domain_bad_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ibx(dir.path(), &["domain", "--kind", "grid", "--objective", "random"])), 1);
    assert_eq!(code(&ibx(dir.path(), &["domain", "--kind", "grid", "--objective", "manhattan", "--seed", "3"])), 1);
    assert_eq!(code(&ibx(dir.path(), &["domain", "--kind", "color", "--objective", "manhattan"])), 1);
    assert_eq!(code(&ibx(dir.path(), &["domain", "--kind", "grid"])), 1);
    assert_eq!(code(&ibx(dir.path(), &["frobnicate"])), 1);
}

#[test]
fn sweep_reaches_zero_distortion() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["domain", "--kind", "grid", "--objective", "manhattan"]);
    ok(dir.path(), &[&["sweep", "--domain", "manhattan.json"][..], &QUICK_SWEEP].concat());
    let rows = frontier(dir.path().join("manhattan.frontier.csv"));
    assert!(rows.last().unwrap().distortion_mse < 1e-9);
    let saved = checkpoints(dir.path(), "manhattan");
    assert_eq!(saved.first().map(|c| c.0), Some(1));
    assert_eq!(saved.last().map(|c| c.0), Some(7));
    for (n, file) in saved {
        let rec = EncoderRecord::load(&dir.path().join(file)).unwrap();
        assert_eq!(rec.n_clusters, n);
        assert_eq!(rec.config_hash.as_ref().map(String::len), Some(64));
    }
}

#[test]
fn sweep_single_target_writes_one_encoder() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["domain", "--kind", "grid", "--objective", "manhattan"]);
    ok(dir.path(), &[&["sweep", "--domain", "manhattan.json", "--targets", "1"][..], &QUICK_SWEEP].concat());
    assert_eq!(checkpoints(dir.path(), "manhattan"), vec![(1, "manhattan.k1.json".to_string())]);
    let rec = EncoderRecord::load(&dir.path().join("manhattan.k1.json")).unwrap();
    assert_eq!(rec.complexity_bits, 0.0);
}

#[test]
fn sweep_against_other_target_is_never_better() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["domain", "--kind", "grid", "--objective", "manhattan"]);
    ok(dir.path(), &["domain", "--kind", "grid", "--objective", "x_coord"]);
    ok(dir.path(), &[&["sweep", "--domain", "manhattan.json"][..], &QUICK_SWEEP].concat());
    ok(
        dir.path(),
        &[&["sweep", "--domain", "x_coord.json", "--against", "manhattan.json"][..], &QUICK_SWEEP].concat(),
    );
    let reward = frontier(dir.path().join("manhattan.frontier.csv"));
    let x = frontier(dir.path().join("x_coord.frontier.against-manhattan.csv"));
    for row in &x {
        let best = reward
            .iter()
            .filter(|r| r.complexity_bits <= row.complexity_bits + 1e-9)
            .map(|r| r.distortion_mse)
            .fold(f64::INFINITY, f64::min);
        assert!(row.distortion_mse >= best - 1e-12, "{row:?} beats {best}");
    }
}

#[test]
fn sweep_missing_domain_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ibx(dir.path(), &["sweep", "--domain", "nope.json"])), 3);
}

fn write_encoder(dir: &Path, name: &str, domain: &Domain, assignments: Vec<usize>) {
    let joint = domain.joint();
    let enc = ibx::Encoder::from_assignments(&joint, &assignments, domain.spec.label()).unwrap();
    let point = ibx::FrontierPoint::from_encoder(1.0, enc, &joint);
    let rec = EncoderRecord::from_point(&point, domain, None).unwrap();
    std::fs::write(dir.join(name), rec.to_json()).unwrap();
}

#[test]
fn eval_identity_and_single_cluster() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["domain", "--kind", "grid", "--objective", "manhattan"]);
    let d = Domain::load(&dir.path().join("manhattan.json")).unwrap();
    write_encoder(dir.path(), "identity.json", &d, (0..25).collect());
    write_encoder(dir.path(), "single.json", &d, vec![0; 25]);

    ok(dir.path(), &["eval", "--encoder", "identity.json", "--target", "manhattan.json", "--output", "id.json"]);
    let r = report(dir.path().join("id.json"));
    assert_eq!((r.distortion_mse, r.feature_rank, r.best_demonstration), (0.0, 1.0, Some(1.0)));

    ok(dir.path(), &["eval", "--encoder", "single.json", "--target", "manhattan.json", "--output", "one.json"]);
    let r = report(dir.path().join("one.json"));
    let v = d.rewards.values();
    let mean = v.iter().sum::<f64>() / 25.0;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 25.0;
    assert!((r.distortion_mse - var).abs() < 1e-12);
}

#[test]
fn eval_support_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["domain", "--kind", "grid", "--objective", "manhattan"]);
    ok(dir.path(), &["domain", "--kind", "color", "--objective", "blue_continuous"]);
    let d = Domain::load(&dir.path().join("manhattan.json")).unwrap();
    write_encoder(dir.path(), "single.json", &d, vec![0; 25]);
    let out = ibx(dir.path(), &["eval", "--encoder", "single.json", "--target", "blue_continuous.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("support mismatch"));
}

#[test]
fn simulate_rejects_zero_respondents_listing_all_problems() {
    let dir = tempfile::tempdir().unwrap();
    let text = small_suite("checkpoints = []\n[respondents]\ncount = 0\n");
    std::fs::write(dir.path().join("suite.toml"), text).unwrap();
    let out = ibx(dir.path(), &["simulate", "--config", "suite.toml"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("respondents.count"), "{err}");
    assert!(err.contains("checkpoints is empty"), "{err}");
}

#[test]
fn simulate_creates_a_missing_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("suite.toml");
    std::fs::write(&config, small_suite("")).unwrap();
    let fresh = dir.path().join("new").join("run");
    ok(&fresh, &["simulate", "--config", config.to_str().unwrap()]);
    assert!(fresh.join("results.csv").is_file());
    assert!(fresh.join("summary.json").is_file());
}

#[test]
fn simulate_is_reproducible_and_consistent_with_eval() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("suite.toml"), small_suite("")).unwrap();
    let a = dir.path().join("run-a");
    let b = dir.path().join("run-b");
    for run in [&a, &b] {
        std::fs::create_dir_all(run).unwrap();
        std::fs::copy(dir.path().join("suite.toml"), run.join("suite.toml")).unwrap();
    }
    ok(&a, &["simulate", "--config", "suite.toml"]);
    let out = Command::new(env!("CARGO_BIN_EXE_ibx"))
        .env("IBX_THREADS", "1")
        .args(["--out-dir".as_ref(), b.as_os_str(), "simulate".as_ref(), "--config".as_ref(), "suite.toml".as_ref()])
        .output()
        .unwrap();
    assert!(out.status.success());
    for file in ["results.csv", "summary.json", "encoders/manhattan/x_coord.k3.json"] {
        assert_eq!(read(a.join(file)), read(b.join(file)), "{file} differs");
    }

    // H1 sign in both grid scenarios.
    let summary: serde_json::Value = serde_json::from_slice(&read(a.join("summary.json"))).unwrap();
    for s in summary["scenarios"].as_array().unwrap() {
        assert!(s["spearman_fr_distortion"].as_f64().unwrap() < 0.0, "{s}");
    }

    // Every row re-evaluates to the same metrics.
    std::fs::write(
        a.join("random.json"),
        Domain::build(
            ibx::DomainSpec::new(ibx::DomainKind::Grid, ibx::Objective::Random, Some(0)).unwrap(),
            None,
        )
        .unwrap()
        .to_json(),
    )
    .unwrap();
    let csv = String::from_utf8(read(a.join("results.csv"))).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).filter(|l| l.starts_with("random/")).collect();
    assert!(!rows.is_empty());
    for line in rows {
        let label = line.split(',').next().unwrap();
        let (objective, k) = label.trim_start_matches("random/").split_once('@').unwrap();
        let encoder = format!("encoders/random/{}.{k}.json", objective.replace('(', "-").replace(')', ""));
        ok(
            &a,
            &[
                "eval", "--encoder", &encoder, "--target", "random.json", "--config", "suite.toml", "--scenario", "random",
                "--label", label, "--output", "row.json",
            ],
        );
        let r = report(a.join("row.json"));
        assert_eq!(r.csv_row(), line);
    }
}

#[test]
fn render_checkpoint_heatmaps() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["domain", "--kind", "grid", "--objective", "manhattan"]);
    ok(dir.path(), &[&["sweep", "--domain", "manhattan.json"][..], &QUICK_SWEEP].concat());
    let encoders: Vec<String> = checkpoints(dir.path(), "manhattan").into_iter().map(|c| c.1).collect();
    assert!(encoders.len() >= 3);
    let mut args = vec!["render", "heatmap", "--domain", "manhattan.json"];
    for e in &encoders {
        args.extend(["--encoder", e.as_str()]);
    }
    ok(dir.path(), &args);
    let mut last = (-1.0, 0);
    for e in &encoders {
        let ppm = read(dir.path().join(e.replace(".json", ".ppm")));
        assert!(ppm.starts_with(b"P6\n200 200\n255\n"));
        let rec = EncoderRecord::load(&dir.path().join(e)).unwrap();
        // Distinct colors are at most the cluster count plus black borders.
        let colors: std::collections::BTreeSet<&[u8]> = ppm[15..].chunks(3).collect();
        assert!(colors.len() <= rec.n_clusters + 1);
        assert!(rec.complexity_bits > last.0 && rec.n_clusters > last.1);
        last = (rec.complexity_bits, rec.n_clusters);
    }
}

#[test]
fn render_three_frontiers() {
    let dir = tempfile::tempdir().unwrap();
    for obj in ["manhattan", "x_coord", "y_coord"] {
        ok(dir.path(), &["domain", "--kind", "grid", "--objective", obj]);
    }
    ok(dir.path(), &[&["sweep", "--domain", "manhattan.json"][..], &QUICK_SWEEP].concat());
    for obj in ["x_coord", "y_coord"] {
        let domain = format!("{obj}.json");
        ok(dir.path(), &[&["sweep", "--domain", &domain, "--against", "manhattan.json"][..], &QUICK_SWEEP].concat());
    }
    ok(
        dir.path(),
        &[
            "render", "frontier",
            "--input", "manhattan.frontier.csv",
            "--input", "x_coord.frontier.against-manhattan.csv",
            "--input", "y_coord.frontier.against-manhattan.csv",
            "--label", "manhattan", "--label", "x_coord", "--label", "y_coord",
        ],
    );
    let svg = String::from_utf8(read(dir.path().join("frontier.svg"))).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
    assert_eq!(read(dir.path().join("frontier.manhattan.csv")), read(dir.path().join("manhattan.frontier.csv")));
}

#[test]
fn render_to_unwritable_location_fails() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["domain", "--kind", "grid", "--objective", "manhattan"]);
    let domain = dir.path().join("manhattan.json");
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, b"").unwrap();
    let out = ibx(&blocker, &["render", "heatmap", "--domain", domain.to_str().unwrap()]);
    assert_eq!(code(&out), 3);

    let ro = dir.path().join("ro");
    std::fs::create_dir(&ro).unwrap();
    let mut perms = std::fs::metadata(&ro).unwrap().permissions();
    perms.set_readonly(true);
    std::fs::set_permissions(&ro, perms).unwrap();
    // Privileged users can write anyway; only check when the directory is really read-only.
    if std::fs::write(ro.join("probe"), b"").is_err() {
        let out = ibx(&ro, &["render", "heatmap", "--domain", domain.to_str().unwrap()]);
        assert_ne!(code(&out), 0);
    }
}

#[test]
fn invalid_thread_cap_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ibx"))
        .env("IBX_THREADS", "zero")
        .args(["--out-dir", dir.path().to_str().unwrap(), "domain", "--kind", "grid", "--objective", "manhattan"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}
