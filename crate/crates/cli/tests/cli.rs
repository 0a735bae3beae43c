use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nesterov-ode"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_config(out: &Path, text: &str, extra: &[&str]) -> Output {
    let path = out.join("config.toml");
    fs::create_dir_all(out).unwrap();
    fs::write(&path, text).unwrap();
    let mut args = vec!["--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    args.extend(["run", path.to_str().unwrap()]);
    run(&args)
}

fn status(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    rows.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
    rows
}

const SCALAR: &str = "[problem]\nname = \"scalar-quadratic\"\n";

#[test]
fn unknown_flag_prints_usage() {
    let o = run(&["--no-such-flag", "list-problems"]);
    assert_eq!(status(&o), 2);
    assert!(text(&o.stderr).contains("Usage"));
}

#[test]
fn empty_run_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), SCALAR, &[]);
    assert_eq!(status(&o), 2);
    assert!(text(&o.stderr).contains("at least one run"), "{}", text(&o.stderr));
}

#[test]
fn low_friction_config_shows_growth_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs().join("low-friction.toml");
    let outs = [dir.path().join("a"), dir.path().join("b")];
    for out in &outs {
        let o = run(&["--out", out.to_str().unwrap(), "--deterministic-summary", "run", config.to_str().unwrap()]);
        assert_eq!(status(&o), 0, "{}", text(&o.stdout));
    }
    for file in ["ode-scaled-error.csv", "scheme-scaled-error.csv"] {
        let rows = csv_rows(&outs[0].join("analyses").join(file));
        assert_eq!(rows[0], ["t", "scaled_error"]);
        let value = |lo: f64, hi: f64| {
            rows[1..]
                .iter()
                .map(|r| (r[0].parse::<f64>().unwrap(), r[1].parse::<f64>().unwrap()))
                .filter(|(t, _)| *t >= lo && *t <= hi)
                .map(|(_, v)| v)
                .fold(0.0, f64::max)
        };
        assert!(value(10.0, 20.0) > 2.0 * value(1.0, 2.0), "{file}");
    }
    for rel in ["runs/ode-r1.csv", "runs/scheme-r1.csv", "analyses/ode-growth.csv", "summary.toml"] {
        assert_eq!(fs::read(outs[0].join(rel)).unwrap(), fs::read(outs[1].join(rel)).unwrap(), "{rel}");
    }
    let summary = fs::read_to_string(outs[0].join("summary.toml")).unwrap();
    assert!(!summary.contains("generated_unix"));
    assert!(summary.starts_with("status = \"pass\""));
}

#[test]
fn restart_quadratic_config_writes_four_traces() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs().join("restart-quadratic.toml");
    let o = run(&["--out", dir.path().to_str().unwrap(), "run", config.to_str().unwrap()]);
    assert_eq!(status(&o), 0, "{}", text(&o.stdout));
    let mut finals = Vec::new();
    for id in ["srN", "grN", "oN", "PG"] {
        let rows = csv_rows(&dir.path().join("runs").join(format!("{id}.csv")));
        assert_eq!(rows[0], ["k", "f_gap", "step_norm", "restarted"]);
        assert_eq!(rows.len(), 1502, "{id}");
        finals.push(rows.last().unwrap()[1].parse::<f64>().unwrap());
    }
    assert!(finals[0] < finals[2] && finals[1] < finals[2] && finals[2] < finals[3], "{finals:?}");
    let summary = fs::read_to_string(dir.path().join("summary.toml")).unwrap();
    assert!(summary.contains("generated_unix"));
}

#[test]
fn failed_assertion_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{SCALAR}[[run]]\nid = \"a\"\nkind = \"nesterov\"\nstep = 0.1\nk_max = 10\n\
         [[analysis]]\nid = \"gap\"\nop = \"final-gap\"\nrun = \"a\"\nmax = 1e-30\n"
    );
    let o = run_config(dir.path(), &cfg, &[]);
    assert_eq!(status(&o), 1);
    assert!(text(&o.stdout).contains("FAIL"));
    assert!(fs::read_to_string(dir.path().join("summary.toml")).unwrap().contains("pass = false"));
}

#[test]
fn divergence_exits_with_three_and_keeps_partial_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{SCALAR}[[run]]\nid = \"fine\"\nkind = \"nesterov\"\nk_max = 10\n\
         [[run]]\nid = \"blowup\"\nkind = \"gradient-descent\"\nstep = 3.0\nallow_large_step = true\nk_max = 5000\n\
         [[analysis]]\nid = \"gap\"\nop = \"final-gap\"\nrun = \"blowup\"\n"
    );
    let o = run_config(dir.path(), &cfg, &[]);
    assert_eq!(status(&o), 3, "{}", text(&o.stderr));
    assert!(dir.path().join("runs/fine.csv").exists());
    assert!(!dir.path().join("runs/blowup.csv").exists());
    let summary = fs::read_to_string(dir.path().join("summary.toml")).unwrap();
    assert!(summary.contains("status = \"diverged\""));
    assert!(summary.contains("skipped"));
}

#[test]
fn large_step_without_opt_in_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{SCALAR}[[run]]\nid = \"a\"\nkind = \"nesterov\"\nstep = 3.0\nk_max = 5\n");
    assert_eq!(status(&run_config(dir.path(), &cfg, &[])), 2);
}

#[test]
fn instance_cache_is_reused_and_checked() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[problem]\nname = \"tiny-lasso\"\n[[run]]\nid = \"a\"\nkind = \"nesterov\"\nk_max = 50\n";
    assert_eq!(status(&run_config(dir.path(), cfg, &["--deterministic-summary"])), 0);
    let cache = dir.path().join("instances/tiny-lasso-desk-seed42.toml");
    let record = fs::read_to_string(&cache).unwrap();
    assert!(record.contains("f_star") && record.contains("confident = true") && record.contains("kind = \"least-squares\""));
    let first = fs::read(dir.path().join("runs/a.csv")).unwrap();

    assert_eq!(status(&run_config(dir.path(), cfg, &["--deterministic-summary"])), 0);
    assert!(fs::read_to_string(dir.path().join("summary.toml")).unwrap().contains("cached = true"));
    assert_eq!(first, fs::read(dir.path().join("runs/a.csv")).unwrap());
    assert_eq!(record, fs::read_to_string(&cache).unwrap());

    fs::write(&cache, record.replacen("response = [4.0", "response = [5.0", 1)).unwrap();
    let o = run_config(dir.path(), cfg, &[]);
    assert_eq!(status(&o), 2);
    assert!(text(&o.stderr).contains("does not match"));
}

#[test]
fn seed_and_scale_flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[problem]\nname = \"lasso-fat\"\nseed = 1\n[[run]]\nid = \"a\"\nkind = \"nesterov\"\nk_max = 5\n";
    assert_eq!(status(&run_config(dir.path(), cfg, &["--seed", "9"])), 0);
    assert!(dir.path().join("instances/lasso-fat-desk-seed9.toml").exists());
    assert_eq!(status(&run_config(dir.path(), cfg, &["--scale", "huge"])), 2);
}

#[test]
fn selftest_passes_and_catches_the_momentum_fault() {
    let o = run(&["selftest"]);
    assert_eq!(status(&o), 0, "{}", text(&o.stdout));
    assert!(!text(&o.stdout).contains("FAIL"));
    let o = run(&["selftest", "--inject-momentum-fault"]);
    assert_eq!(status(&o), 1);
    assert!(text(&o.stdout).contains("FAILED: rate certificate"));
}

#[test]
fn trace_ode_writes_coordinates_and_restart_marks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["--out", out, "trace-ode", "two-scale-quadratic", "--horizon", "40", "--restart", "--x-columns", "--sample-every", "10"]);
    assert_eq!(status(&o), 0, "{}", text(&o.stderr));
    let rows = csv_rows(&dir.path().join("runs/two-scale-quadratic-ode.csv"));
    assert_eq!(rows[0], ["t", "f_gap", "speed", "restarted", "x0", "x1"]);
    assert_eq!(rows.len(), 4002);
    assert!(rows[1..].iter().any(|r| r[3] == "1"));

    let o = run(&["--out", out, "trace-ode", "lasso", "--x-columns"]);
    assert_eq!(status(&o), 2, "x columns need n ≤ 4");
    let o = run(&["--out", out, "trace-ode", "tiny-lasso", "--horizon", "2", "--dt", "1e-3"]);
    assert_eq!(status(&o), 0, "{}", text(&o.stderr));
}

#[test]
fn compare_reports_shrinking_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--out", dir.path().to_str().unwrap(), "compare", "two-scale-quadratic"]);
    assert_eq!(status(&o), 0, "{}", text(&o.stderr));
    let rows = csv_rows(&dir.path().join("compare.csv"));
    assert_eq!(rows[0], ["s", "deviation"]);
    let d: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(d.len(), 3);
    assert!(d[1] < d[0] && d[2] < d[1] && d[2] <= 0.05, "{d:?}");
}

#[test]
fn list_problems_names_every_instance() {
    let o = run(&["list-problems"]);
    assert_eq!(status(&o), 0);
    let out = text(&o.stdout);
    for name in ["scalar-quadratic", "lasso-fat", "matrix-completion", "slope", "sparse-logistic"] {
        assert!(out.contains(name), "{name}");
    }
}
