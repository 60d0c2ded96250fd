use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn localsgd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_localsgd")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const BOUNDS: &str = r#"{
  "experiment": {"kind": "bounds", "theorem": 1, "T": 200, "record_stride": 20},
  "problem": {"family": "strongly-convex-quadratic", "n": 4, "d": 3, "mu": 0.1, "L": 1,
              "delta": 1, "sigma_noise": 1, "seed": 1},
  "schedule": {"strategy": "fixed", "H": 4},
  "stepsize": {"policy": "inverse-time"},
  "seeds": {"count": 5},
  "output": "results"
}"#;

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn run_writes_metrics_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), BOUNDS);
    let out = localsgd(&["run", &config]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    // relative output paths resolve against the config's directory
    let results = dir.path().join("results");
    let metrics = fs::read_to_string(results.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().next(), Some("seed,t,r,e,V,h,is_comm_round"));
    // every communication instant (multiples of 4) is recorded besides the stride
    assert_eq!(metrics.lines().count(), 1 + 5 * 51);
    let bounds = fs::read_to_string(results.join("bounds.csv")).unwrap();
    assert!(bounds.contains("1,holds,true"), "{bounds}");
    assert!(bounds.contains("1,schedule,"), "{bounds}");
}

#[test]
fn seed_offset_changes_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), BOUNDS);
    let out_dir = dir.path().join("shifted");
    let out = localsgd(&["run", &config, "--output", out_dir.to_str().unwrap(), "--seed-offset", "100"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let metrics = fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    assert!(metrics.lines().nth(1).unwrap().starts_with("100,0,"));
}

#[test]
fn interval_sum_mismatch_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &BOUNDS.replace(r#""H": 4"#, r#""H": 4, "R": 3"#));
    assert_eq!(localsgd(&["run", &config]).status.code(), Some(2));

    let text = BOUNDS.replace(r#"{"strategy": "fixed", "H": 4}"#, r#"{"strategy": "explicit", "H": [100, 99]}"#);
    let config = write_config(dir.path(), &text);
    let out = localsgd(&["run", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Σ H_i must equal T"), "{}", stderr(&out));
    assert!(!dir.path().join("results").exists());
}

#[test]
fn schema_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &BOUNDS.replace(r#""seed": 1}"#, r#""seed": 1, "colour": 3}"#));
    let out = localsgd(&["run", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
}

#[test]
fn beta_below_guard_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    // 20L/μ = 200, and H = 4 needs β ≥ 12·4·L/μ = 480
    for beta in ["150", "300"] {
        let text = BOUNDS.replace(r#""policy": "inverse-time""#, &format!(r#""policy": "inverse-time", "beta": {beta}"#));
        let config = write_config(dir.path(), &text);
        let out = localsgd(&["run", &config]);
        assert_eq!(out.status.code(), Some(3), "beta={beta}");
        assert!(stderr(&out).contains("check_thm1_condition"), "{}", stderr(&out));
        assert!(!dir.path().join("results").exists());
    }
}

#[test]
fn schedule_command() {
    let out = localsgd(&["schedule", "fixed", "--T", "100", "--R", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("10 ×10; cubic_sum=10000"));

    let out = localsgd(&["schedule", "increasing", "--a", "10", "--s", "0.2", "--T", "30"]);
    assert!(stdout(&out).contains("[10, 11, 9]"));

    let out = localsgd(&["schedule", "increasing", "--a", "1", "--s", "1", "--T", "10", "--mu", "1", "--L", "1", "--beta", "12"]);
    let text = stdout(&out);
    assert!(text.contains("weighted_cubic_sum(beta=12)"), "{text}");
    assert!(text.contains("overall: FAIL"), "{text}");

    assert_eq!(localsgd(&["schedule", "fixed", "--T", "5", "--R", "6"]).status.code(), Some(2));
    assert_eq!(localsgd(&["schedule", "decreasing", "--T", "5"]).status.code(), Some(2));
}

const SPEEDUP: &str = r#"{
  "experiment": {"kind": "speedup", "T": 120, "n_list": [1, 2, 4], "record_stride": 120},
  "problem": {"family": "strongly-convex-quadratic", "n": 1, "d": 2, "mu": 0.5, "L": 1,
              "delta": 0.5, "sigma_noise": 1, "seed": 3},
  "schedule": {"strategy": "fixed", "R": 12},
  "stepsize": {"policy": "inverse-time"},
  "seeds": {"count": 4},
  "output": "results"
}"#;

#[test]
fn plotdata_from_speedup_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SPEEDUP);
    let out = localsgd(&["run", &config]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let results = dir.path().join("results");
    let results = results.to_str().unwrap();

    assert_eq!(localsgd(&["plotdata", results]).status.code(), Some(0));
    let dat = fs::read_to_string(Path::new(results).join("speedup.dat")).unwrap();
    let lines: Vec<&str> = dat.lines().collect();
    assert!(lines[0].starts_with('#'));
    assert_eq!(lines.len(), 4, "{dat}");
    let sqrt_n: Vec<f64> = lines[1..].iter().map(|l| l.split_whitespace().nth(3).unwrap().parse().unwrap()).collect();
    for (got, want) in sqrt_n.iter().zip([1.0, 2f64.sqrt(), 2.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!(lines[1].starts_with("1 1 0 1 "), "{dat}");

    // idempotent
    assert_eq!(localsgd(&["plotdata", results]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(Path::new(results).join("speedup.dat")).unwrap(), dat);
}

#[test]
fn plotdata_on_empty_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = localsgd(&["plotdata", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("speedup.csv"), "{}", stderr(&out));
}

#[test]
fn bad_thread_count_is_input_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_localsgd"))
        .args(["schedule", "fixed", "--T", "4", "--R", "2"])
        .env("LOCALSGD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
