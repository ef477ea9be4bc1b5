use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_betcraft"));
    c.env_remove("BETCRAFT_SEED");
    c
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/report")
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

#[test]
fn ks1_on_null_data_makes_no_decision() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let data: String = (0..2000).map(|_| format!("{}\n", rng.random::<f64>())).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.txt");
    fs::write(&path, data).unwrap();
    let o = bin()
        .args([
            "test",
            "--test",
            "ks1",
            "--alpha",
            "0.05",
            "--target",
            "uniform:0,1",
            "--input",
        ])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "NO-DECISION after n=2000\n");
}

#[test]
fn ks1_on_shifted_data_rejects() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let data: String = (0..3000)
        .map(|_| format!("{}\n", rng.random::<f64>().powf(0.5)))
        .collect();
    let o = run_with_stdin(&["test", "--test", "ks1", "--target", "uniform:0,1"], &data);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("REJECT at n="), "{}", stdout(&o));
}

#[test]
fn chi2_rejects_on_a_foreign_symbol() {
    let o = run_with_stdin(
        &[
            "test",
            "--test",
            "chi2",
            "--target",
            "discrete:0.25,0.25,0.25,0.25",
        ],
        "# header comment\n0\n3\n1\n\n7\n2\n",
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "REJECT at n=4\n");
}

#[test]
fn missing_target_is_a_usage_error() {
    let o = run_with_stdin(&["test", "--test", "ks1"], "0.5\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--target"));
}

#[test]
fn bad_flags_are_usage_errors() {
    for args in [
        vec!["test", "--test", "nope"],
        vec!["test", "--test", "ks2", "--strategy", "pgd"],
        vec!["test", "--test", "ks1", "--target", "uniform:1,0"],
        vec!["test", "--test", "ks1", "--target", "uniform:0,1", "--alpha", "2"],
        vec!["test", "--test", "ks2", "--target", "uniform:0,1"],
        vec!["frobnicate"],
    ] {
        let o = run_with_stdin(&args, "");
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn malformed_line_reports_its_number() {
    let o = run_with_stdin(&["test", "--test", "ks2"], "0.1,0.2\n# note\n0.3,abc\n");
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = run_with_stdin(&["test", "--test", "dominance"], "0.1,0.2\n1.5,0.2\n");
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn multivariate_mmd_stream_and_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut data = String::new();
    for _ in 0..400 {
        let x: Vec<String> = (0..3).map(|_| rng.random::<f64>().to_string()).collect();
        let y: Vec<String> = (0..3).map(|_| (rng.random::<f64>() + 2.0).to_string()).collect();
        data.push_str(&format!("{},{}\n", x.join(";"), y.join(";")));
    }
    let o = run_with_stdin(
        &[
            "test",
            "--test",
            "mmd",
            "--strategy",
            "kt",
            "--bandwidth",
            "1",
            "--trace",
        ],
        &data,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("REJECT at n="));
    let trace = stderr(&o);
    assert!(trace.starts_with("n=1 wealth=1\n"), "{trace}");
    assert!(trace.contains("n=2 wealth="));
}

#[test]
fn simulate_smoke_is_fast_and_writes_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let o = bin()
        .arg("simulate")
        .arg(scenario("ks1_normal_shift.json"))
        .args(["--trials", "4", "--nmax", "64", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| !n.contains(".stopping."))
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "ks1_normal_shift__eps0.2__ks1.csv",
            "ks1_normal_shift__eps0.4__ks1.csv",
            "ks1_normal_shift__eps0.6__ks1.csv"
        ]
    );
    let text = fs::read_to_string(dir.path().join(&names[0])).unwrap();
    assert!(text.starts_with("n,reject_fraction,stderr\n"));
    assert!(stdout(&o).starts_with("test "));
}

#[test]
fn every_bundled_scenario_runs_in_smoke_mode() {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(scenario("")).unwrap() {
        let path = entry.unwrap().path();
        let o = bin()
            .arg("simulate")
            .arg(&path)
            .args(["--trials", "2", "--nmax", "40", "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}: {}", path.display(), stderr(&o));
    }
}

fn simulate_into(dir: &Path, jobs: &str, seed_env: Option<&str>, extra: &[&str]) -> Vec<(String, Vec<u8>)> {
    let mut cmd = bin();
    if let Some(s) = seed_env {
        cmd.env("BETCRAFT_SEED", s);
    }
    let o = cmd
        .arg("simulate")
        .arg(scenario("ks2_normal_shift.json"))
        .args(["--trials", "12", "--nmax", "300", "--jobs", jobs, "--out"])
        .arg(dir)
        .args(extra)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn seeds_control_output() {
    let base = tempfile::tempdir().unwrap();
    let a = simulate_into(&base.path().join("a"), "1", None, &[]);
    let b = simulate_into(&base.path().join("b"), "1", Some("424242"), &[]);
    let c = simulate_into(
        &base.path().join("c"),
        "1",
        Some("424242"),
        &["--seed", "20240104"],
    );
    assert_ne!(a, b, "BETCRAFT_SEED had no effect");
    assert_eq!(a, c, "--seed should win over BETCRAFT_SEED");
    let d = simulate_into(
        &base.path().join("d"),
        "1",
        Some("not-a-number"),
        &["--seed", "1"],
    );
    assert!(!d.is_empty());
    let o = bin()
        .env("BETCRAFT_SEED", "not-a-number")
        .arg("simulate")
        .arg(scenario("ks2_normal_shift.json"))
        .args(["--trials", "1", "--nmax", "10", "--out"])
        .arg(base.path().join("e"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"name": "x", "tests": [{"test": "ks2"}], "scenarios": [], "typo": 1}"#,
    )
    .unwrap();
    let o = bin().arg("simulate").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .arg("simulate")
        .arg(dir.path().join("missing.json"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_matches_golden_fixture() {
    let f = fixtures();
    let o = bin()
        .arg("report")
        .arg(f.join("ks1_eps0.4.csv"))
        .arg(f.join("batch_ks2_null.csv"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(o.stdout, fs::read(f.join("expected.txt")).unwrap());
}

#[test]
fn report_single_file_and_checkpoint_choice() {
    let f = fixtures();
    let o = bin()
        .args(["report", "--at", "999"])
        .arg(f.join("ks1_eps0.4.csv"))
        .output()
        .unwrap();
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().contains("  100  0.1000"), "{text}");
}

#[test]
fn report_schema_mismatch_exits_3() {
    let f = fixtures();
    let o = bin()
        .arg("report")
        .arg(f.join("ks1_eps0.4.csv"))
        .arg(f.join("ks1_eps0.4.stopping.csv"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("schema"));
}
