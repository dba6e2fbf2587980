use std::path::Path;
use std::process::{Command, Output};

use friedrichs_harness::report::read_series_csv;
use friedrichs_harness::RunConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_friedrichs"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["dance"])), 1);
    assert_eq!(code(&run(&["pole", "--preset", "nonsense"])), 1);
    assert_eq!(code(&run(&["survival", "--dt-policy", "sometimes"])), 1);
    assert_eq!(code(&run(&["survival", "--tolerance", "-1"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seed = 1\nunexpected = true\n").unwrap();
    assert_eq!(code(&run(&["pole", "--config", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&run(&["pole", "--config", "/nonexistent/run.toml"])), 1);
}

#[test]
fn help_and_version_exit_cleanly() {
    let h = run(&["--help"]);
    assert_eq!(code(&h), 0);
    assert!(String::from_utf8_lossy(&h.stdout).contains("selftest"));
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["emission", "--help"])), 0);
}

#[test]
fn pole_report_writes_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["pole", "--preset", "paper", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let metrics = std::fs::read_to_string(dir.path().join("pole/metrics.txt")).unwrap();
    assert!(metrics.contains("pole.decay_rate = 1.914"));
    let echo = std::fs::read_to_string(dir.path().join("pole/config.echo")).unwrap();
    let mut expected = RunConfig::paper();
    expected.output_dir = dir.path().to_path_buf();
    assert_eq!(RunConfig::from_toml_str(&echo).unwrap(), expected);
}

/// Small box so the scenario runs quickly.
fn small_config(dir: &Path) -> std::path::PathBuf {
    let mut cfg = RunConfig::paper();
    cfg.discretization.n_modes = 300;
    cfg.discretization.box_length = 40.0;
    cfg.emission.t = 5.0;
    cfg.emission.x.min = -12.0;
    cfg.emission.x.max = 12.0;
    cfg.emission.x.step = 0.2;
    cfg.output_dir = dir.to_path_buf();
    let path = dir.join("run.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    path
}

#[test]
fn emission_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg = cfg.to_str().unwrap();
    let out = dir.path().join("out");
    let files = ["series_emission.csv", "metrics.txt", "config.echo", "plot_emission.gnuplot"];
    let mut first: Vec<Vec<u8>> = Vec::new();
    for round in 0..2 {
        let o = run(&["emission", "--config", cfg, "--out", out.to_str().unwrap()]);
        // a coarse box may fail the agreement checks, but never with a usage error
        assert!([0, 2].contains(&code(&o)), "{}", String::from_utf8_lossy(&o.stderr));
        let now: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(out.join("emission").join(f)).unwrap()).collect();
        if round == 0 {
            first = now;
        } else {
            for (f, (x, y)) in files.iter().zip(first.iter().zip(&now)) {
                assert!(x == y, "{f} differs between runs");
            }
        }
    }
    let csv = std::fs::read_to_string(out.join("emission/series_emission.csv")).unwrap();
    let (grid, total, restricted, rest) = read_series_csv(&csv).unwrap();
    assert_eq!(grid.len(), 121);
    assert_eq!(total.len(), restricted.len());
    // the stored rest is |total − restricted|² on the same grid
    for k in 0..grid.len() {
        let d = (total[k] - restricted[k]).norm_sqr();
        assert!((d - rest[k]).abs() <= 1e-12 * d.max(1e-300) + 1e-28, "row {k}");
    }
}

#[test]
fn positions_outside_the_box_are_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::paper();
    cfg.discretization.n_modes = 100;
    cfg.discretization.box_length = 20.0;
    let path = dir.path().join("run.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    let o = run(&["emission", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside the box"));
}

#[test]
fn failing_selftest_exits_with_three() {
    // a threshold no projection can meet forces failures
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::paper();
    cfg.tolerances.projection = 1e-300;
    cfg.output_dir = dir.path().to_path_buf();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    let o = run(&["selftest", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    let ok = run(&["selftest", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&ok), 0);
    assert!(dir.path().join("selftest/selftest.txt").exists());
}
