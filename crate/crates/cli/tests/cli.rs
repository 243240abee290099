use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn gevp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gevp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

fn report_column(report: &str, col: usize) -> Vec<f64> {
    report
        .lines()
        .skip(2)
        .map(|l| l.split_whitespace().nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn empty_config_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("empty.toml");
    fs::write(&cfg, "").unwrap();
    let o = gevp(&["solve", "--config", cfg.to_str().unwrap(), "--out-dir", &out_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing field `problem`"), "{}", stderr(&o));
}

#[test]
fn malformed_config_reports_its_line() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[problem]\nkind = \"example1\"\n\n[[levels]]\nd_tau = 0.01\ntau_maxx = 3.0\n").unwrap();
    let o = gevp(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 6") && err.contains("tau_maxx"), "{err}");
}

#[test]
fn invalid_schedule_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("neg.toml");
    fs::write(&cfg, "[problem]\nkind = \"example2\"\n\n[[levels]]\nd_tau = -0.1\n").unwrap();
    let o = gevp(&["solve", "--config", cfg.to_str().unwrap(), "--out-dir", &out_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn regular_pencil_report() {
    let tmp = TempDir::new().unwrap();
    let o = gevp(&["solve", "--preset", "example1", "--levels", "4", "--out-dir", &out_arg(tmp.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = fs::read_to_string(tmp.path().join("report.txt")).unwrap();
    assert_eq!(report, stdout(&o));
    let method = report_column(&report, 1);
    let exact = report_column(&report, 2);
    for (got, want) in method.iter().zip([0.33326, 0.97205, 1.02106, 1.56964]) {
        assert!((got - want).abs() <= 5e-3, "{report}");
    }
    for (got, want) in exact.iter().zip([0.33162, 0.97204, 1.01575, 1.56765]) {
        assert!((got - want).abs() <= 1e-5, "{report}");
    }
    for l in 0..4 {
        let csv = fs::read_to_string(tmp.path().join(format!("level_{l}.csv"))).unwrap();
        assert!(csv.starts_with("tau,F,residual,theta_0,theta_1,theta_2,theta_3\n"));
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["levels"].as_array().unwrap().len(), 4);
    let oracle: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("oracle.json")).unwrap()).unwrap();
    assert_eq!(oracle["pairs"].as_array().unwrap().len(), 4);
}

#[test]
fn singular_pencil_final_value() {
    let tmp = TempDir::new().unwrap();
    let o = gevp(&["solve", "--preset", "example2", "--out-dir", &out_arg(tmp.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let method = report_column(&stdout(&o), 1);
    assert!((method[0] - 0.150005).abs() < 1e-3);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let o = gevp(&["--seed", "11", "--shots", "4000", "solve", "--preset", "example2", "--out-dir", &out_arg(dir.path())]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for name in ["level_0.csv", "summary.json", "report.txt"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
}

#[test]
fn seed_changes_shot_runs() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for (dir, seed) in [(&a, "1"), (&b, "2")] {
        let o = gevp(&["--seed", seed, "--shots", "500", "solve", "--preset", "example2", "--out-dir", &out_arg(dir.path())]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let x = fs::read(a.path().join("level_0.csv")).unwrap();
    let y = fs::read(b.path().join("level_0.csv")).unwrap();
    assert_ne!(x, y);
}

#[test]
fn unconverged_level_exits_with_convergence_code() {
    let tmp = TempDir::new().unwrap();
    let o = gevp(&["solve", "--preset", "example1", "--levels", "2", "--require-convergence", "--out-dir", &out_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("level 1"), "{}", stderr(&o));
    assert!(tmp.path().join("level_1.csv").exists());
}

#[test]
fn levels_beyond_configuration_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let o = gevp(&["solve", "--preset", "example2", "--levels", "3", "--out-dir", &out_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_preset_lists_alternatives() {
    let o = gevp(&["oracle", "--preset", "example9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("example1"));
}

#[test]
fn custom_problem_from_pauli_files() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("a.txt"), "1.0 II\n0.4 ZI\n0.4 IZ\n0.2 XX\n").unwrap();
    fs::write(tmp.path().join("b.txt"), "# regular metric\n1.0 II\n0.3 ZI\n0.4 IZ\n0.2 ZZ\n").unwrap();
    fs::write(tmp.path().join("b3.txt"), "1.0 III\n").unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(
        &cfg,
        "[problem]\nkind = \"custom\"\na = \"a.txt\"\nb = \"b.txt\"\n\n[ansatz]\ntheta0 = [1.5, 0.8, 2.3, 3.1]\n\n[[levels]]\nd_tau = 0.01\ntau_max = 30.0\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = gevp(&["solve", "--config", cfg.to_str().unwrap(), "--out-dir", &out_arg(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let method = report_column(&stdout(&o), 1);
    assert!((method[0] - 0.33162).abs() < 5e-3);

    fs::write(&cfg, "[problem]\nkind = \"custom\"\na = \"a.txt\"\nb = \"b3.txt\"\n\n[[levels]]\n").unwrap();
    let o = gevp(&["oracle", "--config", cfg.to_str().unwrap(), "--out-dir", &out_arg(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("qubits"), "{}", stderr(&o));
}

#[test]
fn collapse_into_null_space_is_numerical() {
    // B = |1><1| and the ansatz starts in |0>
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("a.txt"), "1.0 I\n").unwrap();
    fs::write(tmp.path().join("b.txt"), "0.5 I\n-0.5 Z\n").unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(
        &cfg,
        "[problem]\nkind = \"custom\"\na = \"a.txt\"\nb = \"b.txt\"\n\n[ansatz]\ntheta0 = [0.0, 0.0]\n\n[[levels]]\n",
    )
    .unwrap();
    let o = gevp(&["solve", "--config", cfg.to_str().unwrap(), "--out-dir", &out_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn oracle_writes_eigenpairs() {
    let tmp = TempDir::new().unwrap();
    let o = gevp(&["oracle", "--preset", "example3", "--out-dir", &out_arg(tmp.path())]);
    assert!(o.status.success());
    let set: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("oracle.json")).unwrap()).unwrap();
    let first = set["pairs"][0]["lambda"].as_f64().unwrap();
    assert!((first - 0.212465).abs() < 1e-6);
}

#[test]
fn hydrogen_sweep_artifacts() {
    let tmp = TempDir::new().unwrap();
    let o = gevp(&["hydrogen", "--out-dir", &out_arg(tmp.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("hydrogen.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,lambda_a,lambda_b,g1,g2,P,error"));
    assert_eq!(lines.count(), 8);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("hydrogen.json")).unwrap()).unwrap();
    assert_eq!(summary["argmax"]["x"].as_f64(), Some(0.9));

    let o = gevp(&["hydrogen", "--alphas", "-1", "--out-dir", &out_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn decompose_matrix_file() {
    let tmp = TempDir::new().unwrap();
    let m = tmp.path().join("m.txt");
    fs::write(&m, "1 0 0 0.2\n0 1 0.2 0\n0 0.2 1 0\n0.2 0 0 1\n").unwrap();
    let o = gevp(&["decompose", m.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "1 II\n0.2 XX\n");

    fs::write(&m, "1 1i\n1i 1\n").unwrap();
    let o = gevp(&["decompose", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Hermitian"));
}

#[test]
fn presets_match_library_schedules() {
    use gevp_core::problems::{example1_levels, example2_levels, example3_levels, EXAMPLE3_SEED};
    let tmp = TempDir::new().unwrap();
    let cases = [
        ("example1", example1_levels()),
        ("example2", example2_levels()),
        ("example3", example3_levels(EXAMPLE3_SEED)),
    ];
    for (name, levels) in cases {
        let o = gevp(&["solve", "--preset", name, "--out-dir", &out_arg(tmp.path())]);
        assert!(o.status.success());
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(tmp.path().join("summary.json")).unwrap()).unwrap();
        let theta0: Vec<f64> = serde_json::from_value(summary["theta0"].clone()).unwrap();
        assert_eq!(theta0, levels[0].theta0, "{name}");
        for (l, level) in levels.iter().enumerate() {
            let cfg: gevp_core::evolver::EvolutionConfig =
                serde_json::from_value(summary["levels"][l]["config"].clone()).unwrap();
            assert_eq!(cfg, level.config, "{name} level {l}");
        }
    }
}
