use assert_cmd::Command;
use predicates::prelude::*;

fn utm() -> Command {
    Command::cargo_bin("utm").unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, content).unwrap();
    p
}

const KG_ZERO: &str = r#"
schema = 1
tol = 1e-6

[system]
id = "klein-gordon"
alpha = 1.0

[[initial]]
kind = "zero"

[[initial]]
kind = "zero"

[[boundary]]
kind = "dirichlet"
component = 0
data = { kind = "zero" }

[grid]
x_max = 1.0
x_count = 3
t_max = 0.5
t_count = 3
"#;

#[test]
fn solve_zero_data_writes_zero_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "kg.toml", KG_ZERO);
    let out = dir.path().join("sol.csv");
    utm()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .assert()
        .success();
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x,t,re(q),im(q),re(p),im(p),error"
    );
    let mut rows = 0;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 7);
        for cell in &cells[2..6] {
            assert_eq!(cell.parse::<f64>().unwrap(), 0.0, "row: {line}");
        }
        rows += 1;
    }
    assert_eq!(rows, 9);
    assert!(!csv.contains('\r'));
}

#[test]
fn solve_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "kg.toml", KG_ZERO);
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        utm()
            .args(["solve", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .assert()
            .success();
    }
    assert_eq!(
        std::fs::read(&out1).unwrap(),
        std::fs::read(&out2).unwrap()
    );
}

#[test]
fn inspect_reports_symmetries_and_bc_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "kg.toml", KG_ZERO);
    let out = dir.path().join("report.txt");
    utm()
        .args(["inspect", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .assert()
        .success();
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.contains("symmetries: 2"), "{report}");
    assert!(report.contains("k -> (-1"), "{report}");
    assert!(
        report.contains("required boundary conditions: 1 (data component q)"),
        "{report}"
    );
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "bad.toml", "schema = 1\n[system\n");
    let out = dir.path().join("out.csv");
    utm()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .assert()
        .code(1)
        .stderr(predicate::str::contains("parse error"));
}

#[test]
fn wrong_schema_version_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "v9.toml", &KG_ZERO.replace("schema = 1", "schema = 9"));
    let out = dir.path().join("out.csv");
    utm()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .assert()
        .code(1)
        .stderr(predicate::str::contains("schema"));
}

#[test]
fn mode_mismatch_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "kg.toml", &format!("mode = \"inspect\"\n{KG_ZERO}"));
    let out = dir.path().join("out.csv");
    utm()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .assert()
        .code(1)
        .stderr(predicate::str::contains("mode"));
}

#[test]
fn unsupported_case_exits_two() {
    // the wave family only takes Neumann data at a = 0
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        &dir,
        "wave.toml",
        r#"
schema = 1
tol = 1e-6

[system]
id = "wave-family"
a = 1.0

[[initial]]
kind = "zero"

[[initial]]
kind = "zero"

[[boundary]]
kind = "neumann"
component = 0
data = { kind = "zero" }

[grid]
x_max = 1.0
x_count = 2
t_max = 0.5
t_count = 2
"#,
    );
    let out = dir.path().join("out.csv");
    utm()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("unsupported"));
}

#[test]
fn bad_worker_env_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "kg.toml", KG_ZERO);
    let out = dir.path().join("out.csv");
    utm()
        .env("UTM_WORKERS", "lots")
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .assert()
        .code(1)
        .stderr(predicate::str::contains("UTM_WORKERS"));
}

#[test]
fn verify_zero_data_agrees_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "kg.toml", KG_ZERO);
    let out = dir.path().join("sol.csv");
    utm()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .assert()
        .success();
    assert!(out.exists());
    assert!(dir.path().join("sol.oracle.csv").exists());
    let report = std::fs::read_to_string(dir.path().join("sol.report.txt")).unwrap();
    assert!(report.contains("verdict: agree"), "{report}");
}
