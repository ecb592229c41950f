use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn config(name: &str) -> String {
    crate_dir().join("configs").join(name).display().to_string()
}

fn ontic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontic"))
        .args(args)
        .env_remove("ONTIC_CONFIG_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(crate_dir().join("schema/report.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(report: &str) -> Value {
    let v: Value = serde_json::from_str(report).unwrap();
    let errors: Vec<String> = validator().iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}");
    v
}

#[test]
fn exit_codes() {
    assert_eq!(ontic(&["paper-cases"]).status.code(), Some(0));
    assert_eq!(
        ontic(&["verify", &config("cases_born.toml")]).status.code(),
        Some(0)
    );
    assert_eq!(
        ontic(&["verify", &config("wrong_density.toml")])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ontic(&["verify", &config("empty.toml")]).status.code(),
        Some(0)
    );
    assert_eq!(
        ontic(&["verify", "no-such-file.toml"]).status.code(),
        Some(2)
    );
    assert_eq!(
        ontic(&["--format", "yaml", "paper-cases"]).status.code(),
        Some(2)
    );
    assert_eq!(ontic(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "[[checks]]\nkind = \"iota_image\"\nstate = \"A\"\nexpect = \"nowhere\"\n",
    )
    .unwrap();
    let o = ontic(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(
        err.contains("checks[0].expect") && err.contains("nowhere"),
        "{err}"
    );

    std::fs::write(&path, "seed = \"seven\"\n").unwrap();
    let o = ontic(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn empty_checks_give_an_empty_report() {
    let o = ontic(&["--format", "json", "verify", &config("empty.toml")]);
    let v = assert_valid(&stdout(&o));
    assert_eq!(v["records"].as_array().unwrap().len(), 0);
    assert_eq!(v["summary"]["total"], 0);
    assert_eq!(v["seed"], 1);
}

#[test]
fn reports_validate_against_schema() {
    for args in [
        vec!["--format", "json", "paper-cases"],
        vec!["--format", "json", "verify", &config("tour.toml")],
        vec!["--format", "json", "verify", &config("wrong_density.toml")],
    ] {
        let o = ontic(&args);
        let v = assert_valid(&stdout(&o));
        let records = v["records"].as_array().unwrap();
        let passed = records.iter().filter(|r| r["passed"] == true).count();
        assert_eq!(v["summary"]["passed"], passed);
        assert_eq!(v["summary"]["failed"], records.len() - passed);
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let bad = serde_json::json!({
        "format_version": "1.0", "command": "verify", "seed": 0,
        "records": [{ "id": "x", "kind": "hs_overlap", "inputs": {}, "values": {}, "passed": "yes", "tolerance": null }],
        "summary": { "passed": 0, "failed": 1, "total": 1 }
    });
    assert!(!validator().is_valid(&bad));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["--format", "json", "paper-cases"],
        vec!["--format", "csv", "verify", &config("tour.toml")],
        vec![
            "--format",
            "json",
            "--seed",
            "9",
            "verify",
            &config("tour.toml"),
        ],
        vec!["sweep", "z+", "x+", "--steps", "7", "--samples", "20"],
    ] {
        let (a, b) = (ontic(&args), ontic(&args));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let o = ontic(&[
        "--format",
        "json",
        "--seed",
        "5",
        "verify",
        &config("tour.toml"),
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 5);
    let o = ontic(&["--format", "json", "verify", &config("tour.toml")]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 2024);
}

#[test]
fn tol_flag_tightens_unset_tolerances() {
    // 1e-6 is met by quadrature, 1e-12 is not.
    let o = ontic(&["--tol", "1e-12", "verify", &config("cases_born.toml")]);
    assert_eq!(o.status.code(), Some(0), "the check pins its own tolerance");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(
        &path,
        "[[checks]]\nkind = \"born_consistency\"\npairs = [{ epistemic = \"C\" }]\nmeasurements = [\"x\"]\n",
    )
    .unwrap();
    assert_eq!(
        ontic(&["verify", path.to_str().unwrap()]).status.code(),
        Some(0)
    );
    assert_eq!(
        ontic(&["--tol", "1e-12", "verify", path.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn config_dir_env_resolves_relative_paths() {
    let o = Command::new(env!("CARGO_BIN_EXE_ontic"))
        .args(["verify", "empty.toml"])
        .env("ONTIC_CONFIG_DIR", crate_dir().join("configs"))
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap();
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn binary_entropy(p: f64) -> f64 {
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

#[test]
fn sweep_z_x_three_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = ontic(&[
        "sweep",
        "z+",
        "x+",
        "--steps",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let (header, rows) = parse_csv(&text);
    assert_eq!(
        header,
        [
            "p1",
            "bloch_x",
            "bloch_y",
            "bloch_z",
            "eigen_axis_theta",
            "eigen_axis_phi",
            "degenerate_flag",
            "vn_entropy_bits",
            "min_context_entropy_bits"
        ]
    );
    let p1: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(p1, [0.0, 0.5, 1.0]);
    let vn: f64 = rows[1][7].parse().unwrap();
    let oracle = binary_entropy((1.0 + 0.5f64.sqrt()) / 2.0);
    assert!((vn - oracle).abs() < 1e-9);
    assert!((vn - 0.6009).abs() < 5e-4);
    // Polar angle of the midpoint axis is π/4.
    let theta: f64 = rows[1][4].parse().unwrap();
    assert!((theta - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
}

#[test]
fn sweep_antipodal_midpoint() {
    let o = ontic(&["sweep", "z+", "z-", "--steps", "3", "--out", "-"]);
    let (_, rows) = parse_csv(&stdout(&o));
    let mid = &rows[1];
    assert_eq!(mid[0], "0.5");
    assert_eq!(mid[6], "1");
    assert!(mid[4].is_empty() && mid[5].is_empty());
    assert!((mid[7].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn sweep_identical_preparations() {
    let o = ontic(&["sweep", "x+", "x+", "--steps", "5"]);
    let (_, rows) = parse_csv(&stdout(&o));
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[7] == rows[0][7]));
}

#[test]
fn sweep_uses_config_preparations() {
    let o = ontic(&[
        "sweep",
        "tilted",
        "half",
        "--steps",
        "4",
        "--config",
        &config("tour.toml"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);
    assert_eq!(
        ontic(&["sweep", "tilted", "half", "--steps", "4"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn table_output_lists_each_record() {
    let o = ontic(&["verify", &config("tour.toml")]);
    let text = stdout(&o);
    for id in ["born", "rings-differ", "isoentropic", "drift"] {
        assert!(text.contains(&format!("[PASS] {id} (")), "{id}");
    }
    assert!(Path::new(&config("tour.toml")).exists());
}
