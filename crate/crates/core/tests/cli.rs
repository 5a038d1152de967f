use std::path::{Path, PathBuf};
use std::process::Output;

use padic_dynamics::cli::{self, Command, OutputFormat, Request};
use padic_dynamics::map::MapParams;
use padic_dynamics::map::DynamicsProfile;
use padic_dynamics::{sphere, Radius, Result};
use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_padic-dyn")).args(args).output().unwrap()
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> String {
    let path = dir.path().join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas/report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(report: &str) {
    let value: Value = serde_json::from_str(report).unwrap();
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(&value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn analyze_golden_config() {
    let cfg = configs().join("golden.json");
    let out = run(&["analyze", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = String::from_utf8(out.stdout).unwrap();
    assert_valid(&report);
    let v: Value = serde_json::from_str(&report).unwrap();
    let verdicts: Vec<&str> =
        v["radii"].as_array().unwrap().iter().map(|b| b["verdict"]["theoretical"].as_str().unwrap()).collect();
    assert_eq!(verdicts, ["ergodic", "not_ergodic", "not_ergodic", "not_ergodic", "not_ergodic"]);
    assert_eq!(v["profile"]["alpha"]["exponent"], 0);
    assert_eq!(v["profile"]["beta"]["exponent"], -1);
}

#[test]
fn every_subcommand_matches_the_schema() {
    for name in ["golden.json", "basin.json", "odd-prime.json"] {
        let cfg = configs().join(name);
        let cfg = cfg.to_str().unwrap();
        for sub in [&["ergodicity"][..], &["verify"], &["orbit", "--start", "2", "--steps", "25"]] {
            let mut args = sub.to_vec();
            args.extend(["--config", cfg, "--format", "json", "--max-level", "6"]);
            let out = run(&args);
            assert_eq!(out.status.code(), Some(0), "{name} {sub:?}: {}", stderr(&out));
            assert_valid(&String::from_utf8(out.stdout).unwrap());
        }
    }
}

#[test]
fn reports_are_byte_identical_and_reproducible_from_echo() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("basin.json");
    let first = dir.path().join("first.json");
    let args = |out: &Path| {
        vec![
            "analyze".to_string(),
            "--config".into(),
            cfg.to_str().unwrap().into(),
            "--format".into(),
            "json".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let a: Vec<String> = args(&first);
    assert_eq!(run(&a.iter().map(String::as_str).collect::<Vec<_>>()).status.code(), Some(0));
    let second = dir.path().join("second.json");
    let b: Vec<String> = args(&second);
    run(&b.iter().map(String::as_str).collect::<Vec<_>>());
    let first = std::fs::read(&first).unwrap();
    assert_eq!(first, std::fs::read(&second).unwrap());

    // The echoed config alone reproduces the report.
    let report: Value = serde_json::from_slice(&first).unwrap();
    let echo = write_config(&dir, &report["config"].to_string());
    let out = run(&["analyze", "--config", &echo, "--format", "json"]);
    assert_eq!(out.stdout, first);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"map": {"p": 4, "a": 0, "b": 1, "c": 1}, "seed": 1}"#, "p must be prime"),
        (r#"{"map": {"p": 2, "a": "1/2", "b": 1, "c": "1/2"}, "seed": 1}"#, "a != c"),
        (r#"{"map": {"p": 2, "a": 0, "b": 1, "c": 1}, "radii": [0], "seed": 1}"#, "not invariant"),
        (r#"{"map": {"p": 2, "a": 0, "b": 1, "c": 1}, "sed": 1}"#, "unknown field"),
        ("{\"map\": {\"p\": 2,\n \"a\": 0, \"b\": 1, \"c\": [1]}}", "line 2"),
        (r#"{"map": {"p": 2, "a": "1/0", "b": 1, "c": 1}}"#, "1/0"),
    ];
    for (body, needle) in cases {
        let cfg = write_config(&dir, body);
        let out = run(&["analyze", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(2), "{body}");
        assert!(stderr(&out).contains(needle), "{body}: {}", stderr(&out));
    }
}

#[test]
fn json_output_requires_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, r#"{"map": {"p": 2, "a": 0, "b": 1, "c": 1}}"#);
    assert_eq!(run(&["verify", "--config", &cfg, "--format", "json"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--config", &cfg, "--format", "json", "--seed", "4"]).status.code(), Some(0));
}

#[test]
fn missing_config_is_an_io_error() {
    let out = run(&["analyze", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn orbit_tables() {
    let cfg = configs().join("basin.json");
    let cfg = cfg.to_str().unwrap();
    let orbit = |start: &str, steps: &str| {
        let out = run(&["orbit", "--config", cfg, "--format", "json", "--start", start, "--steps", steps]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    // x0 = b/(c - a) = -1.
    let fixed = orbit("-1", "4");
    assert!(fixed["rows"].as_array().unwrap().iter().all(|r| r["value"] == "-1/1" && r["distance"]["exponent"] == "zero"));

    let basin = orbit("1", "20");
    let exps: Vec<i64> =
        basin["rows"].as_array().unwrap().iter().map(|r| r["distance"]["exponent"].as_i64().unwrap()).collect();
    assert_eq!(exps.len(), 21);
    assert!(exps.windows(2).all(|w| w[1] < w[0]), "{exps:?}");
    assert_eq!(&exps[..4], &[-1, -2, -4, -8]);

    let pole = orbit("0", "5");
    assert_eq!(pole["rows"].as_array().unwrap().len(), 1);
    assert_eq!(pole["pole_step"], 0);

    let too_long = run(&["orbit", "--config", cfg, "--start", "1", "--steps", "40"]);
    assert_eq!(too_long.status.code(), Some(2));
    let raised = run(&["orbit", "--config", cfg, "--start", "1", "--steps", "40", "--orbit-cap", "40"]);
    assert_eq!(raised.status.code(), Some(0), "{}", stderr(&raised));
}

#[test]
fn text_output_is_readable() {
    let cfg = configs().join("golden.json");
    let out = run(&["analyze", "--config", cfg.to_str().unwrap(), "--max-level", "6"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("f(x) = (x^2 + (0)x + (1))/(x + (1)) over Q_2"), "{text}");
    assert!(text.contains("witness ball U_2^0(5/4) measure 1/2"), "{text}");
    assert!(text.contains("rho-table              pass"), "{text}");
}

fn mutated_rho(p: &DynamicsProfile, m: &MapParams, l: i64) -> Result<Radius> {
    Ok(sphere::rho(p, m, l)?.times(Radius::Power(-1)))
}

#[test]
fn mutated_rho_table_fails_verify() {
    let mut req = Request::new(Command::Verify, configs().join("golden.json"), OutputFormat::Json);
    req.rho = mutated_rho;
    let outcome = cli::execute(&req).unwrap();
    assert_eq!(outcome.exit_code(), 3);
    let v: Value = serde_json::from_str(&outcome.output).unwrap();
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["passed"] != s["cases"])
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["rho-table"]);
}
