use std::path::PathBuf;
use std::process::{Command, Output};

use sgen2_cli::{CliError, InstanceConfig};
use sgen2_core::Error;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sgen2"))
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sgen2-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn sgen2(args: &[&str], config: Option<&PathBuf>) -> Output {
    let mut c = bin();
    c.args(args);
    if let Some(p) = config {
        c.arg("--config").arg(p);
    }
    c.output().unwrap()
}

const DYADIC: &str = r#"{"field": {"poly": [0, 1]}, "S": [{"p": 2}], "verify": {"witness_samples": 10}}"#;

#[test]
fn analyze_succeeds_and_echoes_instance() {
    let cfg = write_config("dyadic.json", DYADIC);
    let out = sgen2(&["analyze"], Some(&cfg));
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["instance"]["S"][0]["p"], 2);
    assert_eq!(v["analysis"]["card_s"], 2);
    assert!(v.get("triple").is_none());
    assert!(v.get("timings").is_none());
}

#[test]
fn verify_is_byte_identical() {
    let cfg = write_config("dyadic-det.json", DYADIC);
    let a = sgen2(&["verify"], Some(&cfg));
    let b = sgen2(&["verify"], Some(&cfg));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["verification"]["overall"], true);
    assert_eq!(v["triple"]["gamma"][0][0][0], "1/2");
}

#[test]
fn overrides_and_out_file() {
    let cfg = write_config("dyadic-over.json", DYADIC);
    let out_path = cfg.with_extension("report.json");
    let out = sgen2(&["verify", "--h", "2", "--N", "3", "--out", out_path.to_str().unwrap()], Some(&cfg));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["instance"]["h"], 2);
    assert_eq!(v["instance"]["N"], 3);
    assert_eq!(v["triple"]["alpha"][0], "1/4");
    assert_eq!(v["verification"]["overall"], true);
}

#[test]
fn examples_command() {
    let out = sgen2(&["examples"], None);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ex = v["examples"].as_array().unwrap();
    assert_eq!(ex.len(), 2);
    assert!(ex.iter().all(|e| e["pass"] == true));
    assert_eq!(ex[0]["observed"]["case"], "2");
    assert_eq!(ex[1]["observed"]["case"], "1");
}

#[test]
fn too_few_places_exits_two() {
    let cfg = write_config("inf.json", r#"{"field": {"poly": [1, 0, 1]}, "S": []}"#);
    assert_eq!(sgen2(&["analyze"], Some(&cfg)).status.code(), Some(2));
}

#[test]
fn config_errors_exit_one() {
    let cases = [
        ("bad-json.json", "{"),
        ("unknown.json", r#"{"field": {"poly": [0, 1]}, "S": [], "extra": 1}"#),
        ("reducible.json", r#"{"field": {"poly": [-4, 0, 1]}, "S": [{"p": 2}]}"#),
        ("not-monic.json", r#"{"field": {"poly": [1, 0, 2]}, "S": [{"p": 2}]}"#),
        ("composite.json", r#"{"field": {"poly": [1, 0, 1]}, "S": [{"p": 6}]}"#),
        ("index.json", r#"{"field": {"poly": [1, 0, 1]}, "S": [{"p": 5, "select": {"index": 2}}]}"#),
        ("zero-h.json", r#"{"field": {"poly": [0, 1]}, "S": [{"p": 2}], "h": 0}"#),
        ("zero-n.json", r#"{"field": {"poly": [0, 1]}, "S": [{"p": 2}], "N": 0}"#),
        ("cubic.json", r#"{"field": {"poly": [-2, 0, 0, 1]}, "S": [{"p": 2}]}"#),
    ];
    for (name, body) in cases {
        let cfg = write_config(name, body);
        assert_eq!(sgen2(&["analyze"], Some(&cfg)).status.code(), Some(1), "{name}");
    }
    assert_eq!(sgen2(&["analyze"], None).status.code(), Some(1));
}

#[test]
fn select_by_generator() {
    let cfg = InstanceConfig::from_json(
        r#"{"field": {"poly": [-2, 0, 1]}, "S": [{"p": 7, "select": {"generator": ["3", "1"]}}]}"#,
    )
    .unwrap();
    let k = cfg.build_field().unwrap();
    let s = cfg.resolve_s(&k).unwrap();
    assert_eq!(s.finite.len(), 1);
    let all = InstanceConfig::from_json(r#"{"field": {"poly": [-2, 0, 1]}, "S": [{"p": 7}]}"#).unwrap();
    assert_eq!(all.resolve_s(&k).unwrap().finite.len(), 2);
    let both = InstanceConfig::from_json(r#"{"field": {"poly": [-2, 0, 1]}, "S": [{"p": 7, "select": {"generator": ["7", "0"]}}]}"#)
        .unwrap();
    assert!(matches!(both.resolve_s(&k), Err(CliError::Config(_))));
}

#[test]
fn exit_code_table() {
    assert_eq!(CliError::Core(Error::HypothesisFails("x".into())).exit_code(), 2);
    assert_eq!(CliError::Core(Error::NotStabilized(12)).exit_code(), 2);
    assert_eq!(CliError::Core(Error::SearchExhausted(32)).exit_code(), 2);
    assert_eq!(CliError::Core(Error::IdentityFailed("x".into())).exit_code(), 3);
    assert_eq!(CliError::Core(Error::DatasheetInvalid("x".into())).exit_code(), 1);
}
