use std::path::Path;
use std::process::Command;

use sociable::config::load_config;
use sociable::{Protocol, Scenario, Simulator};

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sociable"))
}

#[test]
fn example_config_loads() {
    let c = load_config(fixture("example.toml")).unwrap();
    assert_eq!(c.protocol, Protocol::Flooding);
    assert_eq!(c.vehicle_count, 754);
    assert_eq!(c.bs_positions.len(), 2);
    assert_eq!(c.seed, 42);
}

#[test]
fn sample_trace_runs() {
    let c = sociable::ScenarioConfig {
        trace: Some(fixture("trace.csv")),
        duration: 20.0,
        event_location: sociable::Point::new(100.0, 0.0),
        event_start: 1.0,
        event_duration: 15.0,
        bs_positions: vec![sociable::Point::new(300.0, 0.0)],
        relationship_rate: 1.0,
        ..Default::default()
    };
    let sc = Scenario::from_config(&c).unwrap();
    assert_eq!(sc.trace.len(), 3);
    let r = Simulator::new(&sc).run().unwrap();
    assert!(r.totals.ngm > 0);
    assert!(r.totals.ndm > 0);
}

#[test]
fn validate_prints_resolved_config() {
    let out = bin().args(["validate", "--preset", "hd", "--seed", "9"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let back = sociable::ScenarioConfig::from_toml_str(&text).unwrap();
    assert_eq!(back.seed, 9);
    assert_eq!(back.vehicle_count, 754);
}

#[test]
fn invalid_config_exits_nonzero_naming_field() {
    let out = bin().args(["validate", "--relationship-rate", "1.5"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("relationship_rate"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "colour = \"red\"\n").unwrap();
    let out = bin().args(["validate", "--config"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn compare_and_sweep_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--duration", "60", "--event-start", "5", "--event-duration", "50", "--vehicle-count", "20"];
    let out = bin()
        .arg("compare")
        .args(common)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("EPO reduction"));
    for name in ["sociable.csv", "flooding.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.starts_with("bucket_start_s,ncv,ngm,ndm,epo,add_ms\n"));
        assert_eq!(text.lines().count(), 7);
    }

    let sweep = dir.path().join("sweep.csv");
    let out = bin()
        .arg("sweep")
        .args(common)
        .args(["--values", "0.2,0.8", "--out"])
        .arg(&sweep)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&sweep).unwrap();
    assert_eq!(text.lines().next(), Some("w_ec,add_ms,ndm"));
    assert_eq!(text.lines().count(), 3);

    let out = bin().arg("sweep").args(common).args(["--values", "1.5"]).output().unwrap();
    assert!(!out.status.success());
}
