use std::process::{Command, Output};

use serde_json::Value;

fn bdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdp"))
        .args(args)
        .output()
        .expect("bdp runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_gallery_chains() {
    let out = bdp(&["classify", "--chain", "exit-geometric"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["report"]["class"], "Exit");
    let v = json(&bdp(&["classify", "--chain", "unit"]));
    assert_eq!(v["report"]["class"], "Natural");
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"gallery\": ").unwrap();
    let out = bdp(&["classify", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    std::fs::write(&p, r#"{"gallery": "unit", "colour": 3}"#).unwrap();
    assert_eq!(
        bdp(&["classify", "--config", p.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bdp(&["classify", "--chain", "no-such-chain"]).status.code(),
        Some(2)
    );
}

#[test]
fn config_file_supplies_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("run.json");
    std::fs::write(
        &p,
        r#"{"chain": {"family": "constant", "a": {"value": 1.0}, "b": {"value": 1.0}, "description": "unit"},
            "i": 0, "n": 2, "s_grid": [1.0]}"#,
    )
    .unwrap();
    let out = bdp(&["hitting", "--config", p.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert!((v["transform"][0]["value"].as_f64().unwrap() - 0.2).abs() < 1e-12);
}

#[test]
fn unit_hitting_transform() {
    let out = bdp(&[
        "hitting", "--chain", "unit", "--i", "0", "--n", "2", "--s", "1", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,value,lower,upper"));
    let value: f64 = lines
        .next()
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 0.2).abs() < 1e-12);
}

#[test]
fn hitting_cases_by_boundary() {
    let v = json(&bdp(&[
        "hitting",
        "--chain",
        "exit-geometric",
        "--i",
        "0",
        "--n",
        "inf",
    ]));
    let b = &v["transform"][0];
    assert!(b["lower"].as_f64().unwrap() <= b["upper"].as_f64().unwrap());
    assert_eq!(v["law"]["provenance"]["case"], "lifetime_exit");
    let v = json(&bdp(&[
        "hitting",
        "--chain",
        "entrance-geometric",
        "--i",
        "inf",
        "--n",
        "0",
    ]));
    assert_eq!(v["law"]["provenance"]["case"], "down_entrance");
    // a life time on an entrance chain is a boundary mismatch
    let out = bdp(&[
        "hitting",
        "--chain",
        "entrance-geometric",
        "--i",
        "0",
        "--n",
        "inf",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sst_on_natural_chain_is_refused() {
    let out = bdp(&["sst", "--chain", "unit"]);
    assert_eq!(out.status.code(), Some(4));
    let v = json(&out);
    assert_eq!(v["classification"]["class"], "Natural");
}

#[test]
fn sst_checks_pass_on_entrance_chain() {
    let out = bdp(&["sst", "--chain", "entrance-geometric"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
}

#[test]
fn out_directory_receives_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("reports");
    let out = bdp(&[
        "hitting",
        "--chain",
        "unit",
        "--i",
        "0",
        "--n",
        "3",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for f in ["hitting.json", "hitting.csv", "hitting_density.csv"] {
        assert!(d.join(f).is_file(), "{f}");
    }
}

#[test]
fn simulate_is_reproducible_and_stores_samples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.bin");
    let args = [
        "simulate",
        "--chain",
        "unit",
        "--i",
        "0",
        "--n",
        "3",
        "--samples",
        "2000",
        "--seed",
        "5",
    ];
    let a = json(&bdp(&args));
    let b = json(&bdp(&[
        &args[..],
        &["--threads", "1", "--store", p.to_str().unwrap()],
    ]
    .concat()));
    assert_eq!(a["mean"], b["mean"]);
    let stored = bdp_core::simulate::read_samples(&p).unwrap();
    assert_eq!(stored.sample.values.len(), 2000);
    assert_eq!(stored.sample.seed, 5);
}
