use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fx(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logtrop")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str, text: &str) -> String {
    let p = std::env::temp_dir().join(format!("logtrop-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// Every entry of `fixtures/expected.json`: command, exit code, values at
/// JSON pointers and array lengths.
#[test]
fn fixture_manifest() {
    let text = std::fs::read_to_string(fx("expected.json")).unwrap();
    let manifest: Value = serde_json::from_str(&text).unwrap();
    for case in manifest["fixtures"].as_array().unwrap() {
        let name = case["name"].as_str().unwrap();
        let args: Vec<String> = case["args"]
            .as_array()
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, a)| if i == 0 { a.as_str().unwrap().to_string() } else { fx(a.as_str().unwrap()) })
            .collect();
        let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(out.status.code(), case["exit"].as_i64().map(|c| c as i32), "{name}");
        let report = json(&out);
        for (pointer, want) in case["values"].as_object().unwrap() {
            assert_eq!(report.pointer(pointer), Some(want), "{name}: {pointer}");
        }
        if let Some(lengths) = case.get("lengths") {
            for (pointer, want) in lengths.as_object().unwrap() {
                let got = report.pointer(pointer).and_then(Value::as_array).map(Vec::len);
                assert_eq!(got, want.as_u64().map(|n| n as usize), "{name}: length of {pointer}");
            }
        }
    }
}

#[test]
fn exit_codes() {
    let unknown = scratch("unknown.json", r#"{"schema_version": 1, "cells": [], "face_maps": [], "extra": 1}"#);
    let out = run(&["validate-complex", &unknown]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));

    let version = scratch("version.json", r#"{"schema_version": 2, "cells": [], "face_maps": []}"#);
    assert_eq!(run(&["validate-complex", &version]).status.code(), Some(2));

    let out = run(&["enhance-count", &fx("transverse/elliptic.json")]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["verdict"], "refused");

    let out = run(&["enhance-count", &fx("transverse/unbalanced.json")]);
    assert!(out.status.success());
    assert_eq!(json(&out)["verdict"], "not-prelog");
    assert_eq!(json(&out)["issues"][0]["problem"], "unbalanced");

    // multiplicity is defined for rigid types only
    let out = run(&["multiplicity", &fx("interval/complex.json"), &fx("interval/contracted_edge.json")]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["validate-map", &fx("interval/complex.json"), &fx("interval/bad_map.json")]);
    assert!(out.status.success());
    assert_eq!(json(&out)["violation"]["kind"], "edge-segment");
}

#[test]
fn output_is_deterministic() {
    let args = ["decompose", &fx("simplex/complex.json"), &fx("simplex/ledger.json")];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let args = ["enumerate", &fx("f2/complex.json"), &fx("f2/class.json")];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn formats_and_flags() {
    let out = run(&["decompose", &fx("simplex/complex.json"), &fx("simplex/ledger.json"), "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "total\t12"));

    let v = json(&run(&["enhance-count", &fx("transverse/cubic.json"), "--explain"]));
    let lines: Vec<&str> = v["explain"].as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
    assert!(lines.contains(&"b = 3"));
    assert!(lines.contains(&"|G| = 3 (enumeration)"));

    let v = json(&run(&["enumerate", &fx("f2/complex.json"), &fx("f2/class.json"), "--max-vertices", "2"]));
    assert_eq!(v["caps"]["max_vertices"], 2);
    assert!(v["rigid"].as_array().unwrap().is_empty());
}
