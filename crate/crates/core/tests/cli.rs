//! Command-line behaviour driven through `main_with`, so no process spawning.

use std::fs;
use std::path::{Path, PathBuf};

use membrane_nets::cli::{main_with, EXIT_BUDGET, EXIT_INPUT, EXIT_OK, EXIT_VIOLATED};
use membrane_nets::dsl;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

/// Runs the CLI and returns (exit code, stdout, stderr).
fn mnets(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mnets").chain(args.iter().copied());
    let code = main_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn run_prints_the_reference_trace() {
    let (code, out, _) = mnets(&["run", &fixture("two_membrane.tps"), "--steps", "3"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("via {r1 r2^2}"), "{out}");
    assert!(out.contains("a^3"), "{out}");
}

#[test]
fn json_reports_are_byte_identical() {
    let args = ["run", &fixture("two_membrane.tps"), "--steps", "4", "--format", "json"];
    let (c1, a, _) = mnets(&args);
    let (c2, b, _) = mnets(&args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(a, b);
    let report = json(&a);
    assert_eq!(report["kind"], "psystem");
    assert_eq!(report["model_hash"].as_str().unwrap().len(), 64);
    assert!(report.get("elapsed_ms").is_none());

    let seeded = ["run", &fixture("branching.tpn"), "--policy", "seed=7", "--format", "json"];
    assert_eq!(mnets(&seeded).1, mnets(&seeded).1);
    let timed = mnets(&["run", &fixture("branching.tpn"), "--format", "json", "--timing"]).1;
    assert!(json(&timed)["elapsed_ms"].is_number());
}

#[test]
fn zero_steps_reports_only_the_initial_state() {
    let (code, out, _) = mnets(&["run", &fixture("two_membrane.tpn"), "--steps", "0", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let report = json(&out);
    assert_eq!(report["steps"], 0);
    assert_eq!(report["trace"].as_array().unwrap().len(), 1);
}

#[test]
fn exhaustive_run_lists_both_branches() {
    for file in ["branching.tps", "branching.tpn"] {
        let (code, out, _) =
            mnets(&["run", &fixture(file), "--policy", "exhaustive", "--steps", "1", "--format", "json"]);
        assert_eq!(code, EXIT_OK);
        let report = json(&out);
        assert_eq!(report["levels"][1]["states"].as_array().unwrap().len(), 2, "{file}");
        assert_eq!(report["states_explored"], 3);
    }
}

#[test]
fn budget_overrun_exits_three() {
    let (code, _, err) =
        mnets(&["run", &fixture("branching.tps"), "--policy", "exhaustive", "--steps", "3", "--budget", "1"]);
    assert_eq!(code, EXIT_BUDGET);
    assert!(err.contains("budget"), "{err}");
    let (code, _, _) = mnets(&["verify", &fixture("branching.tps"), "--prop", "1", "--budget", "1"]);
    assert_eq!(code, EXIT_BUDGET);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.tps");
    fs::write(&broken, "psystem { alphabet a; membrane 1 { rule r: a -> (a, nowhere); } }").unwrap();
    let (code, _, err) = mnets(&["run", broken.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("1:"), "{err}");

    assert_eq!(mnets(&["run", "/no/such/file.tps"]).0, EXIT_INPUT);
    assert_eq!(mnets(&["run", &fixture("branching.tps"), "--policy", "sometimes"]).0, EXIT_INPUT);
    assert_eq!(mnets(&["translate", &fixture("two_membrane.tpn"), "--to", "ps"]).0, EXIT_INPUT);
    assert_eq!(mnets(&["verify", "--prop", "4"]).0, EXIT_INPUT);
    assert_eq!(mnets(&["frobnicate"]).0, EXIT_INPUT);
}

#[test]
fn fmt_check_flags_non_canonical_text() {
    assert_eq!(mnets(&["fmt", "--check", &fixture("two_membrane.tps")]).0, EXIT_OK);
    assert_eq!(mnets(&["fmt", "--check", &fixture("commented.tps")]).0, EXIT_VIOLATED);
    let (code, out, _) = mnets(&["fmt", &fixture("commented.tps")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, fs::read_to_string(fixture("two_membrane.tps")).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.tps");
    let (code, _, _) = mnets(&["fmt", &fixture("commented.tps"), "-o", target.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(fs::read_to_string(target).unwrap(), out);
}

fn translated(dir: &Path, file: &str, to: &str) -> (PathBuf, serde_json::Value) {
    let output = dir.join(format!("{file}.{to}"));
    let (code, _, err) = mnets(&["translate", &fixture(file), "--to", to, "-o", output.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let map = fs::read_to_string(format!("{}.map.json", output.display())).unwrap();
    (output, json(&map))
}

#[test]
fn translations_parse_and_come_with_maps() {
    let dir = tempfile::tempdir().unwrap();
    let (ps, map) = translated(dir.path(), "two_membrane.tps", "ps");
    let sys = dsl::parse_psystem(&fs::read_to_string(ps).unwrap()).unwrap();
    assert!(sys.rules().iter().all(|r| r.delay == 0));
    assert!(map.is_object());

    let (tpn, _) = translated(dir.path(), "two_membrane.tps", "tpn");
    let net = dsl::parse_petri(&fs::read_to_string(tpn).unwrap()).unwrap();
    assert_eq!(net, membrane_nets::samples::two_membrane_net());

    for file in ["two_membrane.tps", "two_membrane.tpn"] {
        let (pn, map) = translated(dir.path(), file, "pn");
        let net = dsl::parse_petri(&fs::read_to_string(pn).unwrap()).unwrap();
        assert!(net.transitions().iter().all(|t| t.delay == 0));
        assert!(map.is_object());
    }

    let (code, out, _) = mnets(&["translate", &fixture("two_membrane.tpn"), "--to", "pn"]);
    assert_eq!(code, EXIT_OK);
    assert!(dsl::parse_petri(&out).is_ok());
}

#[test]
fn export_writes_dot_and_json() {
    let (code, out, _) = mnets(&["export", &fixture("two_membrane.tpn"), "--dot", "-"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("digraph"), "{out}");
    assert!(out.contains("->"));

    let (code, out, _) = mnets(&["export", &fixture("empty.tpn"), "--dot", "-"]);
    assert_eq!(code, EXIT_OK);
    assert!(!out.contains("->"), "{out}");

    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("model.json");
    let (code, _, _) = mnets(&["export", &fixture("two_membrane.tps"), "--json", target.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    // The JSON form is accepted back as input.
    let (code, out, _) = mnets(&["fmt", target.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, fs::read_to_string(fixture("two_membrane.tps")).unwrap());
}

#[test]
fn verify_reports_verdicts() {
    for prop in ["1", "3"] {
        let (code, out, _) = mnets(&["verify", &fixture("two_membrane.tps"), "--prop", prop, "--depth", "4"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("\"ok\": true") || out.contains("\"ok\":true"), "{out}");
    }
    let (code, _, _) = mnets(&["verify", &fixture("two_membrane.tpn"), "--prop", "2"]);
    assert_eq!(code, EXIT_OK);
    let (code, out, _) = mnets(&["verify", "--prop", "2", "--seed", "3", "--count", "5", "--depth", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.matches("\"property\"").count(), 5, "{out}");
}
