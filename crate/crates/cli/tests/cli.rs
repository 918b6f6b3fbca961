//! Binary-level tests: artifact shapes, exit-code conventions and
//! byte-determinism of every subcommand.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ncwire(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncwire"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_behavior(dir: &Path, name: &str, make: &[&str]) -> std::path::PathBuf {
    let path = dir.join(name);
    let out = ncwire(&[&["behavior", "make"], make, &["-o", path.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn scenario_cycle_shape() {
    let out = ncwire(&["scenario", "cycle", "--n", "5"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["measurements"].as_array().unwrap().len(), 5);
    assert_eq!(doc["contexts"].as_array().unwrap().len(), 5);
    assert_eq!(doc["contexts"][4], serde_json::json!([4, 0]));
    assert_eq!(doc["outcomes"], serde_json::json!(["+1", "-1"]));
}

#[test]
fn behavior_make_flag_validation() {
    assert_eq!(code(&ncwire(&["behavior", "make", "pr", "--n", "4"])), 0);
    // f needs --alpha; pr must not accept it.
    let out = ncwire(&["behavior", "make", "f", "--n", "4"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let out = ncwire(&["behavior", "make", "pr", "--n", "4", "--alpha", "1/2"]);
    assert_eq!(code(&out), 2);
    let out = ncwire(&["behavior", "make", "b", "--n", "4", "--alpha", "1/2", "--gamma", "5/4"]);
    assert_eq!(code(&out), 2, "gamma outside [0, 1] is an input error");
}

#[test]
fn check_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let pr = write_behavior(dir.path(), "pr.json", &["pr", "--n", "4"]);
    let npr = write_behavior(dir.path(), "npr.json", &["npr", "--n", "4"]);

    let out = ncwire(&["check", "nd", pr.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["verdict"], "non-disturbing");

    let out = ncwire(&["check", "nc", pr.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "contextual");
    assert_eq!(doc["omega"], "4");
    assert_eq!(doc["facet_k"], 3);

    let out = ncwire(&["check", "nc", npr.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["verdict"], "noncontextual");

    // Breaking one context's table breaks non-disturbance.
    let mut doc: Value =
        serde_json::from_str(&std::fs::read_to_string(&pr).unwrap()).unwrap();
    doc["tables"]["0"] = serde_json::json!({
        "+1,+1": "1", "+1,-1": "0", "-1,+1": "0", "-1,-1": "0",
    });
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = ncwire(&["check", "nd", broken.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "disturbing");
    assert!(doc["detail"]["overlap"].is_array());

    let out = ncwire(&["check", "nd", "/nonexistent/behavior.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn omega_defaults_and_all_facets() {
    let dir = tempfile::tempdir().unwrap();
    let pr = write_behavior(dir.path(), "pr.json", &["pr", "--n", "4"]);
    let out = ncwire(&["omega", pr.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["omega"], "4");
    assert_eq!(doc["classical_bound"], "2");
    assert_eq!(doc["signs"], serde_json::json!([-1, 1, 1, 1]));

    let out = ncwire(&["omega", pr.to_str().unwrap(), "--all"]);
    let doc = stdout_json(&out);
    let facets = doc["facets"].as_array().unwrap();
    assert_eq!(facets.len(), 8);
    assert_eq!(facets[3]["omega"], "4");
}

#[test]
fn bounds_matches_the_library_and_rejects_bad_ranges() {
    let out = ncwire(&["bounds", "--n-min", "4", "--n-max", "6"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut expected = ncwire::bounds_csv(4, 6).unwrap();
    if !expected.ends_with('\n') {
        expected.push('\n');
    }
    assert_eq!(text, expected);
    assert!(text.lines().nth(1).unwrap().starts_with("4,2,2.8284271"));

    assert_eq!(code(&ncwire(&["bounds", "--n-min", "7", "--n-max", "4"])), 2);
}

#[test]
fn monotone_reports() {
    let dir = tempfile::tempdir().unwrap();
    let b = write_behavior(
        dir.path(),
        "b.json",
        &["b", "--n", "4", "--alpha", "1", "--gamma", "3/4"],
    );
    let out = ncwire(&["monotone", "momega", b.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["monotone"], "M_Omega");
    assert_eq!(doc["value"], "5/2");
    let out = ncwire(&["monotone", "mnpr", b.to_str().unwrap()]);
    let doc = stdout_json(&out);
    assert_eq!(doc["monotone"], "M_NPR");
    assert_eq!(doc["value"], "4");
    assert_eq!(doc["method"], "closed_form");
}

#[test]
fn convert_and_classify() {
    let dir = tempfile::tempdir().unwrap();
    let pr = write_behavior(dir.path(), "pr.json", &["pr", "--n", "4"]);
    let npr = write_behavior(dir.path(), "npr.json", &["npr", "--n", "4"]);

    let down = ncwire(&["convert", pr.to_str().unwrap(), npr.to_str().unwrap()]);
    assert_eq!(code(&down), 0);
    let doc = stdout_json(&down);
    assert_eq!(doc["verdict"], "convertible");
    assert!(doc["weights"].is_array());

    let up = ncwire(&["convert", npr.to_str().unwrap(), pr.to_str().unwrap()]);
    assert_eq!(code(&up), 1);
    assert_eq!(stdout_json(&up)["verdict"], "not-convertible");

    let out = ncwire(&["classify", pr.to_str().unwrap(), npr.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["relation"], "strictly_above");
}

#[test]
fn wirings_counts() {
    let out = ncwire(&["wirings", "enumerate", "--n", "3", "--count-only"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["count"], 272);
    let out = ncwire(&["wirings", "symmetries", "--n", "4", "--count-only"]);
    assert_eq!(stdout_json(&out)["count"], 128);
    let out = ncwire(&["wirings", "enumerate", "--n", "3"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["wirings"].as_array().unwrap().len(), 272);
    assert!(doc["wirings"][0]["h"].is_array());
}

#[test]
fn preorder_demo_arguments_and_determinism() {
    let first = ncwire(&[
        "preorder", "demo", "--property", "chain", "--n", "4", "--grid", "0,1/2,1",
    ]);
    assert_eq!(code(&first), 0);
    let doc = stdout_json(&first);
    assert_eq!(doc["property"], "chain");
    assert_eq!(doc["claims"].as_array().unwrap().len(), 6);
    let second = ncwire(&[
        "preorder", "demo", "--property", "chain", "--n", "4", "--grid", "0,1/2,1",
    ]);
    assert_eq!(first.stdout, second.stdout);

    let seeded = ncwire(&[
        "preorder", "demo", "--property", "locally-infinite", "--n", "4", "--seed", "7",
    ]);
    assert_eq!(code(&seeded), 0);
    let again = ncwire(&[
        "preorder", "demo", "--property", "locally-infinite", "--n", "4", "--seed", "7",
    ]);
    assert_eq!(seeded.stdout, again.stdout);
    let other = ncwire(&[
        "preorder", "demo", "--property", "locally-infinite", "--n", "4", "--seed", "8",
    ]);
    assert_ne!(seeded.stdout, other.stdout);

    // Grid only applies to chain and antichain; seed only to locally-infinite.
    let out = ncwire(&[
        "preorder", "demo", "--property", "not-total", "--n", "4", "--grid", "0,1",
    ]);
    assert_eq!(code(&out), 2);
    let out = ncwire(&["preorder", "demo", "--property", "chain", "--n", "4", "--seed", "1"]);
    assert_eq!(code(&out), 2);
    let out = ncwire(&["preorder", "demo", "--property", "chain", "--n", "4", "--grid", "1/2"]);
    assert_eq!(code(&out), 2, "a one-point grid is an input error");
}

#[test]
fn embed_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pr = write_behavior(dir.path(), "pr.json", &["pr", "--n", "4"]);
    let scenario = dir.path().join("pendant.json");
    std::fs::write(
        &scenario,
        serde_json::json!({
            "measurements": ["X0", "X1", "X2", "X3", "P"],
            "contexts": [[0, 1], [1, 2], [2, 3], [3, 0], [0, 4]],
            "outcomes": ["+1", "-1"],
        })
        .to_string(),
    )
    .unwrap();
    let embedded = dir.path().join("embedded.json");
    let out = ncwire(&[
        "embed",
        pr.to_str().unwrap(),
        scenario.to_str().unwrap(),
        "--cycle",
        "0,1,2,3",
        "-o",
        embedded.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let out = ncwire(&["check", "nd", embedded.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let out = ncwire(&["check", "nc", embedded.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "embedding preserves contextuality");

    let out = ncwire(&[
        "embed",
        pr.to_str().unwrap(),
        scenario.to_str().unwrap(),
        "--cycle",
        "0,1,2,4",
    ]);
    assert_eq!(code(&out), 2, "a non-cycle path is an input error");
}

#[test]
fn output_files_end_with_a_single_newline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.csv");
    let out = ncwire(&["bounds", "--n-min", "4", "--n-max", "5", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.ends_with('\n') && !text.ends_with("\n\n"));
}
