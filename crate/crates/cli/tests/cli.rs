//! End-to-end behaviour of the command line: exit codes, documented
//! examples, presets and byte-stable output.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn repo(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel).to_string_lossy().into_owned()
}

/// Runs in-process; returns (exit code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("hyperval").chain(args.iter().copied());
    let code = hyperval_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let (code, out, err) = run(&all);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: stdout {out:?}, stderr {err:?}"));
    (code, v)
}

#[test]
fn bounds_for_the_wild_quadratic() {
    let (code, v) = run_json(&["bounds", "--field", &repo("fields/q2sqrt2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["m_p1"], "3/2");
    assert_eq!(v["m_conjugates"], "3/2");
    assert_eq!(v["flagged"], true);
    assert_eq!(v["n_min_conservative"], 13);
}

#[test]
fn axioms_pass_on_q5() {
    let (code, v) = run_json(&["hf", "axioms", "--field", &repo("fields/q5.json"), "--n", "1", "--window", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["all_pass"], true);
    for side in ["hyperfield", "valued"] {
        let results = v[side]["results"].as_array().unwrap();
        assert!(!results.is_empty());
        assert!(results.iter().all(|r| r["status"] == "pass" && r["witness"].is_null()));
    }
}

#[test]
fn class_and_sum_rendering() {
    let q5 = repo("fields/q5.json");
    let (code, v) = run_json(&["hf", "class", "--field", &q5, "--n", "2", "--elem", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["render"], "pi^1 * (2)");
    let (code, v) = run_json(&["hf", "add", "--field", &q5, "--n", "1", "--a", "1", "--b", "-1"]);
    assert_eq!(code, 0);
    assert_eq!(v["contains_zero"], true);
    assert_eq!(v["radius"], 1);
    assert!(v["sum"].as_str().unwrap().starts_with("Ball("));
}

#[test]
fn expansions_and_gauss() {
    let (code, v) = run_json(&["expand", "--field", &repo("fields/q5.json"), "--elem", "10", "--level", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["digits"], serde_json::json!(["0", "2"]));
    let (code, v) = run_json(&["gauss", "expand", "--p", "2", "--level", "1", "--elem", "(1)/(1+t)"]);
    assert_eq!(code, 0);
    assert_eq!(v["reassembles"], true);
    let (_, v) = run_json(&["gauss", "independent", "--p", "3", "--elem", "t^3"]);
    assert_eq!(v["p_independent"], false);
}

#[test]
fn hom_search_and_lift() {
    let (a, b, c) = (repo("fields/q5sqrt5.json"), repo("fields/q5sqrt20.json"), repo("fields/q5sqrt10.json"));
    let (code, v) = run_json(&["hom", "search", "--src", &a, "--dst", &b, "--n", "1", "--isos", "--lift"]);
    assert_eq!(code, 0);
    let maps = v.as_array().unwrap();
    assert!(!maps.is_empty());
    assert!(maps.iter().all(|m| m["lift"]["method"] == "tame" && m["lift"]["pi_image"].is_string()));
    let (code, v) = run_json(&["hom", "search", "--src", &a, "--dst", &c, "--n", "1", "--isos"]);
    assert_eq!(code, 0);
    assert_eq!(v, serde_json::json!([]));

    let spec = std::env::temp_dir().join(format!("hyperval-spec-{}.json", std::process::id()));
    std::fs::write(&spec, maps[0].to_string()).unwrap();
    let path = spec.to_string_lossy().into_owned();
    let (code, v) = run_json(&["hom", "check", "--spec", &path]);
    assert_eq!((code, &v["all_pass"]), (0, &Value::Bool(true)));
    let (code, v) = run_json(&["hom", "lift", "--spec", &path]);
    assert_eq!(code, 0);
    assert_eq!(v["pi_image"], maps[0]["lift"]["pi_image"]);
    std::fs::remove_file(spec).unwrap();
}

#[test]
fn krasner_quotient_reports_a_failed_check() {
    let (code, v) = run_json(&["hom", "krasner", "--field", &repo("fields/q2.json")]);
    assert_eq!(code, 2);
    let conds = v["report"]["conditions"].as_array().unwrap();
    assert_eq!(conds[3]["condition"], 4);
    assert_eq!(conds[3]["status"], "fail");
    assert!(conds[3]["witness"].is_string());
}

#[test]
fn logic_commands() {
    let (code, out, _) = run(&["logic", "translate", "--p", "2", "--e", "1", "--n", "2", "--sentence", "x | y"]);
    assert_eq!((code, out.trim()), (0, "nu(x) <= nu(y)"));
    let (code, _, err) = run(&["logic", "translate", "--p", "4", "--e", "1", "--n", "2", "--sentence", "x | y"]);
    assert_eq!(code, 2);
    assert!(err.contains("not prime"));
    let sqrt5 = repo("fields/q5sqrt5.json");
    let s = "exists x. x*x = phat";
    let (code, v) = run_json(&["logic", "eval", "--model", &sqrt5, "--side", "vhf", "--radius", "6", "--sentence", s]);
    assert_eq!(code, 0);
    assert_eq!(v["outcome"]["result"], "true");
    let q5 = repo("fields/q5.json");
    let (_, v) =
        run_json(&["logic", "eval", "--model", &q5, "--side", "val", "--translate", "--radius", "6", "--sentence", s]);
    assert_eq!(v["outcome"], serde_json::json!({ "result": "false_within_radius", "radius": 6 }));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["frobnicate"]).0, 64);
    assert_eq!(run(&["bounds"]).0, 64);
    let (code, _, err) = run(&["bounds", "--field", "/nonexistent/field.json"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
    assert_eq!(run(&["expand", "--field", &repo("fields/q5.json"), "--elem", "1/5", "--level", "1"]).0, 2);
    // p^l = 27 exceeds the Gauss-model exponent budget.
    assert_eq!(run(&["gauss", "expand", "--p", "3", "--level", "3", "--elem", "t"]).0, 3);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hyperval");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["--version"]), Some(0));
    assert_eq!(status(&["hf"]), Some(64));
    assert_eq!(status(&["bounds", "--field", &repo("fields/q5sqrt5.json")]), Some(0));
    assert_eq!(status(&["hom", "krasner", "--field", &repo("fields/q2.json")]), Some(2));
}

#[test]
fn quadratic_preset_matches_its_digest() {
    let (code, v) = run_json(&["preset", "run", "quadratic-q5", "--dir", &repo("presets")]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["matches"], true);
    assert_eq!(v["digest"], v["expected"]);
}

#[test]
fn preset_digest_mismatch_fails() {
    let dir = std::env::temp_dir().join(format!("hyperval-presets-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut p: Value = serde_json::from_str(&std::fs::read_to_string(repo("presets/ake-sqrt5.json")).unwrap()).unwrap();
    let good = p["digest"].clone();
    p["digest"] = Value::from("00");
    std::fs::write(dir.join("ake-sqrt5.json"), p.to_string()).unwrap();
    let d = dir.to_string_lossy().into_owned();
    let (code, v) = run_json(&["preset", "run", "ake-sqrt5", "--dir", &d]);
    assert_eq!(code, 2);
    assert_eq!(v["matches"], false);
    assert_eq!(v["digest"], good);
    let (code, v) = run_json(&["preset", "list", "--dir", &d]);
    assert_eq!(code, 0);
    assert_eq!(v[0]["name"], "ake-sqrt5");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn output_is_byte_stable() {
    let a = repo("fields/q5sqrt5.json");
    let b = repo("fields/q5sqrt20.json");
    let cmds: [&[&str]; 3] = [
        &["--json", "hom", "search", "--src", &a, "--dst", &b, "--n", "2", "--over-p"],
        &["--json", "bounds", "--field", &a],
        &["hom", "search", "--src", &a, "--dst", &b, "--n", "1", "--isos", "--lift"],
    ];
    for cmd in cmds {
        let first = run(cmd).1;
        for threads in ["1", "3"] {
            let mut with = vec!["--threads", threads];
            with.extend_from_slice(cmd);
            assert_eq!(run(&with).1, first, "{cmd:?}");
        }
    }
}
