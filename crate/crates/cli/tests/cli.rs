use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn qfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfa"))
        .args(args)
        .output()
        .expect("qfa runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(dir: &TempDir, sub: &str) -> String {
    dir.path().join(sub).to_string_lossy().into_owned()
}

#[test]
fn qcfa_witness_full_grid() {
    let dir = TempDir::new().unwrap();
    let out = qfa(&["witness", "qcfa", "--c", "2", "--q", "2", "--eta", "full", "--out", &out_arg(&dir, "w")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["verified"], json!(true));
    assert_eq!(r["grid"]["prefixes"], json!(7));
    assert_eq!(r["grid"]["tests"], json!(128));
    assert_eq!(r["shattering"]["agreements"], json!(896));
    assert!(r["max_value_deviation"].as_f64().unwrap() <= 1e-10);
    let saved = read(&dir.path().join("w/report.json"));
    assert_eq!(saved, r);
    let automaton = read(&dir.path().join("w/automaton.json"));
    assert_eq!(automaton["model"], json!("qcfa"));
    assert_eq!(automaton["witness_meta"]["d"], json!(7));
}

#[test]
fn moqfa_witness_remainder() {
    let out = qfa(&["witness", "moqfa", "--n", "3", "--eta", "full"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    let max = r["expansion"]["max_residual"].as_f64().unwrap();
    assert!(max <= 1.0 / 1296.0);
    assert_eq!(r["shattering"]["pairs_checked"], json!(4 * 16));
}

#[test]
fn bad_parameters_exit_two() {
    let out = qfa(&["witness", "moqfa", "--n", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("n >= 2"));
    assert_eq!(code(&qfa(&["witness", "qcfa", "--eta", "sample:0"])), 2);
    assert_eq!(code(&qfa(&["witness", "qcfa", "--tol", "eq"])), 2);
    assert_eq!(code(&qfa(&["bogus"])), 2);
    assert_eq!(code(&qfa(&["simulate", "/nonexistent.json"])), 2);
}

#[test]
fn pipelines_report_state_counts() {
    let out = qfa(&["pipeline", "qcfa", "--c", "2", "--q", "2"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["states"]["gfa_states"], json!(8));
    assert_eq!(r["states"]["pfa_states"], json!(22));
    assert_eq!(r["states"]["lower_bound_d"], json!(7));
    assert_eq!(r["witness_words"]["words_checked"], json!(896));
    assert!(r["witness_words"]["min_margin"].as_f64().unwrap() > 1e-6);

    let out = qfa(&["pipeline", "moqfa", "--n", "2", "--max-len", "3"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["states"]["gfa_states"], json!(4));
    assert_eq!(r["states"]["pfa_states"], json!(14));
    assert_eq!(r["witness_words"]["words_checked"], json!(8));
    assert_eq!(r["sub_alphabet_words"]["agrees"], json!(true));
}

#[test]
fn reruns_differ_only_in_timestamp() {
    let dir = TempDir::new().unwrap();
    let args = |sub: &str| {
        vec![
            "witness".to_string(),
            "qcfa".into(),
            "--c".into(),
            "3".into(),
            "--eta".into(),
            "sample:64".into(),
            "--seed".into(),
            "17".into(),
            "--out".into(),
            out_arg(&dir, sub),
        ]
    };
    for sub in ["a", "b"] {
        let a = args(sub);
        assert_eq!(code(&qfa(&a.iter().map(String::as_str).collect::<Vec<_>>())), 0);
    }
    let mut a = read(&dir.path().join("a/report.json"));
    let mut b = read(&dir.path().join("b/report.json"));
    assert_eq!(a["seed"], json!(17));
    a.as_object_mut().unwrap().remove("timestamp");
    b.as_object_mut().unwrap().remove("timestamp");
    assert_eq!(a, b);
    assert_eq!(
        fs::read(dir.path().join("a/automaton.json")).unwrap(),
        fs::read(dir.path().join("b/automaton.json")).unwrap()
    );
}

#[test]
fn analyze_shattering_and_hadamard() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&qfa(&["signmatrix", "--shattering", "7", "--out", &out_arg(&dir, "c7")])), 0);
    let c7 = out_arg(&dir, "c7/signmatrix.json");
    let out = qfa(&["analyze", &c7, "--realization", &c7]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["realization"]["rank"]["rank"], json!(7));
    assert_eq!(r["orthant_certificate"]["holds"], json!(true));

    let out = qfa(&["analyze", &c7, "--forster"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("square"));

    assert_eq!(code(&qfa(&["signmatrix", "--hadamard", "16", "--csv", "--out", &out_arg(&dir, "h")])), 0);
    let csv = fs::read_to_string(dir.path().join("h/signmatrix.csv")).unwrap();
    assert_eq!(csv.lines().count(), 17);
    let out = qfa(&["analyze", &out_arg(&dir, "h/signmatrix.json"), "--forster"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!((r["forster"]["bound"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert!((r["cap"].as_f64().unwrap() - 4.0).abs() < 1e-12);

    fs::write(dir.path().join("bad.json"), "{\"rows\": 2}").unwrap();
    assert_eq!(code(&qfa(&["analyze", &out_arg(&dir, "bad.json")])), 2);
}

#[test]
fn inconsistent_realization_fails_verification() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&qfa(&["signmatrix", "--shattering", "2", "--out", &out_arg(&dir, "c2")])), 0);
    fs::write(dir.path().join("r.json"), "[[1,1,1,1],[1,1,1,1]]").unwrap();
    let out = qfa(&["analyze", &out_arg(&dir, "c2/signmatrix.json"), "--realization", &out_arg(&dir, "r.json")]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["orthant_certificate"]["holds"], json!(false));
}

#[test]
fn file_handoff_chain() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&qfa(&["witness", "moqfa", "--n", "2", "--out", &out_arg(&dir, "w")])), 0);
    let aut = out_arg(&dir, "w/automaton.json");

    let out = qfa(&["simulate", &aut, "p:1 tau:+-", "", "--cutpoint", "0.5"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["results"][0]["accepted"], json!(true));
    assert_eq!(r["results"][1]["word"], json!("ε"));

    let out = qfa(&["linearize", &aut, "--out", &out_arg(&dir, "g")]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["gfa_states"], json!(4));

    let gfa = out_arg(&dir, "g/gfa.json");
    let out = qfa(&["stochasticize", &gfa, "--cutpoint", "1/2", "--max-len", "3", "--out", &out_arg(&dir, "p")]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["conversion"]["output_states"], json!(14));

    let pfa = out_arg(&dir, "p/pfa.json");
    let out = qfa(&["signmatrix", &pfa, "--grid", "--realize", "--out", &out_arg(&dir, "s")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!((r["rows"].clone(), r["cols"].clone()), (json!(2), json!(4)));
    assert_eq!(r["realization"]["sign_consistent"], json!(true));
    assert!(dir.path().join("s/realization.json").exists());

    let out = qfa(&["signmatrix", &aut, "--grid", "--realize"]);
    let r = report(&out);
    assert_eq!(r["realization"]["claimed_rank_bound"], json!(4));
    assert!(r["realization"]["rank"]["rank"].as_u64().unwrap() <= 4);

    assert_eq!(code(&qfa(&["linearize", &gfa])), 2);
}

#[test]
fn exact_stochasticize() {
    let dir = TempDir::new().unwrap();
    let doc = json!({
        "format": 1,
        "model": "gfa",
        "scalar_mode": "exact",
        "alphabet": ["a", "b"],
        "states": 2,
        "initial": ["1", "-1/2"],
        "transitions": [[["2", "0"], ["1/3", "-1"]], [["0", "1"], ["-3/8", "1/2"]]],
        "final": ["1", "5/7"],
    });
    let path = dir.path().join("g.json");
    fs::write(&path, doc.to_string()).unwrap();
    let path = path.to_string_lossy().into_owned();
    let out = qfa(&["stochasticize", &path, "--cutpoint", "1/3", "--exact", "--max-len", "5", "--out", &out_arg(&dir, "p")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["agreement"]["words_checked"], json!(63));
    assert_eq!(r["agreement"]["closed_form_matches"], json!(63));
    assert_eq!(r["conversion"]["output_states"], json!(10));
    let pfa = read(&dir.path().join("p/pfa.json"));
    assert_eq!(pfa["scalar_mode"], json!("exact"));

    let out = qfa(&["simulate", &out_arg(&dir, "p/pfa.json"), "a b"]);
    assert_eq!(code(&out), 0);
    assert!(report(&out)["results"][0]["exact_value"].is_string());
}
