use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const MOD24: &str = "delta=24 s1=1,5,7,9 s2=1,7,9,11 scale=4 eta_scale=24 eta_power=7 sieve_mod=24 sieve_res=20 level=576";

fn run(args: &[&str], results: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etaquot"))
        .args(args)
        .env("ETAQUOT_RESULTS_DIR", results)
        .output()
        .expect("binary runs")
}

fn record(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "one record per invocation: {text}");
    serde_json::from_str(&text).expect("record is JSON")
}

#[test]
fn count_reproduces_table_entry() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["count", "--delta", "24", "--parts", "1,5,7,9", "--n", "32"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = record(&out);
    assert_eq!(r["n"], 32);
    assert_eq!(r["count"], "7");
    assert!(!String::from_utf8_lossy(&out.stdout).contains("runtime"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("runtime_ms="));
}

#[test]
fn cusp_count_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["cusps", "--level", "576", "--count-only"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(record(&out)["cusps"], 1152);
    let full = record(&run(&["cusps", "--level", "12"], dir.path()));
    assert_eq!(full["cusps"], full["representatives"].as_array().unwrap().len());
}

#[test]
fn sturm_config_is_proved_and_persisted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mod24.cfg");
    fs::write(&cfg, format!("# F5 against F11\n{MOD24}\n")).unwrap();
    let results = dir.path().join("results");
    let out = run(&["sturm", "--config", cfg.to_str().unwrap()], &results);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = record(&out);
    assert_eq!(r["verdict"], "proved");
    assert_eq!(r["parameters"]["bound"], 64512);
    assert!(r.get("runtime_ms").is_none());
    let files: Vec<_> = fs::read_dir(&results).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1);
    let saved: Value = serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap();
    assert_eq!(saved["verdict"], "proved");
    assert!(saved["runtime_ms"].is_u64());
}

#[test]
fn refuted_sturm_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, MOD24.replace("sieve_res=20", "sieve_res=4")).unwrap();
    let out = run(&["sturm", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = record(&out);
    assert_eq!(r["verdict"], "refuted");
    assert_eq!(r["witnesses"][0]["kind"], "coefficient");
}

#[test]
fn suited_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let suited = run(
        &["suited", "--delta", "14", "--s1", "1,2,3", "--s2", "1,4,5", "--r", "1"],
        dir.path(),
    );
    assert_eq!(suited.status.code(), Some(0));
    assert_eq!(record(&suited)["verdict"], "suited");

    let cfg = dir.path().join("p.cfg");
    fs::write(&cfg, "delta=14 s1=1,2,3 s2=1,4,5 r=2").unwrap();
    let not = run(&["--threads", "1", "suited", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(not.status.code(), Some(1));
    let r = record(&not);
    assert_eq!(r["verdict"], "not-suited");
    assert_eq!(r["witnesses"][0]["kind"], "cusp");
}

#[test]
fn counterexample_and_altcheck() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["counterexample", "--delta", "24", "--s1", "1,5,7,9", "--s2", "1,7,9,11"];
    let found = run(&[&base[..], &["--r", "0,2"]].concat(), dir.path());
    assert_eq!(found.status.code(), Some(1));
    let r = record(&found);
    assert_eq!(r["found"], true);
    assert_ne!(r["left"], r["right"]);
    let none = run(&[&base[..], &["--r", "4", "--bound", "2000"]].concat(), dir.path());
    assert_eq!(none.status.code(), Some(0));
    assert_eq!(record(&none)["found"], false);

    let alt = run(&["altcheck", "--precision", "500"], dir.path());
    assert_eq!(alt.status.code(), Some(0));
    assert_eq!(record(&alt)["verdict"], "proved");
}

#[test]
fn expansion_order_level_context_twisted() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ["--delta", "24", "--parts", "1,5,7,9"];
    let order = record(&run(&[&["order"][..], &spec].concat(), dir.path()));
    assert_eq!(order["order"], "1/4");
    let level = record(&run(&[&["level"][..], &spec].concat(), dir.path()));
    assert_eq!(level["ord"], "1/4");
    assert!(level["level"].is_u64());
    let inf = record(&run(&[&["expand"][..], &spec, &["--terms", "10"]].concat(), dir.path()));
    assert!(inf["series"].as_str().unwrap().starts_with("L=4 "));
    let at = record(&run(
        &[&["expand"][..], &spec, &["--a", "1", "--c", "2", "--t", "3", "--terms", "4"]].concat(),
        dir.path(),
    ));
    assert_eq!(at["w"].as_array().unwrap().len(), 4);
    let ctx = record(&run(&["context", "--a", "1", "--c", "1", "--delta", "24"], dir.path()));
    assert_eq!(ctx["context"]["epsilon"], 1);
    let tw = record(&run(&[&["twisted"][..], &spec, &["--n", "33"]].concat(), dir.path()));
    assert_eq!(tw["w"].as_array().unwrap().len(), 34);
}

#[test]
fn output_is_deterministic_and_can_go_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["twisted", "--delta", "10", "--parts", "1,3", "--a", "1", "--c", "3", "--n", "12"];
    let a = run(&args, dir.path());
    let b = run(&args, dir.path());
    assert_eq!(a.stdout, b.stdout);
    let path = dir.path().join("out.json");
    let c = run(&[&args[..], &["--output", path.to_str().unwrap()]].concat(), dir.path());
    assert_eq!(c.status.code(), Some(0));
    assert!(c.stdout.is_empty());
    assert_eq!(fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = run(&["count", "--delta", "24", "--parts", "1", "--n", "3", "--bogus", "1"], dir.path());
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("--bogus"));
    let bad = run(&["count", "--delta", "24", "--parts", "12", "--n", "3"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
    let half = run(&["order", "--delta", "24", "--parts", "1", "--a", "1"], dir.path());
    assert_eq!(half.status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
}
