use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wonderful")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str], code: i32) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, contents: &[u8]) -> String {
    let dir = std::env::temp_dir().join(format!("wonderful-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn betti_of_three_points_in_the_plane() {
    let v = run_json(&["betti", "--kind", "T", "-d", "2", "-n", "3", "--weights", "1,1,1"], 0);
    assert_eq!(v["poincare"], json!([1, 4, 4, 1]));
    assert_eq!(v["euler"], json!(10));
    assert_eq!(v["centers"].as_array().unwrap().len(), 3);
}

#[test]
fn relative_order_gives_the_same_total() {
    let asc = run_json(&["betti", "--kind", "P", "-d", "2", "-n", "6"], 0);
    let rel = run_json(&["betti", "--kind", "P", "-d", "2", "-n", "6", "--relative", "3,4"], 0);
    assert_eq!(asc["poincare"], rel["poincare"]);
    assert_ne!(asc["order"], rel["order"]);
}

#[test]
fn weight_domains() {
    let v = run_json(&["weights", "check", "--kind", "P", "-d", "2", "-n", "5", "--weights", "1,1,1,1,1"], 0);
    assert_eq!(v["report"]["accepted"], json!(true));
    let v = run_json(&["weights", "check", "--kind", "T", "-d", "1", "--weights", "1/5,1/5,1/5"], 1);
    assert_eq!(v["report"]["accepted"], json!(false));
    assert_eq!(v["report"]["violations"].as_array().unwrap().len(), 1);
}

#[test]
fn epsilon_shorthand_follows_the_global_flag() {
    let v = run_json(&["--epsilon", "1/100", "weights", "check", "--kind", "T", "-d", "1", "--weights", "1/2+e,1/2"], 0);
    assert_eq!(v["weights"], json!(["51/100", "1/2"]));
}

#[test]
fn figure_reduction_chain() {
    let fig = data("figure_tree.json");
    let b = run(&["tree", "reduce", "--in", &fig, "--to", "1/5+e,1/5+e,1/5+e,1/5+e,1/5+e,1"]);
    assert_eq!(b.status.code(), Some(0));
    let tb: Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(tb["collection"], json!([[1, 2, 3, 4, 5]]));
    let screen = &tb["screens"]["[1,2,3,4,5]"];
    assert_eq!(screen["1"], screen["3"]);
    assert_eq!(screen["4"], screen["5"]);
    assert_ne!(screen["1"], screen["4"]);

    let mid = scratch("mid.json", &b.stdout);
    let tc = run_json(&["tree", "reduce", "--in", &mid, "--to", "1/6+e,1/6+e,1/6+e,1/6+e,1/6+e,1/6+e"], 0);
    assert_eq!(tc["collection"], json!([]));
    let root = &tc["root"];
    assert!((2..=5).all(|l| root[l.to_string()] == root["1"]));
    assert_ne!(root["6"], root["1"]);
}

#[test]
fn tree_json_round_trips() {
    let fig = data("figure_tree.json");
    let once = run(&["tree", "canon", "--in", &fig]);
    let path = scratch("canon.json", &once.stdout);
    let twice = run(&["tree", "canon", "--in", &path]);
    assert_eq!(once.stdout, twice.stdout);
    let v = run_json(&["tree", "validate", "--in", &path], 0);
    assert_eq!(v["accepted"], json!(true));
}

#[test]
fn forget_relabels() {
    let v = run_json(&["tree", "forget", "--in", &data("figure_tree.json"), "--keep", "1,4,6"], 0);
    assert_eq!(v["tree"]["n"], json!(3));
    assert_eq!(v["tree"]["collection"], json!([[1, 2]]));
}

#[test]
fn git_stability_and_quotient() {
    let v = run_json(&["git", "check", "--in", &data("stable_config.json")], 0);
    assert_eq!(v["stability"]["stable"], json!(true));
    assert_eq!(v["conditions"]["holds"], json!(true));

    let v = run_json(&["git", "check", "--in", &data("coincident_tail.json")], 1);
    assert_eq!(v["stability"]["witness"]["points"], json!([3, 4, 5]));
    assert_eq!(v["stability"]["witness"]["weight"], json!("11/9"));
    assert_eq!(v["conditions"]["failed"], json!([3, 4]));
    run_json(&["git", "normalize", "--in", &data("coincident_tail.json")], 1);

    let qp = run(&["git", "normalize", "--in", &data("stable_config.json")]);
    assert_eq!(qp.status.code(), Some(0));
    let path = scratch("qp.json", &qp.stdout);
    let v = run_json(&["git", "classify", "--in", &path, "--weights", "1,1,1,1/3,1/3"], 0);
    assert_eq!(v["point"], serde_json::from_slice::<Value>(&qp.stdout).unwrap());
}

#[test]
fn toric_fan_matches_engine() {
    let h = run_json(&["toric", "h-poly", "--kind", "T", "-d", "2", "-n", "3"], 0);
    assert_eq!(h["h"], json!([1, 3, 3, 1]));
    let fan = run(&["toric", "fan", "--kind", "P", "-d", "2", "-n", "5"]);
    let path = scratch("fan.json", &fan.stdout);
    let h = run_json(&["toric", "h-poly", "--in", &path], 0);
    let betti = run_json(&["betti", "--kind", "P", "-d", "2", "-n", "5", "--weights", "1,1,1,1/2,1/2"], 0);
    assert_eq!(h["h"], betti["poincare"]);
    let text = run(&["toric", "fan", "--kind", "T", "-d", "2", "-n", "3", "--format", "text"]);
    let path = scratch("fan.txt", &text.stdout);
    let c = run_json(&["toric", "check", "--in", &path], 0);
    assert_eq!(c, json!({"smooth": true, "complete": true, "f_vector": [1, 6, 12, 8]}));
}

#[test]
fn euler_oracle_agrees() {
    for (d, n, e) in [("2", "3", 10), ("2", "4", 84)] {
        let o = run_json(&["euler", "-d", d, "-n", n, "--oracle"], 0);
        let g = run_json(&["euler", "-d", d, "-n", n], 0);
        assert_eq!(o["euler"], json!(e));
        assert_eq!(g["euler"], json!(e));
    }
}

#[test]
fn divisor_twist_and_sha() {
    let v = run_json(&["divisor", "-d", "1", "-n", "5", "--set", "1,2"], 0);
    assert_eq!(v["poincare"], json!([1, 5, 1]));
    let v = run_json(&["twist", "-d", "1", "-n", "5", "--set", "1,2"], 0);
    assert_eq!(v["containing"], json!(6));
    let v = run_json(&["sha-dims", "-n", "7", "-m", "2"], 0);
    assert_eq!(v["pair_locus_dominates"], json!(true));
    assert_eq!(run(&["sha-dims", "-n", "5", "-m", "2"]).status.code(), Some(2));
}

#[test]
fn csv_flattens_polynomials() {
    let out = run(&["betti", "--kind", "T", "-d", "2", "-n", "3", "--format", "csv"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.lines().any(|l| l == "poincare,1,4,4,1"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"]).status.code(), Some(64));
    assert_eq!(run(&["betti", "-d", "2", "--format", "xml", "-n", "3"]).status.code(), Some(64));
    assert_eq!(run(&["--epsilon", "-1", "betti", "-d", "2", "-n", "3"]).status.code(), Some(64));
    assert_eq!(run(&["betti", "-d", "2"]).status.code(), Some(2));
    assert_eq!(run(&["tree", "validate", "--in", "/nonexistent/tree.json"]).status.code(), Some(2));
    assert_eq!(run(&["divisor", "-d", "1", "-n", "4", "--set", "1,2,3,4"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["betti", "--kind", "P", "-d", "2", "-n", "6"][..],
        &["--seed", "11", "toric", "check", "--kind", "T", "-d", "2", "-n", "4"],
        &["tree", "profile", "--in", &data("figure_tree.json"), "-k", "4"],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout);
    }
}
