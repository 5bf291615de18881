//! Golden outputs and exit codes of the `chainlab` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn cmd() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_chainlab"));
    c.current_dir(fixtures()).env_remove("CHAINLAB_BUDGET");
    c
}

fn run(args: &[&str]) -> (i32, String, String) {
    split(cmd().args(args).output().unwrap())
}

fn split(out: Output) -> (i32, String, String) {
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn stdout_of(args: &[&str], code: i32) -> String {
    let (got, out, err) = run(args);
    assert_eq!(got, code, "{args:?}\nstdout: {out}\nstderr: {err}");
    out
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chainlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn eval_goldens() {
    assert_eq!(stdout_of(&["eval", "--chain", "exampleA.json", "--formula", "desc.lf"], 0), "true\n");
    assert_eq!(stdout_of(&["eval", "--chain", "exampleB.json", "--formula", "desc.lf"], 0), "false\n");
    let deep = ["eval", "--chain", "deep.json", "--formula", "f.lf", "--horizon", "2"];
    assert_eq!(stdout_of(&deep, 2), "unknown(horizon=2,period=1)\n");
    assert_eq!(stdout_of(&["eval", "--chain", "deep.json", "--formula", "f.lf", "--horizon", "3"], 0), "true\n");
}

#[test]
fn eval_json() {
    let out = stdout_of(&["--json", "eval", "--chain", "exampleA.json", "--formula", "desc.lf"], 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v, serde_json::json!([{"formula": "(exists-omega s :step (< s1 s0))", "verdict": "true"}]));
}

#[test]
fn eval_usage_errors() {
    assert_eq!(run(&["eval", "--chain", "exampleA.json"]).0, 1);
    assert_eq!(run(&["eval", "--chain", "missing.json", "--formula", "desc.lf"]).0, 1);
    assert_eq!(run(&["eval", "--formula", "desc.lf"]).0, 1);
    assert_eq!(run(&["no-such-command"]).0, 1);
}

#[test]
fn help_and_version() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage: chainlab"));
    let (code, out, _) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("chainlab "));
    assert_eq!(run(&["chu", "verify", "--help"]).0, 0);
}

#[test]
fn config_and_flag_precedence() {
    // The config sets horizon 2; a flag wins over it.
    let base = ["eval", "--chain", "deep.json", "--formula", "f.lf", "--config", "config.json"];
    assert_eq!(stdout_of(&base, 2), "unknown(horizon=2,period=1)\n");
    let mut flagged = base.to_vec();
    flagged.extend(["--horizon", "3"]);
    assert_eq!(stdout_of(&flagged, 0), "true\n");
    let bad = scratch("bad-config.json");
    std::fs::write(&bad, "{\"horizon\": \"deep\"}").unwrap();
    assert_eq!(run(&["eval", "--chain", "deep.json", "--formula", "f.lf", "--config", bad.to_str().unwrap()]).0, 1);
}

#[test]
fn games() {
    let ef = ["ef", "--left", "m2.json", "--right", "m3.json", "--rounds", "1", "--cap", "3"];
    assert_eq!(stdout_of(&ef, 0), "winner: I\n");
    let ef1 = ["ef", "--left", "m2.json", "--right", "m3.json", "--rounds", "1", "--cap", "1"];
    assert_eq!(stdout_of(&ef1, 0), "winner: II\n");
    let v: serde_json::Value =
        serde_json::from_str(&stdout_of(&["--json", ef[0], ef[1], ef[2], ef[3], ef[4], ef[5], ef[6], ef[7], ef[8]], 0))
            .unwrap();
    assert_eq!(v["winner"], "I");
    for (beta, want) in [("1", "II"), ("2", "II"), ("3", "I")] {
        let bg = ["bg", "--left", "m2.json", "--right", "m3.json", "--beta", beta, "--theta", "3"];
        assert_eq!(stdout_of(&bg, 0), format!("winner: {want}\n"), "β={beta}");
    }
    let graph = ["ef", "--left", "m2.json", "--right", "graph-triangles.json", "--rounds", "1", "--cap", "1"];
    assert_eq!(run(&graph).0, 1);
}

#[test]
fn equivalence_classes() {
    let out = stdout_of(&["equiv", "--catalog", "orders-catalog.json", "--beta", "3", "--theta", "3"], 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("class ")).count(), 11);
    let out = stdout_of(&["equiv", "--catalog", "orders-catalog.json", "--beta", "1", "--theta", "1"], 0);
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn validate_goldens() {
    assert_eq!(stdout_of(&["validate", "exampleA.json"], 0), "exampleA.json: ok (chain model)\n");
    assert_eq!(stdout_of(&["validate", "pc20.lf"], 0), "pc20.lf: ok (20 formula(s))\n");
    assert_eq!(stdout_of(&["validate", "l1.json"], 0), "l1.json: ok (logic instance with 2 sentences and 2 models)\n");
    assert_eq!(
        stdout_of(&["validate", "families.json", "--as", "families"], 0),
        "families.json: ok (2 level families)\n"
    );
    assert_eq!(stdout_of(&["validate", "orders-catalog.json"], 0), "orders-catalog.json: ok (catalog of 12)\n");
    assert_eq!(
        stdout_of(&["validate", "t12.json", "--as", "transform"], 0),
        "t12.json: ok (transform with 2 sentence and 3 model assignments)\n"
    );
    assert!(stdout_of(&["validate", "missing.json"], 1).starts_with("missing.json: invalid"));
    let broken = scratch("broken.lf");
    std::fs::write(&broken, "(and (P x)\n").unwrap();
    assert_eq!(run(&["validate", broken.to_str().unwrap(), "--as", "formulas"]).0, 1);
}

#[test]
fn chu_verify_and_search() {
    let verify = |t: &str| run(&["chu", "verify", "--left", "l1.json", "--right", "l2.json", "--transform", t]);
    assert_eq!(verify("t12.json").0, 0);
    let (code, out, _) = verify("t12-bad.json");
    assert_eq!(code, 1);
    assert!(out.contains("adjointness fails at (p, u2)"), "{out}");
    let search = ["chu", "search", "--left", "l1.json", "--right", "l2.json"];
    let out = stdout_of(&search, 0);
    assert!(out.starts_with("found after 1 candidates\n"), "{out}");
    let (code, out, _) = split(cmd().args(search).env("CHAINLAB_BUDGET", "0").output().unwrap());
    assert_eq!(code, 2);
    assert_eq!(out, "unknown: budget of 0 exhausted\n");
    // The flag outranks the environment.
    let mut flagged = search.to_vec();
    flagged.extend(["--budget", "100"]);
    assert_eq!(split(cmd().args(&flagged).env("CHAINLAB_BUDGET", "0").output().unwrap()).0, 0);
    assert_eq!(split(cmd().args(search).env("CHAINLAB_BUDGET", "lots").output().unwrap()).0, 1);
}

#[test]
fn chu_compose_compact_pc() {
    let out = stdout_of(
        &[
            "chu", "compose", "--first", "t12.json", "--second", "t23.json", "--l1", "l1.json", "--l2", "l2.json",
            "--l3", "l3.json",
        ],
        0,
    );
    assert!(out.starts_with("adjoint: true\ndense: true\n"), "{out}");
    assert_eq!(
        run(&[
            "chu", "compose", "--first", "t12.json", "--second", "t12.json", "--l1", "l1.json", "--l2", "l2.json",
            "--l3", "l3.json"
        ])
        .0,
        1
    );
    assert_eq!(
        stdout_of(&["chu", "compact", "--instance", "l1.json", "--theta", "2", "--lambda", "2"], 0),
        "counterexample: {p, np}\n"
    );
    assert_eq!(
        stdout_of(&["chu", "compact", "--instance", "lcompact.json", "--theta", "2", "--lambda", "2"], 0),
        "(2,2)-compact\n"
    );
    let v: serde_json::Value = serde_json::from_str(&stdout_of(
        &["--json", "chu", "compact", "--instance", "l1.json", "--theta", "2", "--lambda", "2"],
        0,
    ))
    .unwrap();
    assert_eq!(v, serde_json::json!({"result": "counterexample", "sentences": ["p", "np"]}));
    let out = stdout_of(&["chu", "pc", "--m", "1", "--battery", "pc20.lf"], 0);
    assert!(out.contains("adjoint: true\ndense: true\n") && out.contains("identitary failures: 0"), "{out}");
}

#[test]
fn independence_goldens() {
    let out = stdout_of(&["indep", "--formula", "desc.lf", "--catalog", "examples-catalog.json"], 0);
    assert!(out.starts_with("(exists-omega s :step (< s1 s0)): dependent relative to catalog of 2"), "{out}");
    let clique = scratch("clique3.lf");
    std::fs::write(&clique, stdout_of(&["emit", "clique", "--k", "3"], 0)).unwrap();
    let out = stdout_of(&["indep", "--formula", clique.to_str().unwrap(), "--presentation", "graph-triangles.json"], 0);
    assert!(out.ends_with(": independent (false) relative to catalog of 16\n"), "{out}");
}

#[test]
fn emitted_sentences_parse_and_evaluate() {
    let theta = scratch("theta3.lf");
    std::fs::write(&theta, stdout_of(&["emit", "wellorder", "--n", "3"], 0)).unwrap();
    assert!(stdout_of(&["validate", theta.to_str().unwrap(), "--as", "formulas"], 0).ends_with("ok (4 formula(s))\n"));
    let sigma = scratch("hintikka.lf");
    std::fs::write(
        &sigma,
        stdout_of(&["emit", "hintikka", "--model", "chain3.json", "--beta", "2", "--width", "1"], 0),
    )
    .unwrap();
    // Two rounds of singletons cannot tell orders of three or more points apart.
    assert_eq!(stdout_of(&["eval", "--classical", "chain4.json", "--formula", sigma.to_str().unwrap()], 0), "true\n");
    assert_eq!(stdout_of(&["eval", "--classical", "chain3.json", "--formula", sigma.to_str().unwrap()], 0), "true\n");
    assert_eq!(stdout_of(&["eval", "--classical", "chain2.json", "--formula", sigma.to_str().unwrap()], 0), "false\n");
    assert_eq!(
        run(&["emit", "hintikka", "--model", "chain3.json", "--beta", "3", "--width", "3", "--budget", "4"]).0,
        1
    );
    assert_eq!(run(&["emit", "gamma", "--n", "1"]).0, 1);
}

#[test]
fn union_goldens() {
    let out = stdout_of(&["union", "--presentation", "omega.json", "--families", "families.json"], 0);
    assert_eq!(out, "union: {\"prefix\":{\"a\":2,\"b\":1},\"selectors\":[]}\n");
    let out = stdout_of(
        &["union", "--presentation", "omega.json", "--families", "families.json", "--battery", "orders.lf"],
        0,
    );
    assert!(out.ends_with("checked: 4\nfailures: 0\n"), "{out}");
    assert_eq!(run(&["union", "--presentation", "graph-matching.json", "--families", "not-chain.json"]).0, 1);
}

#[test]
fn adequacy_small() {
    let out = stdout_of(&["adequacy", "--size", "2", "--beta", "1", "--width", "1"], 0);
    assert_eq!(out, "structures: 12, pairs: 78, rows: 3, mismatches: 0\n");
    assert_eq!(run(&["adequacy", "--size", "4"]).0, 1);
}

fn play(args: &[&str], input: &str) -> (i32, String, String) {
    let mut child =
        cmd().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    split(child.wait_with_output().unwrap())
}

#[test]
fn repl_sessions() {
    let transcript = scratch("bg.txt");
    let t = transcript.to_str().unwrap();
    let args = [
        "play",
        "bg",
        "--left",
        "m2.json",
        "--right",
        "m3.json",
        "--beta",
        "1",
        "--theta",
        "3",
        "--as",
        "I",
        "--transcript",
        t,
    ];
    let (code, out, _) = play(&args, "help\nmove 0 a b\n");
    assert_eq!(code, 0);
    assert!(out.contains("game over: II wins"), "{out}");
    let logged = std::fs::read_to_string(&transcript).unwrap();
    assert!(logged.contains("move 0 a b") && logged.contains("game over: II wins"), "{logged}");

    let args = [
        "play",
        "bg",
        "--left",
        "m2.json",
        "--right",
        "m3.json",
        "--beta",
        "3",
        "--theta",
        "3",
        "--as",
        "II",
        "--transcript",
        t,
    ];
    let (_, out, _) = play(&args, "hint\n");
    assert!(out.contains("no winning answer; most deferral: move a:2 b:2"), "{out}");

    let args = [
        "play",
        "ef",
        "--left",
        "m2.json",
        "--right",
        "m3.json",
        "--rounds",
        "1",
        "--cap",
        "3",
        "--as",
        "II",
        "--transcript",
        t,
    ];
    let (code, out, _) = play(&args, "");
    assert_eq!(code, 0);
    assert!(out.contains("II has no legal move: I wins"), "{out}");
}
