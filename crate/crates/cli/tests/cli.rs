use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn tmqbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmqbf"))
        .args(args)
        .output()
        .expect("run tmqbf")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_corpus_and_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tm");
    std::fs::write(&bad, "alphabet: _ > 0 1\nstates: 3\nq0 > > -> q1 L > S\n").unwrap();
    let all = ["accept_all.tm", "reject_all.tm", "first_is_one.tm", "parity.tm", "unary_copy.tm", "palindrome.tm"];
    for m in all {
        let o = tmqbf(&["validate", path_str(&corpus(m))]);
        assert_eq!(code(&o), 0, "{m}: {}", stdout(&o));
    }
    let o = tmqbf(&["validate", path_str(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("start marker"));
    assert_eq!(code(&tmqbf(&["validate", "/nonexistent.tm"])), 2);
    assert_eq!(code(&tmqbf(&["frobnicate"])), 2);
}

#[test]
fn simulate_reports_outcome() {
    let o = tmqbf(&["simulate", path_str(&corpus("parity.tm")), "0110"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "accepted");
    assert_eq!(v["steps_used"], 6);
    let o = tmqbf(&["simulate", path_str(&corpus("parity.tm")), "0110", "--budget", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "budget_exhausted");
    assert_eq!(code(&tmqbf(&["simulate", path_str(&corpus("parity.tm")), "0x1"])), 2);
}

#[test]
fn compile_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("accept.qbf");
    let machine = corpus("accept_all.tm");
    let o = tmqbf(&["compile", path_str(&machine), "--input", "01", "--m", "2", "-o", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("accept.qbf.json")).unwrap()).unwrap();
    assert_eq!(side["n"], 2);
    assert_eq!(side["m"], 2);
    assert_eq!(side["period"], 4);
    assert_eq!(side["kind"], "omega");
    let text = std::fs::read_to_string(&out).unwrap();
    // Constants count as their four-character expansion.
    let visible = text.chars().filter(|c| !c.is_whitespace()).count() as u64;
    let constants = text
        .split(|c: char| c.is_whitespace() || c == '(' || c == ')')
        .filter(|t| *t == "T" || *t == "F")
        .count() as u64;
    assert_eq!(side["natural_length"].as_u64().unwrap(), visible + 3 * constants);

    let o = tmqbf(&["eval", path_str(&out), "--machine", path_str(&machine), "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], true);
    assert!(v["stats"]["branch_guards"].as_u64().unwrap() > 0);

    // Same arguments, same bytes.
    let again = dir.path().join("again.qbf");
    tmqbf(&["compile", path_str(&machine), "--input", "01", "--m", "2", "-o", path_str(&again)]);
    assert_eq!(text, std::fs::read_to_string(&again).unwrap());

    let reject = dir.path().join("reject.qbf");
    tmqbf(&["compile", path_str(&corpus("reject_all.tm")), "--input", "01", "--m", "2", "-o", path_str(&reject)]);
    let o = tmqbf(&["eval", path_str(&reject), "--machine", path_str(&corpus("reject_all.tm"))]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn eval_small_formula_both_evaluators() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.qbf");
    std::fs::write(&f, "(A (p[0] p[1]) (E (p[2]) (= p[2] (^ p[0] p[1]))))\n").unwrap();
    for ev in ["naive", "guarded"] {
        assert_eq!(code(&tmqbf(&["eval", path_str(&f), "--evaluator", ev])), 0);
    }
    assert_eq!(code(&tmqbf(&["eval", path_str(&f), "--evaluator", "naive", "--enum-cap", "2"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_tmqbf"))
        .args(["eval", path_str(&f), "--evaluator", "naive"])
        .env("TMQBF_ENUM_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("enumeration cap"));
    assert_eq!(code(&tmqbf(&["eval", path_str(&f), "--evaluator", "dpll"])), 2);
}

#[test]
fn input_free_sentence_with_probe() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("delta.qbf");
    let machine = corpus("first_is_one.tm");
    assert_eq!(code(&tmqbf(&["compile", path_str(&machine), "--n", "2", "--m", "2", "-o", path_str(&out)])), 0);
    for (w, want) in [("10", 0), ("11", 0), ("01", 1), ("00", 1)] {
        let o = tmqbf(&["eval", path_str(&out), "--machine", path_str(&machine), "--input", w]);
        assert_eq!(code(&o), want, "{w}");
    }
}

#[test]
fn check_agreement_fault_and_empty() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("check.json");
    let machines = [corpus("accept_all.tm"), corpus("reject_all.tm"), corpus("first_is_one.tm")];
    let mut args = vec!["check"];
    args.extend(machines.iter().map(|p| path_str(p)));
    args.extend(["--max-len", "3", "--m", "2,3", "--report", path_str(&report)]);
    let o = tmqbf(&args);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["cases"].as_array().unwrap().len(), 3 * 2 * 12);
    assert_eq!(v["mismatches"], 0);
    let indices: Vec<u64> = v["cases"].as_array().unwrap().iter().map(|c| c["index"].as_u64().unwrap()).collect();
    assert!(indices.windows(2).all(|w| w[0] < w[1]));

    let o = tmqbf(&["check", path_str(&corpus("accept_all.tm")), "--input", "01", "--m", "2", "--inject-fault"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("mismatch"));

    let o = tmqbf(&["check", path_str(&corpus("accept_all.tm")), "--input", "", "--report", path_str(&report)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["cases"].as_array().unwrap().is_empty());

    // m below ceil(log n) is a per-case error, reported rather than dropped.
    let o = tmqbf(&["check", path_str(&corpus("accept_all.tm")), "--input", "01011", "--m", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("error"));
}

#[test]
fn stats_fit_and_underdetermined_grid() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("stats.json");
    let o = tmqbf(&[
        "stats",
        path_str(&corpus("accept_all.tm")),
        path_str(&corpus("parity.tm")),
        "--report",
        path_str(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["lower_bound_violations"].as_array().unwrap().is_empty());
    assert!(v["sum_bound"]["held_out"].as_array().unwrap().iter().all(|c| c["margin"].as_f64().unwrap() > 0.0));

    let o = tmqbf(&["stats", path_str(&corpus("accept_all.tm")), "--train", "4", "--held-out", "8", "--m", "s"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot determine"));
}

#[test]
fn recognize_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("rec.json");
    let machine = corpus("first_is_one.tm");
    let o = tmqbf(&[
        "recognize",
        path_str(&machine),
        "--max-len",
        "3",
        "--cross-check",
        "--json-report",
        path_str(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let cases = v.as_array().unwrap();
    assert_eq!(cases.len(), 12);
    for c in cases {
        let want = if c["input"].as_str().unwrap().starts_with('1') { "accept" } else { "reject" };
        assert_eq!(c["report"]["verdict"], want);
        assert_eq!(c["report"]["oracle_verdict"], want);
    }
    let o = tmqbf(&["recognize", path_str(&corpus("accept_all.tm")), "-d", "1", "--input", "01"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Accept"));
}
