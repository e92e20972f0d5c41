use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn dynlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynlab"))
        .args(args)
        .output()
        .expect("spawn dynlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dynlab-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn run_prints_query_per_step() {
    let script = scratch("run.txt", "domain 3\nins U(0)\ndel U(0)\n");
    let o = dynlab(&["run", "non-empty-set", script.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("step 0: init Q=false"), "{out}");
    assert!(out.contains("step 1: ins U(0) Q=true"), "{out}");
    assert!(out.contains("step 2: del U(0) Q=false"), "{out}");
}

#[test]
fn run_json_is_a_trace() {
    let script = scratch("json.txt", "domain 2\nins U(1)\n");
    let o = dynlab(&["run", "non-empty-set", script.to_str().unwrap(), "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["format"], 1);
    assert_eq!(v["program"], "non-empty-set");
}

#[test]
fn honest_run_rejects_double_insert() {
    let script = scratch("dishonest.txt", "domain 2\nins U(0)\nins U(0)\n");
    let o = dynlab(&["run", "non-empty-set", script.to_str().unwrap(), "--honest"]);
    assert!(!o.status.success());
}

#[test]
fn verify_exit_codes() {
    let ok = dynlab(&["verify", "non-empty-set", "--domain", "3", "--maxlen", "4"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("ok up to bounds"));

    let bad = dynlab(&["verify", "conj-nonemptyset", "--domain", "2", "--maxlen", "4", "--json"]);
    assert_eq!(bad.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(v["verdict"], "counterexample");
}

#[test]
fn verify_random_mode() {
    let o = dynlab(&[
        "verify",
        "st-twopath-binary",
        "--domain",
        "5",
        "--maxlen",
        "6",
        "--samples",
        "200",
        "--seed",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_over_cap_is_inconclusive() {
    let o = dynlab(&["verify", "st-twopath-binary", "--domain", "50", "--maxlen", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_file_needs_oracle() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/corpus/strawmen/repeated-vars-dedup.dynp");
    let o = dynlab(&["verify", path]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--oracle"));
    assert!(!o.status.success());
}

#[test]
fn attack_cq_adversary() {
    let o = dynlab(&["attack", "conj-nonemptyset", "--driver", "cq-adversary"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("del U"));
}

#[test]
fn transform_dedup_with_check() {
    let out = std::env::temp_dir().join(format!("dynlab-dedup-{}.dynp", std::process::id()));
    let o = dynlab(&[
        "transform",
        "repeated-vars",
        "--pass",
        "dedup-vars",
        "--check",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("R__11"));
}

#[test]
fn transform_passthrough_note() {
    let src = "program bare\ninput { U/1 }\naux { Q/0 }\nquery Q\ninit empty\ndefault frame\n";
    let path = scratch("bare.dynp", src);
    let o = dynlab(&["transform", path.to_str().unwrap(), "--pass", "rel2fun"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unchanged"));
}

#[test]
fn analyze_reports_class_and_depths() {
    let o = dynlab(&["analyze", "reach-1layer-qf", "--dot"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("class DynQF"), "{out}");
    assert!(out.contains("deletion depths:"));
    assert!(out.contains("digraph"));
}

#[test]
fn parse_error_has_position() {
    let bad = scratch("bad.dynp", "program x\ninput { U/1 \n");
    let o = dynlab(&["analyze", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("3:1"), "{err}");
}

#[test]
fn corpus_list_and_show() {
    let o = dynlab(&["corpus", "list"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for name in ["non-empty-set", "st-twopath-binary", "s-twopath-ternary", "reach-1layer-qf"] {
        assert!(out.contains(name), "{name}");
    }
    let show = dynlab(&["corpus", "show", "non-empty-set"]);
    assert!(stdout(&show).contains("program non-empty-set"));
}

#[test]
fn unknown_program_fails() {
    let o = dynlab(&["analyze", "no-such-program"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_corpus_file_with_explicit_flags() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/corpus/st-twopath-binary.dynp");
    let o = dynlab(&[
        "verify",
        path,
        "--oracle",
        "st-twopath",
        "--domain",
        "5",
        "--maxlen",
        "5",
        "--exhaustive",
        "--honest",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn attack_star_deletion_prints_witness() {
    let o = dynlab(&["attack", "unary-candidate", "--driver", "star-deletion", "--n", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample"));
}

#[test]
fn attack_guard_names_the_arity() {
    let o = dynlab(&["attack", "s-twopath-ternary", "--driver", "star-deletion"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("3 > 1"));
}

#[test]
fn transform_rel2fun_check() {
    let o = dynlab(&["transform", "non-empty-set", "--pass", "rel2fun", "--check"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("query agrees"));
}

#[test]
fn analyze_examples() {
    let reach = stdout(&dynlab(&["analyze", "reach-1layer-qf"]));
    for line in ["max aux arity 1", "builtin functions unary: yes", "nesting depth 1"] {
        assert!(reach.contains(line), "{line}");
    }
    let two = stdout(&dynlab(&["analyze", "st-twopath-binary"]));
    assert!(two.contains("max aux arity 2") && two.contains("conjunctive: no"));

    let src = "program u\ninput { U/1 }\naux { Q/0, R/1 }\nquery Q\ninit empty\ndefault frame\n";
    let path = scratch("unreachable.dynp", src);
    let out = stdout(&dynlab(&["analyze", path.to_str().unwrap()]));
    assert!(out.contains("unreachable: R"), "{out}");
}
