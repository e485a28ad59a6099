mod common;

use bpv::harness::cli::{run, EXIT_COUNTEREXAMPLE, EXIT_RESOURCE, EXIT_USAGE, EXIT_VERIFIED};

fn bpv(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["bpv"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn corpus_file(name: &str) -> String {
    format!("{}/corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn verify_tritype_prints_paths() {
    let (code, out, _) = bpv(&["verify", &corpus_file("tritype.mimp"), "--paths"]);
    assert_eq!(code, EXIT_VERIFIED);
    assert!(out.lines().any(|l| l == "feasible paths: 10"), "{out}");
}

#[test]
fn verify_tritype_ko_prints_trace() {
    let (code, out, _) = bpv(&["verify", &corpus_file("tritypeKO.mimp"), "--trace"]);
    assert_eq!(code, EXIT_COUNTEREXAMPLE);
    assert!(
        out.lines().any(|l| l.starts_with("trityp_3[") && l.ends_with(" : 2") && common::trace_line_ok(l)),
        "{out}"
    );
    let start = out.find("Counter-example found").unwrap();
    let trace: String = out[start..].lines().take_while(|l| !l.starts_with("input: ")).map(|l| format!("{l}\n")).collect();
    common::trace_ok(&trace).unwrap();
    assert!(out.contains("input: i = "), "{out}");
}

#[test]
fn corpus_names_resolve_without_a_file() {
    let (code, out, _) = bpv(&["verify", "tritype.mimp"]);
    assert_eq!(code, EXIT_VERIFIED, "{out}");
    let (code, _, _) = bpv(&["verify", "bsearch.mimp", "--len", "tab=8"]);
    assert_eq!(code, EXIT_VERIFIED);
}

#[test]
fn missing_length_is_a_usage_error() {
    let (code, _, err) = bpv(&["verify", "bsearch.mimp"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("tab"), "{err}");
}

#[test]
fn budget_gives_resource_exit() {
    let (code, out, _) = bpv(&["verify", &corpus_file("binarySearch.mimp"), "--len", "tab=16", "--budget-nodes", "3"]);
    assert_eq!(code, EXIT_RESOURCE, "{out}");
    assert!(out.starts_with("ResourceExceeded"), "{out}");
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(bpv(&["verify"]).0, EXIT_USAGE);
    assert_eq!(bpv(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(bpv(&["verify", "tritype.mimp", "--len", "nonsense"]).0, EXIT_USAGE);
    assert_eq!(bpv(&["verify", "/nonexistent/x.mimp"]).0, EXIT_USAGE);
    assert_eq!(bpv(&["--help"]).0, 0);
}

#[test]
fn parse_errors_carry_position() {
    let dir = std::env::temp_dir().join(format!("bpv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("broken.mimp");
    std::fs::write(&f, "int f(int x) {\n  return x\n}\n").unwrap();
    let (code, _, err) = bpv(&["verify", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("broken.mimp: 3:1:"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bench_tritype_has_two_rows() {
    let (code, out, _) = bpv(&["bench", "--suite", "tritype", "--format", "tsv"]);
    assert_eq!(code, 0, "{out}");
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(out.lines().next(), Some("benchmark\tlength\tverdict\tpaths\tnodes\tms"));
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[0][2], rows[0][3]), ("tritype", "Verified", "10"));
    assert_eq!((rows[1][0], rows[1][2]), ("tritypeKO", "Counterexample"));
}

#[test]
fn bench_bsearch_ko_finds_every_error() {
    let (code, out, _) = bpv(&["bench", "--suite", "bsearchKO", "--sizes", "8,16,32,64,128", "--format", "tsv"]);
    assert_eq!(code, 0, "{out}");
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    let lens: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(lens, ["8", "16", "32", "64", "128"]);
    assert!(rows.iter().all(|r| r[2] == "Counterexample"), "{out}");
}

#[test]
fn bench_all_at_toy_size() {
    let (code, out, err) = bpv(&["bench", "--suite", "all", "--sizes", "4"]);
    assert_eq!(code, 0, "{out}{err}");
    assert_eq!(out.lines().count(), 1 + 9);
    assert!(!out.contains("expected"), "{out}");
}

#[test]
fn bench_unknown_suite() {
    let (code, _, err) = bpv(&["bench", "--suite", "nope"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("nope"));
}

#[test]
fn oracle_subcommand() {
    let (code, out, _) = bpv(&["oracle", "tritypeKO.mimp", "--bound", "i=0..4", "--bound", "j=0..4", "--bound", "k=0..4"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("violating inputs"), "{out}");
    let (code, out, _) = bpv(&["oracle", "tritype.mimp", "--bound", "i=0..4", "--bound", "j=0..4", "--bound", "k=0..4"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("checked 125 inputs"), "{out}");
    let (code, _, err) = bpv(&["oracle", "tritype.mimp"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("cap"), "{err}");
}

#[test]
fn grammar_checker_rejects_malformed_lines() {
    assert!(common::trace_line_ok("x_0[-2147483647:2147483646] : -2147483646"));
    assert!(common::trace_line_ok("tab_0[3][-2147483647:2147483646] : 7"));
    assert!(common::trace_line_ok("i_0[-2147483647:2147483646] : [-2147483647..2147483646]"));
    assert!(common::trace_line_ok("JMLResult_1[-2147483647:2147483646] : -1"));
    for bad in ["x[0:1] : 1", "x_a[0:1] : 1", "x_0[0:1]: 1", "x_0[0..1] : 1", "x_0[0:1] : [1:2]", "x_0[0:1] : 1 ", "x_0[a][0:1] : 1"] {
        assert!(!common::trace_line_ok(bad), "{bad}");
    }
}
