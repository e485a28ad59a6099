use bpv::harness::corpus::CORPUS;
use bpv::lang::*;

#[test]
fn corpus_parses_and_checks() {
    for e in CORPUS {
        let p = parse_program(e.source).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        typecheck(&p).unwrap_or_else(|errs| panic!("{}: {errs:?}", e.name));
    }
}

#[test]
fn corpus_round_trips() {
    for e in CORPUS {
        let p = parse_program(e.source).unwrap();
        let printed = pretty::program(&p);
        let q = parse_program(&printed).unwrap_or_else(|err| panic!("{}: {err}\n{printed}", e.name));
        assert_eq!(p, q, "{}", e.name);
    }
}

fn typed(src: &str) -> TypedProgram {
    load(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

fn corpus(name: &str) -> &'static str {
    bpv::harness::corpus::get(name).unwrap().source
}

#[test]
fn tritype_has_three_int_params() {
    let p = typed(corpus("tritype"));
    let f = p.entry();
    assert_eq!(f.name, "tritype");
    assert_eq!(f.result, Type::Int);
    let names: Vec<_> = f.params.iter().map(|p| (p.name.as_str(), p.ty)).collect();
    assert_eq!(names, [("i", Type::Int), ("j", Type::Int), ("k", Type::Int)]);
    assert_eq!(f.contract.requires.len(), 1);
}

#[test]
fn identity_body_is_a_single_return() {
    let p = typed("/*@ ensures \\result == x; @*/ int f(int x){ return x; }");
    let f = p.entry();
    assert_eq!(f.body, vec![Stmt::new(StmtKind::Return(Some(Expr::var("x"))), Span::default())]);
    assert_eq!(f.contract.ensures.len(), 1);
}

#[test]
fn undeclared_identifier_is_reported_with_position() {
    let err = load("int f(int x){\n  return y;\n}").unwrap_err();
    let FrontendError::Type(es) = &err else { panic!("{err:?}") };
    assert!(es.iter().any(|e| e.message.contains('y') && e.span.line == 2), "{es:?}");
}

#[test]
fn non_boolean_ensures_is_rejected() {
    let err = load("/*@ ensures \\result + 1; @*/ int f(int x){ return x; }").unwrap_err();
    assert!(matches!(err, FrontendError::Type(_)), "{err:?}");
}

#[test]
fn result_in_requires_is_rejected() {
    let err = load("/*@ requires \\result == 0; @*/ int f(int x){ return x; }").unwrap_err();
    assert!(matches!(err, FrontendError::Type(_)), "{err:?}");
}

#[test]
fn syntax_error_reports_expected_tokens() {
    let err = parse_program("int f(int x){ return x }").unwrap_err();
    assert!(!err.expected.is_empty());
    assert!(err.to_string().starts_with("1:"), "{err}");
}

fn has_for(s: &Stmt) -> bool {
    match &s.kind {
        StmtKind::For { .. } => true,
        StmtKind::Block(v) => v.iter().any(has_for),
        StmtKind::If { then, els, .. } => has_for(then) || els.as_deref().is_some_and(has_for),
        StmtKind::While { body, .. } => has_for(body),
        _ => false,
    }
}

#[test]
fn selection_sort_for_becomes_decl_and_while() {
    let p = typed(corpus("selectionSort"));
    let f = p.function("selectionSort").unwrap();
    assert!(!f.body.iter().any(has_for));
    let StmtKind::Block(outer) = &f.body[0].kind else { panic!("{:?}", f.body[0]) };
    assert!(matches!(&outer[0].kind, StmtKind::Decl { name, .. } if name == "i"));
    assert!(matches!(&outer[1].kind, StmtKind::While { .. }));
}

#[test]
fn desugar_leaves_loop_free_programs_alone() {
    let p = parse_program(corpus("tritype")).unwrap();
    assert_eq!(desugar(&p), p);
    let p = parse_program(corpus("squareSum")).unwrap();
    assert_eq!(desugar(&p), p);
}

#[test]
fn nested_for_matches_hand_desugaring() {
    let src = "int f(int n) { int s = 0;
        for (int i = 0; i < n; i++) { for (int j = 0; j < i; j++) { s = s + j; } }
        return s; }";
    let hand = "int f(int n) { int s = 0;
        { int i = 0; while (i < n) { { { int j = 0; while (j < i) { { s = s + j; } j = j + 1; } } } i = i + 1; } }
        return s; }";
    let a = desugar(&parse_program(src).unwrap());
    let b = parse_program(hand).unwrap();
    assert_eq!(a, b);
}

#[test]
fn expression_round_trip() {
    for src in ["a + b * c - d / 2", "-(x + 1) * y", "t[i + 1] <= t[i] && !(x == 3 || y != 4)", "t.length - 1"] {
        let e = parse_expr(src).unwrap();
        assert_eq!(parse_expr(&pretty::expr(&e)).unwrap(), e, "{src}");
    }
    let f = parse_formula("(\\forall int k; 0 <= k && k < t.length; t[k] >= 0) ==> \\result == -1").unwrap();
    assert_eq!(parse_formula(&pretty::formula(&f)).unwrap(), f);
}
