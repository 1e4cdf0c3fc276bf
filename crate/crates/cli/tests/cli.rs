use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use lftransport::formula::Formula;
use lftransport::lf::{ArityType, Head, Ident, Nominal, Term, Type};
use lftransport::schema::{ContextSchema, CtxExpr};
use lftransport_cli::parse::{parse_ctx, parse_formula, parse_schemas, parse_signature, parse_type, print_schema, print_signature};
use lftransport_cli::{run, Workspace};
use proptest::prelude::*;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn lft(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("lft".to_string()).chain(args.iter().map(|a| a.to_string()));
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_file(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("lft-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn check_counts_declarations() {
    let (code, out, _) = lft(&["check", &fixture("sig_size.elf")]);
    assert_eq!(code, 0);
    assert!(out.contains("12"), "{}", out);
    assert_eq!(lft(&["check", &fixture("sig_stlc.elf")]).0, 0);
}

#[test]
fn empty_classifier_is_a_parse_error() {
    let e = parse_signature("c : .").unwrap_err();
    assert_eq!((e.line, e.col), (1, 5));
    let path = temp_file("empty.elf", "c : .");
    let (code, _, err) = lft(&["check", &path]);
    assert_eq!(code, 2);
    assert!(err.contains("1:5"), "{}", err);
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(lft(&["frobnicate"]).0, 2);
    assert_eq!(lft(&["check"]).0, 2);
    assert_eq!(lft(&["check", "/nonexistent/sig.elf"]).0, 2);
    assert_eq!(lft(&["--help"]).0, 0);
}

#[test]
fn unbound_context_variable() {
    let path = temp_file("open.lft", "{G |- z : nat}.");
    let (code, _, err) = lft(&["validate", &fixture("sig_size.elf"), "--formula", &path]);
    assert_eq!(code, 2);
    assert!(err.contains("context variable `G` is not bound"), "{}", err);
}

#[test]
fn validate_closed_atom() {
    let (code, out, _) = lft(&["validate", &fixture("sig_size.elf"), "--formula", &fixture("f_plus_zero.lft")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("Valid"), "{}", out);
    let (code, out, _) = lft(&[
        "validate",
        &fixture("sig_size.elf"),
        "--schemas",
        &fixture("size.schemas"),
        "--formula",
        &fixture("f_plus.lft"),
    ]);
    assert_eq!(code, 1);
    assert!(out.starts_with("Unknown"), "{}", out);
}

#[test]
fn instances() {
    let (sig, schemas) = (fixture("sig_size.elf"), fixture("size.schemas"));
    let yes = lft(&["instance", &sig, &schemas, "--schema", "Csize", "--ctx", &fixture("ctx_two.ctx")]);
    assert_eq!(yes.0, 0, "{}{}", yes.1, yes.2);
    let no = lft(&["instance", &sig, &schemas, "--schema", "Csize", "--ctx", &fixture("ctx_size.ctx")]);
    assert_eq!(no.0, 1, "{}{}", no.1, no.2);
    assert_eq!(lft(&["instance", &sig, &schemas, "--schema", "Cnone", "--ctx", &fixture("ctx_two.ctx")]).0, 2);
}

#[test]
fn minimize_drops_irrelevant_bindings() {
    let (code, out, _) = lft(&["minimize", &fixture("sig_size.elf"), "--ctx", &fixture("ctx_size.ctx"), "--type", "nat"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "n3:nat");
}

#[test]
fn schema_check() {
    assert_eq!(lft(&["schema-check", &fixture("sig_stlc.elf"), &fixture("stlc.schemas")]).0, 0);
    let bad = temp_file("bad.schemas", "schema D := {}(x:tm, x:tm).");
    assert_ne!(lft(&["schema-check", &fixture("sig_size.elf"), &bad]).0, 0);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "transport",
        &fixture("sig_stlc.elf"),
        &fixture("stlc.schemas"),
        "--from",
        "Ctwo",
        "--to",
        "Cwide",
        "--formula",
        &fixture("f_of.lft"),
    ]
    .map(|s| s.to_string());
    let argv: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    let first = lft(&argv);
    assert_eq!(first.0, 0);
    for _ in 0..3 {
        assert_eq!(lft(&argv), first);
    }
    let subord = lft(&["subord", &fixture("sig_stlc.elf")]);
    assert_eq!(lft(&["subord", &fixture("sig_stlc.elf")]), subord);
}

#[test]
fn fixtures_round_trip() {
    for name in ["sig_size.elf", "sig_stlc.elf"] {
        let sig = parse_signature(&read(name)).unwrap();
        assert_eq!(parse_signature(&print_signature(&sig)).unwrap(), sig);
    }
    let sig = parse_signature(&read("sig_stlc.elf")).unwrap();
    for c in parse_schemas(&read("stlc.schemas"), &sig).unwrap() {
        let again = parse_schemas(&print_schema(&c), &sig).unwrap();
        assert_eq!(again, vec![c]);
    }
    let g = parse_ctx(&read("ctx_two.ctx"), &sig).unwrap();
    assert_eq!(parse_ctx(&g.to_string(), &sig).unwrap(), g);
}

#[test]
fn workspace_strips_the_leading_binder() {
    let mut ws = Workspace::load(&PathBuf::from(fixture("sig_size.elf")), Some(&PathBuf::from(fixture("size.schemas")))).unwrap();
    let c = ws.schema("Csize").unwrap();
    let body = ws.formula_about("f", &read("f_plus.lft"), &Ident::new("G"), &c).unwrap();
    assert!(matches!(body, Formula::All(..)));
    assert!(ws.add_formula("open", "{G |- z : nat}").is_err());
}

fn sig() -> lftransport::lf::Signature {
    parse_signature(&read("sig_size.elf")).unwrap()
}

fn nat_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::constant("z")),
        prop::sample::select(vec!["X", "Y", "N"]).prop_map(Term::var),
        (1u32..4).prop_map(|i| Term::nominal(Nominal::base(i))),
    ];
    leaf.prop_recursive(3, 8, 1, |inner| inner.prop_map(|m| Term::app(Head::Const(Ident::new("s")), vec![m])))
}

fn atom_type() -> impl Strategy<Value = Type> {
    prop_oneof![
        Just(Type::atom("nat", vec![])),
        Just(Type::atom("tm", vec![])),
        (nat_term(), nat_term(), nat_term()).prop_map(|(a, b, c)| Type::atom("plus", vec![a, b, c])),
        (nat_term(), nat_term()).prop_map(|(a, b)| Type::atom("size", vec![a, b])),
    ]
}

fn ctx() -> impl Strategy<Value = CtxExpr> {
    let binds = prop::collection::vec(atom_type(), 0..3);
    (prop::option::of(Just("G")), binds).prop_map(|(h, tys)| {
        let mut g = h.map_or_else(CtxExpr::empty, CtxExpr::var);
        for (i, a) in tys.into_iter().enumerate() {
            g.bindings.push(lftransport::lf::Binding::new(Nominal::base(10 + i as u32), a));
        }
        g
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::Top),
        Just(Formula::Bot),
        (ctx(), nat_term(), atom_type()).prop_map(|(g, m, a)| Formula::atm(g, m, a)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let name = prop::sample::select(vec!["X", "Y", "D"]);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (name.clone(), inner.clone()).prop_map(|(x, f)| Formula::all(x, ArityType::Base, f)),
            (name, inner).prop_map(|(x, f)| Formula::ex(x, ArityType::Base, f)),
        ]
    })
}

fn schemas() -> BTreeMap<String, Arc<ContextSchema>> {
    let s = sig();
    parse_schemas(&read("size.schemas"), &s).unwrap().into_iter().map(|c| (c.name.to_string(), Arc::new(c))).collect()
}

proptest! {
    #[test]
    fn types_round_trip(a in atom_type()) {
        prop_assert_eq!(parse_type(&a.to_string(), &sig()).unwrap(), a);
    }

    #[test]
    fn contexts_round_trip(g in ctx()) {
        if g.head.is_none() {
            prop_assert_eq!(parse_ctx(&g.to_string(), &sig()).unwrap(), g);
        }
    }

    #[test]
    fn formulas_round_trip(f in formula()) {
        let schemas = schemas();
        let closed = Formula::ctx_pi("G", schemas["Csize"].clone(), f);
        let text = closed.to_string();
        let back = parse_formula(&text, &sig(), &schemas).unwrap();
        prop_assert!(back.alpha_eq(&closed), "{} read back as {}", text, back);
    }
}
