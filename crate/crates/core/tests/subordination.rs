mod common;

use common::*;
use lftransport::lf::{CtxName, Ident, Kind, LfContext, Nominal, Signature, Substitution, Type};
use lftransport::oracle::{enumerate_contexts, type_pool, verify_minimization, MinBounds};
use lftransport::subordination::{compute_subordination, head};
use proptest::prelude::*;

fn pair(a: &str, b: &str) -> (Ident, Ident) {
    (Ident::new(a), Ident::new(b))
}

#[test]
fn size_signature_relation() {
    let rel = compute_subordination(&sig_size());
    let mut got: Vec<(Ident, Ident)> = rel.pairs().map(|(a, b)| (a.clone(), b.clone())).collect();
    got.sort();
    let mut want = vec![
        pair("tm", "tm"),
        pair("tm", "size"),
        pair("nat", "nat"),
        pair("nat", "plus"),
        pair("nat", "size"),
        pair("plus", "plus"),
        pair("plus", "size"),
        pair("size", "size"),
    ];
    want.sort();
    assert_eq!(got, want);
    assert!(!rel.contains(&"tm".into(), &"nat".into()));
    assert!(!rel.contains(&"tm".into(), &"plus".into()));
}

#[test]
fn lone_type_is_reflexive() {
    let mut s = Signature::new();
    s.declare_type("a", Kind::Type);
    let rel = compute_subordination(&s);
    assert_eq!(rel.pairs().count(), 1);
    assert!(rel.contains(&"a".into(), &"a".into()));
}

#[test]
fn heads() {
    assert_eq!(head(&nat()).as_str(), "nat");
    assert_eq!(head(&Type::pi("x", tm(), size(v("x"), one()))).as_str(), "size");
    assert_eq!(head(&Type::pi("x", nat(), Type::pi("y", nat(), plus(v("x"), v("y"), v("y"))))).as_str(), "plus");
}

#[test]
fn type_comparisons() {
    let rel = compute_subordination(&sig_size());
    assert!(rel.type_leq(&tm(), &size(n(1), one())).unwrap());
    assert!(!rel.type_leq(&size(n(1), one()), &nat()).unwrap());
    assert!(rel.type_leq(&nat(), &nat()).unwrap());
    assert!(rel.type_leq(&ty("undeclared", vec![]), &nat()).is_err());
}

fn lf(bindings: Vec<(u32, Type)>) -> LfContext {
    let mut g = LfContext::empty();
    for (i, a) in bindings {
        g.push(CtxName::Nominal(Nominal::base(i)), a);
    }
    g
}

#[test]
fn minimization_examples() {
    let rel = compute_subordination(&sig_size());
    assert_eq!(rel.minimize(&LfContext::empty(), &nat()).unwrap(), LfContext::empty());
    assert_eq!(rel.minimize(&lf(vec![(1, tm()), (2, nat())]), &nat()).unwrap(), lf(vec![(2, nat())]));
    let g = lf(vec![(1, tm()), (2, size(n(1), one()))]);
    assert_eq!(rel.minimize(&g, &size(n(1), one())).unwrap(), g);
}

#[test]
fn relation_is_a_preorder() {
    let rel = compute_subordination(&sig_size());
    for a in rel.constants() {
        assert!(rel.contains(a, a));
    }
    for (a, b) in rel.pairs() {
        for (b2, c) in rel.pairs() {
            if b == b2 {
                assert!(rel.contains(a, c), "{} <= {} <= {}", a, b, c);
            }
        }
    }
}

#[test]
fn minimization_oracle_passes() {
    let s = sig_size();
    let rel = compute_subordination(&s);
    let report = verify_minimization(&s, &rel, MinBounds { ctx_max: 3, arg_size: 1, term_size_max: 3 });
    assert!(report.passed(), "{}", report);
}

#[test]
fn minimization_oracle_on_single_constant() {
    let mut s = Signature::new();
    s.declare_type("a", Kind::Type);
    s.declare_term("c", ty("a", vec![]));
    let rel = compute_subordination(&s);
    let report = verify_minimization(&s, &rel, MinBounds::default());
    assert!(report.passed(), "{}", report);
}

#[test]
fn minimization_oracle_catches_a_corrupted_relation() {
    let s = sig_size();
    let mut rel = compute_subordination(&s);
    assert!(rel.remove_pair_for_testing("nat", "plus"));
    let report = verify_minimization(&s, &rel, MinBounds { ctx_max: 2, arg_size: 1, term_size_max: 2 });
    assert!(!report.passed());
}

fn contexts() -> Vec<LfContext> {
    enumerate_contexts(&sig_size(), 3, 1)
}

fn types() -> Vec<Type> {
    type_pool(&sig_size(), &[Nominal::base(1), Nominal::base(2), Nominal::base(3)], 1)
}

proptest! {
    #[test]
    fn minimization_is_idempotent(g in prop::sample::select(contexts()), a in prop::sample::select(types())) {
        let rel = compute_subordination(&sig_size());
        let once = rel.minimize(&g, &a).unwrap();
        prop_assert_eq!(rel.minimize(&once, &a).unwrap(), once);
    }

    #[test]
    fn substitution_keeps_the_head(x in prop::sample::select(vec![c("z"), one(), n(1)]), a in prop::sample::select(types())) {
        let open = match &a {
            Type::Atom(h, args) if !args.is_empty() => {
                let mut args = args.clone();
                args[0] = v("X");
                Type::Atom(h.clone(), args)
            }
            other => other.clone(),
        };
        let s = Substitution::single("X", x, o());
        let closed = s.apply_type(&open).unwrap();
        prop_assert_eq!(head(&closed), head(&open));
    }
}
