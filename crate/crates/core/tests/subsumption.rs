mod common;

use std::sync::Arc;

use common::*;
use lftransport::formula::Formula;
use lftransport::lf::{Binding, Ident, Nominal, Type};
use lftransport::oracle::sample_permutations;
use lftransport::schema::{is_schema_instance, enumerate_instances, ContextSchema, CtxExpr, MatchOptions};
use lftransport::subordination::compute_subordination;
use lftransport::subsumption::{
    ce_subsumes, make_variant, prune_ok, schema_subsumes, tf_subord, transport_check, transport_witness, val_neg,
    val_pos, SearchConfig, SubsumptionFailure, TransportFailure, VarPermutation,
};
use proptest::prelude::*;

fn g() -> Ident {
    Ident::new("G")
}

fn c_two() -> Arc<ContextSchema> {
    Arc::new(ContextSchema::new("Ctwo", vec![block(&[], vec![("x", tm())]), b_of()]))
}

fn c_wide() -> Arc<ContextSchema> {
    let b = block(&[("T", o())], vec![("x", tm()), ("y", of(v("x"), v("T"))), ("w", size(v("x"), one()))]);
    Arc::new(ContextSchema::new("Cwide", vec![b]))
}

/// Every typed term is a term.
fn f_of_body() -> Formula {
    Formula::all(
        "M",
        o(),
        Formula::all(
            "T",
            o(),
            Formula::all(
                "D",
                o(),
                Formula::imp(Formula::atm(gamma(), v("D"), of(v("M"), v("T"))), Formula::atm(gamma(), v("M"), tm())),
            ),
        ),
    )
}

#[test]
fn type_formula_subordination() {
    let rel = compute_subordination(&sig_size());
    assert!(!tf_subord(&rel, &tm(), &f_plus_body(), &g()));
    assert!(!tf_subord(&rel, &size(n(1), one()), &f_plus_body(), &g()));
    assert!(tf_subord(&rel, &nat(), &f_plus_body(), &g()));
    assert!(tf_subord(&rel, &tm(), &f_tm_body(), &g()));
    // Atoms over another context variable do not count.
    assert!(!tf_subord(&rel, &nat(), &f_plus_body(), &Ident::new("H")));
}

#[test]
fn context_subsumption_examples() {
    let rel = compute_subordination(&sig_size());
    let big = size_blocks(1);
    assert!(ce_subsumes(&rel, &g(), &[], &big.bindings, &f_plus_body()));
    assert!(!ce_subsumes(&rel, &g(), &[], &big.bindings, &f_tm_body()));
    assert!(ce_subsumes(&rel, &g(), &big.bindings, &big.bindings, &f_tm_body()));
    assert!(!ce_subsumes(&rel, &g(), &big.bindings, &[], &f_plus_body()));
}

#[test]
fn plus_lemma_transports() {
    let s = sig_size();
    let rel = compute_subordination(&s);
    let cert = transport_check(&s, &rel, &c_empty(), &c_size(), &g(), &f_plus_body(), SearchConfig::default()).unwrap();
    assert_eq!(cert.blocks.len(), 1);
    assert!(cert.blocks[0].ce.kept_positions().is_empty());
    let facts = cert.facts();
    for (a, b) in [("tm", "nat"), ("tm", "plus"), ("size", "nat"), ("size", "plus")] {
        assert!(facts.contains(&(Ident::new(a), Ident::new(b))));
    }
    cert.replay(&s).unwrap();
    assert_eq!(transport_witness(&s, &cert, &size_blocks(2)).unwrap(), CtxExpr::empty());
}

#[test]
fn term_lemma_is_refused() {
    let s = sig_size();
    let rel = compute_subordination(&s);
    match transport_check(&s, &rel, &c_empty(), &c_size(), &g(), &f_tm_body(), SearchConfig::default()) {
        Err(TransportFailure::Subsumption(SubsumptionFailure::NoVariant { undroppable, .. })) => {
            assert!(undroppable.iter().any(|u| u.starts_with("x:tm")), "{:?}", undroppable);
        }
        other => panic!("unexpected {:?}", other),
    }
}

#[test]
fn multi_block_schemas() {
    let s = sig_stlc();
    let rel = compute_subordination(&s);
    let cert = transport_check(&s, &rel, &c_two(), &c_wide(), &g(), &f_of_body(), SearchConfig::default()).unwrap();
    assert_eq!(cert.blocks[0].source_block, 1);
    assert_eq!(cert.blocks[0].ce.kept_positions(), vec![0, 1]);
    cert.replay(&s).unwrap();
    let target = CtxExpr::closed(vec![
        Binding::new(Nominal::base(1), tm()),
        Binding::new(Nominal::base(2), of(n(1), c("base"))),
        Binding::new(Nominal::base(3), size(n(1), one())),
    ]);
    let w = transport_witness(&s, &cert, &target).unwrap();
    assert_eq!(w.bindings, target.bindings[..2].to_vec());
    assert!(is_schema_instance(&s, &c_two(), &w));
    assert!(schema_subsumes(&rel, &c_wide(), &f_of_body(), &g(), &c_two(), SearchConfig::default()).is_err());
}

#[test]
fn tiny_search_cap_overflows() {
    let s = sig_stlc();
    let rel = compute_subordination(&s);
    let r = schema_subsumes(&rel, &c_two(), &f_of_body(), &g(), &c_wide(), SearchConfig { max_alignments: 0 });
    assert!(matches!(r, Err(SubsumptionFailure::SearchOverflow { .. })));
}

#[test]
fn tampered_certificate_does_not_replay() {
    let s = sig_size();
    let rel = compute_subordination(&s);
    let mut cert = transport_check(&s, &rel, &c_empty(), &c_size(), &g(), &f_plus_body(), SearchConfig::default()).unwrap();
    cert.formula = f_tm_body();
    assert!(cert.replay(&s).is_err());
}

#[test]
fn validity_rules() {
    let atom = Formula::atm(gamma(), c("z"), nat());
    assert!(val_neg(&g(), &atom).is_some());
    assert!(val_pos(&g(), &atom).is_none());
    assert!(val_pos(&g(), &Formula::imp(atom.clone(), Formula::Bot)).is_some());
    assert!(val_neg(&g(), &Formula::atm(CtxExpr::empty(), c("z"), nat())).is_none());
    let t = val_pos(&g(), &f_plus_body()).unwrap();
    assert!(t.replay(&g()));
    assert!(!t.replay(&Ident::new("H")));
    assert!(val_pos(&g(), &Formula::ctx_pi("G", c_size(), Formula::Top)).is_none());
}

#[test]
fn identity_variant() {
    assert_eq!(make_variant(&VarPermutation::identity(), &b_of()).unwrap(), b_of());
}

fn size_pairs() -> Vec<(CtxExpr, CtxExpr)> {
    let s = sig_size();
    let mut out = Vec::new();
    for big in enumerate_instances(&s, &c_size(), 2, 1, MatchOptions::default()).unwrap() {
        for mask in 0u32..(1 << big.len()) {
            let small = big.bindings.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, b)| b.clone()).collect();
            out.push((CtxExpr::closed(small), big.clone()));
        }
    }
    out
}

fn mix_names() -> Vec<Ident> {
    let mut names: Vec<Ident> = c_mix().blocks.iter().flat_map(|b| b.blkctx().into_iter().map(|(x, _)| x)).collect();
    names.extend(["u", "v"].map(Ident::new));
    names.sort();
    names.dedup();
    names
}

proptest! {
    #[test]
    fn subsumption_is_reflexive(pair in prop::sample::select(size_pairs())) {
        let rel = compute_subordination(&sig_size());
        for f in [f_plus_body(), f_tm_body()] {
            prop_assert!(ce_subsumes(&rel, &g(), &pair.1.bindings, &pair.1.bindings, &f));
        }
    }

    /// Dropping only bindings that are irrelevant to the formula keeps the
    /// pair related, and the smaller context still types every relevant atom.
    #[test]
    fn droppable_subsets_are_subsumed(pair in prop::sample::select(size_pairs())) {
        let rel = compute_subordination(&sig_size());
        let (small, big) = pair;
        let dropped: Vec<&Type> = big.bindings.iter().filter(|b| !small.bindings.contains(b)).map(|b| &b.ty).collect();
        let f = f_plus_body();
        let expect = dropped.iter().all(|a| !tf_subord(&rel, a, &f, &g()));
        prop_assert_eq!(ce_subsumes(&rel, &g(), &small.bindings, &big.bindings, &f), expect);
    }

    #[test]
    fn subsumption_is_transitive(a in prop::sample::select(size_pairs()), b in prop::sample::select(size_pairs())) {
        let rel = compute_subordination(&sig_size());
        let f = f_plus_body();
        // Chain small(a) <= big(a) = small(b) <= big(b) whenever they line up.
        if a.1 == b.0 {
            let ab = ce_subsumes(&rel, &g(), &a.0.bindings, &a.1.bindings, &f) && ce_subsumes(&rel, &g(), &b.0.bindings, &b.1.bindings, &f);
            if ab {
                prop_assert!(ce_subsumes(&rel, &g(), &a.0.bindings, &b.1.bindings, &f));
            }
        }
        if ce_subsumes(&rel, &g(), &a.0.bindings, &a.1.bindings, &f) {
            prop_assert!(prune_ok(&rel, &c_size(), &a.0.bindings, &a.0.bindings));
        }
    }

    #[test]
    fn variants_invert(seed in 0u64..1000) {
        let pi = sample_permutations(&mix_names(), 1, seed).pop().unwrap();
        for blk in &c_mix().blocks {
            let there = make_variant(&pi, blk).unwrap();
            prop_assert_eq!(make_variant(&pi.inverse(), &there).unwrap(), blk.clone());
        }
    }

    #[test]
    fn variants_keep_well_formedness(seed in 0u64..1000) {
        let pi = sample_permutations(&mix_names(), 1, seed).pop().unwrap();
        let blocks = c_mix().blocks.iter().map(|b| make_variant(&pi, b).unwrap()).collect();
        let renamed = ContextSchema::new("Cmix", blocks);
        prop_assert!(lftransport::schema::check_schema(&sig_stlc(), &renamed).is_ok());
        for g in enumerate_instances(&sig_stlc(), &c_mix(), 1, 1, MatchOptions::default()).unwrap() {
            prop_assert!(is_schema_instance(&sig_stlc(), &renamed, &g));
        }
    }
}
