//! Harnesses checking the transport machinery against the LF checkers on
//! enumerated inputs.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::minimization::{enumerate_contexts, type_pool};
use super::{bounded_validity, Bounds, Obligation, Report, Verdict};
use crate::formula::{CtxVarSubst, Formula};
use crate::lf::{
    check_context, check_term, check_type, ArityType, Binding, Ident, LfContext, Nominal, Signature, Substitution,
    Term, Type,
};
use crate::pool::TermPool;
use crate::schema::{
    block_instance, check_schema, enumerate_instances, enumerate_well_formed, is_schema_instance, ContextSchema,
    CtxExpr, MatchOptions,
};
use crate::subordination::SubordRel;
use crate::subsumption::{
    ce_subsumes, make_variant, prune_ok, transport_witness, val_neg, val_pos, TransportCertificate, VarPermutation,
};

fn subst_gamma(f: &Formula, gamma: &Ident, g: &CtxExpr) -> Formula {
    let mut sigma = CtxVarSubst::new();
    sigma.insert(gamma.clone(), g.clone());
    f.subst_ctx(&sigma)
}

/// For every well-formed instance `G'` of the target schema, extract the
/// witness `G` from the certificate and re-check that it is a well-formed
/// source instance related to `G'` both ways. With `validity` bounds, also
/// compare the bounded validity of the formula at `G` and at `G'`.
pub fn verify_transport(
    sig: &Signature,
    rel: &SubordRel,
    cert: &TransportCertificate,
    b: Bounds,
    validity: Option<Bounds>,
) -> Report {
    let mut replay = Obligation::new("certificate replays");
    replay.check(cert.replay(sig).is_ok(), || cert.replay(sig).unwrap_err());
    let targets = match enumerate_well_formed(sig, &cert.target, b.blocks_max, b.term_size_max, MatchOptions::default()) {
        Ok(t) => t,
        Err(e) => {
            let mut o = Obligation::new("target instances enumerated");
            o.check(false, || e.to_string());
            return Report { obligations: vec![replay, o] };
        }
    };
    let names = [
        "witness extracted",
        "witness is a source instance",
        "witness is well-formed",
        "witness subsumes relative to the formula",
        "witness prunes relative to the source schema",
        "bounded validity agrees",
    ];
    let parts: Vec<Vec<Obligation>> = targets
        .par_iter()
        .map(|gt| {
            let mut obs: Vec<Obligation> = names.iter().map(|n| Obligation::new(n)).collect();
            let w = transport_witness(sig, cert, gt);
            obs[0].check(w.is_ok(), || format!("{}: {}", gt, w.as_ref().unwrap_err()));
            let Ok(g) = w else { return obs };
            obs[1].check(is_schema_instance(sig, &cert.source, &g), || format!("{} from {}", g, gt));
            obs[2].check(check_context(sig, &g.to_lf()).is_ok(), || format!("{} from {}", g, gt));
            obs[3].check(ce_subsumes(rel, &cert.gamma, &g.bindings, &gt.bindings, &cert.formula), || {
                format!("{} vs {}", g, gt)
            });
            obs[4].check(prune_ok(rel, &cert.source, &g.bindings, &gt.bindings), || format!("{} vs {}", g, gt));
            if let Some(vb) = validity {
                let small = bounded_validity(sig, &subst_gamma(&cert.formula, &cert.gamma, &g), vb).verdict;
                let big = bounded_validity(sig, &subst_gamma(&cert.formula, &cert.gamma, gt), vb).verdict;
                let agree = small == big || small == Verdict::Unknown || big == Verdict::Unknown;
                obs[5].check(agree, || format!("{} at {} vs {} at {}", small, g, big, gt));
            }
            obs
        })
        .collect();
    let mut total: Vec<Obligation> = names.iter().map(|n| Obligation::new(n)).collect();
    for p in parts {
        for (t, o) in total.iter_mut().zip(p) {
            t.merge(o);
        }
    }
    if validity.is_none() {
        total.pop();
    }
    let mut count = Obligation::new("target instances enumerated");
    count.checked = targets.len();
    let mut obligations = vec![replay, count];
    obligations.extend(total);
    Report { obligations }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtomBounds {
    /// Longest context `G'` enumerated.
    pub ctx_max: usize,
    /// Largest term substituted for a variable occurring in an atom's type.
    pub arg_size: usize,
    /// Largest term substituted for a variable occurring only in an atom's term.
    pub term_size_max: usize,
}

impl Default for AtomBounds {
    fn default() -> Self {
        AtomBounds { ctx_max: 3, arg_size: 1, term_size_max: 3 }
    }
}

fn binder_arities(f: &Formula, out: &mut BTreeMap<Ident, ArityType>) {
    match f {
        Formula::All(x, a, b) | Formula::Ex(x, a, b) => {
            out.insert(x.clone(), a.clone());
            binder_arities(b, out);
        }
        Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
            binder_arities(a, out);
            binder_arities(b, out);
        }
        Formula::CtxPi(_, _, b) => binder_arities(b, out),
        Formula::Atm(..) | Formula::Top | Formula::Bot => {}
    }
}

fn assignments(vars: &[(Ident, ArityType, usize)], pool: &TermPool) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for (x, a, size) in vars {
        let terms = pool.up_to(a, *size);
        out = out
            .iter()
            .flat_map(|s| {
                terms.iter().map(move |t| {
                    let mut s = s.clone();
                    s.insert(x.clone(), t.clone(), a.clone());
                    s
                })
            })
            .collect();
    }
    out
}

/// All subsequences of `big` reachable by dropping bindings that are
/// droppable relative to `f`.
fn subsumed(rel: &SubordRel, gamma: &Ident, big: &[Binding<Nominal>], f: &Formula) -> Vec<Vec<Binding<Nominal>>> {
    let mut out = vec![Vec::new()];
    for b in big {
        let droppable = !crate::subsumption::tf_subord(rel, &b.ty, f, gamma);
        let mut next = Vec::new();
        for g in &out {
            let mut keep = g.clone();
            keep.push(b.clone());
            next.push(keep);
            if droppable {
                next.push(g.clone());
            }
        }
        out = next;
    }
    out
}

/// For every well-formed pair `(G, G')` related by context-expression
/// subsumption relative to `f`, and every atom `{gamma, ... |- M : A}` of
/// `f` with its variables instantiated from the pool, the LF checkers give
/// the same verdicts under `G` and under `G'`.
pub fn verify_atoms(sig: &Signature, rel: &SubordRel, gamma: &Ident, f: &Formula, b: AtomBounds) -> Report {
    let mut arities = BTreeMap::new();
    binder_arities(f, &mut arities);
    let atoms: Vec<(CtxExpr, Term, Type)> = f
        .atoms()
        .into_iter()
        .filter(|(g, _, _)| g.head.as_ref() == Some(gamma))
        .map(|(g, m, a)| (g.clone(), m.clone(), a.clone()))
        .collect();
    let bigs = enumerate_contexts(sig, b.ctx_max, b.arg_size);
    let parts: Vec<[Obligation; 3]> = bigs
        .par_iter()
        .map(|big_lf| {
            let mut pairs = Obligation::new("related pairs are related");
            let mut types = Obligation::new("type verdicts agree");
            let mut terms = Obligation::new("term verdicts agree");
            let big = CtxExpr::from_lf(big_lf).expect("closed context");
            let pool = TermPool::with_nominals(sig, big.bound_nominals());
            let mut insts: Vec<(Type, Term, Vec<Binding<Nominal>>)> = Vec::new();
            for (g, m, a) in &atoms {
                let tyvars = a.free_names().vars;
                let mut vars: Vec<(Ident, ArityType, usize)> = Vec::new();
                for x in m.free_names().vars.iter().chain(&tyvars) {
                    if vars.iter().any(|(y, _, _)| y == x) {
                        continue;
                    }
                    let alpha = arities.get(x).cloned().unwrap_or(ArityType::Base);
                    let size = if tyvars.contains(x) { b.arg_size } else { b.term_size_max };
                    vars.push((x.clone(), alpha, size));
                }
                for s in assignments(&vars, &pool) {
                    let (Ok(m2), Ok(a2), Ok(g2)) = (s.apply_term(m), s.apply_type(a), g.apply_subst(&s)) else {
                        continue;
                    };
                    insts.push((a2, m2, g2.bindings));
                }
            }
            for small in subsumed(rel, gamma, &big.bindings, f) {
                let small_lf = LfContext::from_nominals(&small);
                if check_context(sig, &small_lf).is_err() {
                    continue;
                }
                pairs.check(ce_subsumes(rel, gamma, &small, &big.bindings, f), || {
                    format!("{} vs {}", CtxExpr::closed(small.clone()), big)
                });
                if small.len() == big.len() {
                    continue;
                }
                for (a, m, extra) in &insts {
                    let mut gs = small.clone();
                    gs.extend(extra.iter().cloned());
                    let mut gb = big.bindings.clone();
                    gb.extend(extra.iter().cloned());
                    let (gs, gb) = (LfContext::from_nominals(&gs), LfContext::from_nominals(&gb));
                    let ts = check_type(sig, &gs, a).is_ok();
                    let tb = check_type(sig, &gb, a).is_ok();
                    types.check(ts == tb, || format!("{} under {} ({}) vs {} ({})", a, gs, ts, gb, tb));
                    if ts && tb {
                        let ms = check_term(sig, &gs, m, a).is_ok();
                        let mb = check_term(sig, &gb, m, a).is_ok();
                        terms.check(ms == mb, || format!("{} : {} under {} ({}) vs {} ({})", m, a, gs, ms, gb, mb));
                    }
                }
            }
            [pairs, types, terms]
        })
        .collect();
    let mut total = [
        Obligation::new("related pairs are related"),
        Obligation::new("type verdicts agree"),
        Obligation::new("term verdicts agree"),
    ];
    for p in parts {
        for (t, o) in total.iter_mut().zip(p) {
            t.merge(o);
        }
    }
    let mut count = Obligation::new("contexts enumerated");
    count.checked = bigs.len();
    let mut obligations = vec![count];
    obligations.extend(total);
    Report { obligations }
}

/// Ill-formed closed contexts of up to `max_len` bindings whose types come
/// from the atomic type pool.
pub fn ill_formed_contexts(sig: &Signature, max_len: usize, arg_size: usize) -> Vec<CtxExpr> {
    let mut out = Vec::new();
    let mut level = vec![CtxExpr::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for g in &level {
            let idx = crate::lf::lowest_unused(&g.nominal_indices());
            for a in type_pool(sig, &g.bound_nominals(), arg_size) {
                let mut h = g.clone();
                h.bindings.push(Binding::new(Nominal::base(idx), a));
                next.push(h);
            }
        }
        out.extend(next.iter().filter(|g| check_context(sig, &g.to_lf()).is_err()).cloned());
        level = next;
    }
    out
}

/// Substituting an ill-formed context for `gamma` never makes a formula
/// with a `val+` derivation invalid, nor one with a `val-` derivation valid.
pub fn verify_ill_formed(sig: &Signature, gamma: &Ident, f: &Formula, contexts: &[CtxExpr], b: Bounds) -> Report {
    let pos = val_pos(gamma, f).is_some();
    let neg = val_neg(gamma, f).is_some();
    let parts: Vec<(Obligation, Obligation)> = contexts
        .par_iter()
        .map(|g| {
            let mut p = Obligation::new("val+ formulas are not refuted");
            let mut n = Obligation::new("val- formulas are not confirmed");
            let v = bounded_validity(sig, &subst_gamma(f, gamma, g), b).verdict;
            if pos {
                p.check(v != Verdict::Invalid, || format!("{} at {}", v, g));
            }
            if neg {
                n.check(v != Verdict::Valid, || format!("{} at {}", v, g));
            }
            (p, n)
        })
        .collect();
    let mut p = Obligation::new("val+ formulas are not refuted");
    let mut n = Obligation::new("val- formulas are not confirmed");
    for (a, c) in parts {
        p.merge(a);
        n.merge(c);
    }
    let mut count = Obligation::new("ill-formed contexts enumerated");
    count.checked = contexts.len();
    Report { obligations: vec![count, p, n] }
}

/// Uniformly random permutations of `names` from a seeded generator.
pub fn sample_permutations(names: &[Ident], count: usize, seed: u64) -> Vec<VarPermutation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut shuffled = names.to_vec();
            shuffled.shuffle(&mut rng);
            VarPermutation::from_pairs(names.iter().cloned().zip(shuffled)).expect("a shuffle is a permutation")
        })
        .collect()
}

/// Variants of every block of `schema` keep schema well-formedness and
/// agree with the original block on every enumerated segment.
pub fn verify_variants(sig: &Signature, schema: &ContextSchema, perms: &[VarPermutation], b: Bounds) -> Report {
    let mut segments: Vec<Vec<Binding<Nominal>>> = Vec::new();
    let lens: std::collections::BTreeSet<usize> = schema.blocks.iter().map(|b| b.decl.len()).collect();
    let instances = enumerate_instances(sig, schema, b.blocks_max, b.term_size_max, MatchOptions::default())
        .unwrap_or_default();
    for g in &instances {
        for &l in &lens {
            for start in 0..g.bindings.len().saturating_sub(l) + usize::from(l <= g.bindings.len()) {
                let seg = g.bindings[start..start + l].to_vec();
                if !segments.contains(&seg) {
                    segments.push(seg);
                }
            }
        }
    }
    let original_ok = check_schema(sig, schema).is_ok();
    let parts: Vec<(Obligation, Obligation)> = perms
        .par_iter()
        .map(|pi| {
            let mut wf = Obligation::new("variants keep schema well-formedness");
            let mut inst = Obligation::new("variants keep block instances");
            let variants: Vec<_> = schema.blocks.iter().map(|blk| make_variant(pi, blk)).collect();
            if variants.iter().any(|v| v.is_err()) {
                wf.check(false, || format!("variant under {} could not be built", pi));
                return (wf, inst);
            }
            let variants: Vec<_> = variants.into_iter().map(Result::unwrap).collect();
            let vs = ContextSchema { name: schema.name.clone(), blocks: variants.clone() };
            let ok = check_schema(sig, &vs).is_ok();
            wf.check(ok == original_ok, || format!("{} gives {}", pi, vs));
            for (blk, v) in schema.blocks.iter().zip(&variants) {
                for seg in segments.iter().filter(|s| s.len() == blk.decl.len()) {
                    let a = block_instance(sig, blk, seg, MatchOptions::default()).map(|m| m.is_some());
                    let c = block_instance(sig, v, seg, MatchOptions::default()).map(|m| m.is_some());
                    inst.check(a == c, || format!("{} vs {} on {}", blk, v, CtxExpr::closed(seg.clone())));
                }
            }
            (wf, inst)
        })
        .collect();
    let mut wf = Obligation::new("variants keep schema well-formedness");
    let mut inst = Obligation::new("variants keep block instances");
    for (a, c) in parts {
        wf.merge(a);
        inst.merge(c);
    }
    let mut count = Obligation::new("permutations sampled");
    count.checked = perms.len();
    let mut segs = Obligation::new("segments enumerated");
    segs.checked = segments.len();
    Report { obligations: vec![count, segs, wf, inst] }
}
