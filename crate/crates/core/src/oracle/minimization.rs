//! Exhaustive check that context minimization preserves well-formedness
//! and typing on small contexts.

use std::collections::{HashMap, HashSet};
use std::sync::Mutex;

use rayon::prelude::*;

use super::{Obligation, Report};
use crate::lf::{
    check_context, check_type, erase_kind, lowest_unused, synth_term, ArityType, CtxName, Head, LfContext,
    Nominal, Signature, Term, Type,
};
use crate::pool::TermPool;
use crate::subordination::SubordRel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinBounds {
    /// Longest context enumerated.
    pub ctx_max: usize,
    /// Largest argument in a binding type or a tested type.
    pub arg_size: usize,
    /// Largest term checked against a tested type.
    pub term_size_max: usize,
}

impl Default for MinBounds {
    fn default() -> Self {
        MinBounds { ctx_max: 4, arg_size: 1, term_size_max: 4 }
    }
}

fn cartesian(pools: &[Vec<Term>]) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = vec![Vec::new()];
    for pool in pools {
        out = out
            .iter()
            .flat_map(|prefix| {
                pool.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Every atomic type whose arguments are pool terms of size at most
/// `arg_size`, well-formed or not.
pub fn type_pool(sig: &Signature, nominals: &[Nominal], arg_size: usize) -> Vec<Type> {
    let pool = TermPool::with_nominals(sig, nominals.iter().cloned());
    let mut out = Vec::new();
    for a in sig.type_constants() {
        let kind = sig.kind_of(a).expect("declared type constant");
        let pools: Vec<Vec<Term>> = erase_kind(kind).iter().map(|al| pool.up_to(al, arg_size)).collect();
        for spine in cartesian(&pools) {
            out.push(Type::Atom(a.clone(), spine));
        }
    }
    out
}

fn nominals_of(ctx: &LfContext) -> Vec<Nominal> {
    ctx.0
        .iter()
        .filter_map(|b| match &b.name {
            CtxName::Nominal(n) => Some(n.clone()),
            CtxName::Var(_) => None,
        })
        .collect()
}

/// Well-formed contexts of up to `max_len` nominal bindings with atomic
/// types drawn from `type_pool`. Nominals are numbered from 1 in order.
pub fn enumerate_contexts(sig: &Signature, max_len: usize, arg_size: usize) -> Vec<LfContext> {
    let mut out = vec![LfContext::empty()];
    let mut level = vec![LfContext::empty()];
    let mut seen: HashSet<LfContext> = HashSet::new();
    for _ in 0..max_len {
        let next: Vec<LfContext> = level
            .par_iter()
            .flat_map_iter(|g| {
                let noms = nominals_of(g);
                let idx = lowest_unused(&g.nominal_indices());
                type_pool(sig, &noms, arg_size)
                    .into_iter()
                    .filter(|a| check_type(sig, g, a).is_ok())
                    .map(|a| {
                        let mut h = g.clone();
                        h.push(CtxName::Nominal(Nominal::new(ArityType::Base, idx)), a);
                        h
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        level = next.into_iter().filter(|h| seen.insert(h.clone())).collect();
        out.extend(level.iter().cloned());
    }
    out
}

fn show(ctx: &LfContext) -> String {
    if ctx.is_empty() {
        ".".into()
    } else {
        ctx.to_string()
    }
}

/// Synthesized types of a fixed list of terms, shared across contexts. A
/// term's type depends only on the types the context gives the nominals it
/// mentions, so results are keyed on those.
struct SynthCache {
    terms: Vec<(Term, Vec<Head>)>,
    shards: Vec<Mutex<Shard>>,
}

/// Term position and the types of its nominals, to the synthesized type.
type Shard = HashMap<(usize, Vec<Option<Type>>), Option<Type>>;

impl SynthCache {
    fn new(terms: Vec<Term>) -> Self {
        let terms = terms
            .into_iter()
            .map(|m| {
                let heads = m.free_names().nominals.into_iter().map(Head::Nominal).collect();
                (m, heads)
            })
            .collect();
        SynthCache { terms, shards: (0..64).map(|_| Mutex::new(HashMap::new())).collect() }
    }

    /// The type of every term under `ctx`, or `None` when it does not
    /// synthesize an atomic type there.
    fn under(&self, sig: &Signature, ctx: &LfContext) -> Vec<Option<Type>> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, (m, heads))| {
                let key = (i, heads.iter().map(|h| ctx.lookup(h).cloned()).collect::<Vec<_>>());
                let shard = &self.shards[i % self.shards.len()];
                if let Some(t) = shard.lock().expect("cache lock").get(&key) {
                    return t.clone();
                }
                let t = synth_term(sig, ctx, m).ok();
                shard.lock().expect("cache lock").insert(key, t.clone());
                t
            })
            .collect()
    }
}

fn check_one(
    sig: &Signature,
    rel: &SubordRel,
    g: &LfContext,
    types: &[Type],
    cache: &SynthCache,
) -> [Obligation; 4] {
    let mut wf = Obligation::new("minimized context is well-formed");
    let mut ty = Obligation::new("type well-formedness agrees");
    let mut tm = Obligation::new("typing agrees");
    let mut idem = Obligation::new("minimization is idempotent");
    // Typing against an atomic type is synthesis followed by comparison, so
    // each term is synthesized once per distinct context rather than once
    // per tested type.
    let full_types = cache.under(sig, g);
    let mut by_min: HashMap<LfContext, Vec<Option<Type>>> = HashMap::new();
    for a in types {
        let Ok(min) = rel.minimize(g, a) else { continue };
        let again = rel.minimize(&min, a).ok();
        idem.check(again.as_ref() == Some(&min), || format!("{} | {}", show(g), a));
        wf.check(check_context(sig, &min).is_ok(), || format!("{} | {} = {}", show(g), a, show(&min)));
        let full = check_type(sig, g, a).is_ok();
        let small = check_type(sig, &min, a).is_ok();
        ty.check(full == small, || format!("{} under {} ({}) vs {} ({})", a, show(g), full, show(&min), small));
        if !full || min == *g {
            continue;
        }
        let min_types = by_min.entry(min.clone()).or_insert_with(|| cache.under(sig, &min));
        for (((m, _), big), small) in cache.terms.iter().zip(&full_types).zip(min_types.iter()) {
            let full = big.as_ref() == Some(a);
            let small = small.as_ref() == Some(a);
            tm.check(full == small, || {
                format!("{} : {} under {} ({}) vs {} ({})", m, a, show(g), full, show(&min), small)
            });
        }
    }
    [wf, ty, tm, idem]
}

/// Check, for every enumerated well-formed context `G`, tested type `A` and
/// term `M`, that `G|A` is well-formed, that `A` is well-formed under `G`
/// exactly when it is under `G|A`, and likewise for `M : A`.
pub fn verify_minimization(sig: &Signature, rel: &SubordRel, b: MinBounds) -> Report {
    let contexts = enumerate_contexts(sig, b.ctx_max, b.arg_size);
    let by_len: Vec<(Vec<Type>, SynthCache)> = (0..=b.ctx_max)
        .into_par_iter()
        .map(|k| {
            let noms: Vec<Nominal> = (1..=k as u32).map(Nominal::base).collect();
            let types = type_pool(sig, &noms, b.arg_size);
            let terms = TermPool::with_nominals(sig, noms).up_to(&ArityType::Base, b.term_size_max);
            (types, SynthCache::new(terms))
        })
        .collect();
    let mut count = Obligation::new("contexts enumerated");
    count.checked = contexts.len();
    let parts: Vec<[Obligation; 4]> = contexts
        .par_iter()
        .map(|g| {
            let (types, cache) = &by_len[g.len()];
            check_one(sig, rel, g, types, cache)
        })
        .collect();
    let mut total = [
        Obligation::new("minimized context is well-formed"),
        Obligation::new("type well-formedness agrees"),
        Obligation::new("typing agrees"),
        Obligation::new("minimization is idempotent"),
    ];
    for p in parts {
        for (t, o) in total.iter_mut().zip(p) {
            t.merge(o);
        }
    }
    let mut report = Report { obligations: vec![count] };
    report.obligations.extend(total);
    report
}

