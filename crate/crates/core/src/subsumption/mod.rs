//! Subsumption between context expressions, block declarations and
//! context schemas, relative to a formula and a context variable.

mod transport;
mod validity;
mod variant;

use std::collections::BTreeSet;
use std::fmt;

use crate::formula::Formula;
use crate::lf::{Binding, Ident, Type};
use crate::schema::ContextSchema;
use crate::subordination::SubordRel;

pub use transport::{
    schema_subsumes, transport_check, transport_witness, BlockRecord, SearchConfig, SubsumptionFailure,
    TransportCertificate, TransportFailure, WitnessError,
};
pub use validity::{val_neg, val_pos, Polarity, ValRule, ValTree};
pub use variant::{make_variant, permutation_substitution, NotPermutation, VarPermutation};

/// Is `a` subordinate to `f` relative to `gamma`?
pub fn tf_subord(rel: &SubordRel, a: &Type, f: &Formula, gamma: &Ident) -> bool {
    tf_witness(rel, a, f, gamma).is_some()
}

/// The atom that makes `a` subordinate to `f`, rendered for diagnostics.
pub fn tf_witness(rel: &SubordRel, a: &Type, f: &Formula, gamma: &Ident) -> Option<String> {
    match f {
        Formula::Atm(g, m, b) => {
            if g.head.as_ref() != Some(gamma) {
                return None;
            }
            if !g.bindings.is_empty() {
                return Some(format!("{} has explicit bindings after {}", f, gamma));
            }
            if rel.contains(a.head(), b.head()) {
                Some(format!("{} <= {} in {}", a.head(), b.head(), Formula::Atm(g.clone(), m.clone(), b.clone())))
            } else {
                None
            }
        }
        Formula::Top | Formula::Bot => None,
        Formula::Imp(x, y) | Formula::And(x, y) | Formula::Or(x, y) => {
            tf_witness(rel, a, x, gamma).or_else(|| tf_witness(rel, a, y, gamma))
        }
        Formula::All(_, _, b) | Formula::Ex(_, _, b) => tf_witness(rel, a, b, gamma),
        Formula::CtxPi(g, _, b) => {
            if g == gamma {
                None
            } else {
                tf_witness(rel, a, b, gamma)
            }
        }
    }
}

/// Subordination facts `a !<= b` justifying that `a` is not subordinate to
/// `f`: one per distinct type head of an atom whose context is exactly `gamma`.
pub fn tf_facts(rel: &SubordRel, a: &Type, f: &Formula, gamma: &Ident) -> Vec<(Ident, Ident)> {
    let mut heads = BTreeSet::new();
    collect_gamma_heads(f, gamma, &mut heads);
    heads
        .into_iter()
        .filter(|h| !rel.contains(a.head(), h))
        .map(|h| (a.head().clone(), h))
        .collect()
}

fn collect_gamma_heads(f: &Formula, gamma: &Ident, out: &mut BTreeSet<Ident>) {
    match f {
        Formula::Atm(g, _, b) => {
            if g.head.as_ref() == Some(gamma) && g.bindings.is_empty() {
                out.insert(b.head().clone());
            }
        }
        Formula::Top | Formula::Bot => {}
        Formula::Imp(x, y) | Formula::And(x, y) | Formula::Or(x, y) => {
            collect_gamma_heads(x, gamma, out);
            collect_gamma_heads(y, gamma, out);
        }
        Formula::All(_, _, b) | Formula::Ex(_, _, b) => collect_gamma_heads(b, gamma, out),
        Formula::CtxPi(g, _, b) => {
            if g != gamma {
                collect_gamma_heads(b, gamma, out)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Keep,
    Drop,
}

/// Relate `small` to `big` by keeping identical bindings in order and
/// dropping the rest. One step per binding of `big`, left to right.
/// Every keep/drop choice is explored, so the search is complete.
pub fn align<N: PartialEq>(
    small: &[Binding<N>],
    big: &[Binding<N>],
    droppable: impl Fn(&Type) -> bool,
) -> Option<Vec<Step>> {
    let (m, n) = (small.len(), big.len());
    if m > n {
        return None;
    }
    let drop_ok: Vec<bool> = big.iter().map(|b| droppable(&b.ty)).collect();
    // ok[i][j]: small[..i] relates to big[..j]
    let mut ok = vec![vec![false; n + 1]; m + 1];
    ok[0][0] = true;
    for j in 1..=n {
        for i in 0..=m.min(j) {
            let keep = i > 0 && ok[i - 1][j - 1] && small[i - 1] == big[j - 1];
            let drop = drop_ok[j - 1] && ok[i][j - 1];
            ok[i][j] = keep || drop;
        }
    }
    if !ok[m][n] {
        return None;
    }
    let mut steps = vec![Step::Drop; n];
    let (mut i, mut j) = (m, n);
    while j > 0 {
        if i > 0 && ok[i - 1][j - 1] && small[i - 1] == big[j - 1] {
            steps[j - 1] = Step::Keep;
            i -= 1;
        } else {
            steps[j - 1] = Step::Drop;
        }
        j -= 1;
    }
    Some(steps)
}

/// One binding of the larger side, kept or dropped, with the subordination
/// facts that license a drop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivStep {
    pub name: String,
    pub ty: Type,
    pub step: Step,
    pub facts: Vec<(Ident, Ident)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Derivation {
    pub steps: Vec<DerivStep>,
}

impl Derivation {
    pub fn kept_positions(&self) -> Vec<usize> {
        self.steps.iter().enumerate().filter(|(_, s)| s.step == Step::Keep).map(|(i, _)| i).collect()
    }

    pub fn drop_facts(&self) -> BTreeSet<(Ident, Ident)> {
        self.steps.iter().flat_map(|s| s.facts.iter().cloned()).collect()
    }
}

fn derivation<N: fmt::Display>(
    big: &[Binding<N>],
    steps: &[Step],
    facts: impl Fn(&Type) -> Vec<(Ident, Ident)>,
) -> Derivation {
    Derivation {
        steps: big
            .iter()
            .zip(steps)
            .map(|(b, s)| DerivStep {
                name: b.name.to_string(),
                ty: b.ty.clone(),
                step: *s,
                facts: if *s == Step::Drop { facts(&b.ty) } else { Vec::new() },
            })
            .collect(),
    }
}

/// Context-expression (or block-declaration) subsumption relative to `f`.
pub fn ce_derive<N: PartialEq + fmt::Display>(
    rel: &SubordRel,
    gamma: &Ident,
    small: &[Binding<N>],
    big: &[Binding<N>],
    f: &Formula,
) -> Option<Derivation> {
    let steps = align(small, big, |a| !tf_subord(rel, a, f, gamma))?;
    Some(derivation(big, &steps, |a| tf_facts(rel, a, f, gamma)))
}

pub fn ce_subsumes<N: PartialEq + fmt::Display>(
    rel: &SubordRel,
    gamma: &Ident,
    small: &[Binding<N>],
    big: &[Binding<N>],
    f: &Formula,
) -> bool {
    align(small, big, |a| !tf_subord(rel, a, f, gamma)).is_some()
}

/// Is `a` prunable relative to `schema`: not subordinate to any type the
/// schema assigns?
pub fn prunable(rel: &SubordRel, schema: &ContextSchema, a: &Type) -> bool {
    schema.decl_types().all(|b| !rel.contains(a.head(), b.head()))
}

fn prune_facts(rel: &SubordRel, schema: &ContextSchema, a: &Type) -> Vec<(Ident, Ident)> {
    let heads: BTreeSet<Ident> = schema.decl_types().map(|b| b.head().clone()).collect();
    heads.into_iter().filter(|h| !rel.contains(a.head(), h)).map(|h| (a.head().clone(), h)).collect()
}

pub fn prune_derive<N: PartialEq + fmt::Display>(
    rel: &SubordRel,
    schema: &ContextSchema,
    small: &[Binding<N>],
    big: &[Binding<N>],
) -> Option<Derivation> {
    let steps = align(small, big, |a| prunable(rel, schema, a))?;
    Some(derivation(big, &steps, |a| prune_facts(rel, schema, a)))
}

pub fn prune_ok<N: PartialEq>(rel: &SubordRel, schema: &ContextSchema, small: &[Binding<N>], big: &[Binding<N>]) -> bool {
    align(small, big, |a| prunable(rel, schema, a)).is_some()
}

/// Replay a derivation: kept bindings reassemble `small` and every drop
/// satisfies `droppable`.
pub(crate) fn replay_derivation<N: PartialEq + fmt::Display>(
    d: &Derivation,
    small: &[Binding<N>],
    big: &[Binding<N>],
    droppable: impl Fn(&Type) -> bool,
) -> bool {
    if d.steps.len() != big.len() {
        return false;
    }
    let mut kept = Vec::new();
    for (s, b) in d.steps.iter().zip(big) {
        if s.name != b.name.to_string() || s.ty != b.ty {
            return false;
        }
        match s.step {
            Step::Keep => kept.push(b),
            Step::Drop => {
                if !droppable(&b.ty) {
                    return false;
                }
            }
        }
    }
    kept.len() == small.len() && kept.iter().zip(small).all(|(a, b)| *a == b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(name: &str, ty: &str) -> Binding<Ident> {
        Binding::new(Ident::new(name), Type::atom(ty, vec![]))
    }

    #[test]
    fn align_prefers_consistent_choice() {
        // small = (a), big = (a, a): the second a must be kept if only the
        // first is droppable.
        let small = vec![b("x", "a")];
        let big = vec![b("x", "a"), b("x", "a")];
        let steps = align(&small, &big, |_| true).unwrap();
        assert_eq!(steps.iter().filter(|s| **s == Step::Keep).count(), 1);
        assert!(align(&small, &big, |_| false).is_none());
    }

    #[test]
    fn align_identity() {
        let g = vec![b("x", "a"), b("y", "b")];
        assert_eq!(align(&g, &g, |_| false), Some(vec![Step::Keep, Step::Keep]));
    }

    #[test]
    fn align_rejects_reordering() {
        let small = vec![b("y", "b"), b("x", "a")];
        let big = vec![b("x", "a"), b("y", "b")];
        assert!(align(&small, &big, |_| false).is_none());
    }
}
