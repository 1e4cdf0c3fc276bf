//! Arity-indexed hereditary substitution.
//!
//! Replacing a head by a term may create a redex; it is contracted on the
//! spot by instantiating the abstraction body, at a strictly smaller arity.
//! Recursion is therefore bounded by the arity annotation, and a mismatch
//! between a replacement and its annotation is reported instead of looping.

use std::collections::BTreeMap;

use thiserror::Error;

use super::syntax::{ArityType, Head, Ident, Kind, Term, Type};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("cannot apply a replacement of arity `{arity}` to {args} argument(s)")]
    ArityMismatch { arity: ArityType, args: usize },
}

/// Erasure of a type to its arity.
pub fn erase(ty: &Type) -> ArityType {
    match ty {
        Type::Atom(..) => ArityType::Base,
        Type::Pi(_, dom, cod) => ArityType::arrow(erase(dom), erase(cod)),
    }
}

/// Erased kind: the arities expected by a type constant's arguments.
pub fn erase_kind(kind: &Kind) -> Vec<ArityType> {
    kind.domains().into_iter().map(erase).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstEntry {
    pub term: Term,
    pub arity: ArityType,
}

/// A simultaneous substitution `{<x1, M1, a1>, ..., <xn, Mn, an>}` for free variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    entries: BTreeMap<Ident, SubstEntry>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn single(var: &str, term: Term, arity: ArityType) -> Self {
        let mut s = Substitution::new();
        s.insert(Ident::new(var), term, arity);
        s
    }

    /// Returns false (and leaves the map unchanged) if `var` is already bound.
    pub fn insert(&mut self, var: Ident, term: Term, arity: ArityType) -> bool {
        if self.entries.contains_key(&var) {
            return false;
        }
        self.entries.insert(var, SubstEntry { term, arity });
        true
    }

    pub fn get(&self, var: &Ident) -> Option<&SubstEntry> {
        self.entries.get(var)
    }

    pub fn remove(&mut self, var: &Ident) -> Option<SubstEntry> {
        self.entries.remove(var)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &SubstEntry)> {
        self.entries.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Ident> {
        self.entries.keys()
    }

    /// Union of two substitutions with disjoint domains.
    pub fn union(&self, other: &Substitution) -> Option<Substitution> {
        let mut out = self.clone();
        for (k, e) in other.iter() {
            if !out.insert(k.clone(), e.term.clone(), e.arity.clone()) {
                return None;
            }
        }
        Some(out)
    }

    pub fn apply_term(&self, t: &Term) -> Result<Term, SubstError> {
        if self.is_empty() {
            return Ok(t.clone());
        }
        subst_term(t, &Target::Free(self), 0)
    }

    pub fn apply_type(&self, ty: &Type) -> Result<Type, SubstError> {
        if self.is_empty() {
            return Ok(ty.clone());
        }
        subst_type(ty, &Target::Free(self), 0)
    }

    pub fn apply_kind(&self, k: &Kind) -> Result<Kind, SubstError> {
        if self.is_empty() {
            return Ok(k.clone());
        }
        subst_kind(k, &Target::Free(self), 0)
    }
}

enum Target<'a> {
    Free(&'a Substitution),
    /// Replace de Bruijn index 0 (at the root) by `term`.
    Index { term: &'a Term, arity: &'a ArityType },
}

enum Lookup<'a> {
    Hit(Term, &'a ArityType),
    Miss(Head),
}

impl<'a> Target<'a> {
    fn lookup(&self, head: &Head, depth: u32) -> Lookup<'a> {
        match (self, head) {
            (Target::Free(s), Head::Var(x)) => match s.get(x) {
                Some(e) => Lookup::Hit(e.term.shift(depth, 0), &e.arity),
                None => Lookup::Miss(head.clone()),
            },
            (Target::Index { term, arity }, Head::Bound(i)) => {
                if *i == depth {
                    Lookup::Hit(term.shift(depth, 0), arity)
                } else if *i > depth {
                    Lookup::Miss(Head::Bound(i - 1))
                } else {
                    Lookup::Miss(head.clone())
                }
            }
            _ => Lookup::Miss(head.clone()),
        }
    }
}

fn subst_term(t: &Term, target: &Target<'_>, depth: u32) -> Result<Term, SubstError> {
    match t {
        Term::Lam(h, body) => Ok(Term::Lam(h.clone(), Box::new(subst_term(body, target, depth + 1)?))),
        Term::App(head, spine) => {
            let spine = spine
                .iter()
                .map(|a| subst_term(a, target, depth))
                .collect::<Result<Vec<_>, _>>()?;
            match target.lookup(head, depth) {
                Lookup::Hit(replacement, arity) => reduce(replacement, arity, spine),
                Lookup::Miss(head) => Ok(Term::App(head, spine)),
            }
        }
    }
}

fn subst_type(ty: &Type, target: &Target<'_>, depth: u32) -> Result<Type, SubstError> {
    match ty {
        Type::Atom(a, spine) => Ok(Type::Atom(
            a.clone(),
            spine
                .iter()
                .map(|t| subst_term(t, target, depth))
                .collect::<Result<_, _>>()?,
        )),
        Type::Pi(h, dom, cod) => Ok(Type::Pi(
            h.clone(),
            Box::new(subst_type(dom, target, depth)?),
            Box::new(subst_type(cod, target, depth + 1)?),
        )),
    }
}

fn subst_kind(k: &Kind, target: &Target<'_>, depth: u32) -> Result<Kind, SubstError> {
    match k {
        Kind::Type => Ok(Kind::Type),
        Kind::Pi(h, dom, cod) => Ok(Kind::Pi(
            h.clone(),
            subst_type(dom, target, depth)?,
            Box::new(subst_kind(cod, target, depth + 1)?),
        )),
    }
}

/// Apply `m` (of arity `arity`) to `spine`, contracting redexes as they form.
fn reduce(m: Term, arity: &ArityType, spine: Vec<Term>) -> Result<Term, SubstError> {
    let total = spine.len();
    let mut m = m;
    let mut arity = arity;
    for arg in spine {
        let ArityType::Arrow(a1, a2) = arity else {
            return Err(SubstError::ArityMismatch { arity: arity.clone(), args: total });
        };
        m = match m {
            Term::Lam(_, body) => instantiate_term(&body, &arg, a1)?,
            Term::App(h, mut sp) => {
                sp.push(arg);
                Term::App(h, sp)
            }
        };
        arity = a2;
    }
    Ok(m)
}

/// `body[arg/0]` where index 0 has arity `arity`.
pub fn instantiate_term(body: &Term, arg: &Term, arity: &ArityType) -> Result<Term, SubstError> {
    subst_term(body, &Target::Index { term: arg, arity }, 0)
}

pub fn instantiate_type(body: &Type, arg: &Term, arity: &ArityType) -> Result<Type, SubstError> {
    subst_type(body, &Target::Index { term: arg, arity }, 0)
}

pub fn instantiate_kind(body: &Kind, arg: &Term, arity: &ArityType) -> Result<Kind, SubstError> {
    subst_kind(body, &Target::Index { term: arg, arity }, 0)
}
