//! Bidirectional checking for canonical LF.
//!
//! Binders are opened with a fresh nominal constant, the lowest index not
//! already used anywhere in the context or the expressions being checked.

use std::collections::BTreeSet;

use thiserror::Error;

use super::signature::{Classifier, Signature};
use super::subst::{erase, instantiate_kind, instantiate_type, SubstError};
use super::syntax::{lowest_unused, CtxName, FreeNames, Head, Ident, Kind, LfContext, Nominal, Term, Type};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LfError {
    #[error("`{0}` is declared more than once")]
    DuplicateName(String),
    #[error("declaration `{name}` has an ill-formed classifier: {cause}")]
    IllFormedClassifier { name: String, cause: Box<LfError> },
    #[error("binding `{name}` has an ill-formed type: {cause}")]
    IllFormedType { name: String, cause: Box<LfError> },
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("`{head}` expects {expected} argument(s) but is given {found}")]
    SpineArity { head: String, expected: usize, found: usize },
    #[error("argument {position} of `{head}` is ill-typed: {cause}")]
    ArgumentTypeMismatch { head: String, position: usize, cause: Box<LfError> },
    #[error("`{0}` is not in eta-long form")]
    NotEtaLong(String),
    #[error("`{0}` is not bound")]
    HeadUnbound(String),
    #[error("`{term}` has type `{found}` but `{expected}` was expected")]
    TypeMismatch { term: String, expected: String, found: String },
    #[error(transparent)]
    Subst(#[from] SubstError),
}

pub type LfResult<T> = Result<T, LfError>;

/// Checks against the first `limit` declarations of a signature.
#[derive(Clone, Copy, Debug)]
struct Checker<'s> {
    sig: &'s Signature,
    limit: usize,
}

fn count_pis(ty: &Type) -> usize {
    match ty {
        Type::Atom(..) => 0,
        Type::Pi(_, _, cod) => 1 + count_pis(cod),
    }
}

fn fresh_nominal(ctx: &LfContext, names: &[&FreeNames], arity: super::syntax::ArityType) -> Nominal {
    let mut used: BTreeSet<u32> = ctx.nominal_indices();
    for n in names {
        used.extend(n.nominals.iter().map(|n| n.index));
    }
    Nominal::new(arity, lowest_unused(&used))
}

impl<'s> Checker<'s> {
    fn visible(&self, name: &Ident) -> Option<&'s Classifier> {
        match self.sig.position(name) {
            Some(i) if i < self.limit => Some(&self.sig.decls()[i].classifier),
            _ => None,
        }
    }

    fn kind_of(&self, a: &Ident) -> LfResult<&'s Kind> {
        match self.visible(a) {
            Some(Classifier::Kind(k)) => Ok(k),
            _ => Err(LfError::UnknownConstant(a.to_string())),
        }
    }

    fn head_type(&self, ctx: &LfContext, head: &Head) -> LfResult<Type> {
        match head {
            Head::Const(c) => match self.visible(c) {
                Some(Classifier::Type(t)) => Ok(t.clone()),
                _ => Err(LfError::UnknownConstant(c.to_string())),
            },
            Head::Var(_) | Head::Nominal(_) => ctx.lookup(head).cloned().ok_or_else(|| {
                LfError::HeadUnbound(match head {
                    Head::Var(v) => v.to_string(),
                    Head::Nominal(n) => n.to_string(),
                    _ => unreachable!(),
                })
            }),
            Head::Bound(i) => Err(LfError::HeadUnbound(format!("#{}", i))),
        }
    }

    fn kind(&self, ctx: &LfContext, k: &Kind) -> LfResult<()> {
        match k {
            Kind::Type => Ok(()),
            Kind::Pi(_, dom, cod) => {
                self.ty(ctx, dom)?;
                let mut names = FreeNames::default();
                cod.collect_heads(&mut names);
                dom.collect_heads(&mut names);
                let n = fresh_nominal(ctx, &[&names], erase(dom));
                let cod = instantiate_kind(cod, &Term::nominal(n.clone()), &n.arity)?;
                let mut inner = ctx.clone();
                inner.push(CtxName::Nominal(n), dom.clone());
                self.kind(&inner, &cod)
            }
        }
    }

    fn ty(&self, ctx: &LfContext, a: &Type) -> LfResult<()> {
        match a {
            Type::Atom(c, spine) => {
                let mut kind = self.kind_of(c)?.clone();
                let expected = kind.domains().len();
                for (i, arg) in spine.iter().enumerate() {
                    let Kind::Pi(_, dom, cod) = kind else {
                        return Err(LfError::SpineArity { head: c.to_string(), expected, found: spine.len() });
                    };
                    self.term(ctx, arg, &dom).map_err(|e| LfError::ArgumentTypeMismatch {
                        head: c.to_string(),
                        position: i + 1,
                        cause: Box::new(e),
                    })?;
                    kind = instantiate_kind(&cod, arg, &erase(&dom))?;
                }
                if kind != Kind::Type {
                    return Err(LfError::SpineArity { head: c.to_string(), expected, found: spine.len() });
                }
                Ok(())
            }
            Type::Pi(_, dom, cod) => {
                self.ty(ctx, dom)?;
                let n = fresh_nominal(ctx, &[&a.free_names()], erase(dom));
                let cod = instantiate_type(cod, &Term::nominal(n.clone()), &n.arity)?;
                let mut inner = ctx.clone();
                inner.push(CtxName::Nominal(n), (**dom).clone());
                self.ty(&inner, &cod)
            }
        }
    }

    fn term(&self, ctx: &LfContext, m: &Term, a: &Type) -> LfResult<()> {
        match (m, a) {
            (Term::Lam(_, body), Type::Pi(_, dom, cod)) => {
                let n = fresh_nominal(ctx, &[&m.free_names(), &a.free_names()], erase(dom));
                let arg = Term::nominal(n.clone());
                let body = super::subst::instantiate_term(body, &arg, &n.arity)?;
                let cod = instantiate_type(cod, &arg, &n.arity)?;
                let mut inner = ctx.clone();
                inner.push(CtxName::Nominal(n), (**dom).clone());
                self.term(&inner, &body, &cod)
            }
            (Term::App(..), Type::Pi(..)) => Err(LfError::NotEtaLong(m.to_string())),
            (Term::Lam(..), Type::Atom(..)) => Err(LfError::TypeMismatch {
                term: m.to_string(),
                expected: a.to_string(),
                found: "a function type".to_string(),
            }),
            (Term::App(head, spine), Type::Atom(..)) => {
                let found = self.synth(ctx, head, spine)?;
                if let Type::Pi(..) = found {
                    return Err(LfError::NotEtaLong(m.to_string()));
                }
                if &found != a {
                    return Err(LfError::TypeMismatch {
                        term: m.to_string(),
                        expected: a.to_string(),
                        found: found.to_string(),
                    });
                }
                Ok(())
            }
        }
    }

    fn synth(&self, ctx: &LfContext, head: &Head, spine: &[Term]) -> LfResult<Type> {
        let mut ty = self.head_type(ctx, head)?;
        let expected = count_pis(&ty);
        let head_name = Term::App(head.clone(), Vec::new()).to_string();
        for arg in spine {
            let Type::Pi(_, dom, cod) = ty else {
                return Err(LfError::SpineArity { head: head_name, expected, found: spine.len() });
            };
            self.term(ctx, arg, &dom)?;
            ty = instantiate_type(&cod, arg, &erase(&dom))?;
        }
        Ok(ty)
    }
}

pub fn check_signature(sig: &Signature) -> LfResult<()> {
    for (i, d) in sig.decls().iter().enumerate() {
        if sig.position(&d.name) != Some(i) {
            return Err(LfError::DuplicateName(d.name.to_string()));
        }
        let c = Checker { sig, limit: i };
        let ctx = LfContext::empty();
        let r = match &d.classifier {
            Classifier::Kind(k) => c.kind(&ctx, k),
            Classifier::Type(t) => c.ty(&ctx, t),
        };
        r.map_err(|e| LfError::IllFormedClassifier { name: d.name.to_string(), cause: Box::new(e) })?;
    }
    Ok(())
}

pub fn check_context(sig: &Signature, ctx: &LfContext) -> LfResult<()> {
    let c = Checker { sig, limit: sig.len() };
    let mut seen = BTreeSet::new();
    let mut prefix = LfContext::empty();
    for b in &ctx.0 {
        if !seen.insert(b.name.clone()) {
            return Err(LfError::DuplicateName(b.name.to_string()));
        }
        c.ty(&prefix, &b.ty)
            .map_err(|e| LfError::IllFormedType { name: b.name.to_string(), cause: Box::new(e) })?;
        prefix.0.push(b.clone());
    }
    Ok(())
}

pub fn check_kind(sig: &Signature, ctx: &LfContext, k: &Kind) -> LfResult<()> {
    Checker { sig, limit: sig.len() }.kind(ctx, k)
}

pub fn check_type(sig: &Signature, ctx: &LfContext, a: &Type) -> LfResult<()> {
    Checker { sig, limit: sig.len() }.ty(ctx, a)
}

pub fn check_term(sig: &Signature, ctx: &LfContext, m: &Term, a: &Type) -> LfResult<()> {
    Checker { sig, limit: sig.len() }.term(ctx, m, a)
}

/// The type of an application term in eta-long form. For an atomic `a`,
/// `check_term(sig, ctx, m, a)` succeeds exactly when this returns `a`.
pub fn synth_term(sig: &Signature, ctx: &LfContext, m: &Term) -> LfResult<Type> {
    let Term::App(head, spine) = m else {
        return Err(LfError::TypeMismatch {
            term: m.to_string(),
            expected: "an atomic type".to_string(),
            found: "a function type".to_string(),
        });
    };
    let found = Checker { sig, limit: sig.len() }.synth(ctx, head, spine)?;
    if let Type::Pi(..) = found {
        return Err(LfError::NotEtaLong(m.to_string()));
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lf::syntax::{Binding, Ident};

    fn nat() -> Type {
        Type::atom("nat", vec![])
    }

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare_type("nat", Kind::Type);
        s.declare_term("z", nat());
        s.declare_term("s", Type::arrow(nat(), nat()));
        s.declare_type("plus", Kind::arrow(nat(), Kind::arrow(nat(), Kind::arrow(nat(), Kind::Type))));
        s.declare_term(
            "plus-z",
            Type::pi("N", nat(), Type::atom("plus", vec![Term::constant("z"), Term::var("N"), Term::var("N")])),
        );
        s
    }

    #[test]
    fn signature_ok() {
        assert_eq!(check_signature(&sig()), Ok(()));
    }

    #[test]
    fn forward_reference_is_rejected() {
        let mut s = Signature::new();
        s.declare_term("c", Type::atom("d", vec![]));
        assert!(matches!(check_signature(&s), Err(LfError::IllFormedClassifier { .. })));
    }

    #[test]
    fn spine_checks() {
        let s = sig();
        let z = Term::constant("z");
        let plus_zzz = Type::atom("plus", vec![z.clone(), z.clone(), z.clone()]);
        assert_eq!(check_type(&s, &LfContext::empty(), &plus_zzz), Ok(()));
        let pz = Term::app(Head::Const(Ident::new("plus-z")), vec![z.clone()]);
        assert_eq!(check_term(&s, &LfContext::empty(), &pz, &plus_zzz), Ok(()));
        let bad = Type::atom("plus", vec![z.clone(), z.clone()]);
        assert!(matches!(check_type(&s, &LfContext::empty(), &bad), Err(LfError::SpineArity { .. })));
    }

    #[test]
    fn eta_long_is_enforced() {
        let s = sig();
        let succ = Term::constant("s");
        let ty = Type::arrow(nat(), nat());
        assert!(matches!(check_term(&s, &LfContext::empty(), &succ, &ty), Err(LfError::NotEtaLong(_))));
        let eta = Term::lam("x", Term::app(Head::Const(Ident::new("s")), vec![Term::var("x")]));
        assert_eq!(check_term(&s, &LfContext::empty(), &eta, &ty), Ok(()));
    }

    #[test]
    fn context_order_matters() {
        let s = sig();
        let n1 = Nominal::base(1);
        let n2 = Nominal::base(2);
        let good = LfContext(vec![
            Binding::new(CtxName::Nominal(n1.clone()), nat()),
            Binding::new(
                CtxName::Nominal(n2.clone()),
                Type::atom("plus", vec![Term::nominal(n1.clone()), Term::nominal(n1.clone()), Term::nominal(n1.clone())]),
            ),
        ]);
        assert_eq!(check_context(&s, &good), Ok(()));
        let bad = LfContext(good.0.iter().rev().cloned().collect());
        assert!(matches!(check_context(&s, &bad), Err(LfError::IllFormedType { .. })));
        let dup = LfContext(vec![good.0[0].clone(), good.0[0].clone()]);
        assert!(matches!(check_context(&s, &dup), Err(LfError::DuplicateName(_))));
    }
}
