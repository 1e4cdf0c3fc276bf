//! Simple typing of erased LF expressions.

use std::collections::HashMap;

use super::signature::{Classifier, Signature};
use super::subst::{erase, erase_kind};
use super::syntax::{ArityType, Head, Ident, LfContext, CtxName, Term, Type};

/// Arity assignments for constants and variables. Nominals carry their own
/// arity and need no entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArityContext {
    names: HashMap<Ident, ArityType>,
    families: HashMap<Ident, Vec<ArityType>>,
}

impl ArityContext {
    pub fn new() -> Self {
        ArityContext::default()
    }

    /// The erased signature.
    pub fn from_signature(sig: &Signature) -> Self {
        let mut cx = ArityContext::new();
        for d in sig.decls() {
            match &d.classifier {
                Classifier::Kind(k) => {
                    cx.families.entry(d.name.clone()).or_insert_with(|| erase_kind(k));
                }
                Classifier::Type(t) => {
                    cx.names.entry(d.name.clone()).or_insert_with(|| erase(t));
                }
            }
        }
        cx
    }

    /// Returns false if `name` already has an assignment.
    pub fn assign(&mut self, name: Ident, arity: ArityType) -> bool {
        if self.names.contains_key(&name) {
            return false;
        }
        self.names.insert(name, arity);
        true
    }

    /// Like `assign`, but a later assignment shadows an earlier one.
    pub fn bind(&mut self, name: Ident, arity: ArityType) {
        self.names.insert(name, arity);
    }

    pub fn unbind(&mut self, name: &Ident) {
        self.names.remove(name);
    }

    pub fn with(mut self, name: &str, arity: ArityType) -> Self {
        self.bind(Ident::new(name), arity);
        self
    }

    /// Add the erased variable bindings of an LF context.
    pub fn extend_context(&mut self, ctx: &LfContext) {
        for b in &ctx.0 {
            if let CtxName::Var(v) = &b.name {
                self.bind(v.clone(), erase(&b.ty));
            }
        }
    }

    pub fn get(&self, name: &Ident) -> Option<&ArityType> {
        self.names.get(name)
    }

    pub fn family(&self, name: &Ident) -> Option<&[ArityType]> {
        self.families.get(name).map(Vec::as_slice)
    }

    fn head_arity<'a>(&'a self, stack: &'a [ArityType], head: &'a Head) -> Option<&'a ArityType> {
        match head {
            Head::Const(c) | Head::Var(c) => self.names.get(c),
            Head::Nominal(n) => Some(&n.arity),
            Head::Bound(i) => {
                let i = *i as usize;
                if i < stack.len() {
                    Some(&stack[stack.len() - 1 - i])
                } else {
                    None
                }
            }
        }
    }

    fn term(&self, stack: &mut Vec<ArityType>, m: &Term, alpha: &ArityType) -> bool {
        match (m, alpha) {
            (Term::Lam(_, body), ArityType::Arrow(a1, a2)) => {
                stack.push((**a1).clone());
                let ok = self.term(stack, body, a2);
                stack.pop();
                ok
            }
            (Term::Lam(..), ArityType::Base) => false,
            (Term::App(..), ArityType::Arrow(..)) => false,
            (Term::App(head, spine), ArityType::Base) => {
                let Some(h) = self.head_arity(stack, head) else {
                    return false;
                };
                let args: Vec<ArityType> = h.args().into_iter().cloned().collect();
                args.len() == spine.len() && spine.iter().zip(&args).all(|(t, a)| self.term(stack, t, a))
            }
        }
    }

    fn ty(&self, stack: &mut Vec<ArityType>, a: &Type) -> bool {
        match a {
            Type::Atom(c, spine) => {
                let Some(args) = self.families.get(c) else {
                    return false;
                };
                args.len() == spine.len() && spine.iter().zip(args).all(|(t, a)| self.term(stack, t, a))
            }
            Type::Pi(_, dom, cod) => {
                if !self.ty(stack, dom) {
                    return false;
                }
                stack.push(erase(dom));
                let ok = self.ty(stack, cod);
                stack.pop();
                ok
            }
        }
    }
}

pub fn arity_check_term(cx: &ArityContext, m: &Term, alpha: &ArityType) -> bool {
    cx.term(&mut Vec::new(), m, alpha)
}

pub fn arity_check_type(cx: &ArityContext, a: &Type) -> bool {
    cx.ty(&mut Vec::new(), a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lf::syntax::Kind;

    fn cx() -> ArityContext {
        let nat = Type::atom("nat", vec![]);
        let tm = Type::atom("tm", vec![]);
        let mut s = Signature::new();
        s.declare_type("nat", Kind::Type);
        s.declare_term("z", nat.clone());
        s.declare_term("s", Type::arrow(nat.clone(), nat.clone()));
        s.declare_type("tm", Kind::Type);
        s.declare_type("size", Kind::arrow(tm, Kind::arrow(nat, Kind::Type)));
        ArityContext::from_signature(&s)
    }

    #[test]
    fn terms() {
        let sz = Term::app(Head::Const(Ident::new("s")), vec![Term::constant("z")]);
        assert!(arity_check_term(&cx(), &sz, &ArityType::Base));
        let id = Term::lam("x", Term::var("x"));
        assert!(arity_check_term(&cx(), &id, &ArityType::arrow(ArityType::Base, ArityType::Base)));
        assert!(!arity_check_term(&cx(), &Term::constant("s"), &ArityType::Base));
    }

    #[test]
    fn types() {
        let sz = Term::app(Head::Const(Ident::new("s")), vec![Term::constant("z")]);
        let ty = Type::atom("size", vec![Term::var("x"), sz]);
        assert!(arity_check_type(&cx().with("x", ArityType::Base), &ty));
        assert!(!arity_check_type(&cx(), &ty));
        assert!(arity_check_type(&cx(), &Type::atom("nat", vec![])));
        assert!(!arity_check_type(&cx(), &Type::atom("size", vec![Term::constant("z")])));
    }

    #[test]
    fn assign_is_single() {
        let mut c = ArityContext::new();
        assert!(c.assign(Ident::new("x"), ArityType::Base));
        assert!(!c.assign(Ident::new("x"), ArityType::Base));
    }
}
