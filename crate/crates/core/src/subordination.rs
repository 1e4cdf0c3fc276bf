//! The subordination preorder on type constants and context minimization.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::lf::{Classifier, Ident, LfContext, Signature, Type};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("type constant `{0}` is not declared")]
pub struct UnknownConstant(pub String);

/// `(a, b)` in the relation means `a ⪯ b`: objects of family `a` may occur
/// inside objects of family `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubordRel {
    pairs: BTreeSet<(Ident, Ident)>,
    constants: Vec<Ident>,
}

pub fn head(a: &Type) -> &Ident {
    a.head()
}

/// Heads of the outer Pi domains of a classifier.
fn index_heads(ty: &Type, out: &mut BTreeSet<Ident>) {
    if let Type::Pi(_, dom, cod) = ty {
        out.insert(dom.head().clone());
        index_heads(cod, out);
    }
}

pub fn compute_subordination(sig: &Signature) -> SubordRel {
    let constants: Vec<Ident> = sig.type_constants().cloned().collect();
    let mut direct: BTreeSet<(Ident, Ident)> = BTreeSet::new();
    for d in sig.decls() {
        let mut heads = BTreeSet::new();
        let target = match &d.classifier {
            Classifier::Kind(k) => {
                for dom in k.domains() {
                    heads.insert(dom.head().clone());
                }
                d.name.clone()
            }
            Classifier::Type(t) => {
                index_heads(t, &mut heads);
                t.head().clone()
            }
        };
        for h in heads {
            direct.insert((h, target.clone()));
        }
    }
    for c in &constants {
        direct.insert((c.clone(), c.clone()));
    }

    let mut pairs = direct.clone();
    let mut work: VecDeque<(Ident, Ident)> = direct.into_iter().collect();
    while let Some((a, b)) = work.pop_front() {
        let mut new = Vec::new();
        for (c, d) in &pairs {
            if *c == b && !pairs.contains(&(a.clone(), d.clone())) {
                new.push((a.clone(), d.clone()));
            }
            if *d == a && !pairs.contains(&(c.clone(), b.clone())) {
                new.push((c.clone(), b.clone()));
            }
        }
        for p in new {
            if pairs.insert(p.clone()) {
                work.push_back(p);
            }
        }
    }
    SubordRel { pairs, constants }
}

impl SubordRel {
    pub fn contains(&self, a: &Ident, b: &Ident) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Ident, &Ident)> {
        self.pairs.iter().map(|(a, b)| (a, b))
    }

    pub fn constants(&self) -> &[Ident] {
        &self.constants
    }

    pub fn is_declared(&self, a: &Ident) -> bool {
        self.constants.contains(a)
    }

    fn declared(&self, a: &Ident) -> Result<(), UnknownConstant> {
        if self.is_declared(a) {
            Ok(())
        } else {
            Err(UnknownConstant(a.to_string()))
        }
    }

    pub fn type_leq(&self, a: &Type, b: &Type) -> Result<bool, UnknownConstant> {
        self.heads_leq(a.head(), b.head())
    }

    pub fn heads_leq(&self, a: &Ident, b: &Ident) -> Result<bool, UnknownConstant> {
        self.declared(a)?;
        self.declared(b)?;
        Ok(self.contains(a, b))
    }

    /// `G|A`: keep exactly the bindings whose type is subordinate to `A`.
    pub fn minimize(&self, ctx: &LfContext, a: &Type) -> Result<LfContext, UnknownConstant> {
        let mut out = Vec::new();
        for b in &ctx.0 {
            if self.type_leq(&b.ty, a)? {
                out.push(b.clone());
            }
        }
        Ok(LfContext(out))
    }

    #[doc(hidden)]
    pub fn remove_pair_for_testing(&mut self, a: &str, b: &str) -> bool {
        self.pairs.remove(&(Ident::new(a), Ident::new(b)))
    }
}

impl fmt::Display for SubordRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.pairs {
            writeln!(f, "{} <= {}", a, b)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lf::{Binding, CtxName, Kind, Nominal, Term};

    #[test]
    fn single_type_constant() {
        let mut s = Signature::new();
        s.declare_type("a", Kind::Type);
        let rel = compute_subordination(&s);
        assert_eq!(rel.pairs().count(), 1);
        assert!(rel.contains(&Ident::new("a"), &Ident::new("a")));
    }

    #[test]
    fn transitive_through_chain() {
        let mut s = Signature::new();
        s.declare_type("a", Kind::Type);
        s.declare_type("b", Kind::arrow(Type::atom("a", vec![]), Kind::Type));
        s.declare_type("c", Kind::Type);
        s.declare_term("k", Type::arrow(Type::atom("b", vec![Term::var("x")]), Type::atom("c", vec![])));
        let rel = compute_subordination(&s);
        assert!(rel.contains(&Ident::new("a"), &Ident::new("c")));
        assert!(!rel.contains(&Ident::new("c"), &Ident::new("a")));
    }

    #[test]
    fn minimize_keeps_order() {
        let mut s = Signature::new();
        s.declare_type("a", Kind::Type);
        s.declare_type("b", Kind::Type);
        let rel = compute_subordination(&s);
        let a = Type::atom("a", vec![]);
        let b = Type::atom("b", vec![]);
        let g = LfContext(vec![
            Binding::new(CtxName::Nominal(Nominal::base(1)), a.clone()),
            Binding::new(CtxName::Nominal(Nominal::base(2)), b.clone()),
            Binding::new(CtxName::Nominal(Nominal::base(3)), a.clone()),
        ]);
        let m = rel.minimize(&g, &a).unwrap();
        assert_eq!(m.0.len(), 2);
        assert_eq!(m.0[1].name, CtxName::Nominal(Nominal::base(3)));
        assert!(rel.minimize(&g, &Type::atom("q", vec![])).is_err());
    }
}
