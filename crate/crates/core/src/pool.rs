//! Exhaustive enumeration of arity-typed canonical terms by size.
//!
//! Size counts head occurrences, so `z` and `[x] x` both have size 1.
//! Terms are enumerated in de Bruijn form, hence without alpha-duplicates.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::lf::{erase, ArityType, Classifier, Head, Hint, Nominal, Signature, Term};

type Key = (Vec<ArityType>, ArityType, usize);

/// A source of closed terms built from a fixed set of heads.
#[derive(Debug)]
pub struct TermPool {
    heads: Vec<(Head, ArityType)>,
    memo: RefCell<HashMap<Key, Rc<Vec<Term>>>>,
}

impl Clone for TermPool {
    fn clone(&self) -> Self {
        TermPool::new(self.heads.clone())
    }
}

impl TermPool {
    pub fn new(heads: Vec<(Head, ArityType)>) -> Self {
        TermPool { heads, memo: RefCell::new(HashMap::new()) }
    }

    /// Term constants of a signature, in declaration order.
    pub fn from_signature(sig: &Signature) -> Self {
        TermPool::new(signature_heads(sig))
    }

    /// Term constants followed by the given nominals.
    pub fn with_nominals(sig: &Signature, nominals: impl IntoIterator<Item = Nominal>) -> Self {
        let mut heads = signature_heads(sig);
        for n in nominals {
            let a = n.arity.clone();
            heads.push((Head::Nominal(n), a));
        }
        TermPool::new(heads)
    }

    pub fn heads(&self) -> &[(Head, ArityType)] {
        &self.heads
    }

    /// All closed terms of arity `alpha` with size at most `max`.
    pub fn up_to(&self, alpha: &ArityType, max: usize) -> Vec<Term> {
        let mut out = Vec::new();
        for s in 1..=max {
            out.extend(self.exact(&[], alpha, s).iter().cloned());
        }
        out
    }

    fn exact(&self, scope: &[ArityType], alpha: &ArityType, size: usize) -> Rc<Vec<Term>> {
        let key = (scope.to_vec(), alpha.clone(), size);
        if let Some(v) = self.memo.borrow().get(&key) {
            return v.clone();
        }
        let v = Rc::new(self.build(scope, alpha, size));
        self.memo.borrow_mut().insert(key, v.clone());
        v
    }

    fn build(&self, scope: &[ArityType], alpha: &ArityType, size: usize) -> Vec<Term> {
        if size == 0 {
            return Vec::new();
        }
        if let ArityType::Arrow(a1, a2) = alpha {
            let mut inner = scope.to_vec();
            inner.push((**a1).clone());
            return self
                .exact(&inner, a2, size)
                .iter()
                .map(|b| Term::Lam(Hint::new("x"), Box::new(b.clone())))
                .collect();
        }
        let mut candidates: Vec<(Head, &ArityType)> = self.heads.iter().map(|(h, a)| (h.clone(), a)).collect();
        for (i, a) in scope.iter().enumerate() {
            candidates.push((Head::Bound((scope.len() - 1 - i) as u32), a));
        }
        let mut out = Vec::new();
        for (head, arity) in candidates {
            let args = arity.args();
            if args.len() >= size {
                continue;
            }
            for spine in self.spines(scope, &args, size - 1) {
                out.push(Term::App(head.clone(), spine));
            }
        }
        out
    }

    fn spines(&self, scope: &[ArityType], args: &[&ArityType], size: usize) -> Vec<Vec<Term>> {
        match args.split_first() {
            None => {
                if size == 0 {
                    vec![Vec::new()]
                } else {
                    Vec::new()
                }
            }
            Some((first, rest)) => {
                let mut out = Vec::new();
                let min_rest = rest.len();
                for s in 1..=size.saturating_sub(min_rest) {
                    let heads = self.exact(scope, first, s);
                    if heads.is_empty() {
                        continue;
                    }
                    let tails = self.spines(scope, rest, size - s);
                    for h in heads.iter() {
                        for t in &tails {
                            let mut sp = Vec::with_capacity(args.len());
                            sp.push(h.clone());
                            sp.extend(t.iter().cloned());
                            out.push(sp);
                        }
                    }
                }
                out
            }
        }
    }
}

fn signature_heads(sig: &Signature) -> Vec<(Head, ArityType)> {
    sig.decls()
        .iter()
        .filter_map(|d| match &d.classifier {
            Classifier::Type(t) => Some((Head::Const(d.name.clone()), erase(t))),
            Classifier::Kind(_) => None,
        })
        .collect()
}

/// Eta-expansion of a nominal: `[x1]...[xk] n x1 ... xk`.
pub fn eta_nominal(n: &Nominal) -> Term {
    Term::eta_expand(Head::Nominal(n.clone()), Vec::new(), &n.arity)
}
