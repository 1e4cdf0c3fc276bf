//! Canonical LF syntax.
//!
//! Bound variables are de Bruijn indices (`Head::Bound`); every binder keeps
//! its surface name as a [`Hint`] that is ignored by equality, so derived
//! `PartialEq` is alpha-equivalence.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// An interned-ish name for constants and variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(s: &str) -> Self {
        Ident(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

impl From<String> for Ident {
    fn from(s: String) -> Self {
        Ident(Arc::from(s))
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Simple types over the single base `o`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArityType {
    Base,
    Arrow(Box<ArityType>, Box<ArityType>),
}

impl ArityType {
    pub fn arrow(from: ArityType, to: ArityType) -> Self {
        ArityType::Arrow(Box::new(from), Box::new(to))
    }

    /// `a1 -> ... -> an -> o`
    pub fn from_args(args: impl IntoIterator<Item = ArityType>) -> Self {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(ArityType::Base, |acc, a| ArityType::arrow(a, acc))
    }

    /// Argument arities, left to right.
    pub fn args(&self) -> Vec<&ArityType> {
        let mut out = Vec::new();
        let mut cur = self;
        while let ArityType::Arrow(a, b) = cur {
            out.push(&**a);
            cur = b;
        }
        out
    }

    pub fn is_base(&self) -> bool {
        matches!(self, ArityType::Base)
    }
}

impl fmt::Display for ArityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArityType::Base => f.write_str("o"),
            ArityType::Arrow(a, b) => {
                if a.is_base() {
                    write!(f, "o -> {}", b)
                } else {
                    write!(f, "({}) -> {}", a, b)
                }
            }
        }
    }
}

/// The surface name a binder was written with. Never affects equality.
#[derive(Clone)]
pub struct Hint(pub Ident);

impl Hint {
    pub fn new(s: &str) -> Self {
        Hint(Ident::new(s))
    }

    pub fn name(&self) -> &Ident {
        &self.0
    }
}

impl PartialEq for Hint {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Hint {}

impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl PartialOrd for Hint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Hint {
    fn cmp(&self, _: &Self) -> std::cmp::Ordering {
        std::cmp::Ordering::Equal
    }
}

impl fmt::Debug for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A nominal constant. Identity is the pair (arity, index).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nominal {
    pub arity: ArityType,
    pub index: u32,
}

impl Nominal {
    pub fn new(arity: ArityType, index: u32) -> Self {
        Nominal { arity, index }
    }

    pub fn base(index: u32) -> Self {
        Nominal::new(ArityType::Base, index)
    }
}

impl fmt::Display for Nominal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Const(Ident),
    Var(Ident),
    Nominal(Nominal),
    /// de Bruijn index, 0 is the innermost binder.
    Bound(u32),
}

/// Canonical terms: `R` is `App(head, spine)`, abstractions are `Lam`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    App(Head, Vec<Term>),
    Lam(Hint, Box<Term>),
}

/// Canonical type families.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Atom(Ident, Vec<Term>),
    Pi(Hint, Box<Type>, Box<Type>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Type,
    Pi(Hint, Type, Box<Kind>),
}

impl Term {
    pub fn constant(name: &str) -> Self {
        Term::App(Head::Const(Ident::new(name)), Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Term::App(Head::Var(Ident::new(name)), Vec::new())
    }

    pub fn nominal(n: Nominal) -> Self {
        Term::App(Head::Nominal(n), Vec::new())
    }

    pub fn bound(i: u32) -> Self {
        Term::App(Head::Bound(i), Vec::new())
    }

    pub fn app(head: Head, spine: Vec<Term>) -> Self {
        Term::App(head, spine)
    }

    /// Abstract the free variable `x` out of `body`.
    pub fn lam(x: &str, body: Term) -> Self {
        let target = Head::Var(Ident::new(x));
        Term::Lam(Hint::new(x), Box::new(body.close(&target, 0)))
    }

    /// Eta-long form of `head spine`, where `head` has arity `arity` and
    /// `spine` supplies a prefix of its arguments.
    pub fn eta_expand(head: Head, spine: Vec<Term>, arity: &ArityType) -> Term {
        let args = arity.args();
        let rest = &args[spine.len().min(args.len())..];
        let k = rest.len() as u32;
        let Term::App(head, mut spine) = Term::App(head, spine).shift(k, 0) else { unreachable!() };
        for (i, a) in rest.iter().enumerate() {
            spine.push(Term::eta_expand(Head::Bound(k - 1 - i as u32), Vec::new(), a));
        }
        let mut t = Term::App(head, spine);
        for _ in 0..k {
            t = Term::Lam(Hint::new("x"), Box::new(t));
        }
        t
    }

    /// Number of head occurrences; lambdas are free.
    pub fn size(&self) -> usize {
        match self {
            Term::App(_, spine) => 1 + spine.iter().map(Term::size).sum::<usize>(),
            Term::Lam(_, body) => body.size(),
        }
    }

    /// Replace occurrences of `target` by a fresh outermost binder.
    pub fn close(&self, target: &Head, depth: u32) -> Term {
        match self {
            Term::Lam(h, body) => Term::Lam(h.clone(), Box::new(body.close(target, depth + 1))),
            Term::App(head, spine) => {
                let spine = spine.iter().map(|t| t.close(target, depth)).collect();
                let head = match head {
                    Head::Bound(i) if *i >= depth => Head::Bound(i + 1),
                    h if h == target => Head::Bound(depth),
                    h => h.clone(),
                };
                Term::App(head, spine)
            }
        }
    }

    pub fn shift(&self, by: u32, cutoff: u32) -> Term {
        if by == 0 {
            return self.clone();
        }
        match self {
            Term::Lam(h, body) => Term::Lam(h.clone(), Box::new(body.shift(by, cutoff + 1))),
            Term::App(head, spine) => {
                let head = match head {
                    Head::Bound(i) if *i >= cutoff => Head::Bound(i + by),
                    h => h.clone(),
                };
                Term::App(head, spine.iter().map(|t| t.shift(by, cutoff)).collect())
            }
        }
    }

    /// Does de Bruijn index `idx` (relative to this term's root) occur?
    pub fn mentions_bound(&self, idx: u32) -> bool {
        match self {
            Term::Lam(_, body) => body.mentions_bound(idx + 1),
            Term::App(head, spine) => {
                matches!(head, Head::Bound(i) if *i == idx)
                    || spine.iter().any(|t| t.mentions_bound(idx))
            }
        }
    }

    /// Largest loose index plus one (0 if locally closed).
    pub fn loose_bound(&self) -> u32 {
        match self {
            Term::Lam(_, body) => body.loose_bound().saturating_sub(1),
            Term::App(head, spine) => {
                let h = match head {
                    Head::Bound(i) => i + 1,
                    _ => 0,
                };
                spine.iter().map(Term::loose_bound).fold(h, u32::max)
            }
        }
    }

    pub fn collect_heads(&self, out: &mut FreeNames) {
        match self {
            Term::Lam(_, body) => body.collect_heads(out),
            Term::App(head, spine) => {
                match head {
                    Head::Const(c) => {
                        out.consts.insert(c.clone());
                    }
                    Head::Var(v) => {
                        out.vars.insert(v.clone());
                    }
                    Head::Nominal(n) => {
                        out.nominals.insert(n.clone());
                    }
                    Head::Bound(_) => {}
                }
                for t in spine {
                    t.collect_heads(out);
                }
            }
        }
    }

    pub fn free_names(&self) -> FreeNames {
        let mut out = FreeNames::default();
        self.collect_heads(&mut out);
        out
    }

    /// Rename free variables (not substitution: no normalization needed).
    pub fn rename_vars(&self, f: &impl Fn(&Ident) -> Option<Ident>) -> Term {
        match self {
            Term::Lam(h, body) => Term::Lam(h.clone(), Box::new(body.rename_vars(f))),
            Term::App(head, spine) => {
                let head = match head {
                    Head::Var(v) => Head::Var(f(v).unwrap_or_else(|| v.clone())),
                    h => h.clone(),
                };
                Term::App(head, spine.iter().map(|t| t.rename_vars(f)).collect())
            }
        }
    }
}

impl Type {
    pub fn atom(head: &str, spine: Vec<Term>) -> Self {
        Type::Atom(Ident::new(head), spine)
    }

    /// Dependent product abstracting the free variable `x` out of `cod`.
    pub fn pi(x: &str, dom: Type, cod: Type) -> Self {
        let target = Head::Var(Ident::new(x));
        Type::Pi(Hint::new(x), Box::new(dom), Box::new(cod.close(&target, 0)))
    }

    /// Non-dependent arrow.
    pub fn arrow(dom: Type, cod: Type) -> Self {
        Type::Pi(Hint::new("_"), Box::new(dom), Box::new(cod.shift(1, 0)))
    }

    /// The head type constant.
    pub fn head(&self) -> &Ident {
        match self {
            Type::Atom(a, _) => a,
            Type::Pi(_, _, cod) => cod.head(),
        }
    }

    pub fn close(&self, target: &Head, depth: u32) -> Type {
        match self {
            Type::Atom(a, spine) => {
                Type::Atom(a.clone(), spine.iter().map(|t| t.close(target, depth)).collect())
            }
            Type::Pi(h, dom, cod) => Type::Pi(
                h.clone(),
                Box::new(dom.close(target, depth)),
                Box::new(cod.close(target, depth + 1)),
            ),
        }
    }

    pub fn shift(&self, by: u32, cutoff: u32) -> Type {
        if by == 0 {
            return self.clone();
        }
        match self {
            Type::Atom(a, spine) => {
                Type::Atom(a.clone(), spine.iter().map(|t| t.shift(by, cutoff)).collect())
            }
            Type::Pi(h, dom, cod) => Type::Pi(
                h.clone(),
                Box::new(dom.shift(by, cutoff)),
                Box::new(cod.shift(by, cutoff + 1)),
            ),
        }
    }

    pub fn mentions_bound(&self, idx: u32) -> bool {
        match self {
            Type::Atom(_, spine) => spine.iter().any(|t| t.mentions_bound(idx)),
            Type::Pi(_, dom, cod) => dom.mentions_bound(idx) || cod.mentions_bound(idx + 1),
        }
    }

    pub fn collect_heads(&self, out: &mut FreeNames) {
        match self {
            Type::Atom(a, spine) => {
                out.type_consts.insert(a.clone());
                for t in spine {
                    t.collect_heads(out);
                }
            }
            Type::Pi(_, dom, cod) => {
                dom.collect_heads(out);
                cod.collect_heads(out);
            }
        }
    }

    pub fn free_names(&self) -> FreeNames {
        let mut out = FreeNames::default();
        self.collect_heads(&mut out);
        out
    }

    pub fn rename_vars(&self, f: &impl Fn(&Ident) -> Option<Ident>) -> Type {
        match self {
            Type::Atom(a, spine) => {
                Type::Atom(a.clone(), spine.iter().map(|t| t.rename_vars(f)).collect())
            }
            Type::Pi(h, dom, cod) => Type::Pi(
                h.clone(),
                Box::new(dom.rename_vars(f)),
                Box::new(cod.rename_vars(f)),
            ),
        }
    }
}

impl Kind {
    pub fn pi(x: &str, dom: Type, cod: Kind) -> Self {
        let target = Head::Var(Ident::new(x));
        Kind::Pi(Hint::new(x), dom, Box::new(cod.close(&target, 0)))
    }

    pub fn arrow(dom: Type, cod: Kind) -> Self {
        Kind::Pi(Hint::new("_"), dom, Box::new(cod.shift(1, 0)))
    }

    pub fn close(&self, target: &Head, depth: u32) -> Kind {
        match self {
            Kind::Type => Kind::Type,
            Kind::Pi(h, dom, cod) => Kind::Pi(
                h.clone(),
                dom.close(target, depth),
                Box::new(cod.close(target, depth + 1)),
            ),
        }
    }

    pub fn shift(&self, by: u32, cutoff: u32) -> Kind {
        match self {
            Kind::Type => Kind::Type,
            Kind::Pi(h, dom, cod) => Kind::Pi(
                h.clone(),
                dom.shift(by, cutoff),
                Box::new(cod.shift(by, cutoff + 1)),
            ),
        }
    }

    pub fn collect_heads(&self, out: &mut FreeNames) {
        if let Kind::Pi(_, dom, cod) = self {
            dom.collect_heads(out);
            cod.collect_heads(out);
        }
    }

    pub fn mentions_bound(&self, idx: u32) -> bool {
        match self {
            Kind::Type => false,
            Kind::Pi(_, dom, cod) => dom.mentions_bound(idx) || cod.mentions_bound(idx + 1),
        }
    }

    /// Domain types of the outer Pi prefix.
    pub fn domains(&self) -> Vec<&Type> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Kind::Pi(_, dom, cod) = cur {
            out.push(dom);
            cur = cod;
        }
        out
    }
}

/// Free heads occurring in an expression.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeNames {
    pub consts: BTreeSet<Ident>,
    pub type_consts: BTreeSet<Ident>,
    pub vars: BTreeSet<Ident>,
    pub nominals: BTreeSet<Nominal>,
}

impl FreeNames {
    pub fn contains_name(&self, s: &str) -> bool {
        let id = Ident::new(s);
        self.consts.contains(&id) || self.type_consts.contains(&id) || self.vars.contains(&id)
    }
}

/// Either a variable or a nominal constant; what a context binds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CtxName {
    Var(Ident),
    Nominal(Nominal),
}

impl CtxName {
    pub fn as_head(&self) -> Head {
        match self {
            CtxName::Var(v) => Head::Var(v.clone()),
            CtxName::Nominal(n) => Head::Nominal(n.clone()),
        }
    }
}

impl fmt::Display for CtxName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CtxName::Var(v) => write!(f, "{}", v),
            CtxName::Nominal(n) => write!(f, "{}", n),
        }
    }
}

/// A typing assignment `name : ty`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binding<N> {
    pub name: N,
    pub ty: Type,
}

impl<N> Binding<N> {
    pub fn new(name: N, ty: Type) -> Self {
        Binding { name, ty }
    }
}

/// An LF context with explicit bindings only.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LfContext(pub Vec<Binding<CtxName>>);

impl LfContext {
    pub fn empty() -> Self {
        LfContext(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lookup(&self, head: &Head) -> Option<&Type> {
        self.0
            .iter()
            .rev()
            .find(|b| match (&b.name, head) {
                (CtxName::Var(v), Head::Var(w)) => v == w,
                (CtxName::Nominal(n), Head::Nominal(m)) => n == m,
                _ => false,
            })
            .map(|b| &b.ty)
    }

    pub fn push(&mut self, name: CtxName, ty: Type) {
        self.0.push(Binding::new(name, ty));
    }

    pub fn from_nominals(bindings: &[Binding<Nominal>]) -> Self {
        LfContext(
            bindings
                .iter()
                .map(|b| Binding::new(CtxName::Nominal(b.name.clone()), b.ty.clone()))
                .collect(),
        )
    }

    pub fn nominal_indices(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for b in &self.0 {
            if let CtxName::Nominal(n) = &b.name {
                out.insert(n.index);
            }
            let mut names = FreeNames::default();
            b.ty.collect_heads(&mut names);
            out.extend(names.nominals.iter().map(|n| n.index));
        }
        out
    }
}

/// Lowest index not in `used`, starting at 1.
pub fn lowest_unused(used: &BTreeSet<u32>) -> u32 {
    let mut i = 1;
    while used.contains(&i) {
        i += 1;
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hints_do_not_affect_equality() {
        let a = Term::lam("x", Term::var("x"));
        let b = Term::lam("y", Term::var("y"));
        assert_eq!(a, b);
        assert_ne!(a, Term::lam("y", Term::var("x")));
    }

    #[test]
    fn close_and_shift_respect_depth() {
        // [x] [y] x
        let t = Term::lam("x", Term::lam("y", Term::var("x")));
        assert_eq!(
            t,
            Term::Lam(
                Hint::new("x"),
                Box::new(Term::Lam(Hint::new("y"), Box::new(Term::bound(1))))
            )
        );
        assert_eq!(t.loose_bound(), 0);
        assert_eq!(Term::bound(2).shift(1, 0), Term::bound(3));
        assert_eq!(Term::bound(0).shift(1, 1), Term::bound(0));
    }

    #[test]
    fn type_head_unfolds_pi() {
        let ty = Type::pi(
            "x",
            Type::atom("tm", vec![]),
            Type::atom("size", vec![Term::var("x"), Term::constant("z")]),
        );
        assert_eq!(ty.head().as_str(), "size");
    }

    #[test]
    fn arity_display() {
        let a = ArityType::arrow(ArityType::arrow(ArityType::Base, ArityType::Base), ArityType::Base);
        assert_eq!(a.to_string(), "(o -> o) -> o");
        assert_eq!(ArityType::from_args(vec![ArityType::Base; 2]).to_string(), "o -> o -> o");
    }
}
