//! Formulas over LF typing judgements.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lf::{
    arity_check_term, arity_check_type, erase, ArityContext, ArityType, Binding, FreeNames, Ident, Nominal,
    Signature, SubstError, Substitution, Term, Type,
};
use crate::schema::{ContextSchema, CtxExpr};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `{G |- M : A}`
    Atm(CtxExpr, Term, Type),
    Top,
    Bot,
    Imp(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    All(Ident, ArityType, Box<Formula>),
    Ex(Ident, ArityType, Box<Formula>),
    CtxPi(Ident, Arc<ContextSchema>, Box<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("context variable `{0}` is not bound")]
    UnboundContextVariable(String),
    #[error("term variable `{0}` is not bound")]
    UnboundTermVariable(String),
    #[error("`{0}` is not well-formed at the arity level")]
    ArityCheckFailure(String),
}

/// Arity assignments for free term variables and schema assignments for
/// free context variables.
#[derive(Clone, Debug, Default)]
pub struct WfEnv {
    pub terms: Vec<(Ident, ArityType)>,
    pub ctxs: Vec<(Ident, Arc<ContextSchema>)>,
}

impl WfEnv {
    pub fn new() -> Self {
        WfEnv::default()
    }

    pub fn with_term(mut self, x: &str, a: ArityType) -> Self {
        self.terms.push((Ident::new(x), a));
        self
    }

    pub fn with_ctx(mut self, g: &str, c: Arc<ContextSchema>) -> Self {
        self.ctxs.push((Ident::new(g), c));
        self
    }
}

pub type CtxVarSubst = BTreeMap<Ident, CtxExpr>;

impl Formula {
    pub fn atm(g: CtxExpr, m: Term, a: Type) -> Self {
        Formula::Atm(g, m, a)
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn all(x: &str, a: ArityType, f: Formula) -> Self {
        Formula::All(Ident::new(x), a, Box::new(f))
    }

    pub fn ex(x: &str, a: ArityType, f: Formula) -> Self {
        Formula::Ex(Ident::new(x), a, Box::new(f))
    }

    pub fn ctx_pi(g: &str, c: Arc<ContextSchema>, f: Formula) -> Self {
        Formula::CtxPi(Ident::new(g), c, Box::new(f))
    }

    /// Every atomic subformula, left to right.
    pub fn atoms(&self) -> Vec<(&CtxExpr, &Term, &Type)> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |g, m, a| out.push((g, m, a)));
        out
    }

    fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a CtxExpr, &'a Term, &'a Type)) {
        match self {
            Formula::Atm(g, m, a) => f(g, m, a),
            Formula::Top | Formula::Bot => {}
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Formula::All(_, _, b) | Formula::Ex(_, _, b) | Formula::CtxPi(_, _, b) => b.visit_atoms(f),
        }
    }

    pub fn free_term_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_term_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_term_vars(&self, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
        match self {
            Formula::Atm(g, m, a) => {
                let mut names = FreeNames::default();
                m.collect_heads(&mut names);
                a.collect_heads(&mut names);
                for b in &g.bindings {
                    b.ty.collect_heads(&mut names);
                }
                out.extend(names.vars.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Top | Formula::Bot => {}
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_term_vars(bound, out);
                b.collect_term_vars(bound, out);
            }
            Formula::All(x, _, b) | Formula::Ex(x, _, b) => {
                bound.push(x.clone());
                b.collect_term_vars(bound, out);
                bound.pop();
            }
            Formula::CtxPi(_, _, b) => b.collect_term_vars(bound, out),
        }
    }

    pub fn free_ctx_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_ctx_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_ctx_vars(&self, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
        match self {
            Formula::Atm(g, ..) => {
                if let Some(h) = &g.head {
                    if !bound.contains(h) {
                        out.insert(h.clone());
                    }
                }
            }
            Formula::Top | Formula::Bot => {}
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_ctx_vars(bound, out);
                b.collect_ctx_vars(bound, out);
            }
            Formula::All(_, _, b) | Formula::Ex(_, _, b) => b.collect_ctx_vars(bound, out),
            Formula::CtxPi(g, _, b) => {
                bound.push(g.clone());
                b.collect_ctx_vars(bound, out);
                bound.pop();
            }
        }
    }

    /// Every nominal occurring anywhere in the formula.
    pub fn nominals(&self) -> BTreeSet<Nominal> {
        let mut names = FreeNames::default();
        self.visit_atoms(&mut |g, m, a| {
            m.collect_heads(&mut names);
            a.collect_heads(&mut names);
            for b in &g.bindings {
                names.nominals.insert(b.name.clone());
                b.ty.collect_heads(&mut names);
            }
        });
        names.nominals
    }

    /// Every name used as a bound or free variable of either sort.
    fn all_var_names(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Formula::Atm(g, m, a) => {
                let mut names = FreeNames::default();
                m.collect_heads(&mut names);
                a.collect_heads(&mut names);
                for b in &g.bindings {
                    b.ty.collect_heads(&mut names);
                }
                out.extend(names.vars);
                if let Some(h) = &g.head {
                    out.insert(h.clone());
                }
            }
            Formula::Top | Formula::Bot => {}
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.all_var_names(out);
                b.all_var_names(out);
            }
            Formula::All(x, _, b) | Formula::Ex(x, _, b) | Formula::CtxPi(x, _, b) => {
                out.insert(x.clone());
                b.all_var_names(out);
            }
        }
    }

    fn map_children(&self, f: &mut impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Atm(..) | Formula::Top | Formula::Bot => self.clone(),
            Formula::Imp(a, b) => Formula::imp(f(a), f(b)),
            Formula::And(a, b) => Formula::and(f(a), f(b)),
            Formula::Or(a, b) => Formula::or(f(a), f(b)),
            Formula::All(x, t, b) => Formula::All(x.clone(), t.clone(), Box::new(f(b))),
            Formula::Ex(x, t, b) => Formula::Ex(x.clone(), t.clone(), Box::new(f(b))),
            Formula::CtxPi(g, c, b) => Formula::CtxPi(g.clone(), c.clone(), Box::new(f(b))),
        }
    }

    /// Rename free occurrences of term variable `from` to `to` (no capture check).
    fn rename_term_var(&self, from: &Ident, to: &Ident) -> Formula {
        let f = |v: &Ident| if v == from { Some(to.clone()) } else { None };
        match self {
            Formula::Atm(g, m, a) => Formula::Atm(
                CtxExpr {
                    head: g.head.clone(),
                    bindings: g.bindings.iter().map(|b| Binding::new(b.name.clone(), b.ty.rename_vars(&f))).collect(),
                },
                m.rename_vars(&f),
                a.rename_vars(&f),
            ),
            Formula::All(x, _, _) | Formula::Ex(x, _, _) if x == from => self.clone(),
            _ => self.map_children(&mut |c| c.rename_term_var(from, to)),
        }
    }

    fn rename_ctx_var(&self, from: &Ident, to: &Ident) -> Formula {
        match self {
            Formula::Atm(g, m, a) if g.head.as_ref() == Some(from) => {
                Formula::Atm(CtxExpr { head: Some(to.clone()), bindings: g.bindings.clone() }, m.clone(), a.clone())
            }
            Formula::CtxPi(g, _, _) if g == from => self.clone(),
            _ => self.map_children(&mut |c| c.rename_ctx_var(from, to)),
        }
    }

    /// Replace free context variables, renaming binders away from the
    /// heads of the replacing expressions.
    pub fn subst_ctx(&self, sigma: &CtxVarSubst) -> Formula {
        if sigma.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Atm(g, m, a) => match g.head.as_ref().and_then(|h| sigma.get(h)) {
                Some(rep) => {
                    let mut bindings = rep.bindings.clone();
                    bindings.extend(g.bindings.iter().cloned());
                    Formula::Atm(CtxExpr { head: rep.head.clone(), bindings }, m.clone(), a.clone())
                }
                None => self.clone(),
            },
            Formula::CtxPi(g, c, body) => {
                let mut inner = sigma.clone();
                inner.remove(g);
                if inner.is_empty() {
                    return self.clone();
                }
                let clash = inner.values().any(|e| e.head.as_ref() == Some(g));
                if clash {
                    let mut avoid = BTreeSet::new();
                    self.all_var_names(&mut avoid);
                    avoid.extend(inner.values().filter_map(|e| e.head.clone()));
                    let fresh = fresh_name(g, &avoid);
                    let body = body.rename_ctx_var(g, &fresh);
                    Formula::CtxPi(fresh, c.clone(), Box::new(body.subst_ctx(&inner)))
                } else {
                    Formula::CtxPi(g.clone(), c.clone(), Box::new(body.subst_ctx(&inner)))
                }
            }
            _ => self.map_children(&mut |c| c.subst_ctx(sigma)),
        }
    }

    /// Apply a term substitution to every embedded term and type.
    pub fn subst_terms(&self, theta: &Substitution) -> Result<Formula, SubstError> {
        if theta.is_empty() {
            return Ok(self.clone());
        }
        match self {
            Formula::Atm(g, m, a) => {
                Ok(Formula::Atm(g.apply_subst(theta)?, theta.apply_term(m)?, theta.apply_type(a)?))
            }
            Formula::Top | Formula::Bot => Ok(self.clone()),
            Formula::Imp(a, b) => Ok(Formula::imp(a.subst_terms(theta)?, b.subst_terms(theta)?)),
            Formula::And(a, b) => Ok(Formula::and(a.subst_terms(theta)?, b.subst_terms(theta)?)),
            Formula::Or(a, b) => Ok(Formula::or(a.subst_terms(theta)?, b.subst_terms(theta)?)),
            Formula::CtxPi(g, c, b) => Ok(Formula::CtxPi(g.clone(), c.clone(), Box::new(b.subst_terms(theta)?))),
            Formula::All(x, t, b) | Formula::Ex(x, t, b) => {
                let mut inner = theta.clone();
                inner.remove(x);
                let mut range_vars = BTreeSet::new();
                for (_, e) in inner.iter() {
                    range_vars.extend(e.term.free_names().vars);
                }
                let (x, body) = if range_vars.contains(x) {
                    let mut avoid = range_vars;
                    self.all_var_names(&mut avoid);
                    avoid.extend(inner.domain().cloned());
                    let fresh = fresh_name(x, &avoid);
                    let body = b.rename_term_var(x, &fresh);
                    (fresh, body)
                } else {
                    (x.clone(), (**b).clone())
                };
                let body = Box::new(body.subst_terms(&inner)?);
                Ok(match self {
                    Formula::All(..) => Formula::All(x, t.clone(), body),
                    _ => Formula::Ex(x, t.clone(), body),
                })
            }
        }
    }

    /// Structural equality up to renaming of bound term and context variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical(&mut 0) == other.canonical(&mut 0)
    }

    fn canonical(&self, counter: &mut usize) -> Formula {
        match self {
            Formula::All(x, t, b) | Formula::Ex(x, t, b) => {
                let fresh = Ident::new(&format!("%{}", counter));
                *counter += 1;
                let body = Box::new(b.rename_term_var(x, &fresh).canonical(counter));
                match self {
                    Formula::All(..) => Formula::All(fresh, t.clone(), body),
                    _ => Formula::Ex(fresh, t.clone(), body),
                }
            }
            Formula::CtxPi(g, c, b) => {
                let fresh = Ident::new(&format!("%{}", counter));
                *counter += 1;
                Formula::CtxPi(fresh.clone(), c.clone(), Box::new(b.rename_ctx_var(g, &fresh).canonical(counter)))
            }
            _ => self.map_children(&mut |c| c.canonical(counter)),
        }
    }
}

fn fresh_name(base: &Ident, avoid: &BTreeSet<Ident>) -> Ident {
    let mut s = base.as_str().to_string();
    loop {
        s.push('\'');
        let id = Ident::new(&s);
        if !avoid.contains(&id) {
            return id;
        }
    }
}

pub fn check_formula(sig: &Signature, f: &Formula, env: &WfEnv) -> Result<(), FormulaError> {
    let mut cx = ArityContext::from_signature(sig);
    let mut scope: Vec<Ident> = Vec::new();
    for (x, a) in &env.terms {
        cx.bind(x.clone(), a.clone());
        scope.push(x.clone());
    }
    let mut ctxs: Vec<Ident> = env.ctxs.iter().map(|(g, _)| g.clone()).collect();
    check_rec(f, &mut cx, &mut scope, &mut ctxs)
}

fn check_rec(
    f: &Formula,
    cx: &mut ArityContext,
    scope: &mut Vec<Ident>,
    ctxs: &mut Vec<Ident>,
) -> Result<(), FormulaError> {
    match f {
        Formula::Atm(g, m, a) => {
            if let Some(h) = &g.head {
                if !ctxs.contains(h) {
                    return Err(FormulaError::UnboundContextVariable(h.to_string()));
                }
            }
            let mut names = FreeNames::default();
            m.collect_heads(&mut names);
            a.collect_heads(&mut names);
            for b in &g.bindings {
                b.ty.collect_heads(&mut names);
            }
            if let Some(v) = names.vars.iter().find(|v| !scope.contains(v)) {
                return Err(FormulaError::UnboundTermVariable(v.to_string()));
            }
            for b in &g.bindings {
                if !arity_check_type(cx, &b.ty) {
                    return Err(FormulaError::ArityCheckFailure(b.ty.to_string()));
                }
            }
            if !arity_check_type(cx, a) {
                return Err(FormulaError::ArityCheckFailure(a.to_string()));
            }
            if !arity_check_term(cx, m, &erase(a)) {
                return Err(FormulaError::ArityCheckFailure(m.to_string()));
            }
            Ok(())
        }
        Formula::Top | Formula::Bot => Ok(()),
        Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
            check_rec(a, cx, scope, ctxs)?;
            check_rec(b, cx, scope, ctxs)
        }
        Formula::All(x, t, b) | Formula::Ex(x, t, b) => {
            let saved = cx.get(x).cloned();
            cx.bind(x.clone(), t.clone());
            scope.push(x.clone());
            let r = check_rec(b, cx, scope, ctxs);
            scope.pop();
            match saved {
                Some(a) => cx.bind(x.clone(), a),
                None => cx.unbind(x),
            }
            r
        }
        Formula::CtxPi(g, _, b) => {
            ctxs.push(g.clone());
            let r = check_rec(b, cx, scope, ctxs);
            ctxs.pop();
            r
        }
    }
}

// ---------------------------------------------------------------------------
// Printing

const P_QUANT: u8 = 0;
const P_OR: u8 = 1;
const P_AND: u8 = 2;
const P_ATOM: u8 = 3;

fn write_ctx(f: &mut fmt::Formatter<'_>, g: &CtxExpr) -> fmt::Result {
    let mut first = true;
    if let Some(h) = &g.head {
        write!(f, "{}", h)?;
        first = false;
    }
    for b in &g.bindings {
        if !first {
            f.write_str(", ")?;
        }
        first = false;
        write!(f, "{}:{}", b.name, b.ty)?;
    }
    Ok(())
}

fn write_formula(f: &mut fmt::Formatter<'_>, phi: &Formula, prec: u8) -> fmt::Result {
    let paren = |f: &mut fmt::Formatter<'_>, own: u8, body: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
        if prec > own {
            f.write_str("(")?;
            body(f)?;
            f.write_str(")")
        } else {
            body(f)
        }
    };
    match phi {
        Formula::Atm(g, m, a) => {
            f.write_str("{")?;
            write_ctx(f, g)?;
            write!(f, " |- {} : {}}}", m, a)
        }
        Formula::Top => f.write_str("tt"),
        Formula::Bot => f.write_str("ff"),
        Formula::Imp(a, b) => paren(f, P_QUANT, &|f| {
            write_formula(f, a, P_OR)?;
            f.write_str(" => ")?;
            write_formula(f, b, P_QUANT)
        }),
        Formula::Or(a, b) => paren(f, P_OR, &|f| {
            write_formula(f, a, P_AND)?;
            f.write_str(" \\/ ")?;
            write_formula(f, b, P_OR)
        }),
        Formula::And(a, b) => paren(f, P_AND, &|f| {
            write_formula(f, a, P_ATOM)?;
            f.write_str(" /\\ ")?;
            write_formula(f, b, P_AND)
        }),
        Formula::All(x, t, b) => paren(f, P_QUANT, &|f| {
            write!(f, "forall {}:{}. ", x, t)?;
            write_formula(f, b, P_QUANT)
        }),
        Formula::Ex(x, t, b) => paren(f, P_QUANT, &|f| {
            write!(f, "exists {}:{}. ", x, t)?;
            write_formula(f, b, P_QUANT)
        }),
        Formula::CtxPi(g, c, b) => paren(f, P_QUANT, &|f| {
            write!(f, "ctx {}:{}. ", g, c.name)?;
            write_formula(f, b, P_QUANT)
        }),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, P_QUANT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lf::{Kind, Nominal};
    use crate::schema::BlockSchema;

    fn nat() -> Type {
        Type::atom("nat", vec![])
    }

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare_type("nat", Kind::Type);
        s.declare_term("z", nat());
        s
    }

    fn c_empty() -> Arc<ContextSchema> {
        Arc::new(ContextSchema::new("Cempty", vec![BlockSchema::empty()]))
    }

    #[test]
    fn unbound_context_variable() {
        let f = Formula::atm(CtxExpr::var("G"), Term::constant("z"), nat());
        assert_eq!(
            check_formula(&sig(), &f, &WfEnv::new()),
            Err(FormulaError::UnboundContextVariable("G".into()))
        );
        let closed = Formula::ctx_pi("G", c_empty(), f);
        assert_eq!(check_formula(&sig(), &closed, &WfEnv::new()), Ok(()));
    }

    #[test]
    fn quantified_variable_is_in_scope() {
        let f = Formula::all("N", ArityType::Base, Formula::atm(CtxExpr::empty(), Term::var("N"), nat()));
        assert_eq!(check_formula(&sig(), &f, &WfEnv::new()), Ok(()));
        let open = Formula::atm(CtxExpr::empty(), Term::var("N"), nat());
        assert_eq!(check_formula(&sig(), &open, &WfEnv::new()), Err(FormulaError::UnboundTermVariable("N".into())));
    }

    #[test]
    fn ctx_substitution_appends_bindings() {
        let n1 = Nominal::base(1);
        let n3 = Nominal::base(3);
        let tm = Type::atom("tm", vec![]);
        let g = CtxExpr { head: Some(Ident::new("G")), bindings: vec![Binding::new(n3.clone(), tm.clone())] };
        let f = Formula::atm(g, Term::nominal(n3.clone()), tm.clone());
        let mut sigma = CtxVarSubst::new();
        sigma.insert(Ident::new("G"), CtxExpr::closed(vec![Binding::new(n1, tm.clone())]));
        assert_eq!(f.subst_ctx(&sigma).to_string(), "{n1:tm, n3:tm |- n3 : tm}");
        let bound = Formula::ctx_pi("G", c_empty(), f.clone());
        assert_eq!(bound.subst_ctx(&sigma), bound);
    }

    #[test]
    fn term_substitution_respects_binders() {
        let body = Formula::atm(CtxExpr::empty(), Term::var("N"), nat());
        let f = Formula::all("N", ArityType::Base, body.clone());
        let theta = Substitution::single("N", Term::constant("z"), ArityType::Base);
        assert_eq!(f.subst_terms(&theta).unwrap(), f);
        assert_eq!(body.subst_terms(&theta).unwrap().to_string(), "{ |- z : nat}");
    }

    #[test]
    fn capture_is_avoided() {
        // (forall M. {|- N : nat})[N := M] must not capture.
        let f = Formula::all("M", ArityType::Base, Formula::atm(CtxExpr::empty(), Term::var("N"), nat()));
        let theta = Substitution::single("N", Term::var("M"), ArityType::Base);
        let out = f.subst_terms(&theta).unwrap();
        assert_eq!(out.free_term_vars(), [Ident::new("M")].into_iter().collect());
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let a = Formula::all("N", ArityType::Base, Formula::atm(CtxExpr::empty(), Term::var("N"), nat()));
        let b = Formula::all("K", ArityType::Base, Formula::atm(CtxExpr::empty(), Term::var("K"), nat()));
        assert!(a.alpha_eq(&b));
        assert_ne!(a, b);
    }
}
