//! Surface rendering of LF expressions.
//!
//! Bound variables print under their hint unless the hint would capture a
//! free name or shadow an enclosing binder, in which case primes are added.
//! The output reparses to an alpha-equivalent expression.

use std::collections::BTreeSet;
use std::fmt;

use super::syntax::{FreeNames, Head, Kind, Term, Type};

const PREC_TOP: u8 = 0;
const PREC_ARROW_LEFT: u8 = 1;
const PREC_ARG: u8 = 2;

pub(crate) fn is_nominal_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('n') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

pub(crate) struct Printer {
    avoid: BTreeSet<String>,
    stack: Vec<String>,
}

impl Printer {
    pub(crate) fn new(free: &FreeNames) -> Self {
        let mut avoid = BTreeSet::new();
        for c in free.consts.iter().chain(&free.type_consts).chain(&free.vars) {
            avoid.insert(c.as_str().to_string());
        }
        Printer { avoid, stack: Vec::new() }
    }

    fn fresh(&self, hint: &str) -> String {
        let base = if hint == "_" || hint.is_empty() { "x" } else { hint };
        let mut name = base.to_string();
        while self.avoid.contains(&name) || self.stack.contains(&name) || is_nominal_name(&name) {
            name.push('\'');
        }
        name
    }

    fn head(&self, h: &Head) -> String {
        match h {
            Head::Const(c) | Head::Var(c) => c.to_string(),
            Head::Nominal(n) => n.to_string(),
            Head::Bound(i) => {
                let i = *i as usize;
                if i < self.stack.len() {
                    self.stack[self.stack.len() - 1 - i].clone()
                } else {
                    format!("#{}", i)
                }
            }
        }
    }

    pub(crate) fn term(&mut self, out: &mut String, t: &Term, prec: u8) {
        match t {
            Term::Lam(h, body) => {
                let name = self.fresh(h.name().as_str());
                if prec >= PREC_ARG {
                    out.push('(');
                }
                out.push('[');
                out.push_str(&name);
                out.push_str("] ");
                self.stack.push(name);
                self.term(out, body, PREC_TOP);
                self.stack.pop();
                if prec >= PREC_ARG {
                    out.push(')');
                }
            }
            Term::App(head, spine) => {
                if spine.is_empty() {
                    out.push_str(&self.head(head));
                    return;
                }
                if prec >= PREC_ARG {
                    out.push('(');
                }
                out.push_str(&self.head(head));
                for a in spine {
                    out.push(' ');
                    self.term(out, a, PREC_ARG);
                }
                if prec >= PREC_ARG {
                    out.push(')');
                }
            }
        }
    }

    pub(crate) fn ty(&mut self, out: &mut String, ty: &Type, prec: u8) {
        match ty {
            Type::Atom(a, spine) => {
                out.push_str(a.as_str());
                for t in spine {
                    out.push(' ');
                    self.term(out, t, PREC_ARG);
                }
            }
            Type::Pi(h, dom, cod) => {
                if prec >= PREC_ARROW_LEFT {
                    out.push('(');
                }
                if cod.mentions_bound(0) {
                    let name = self.fresh(h.name().as_str());
                    out.push('{');
                    out.push_str(&name);
                    out.push(':');
                    self.ty(out, dom, PREC_TOP);
                    out.push_str("} ");
                    self.stack.push(name);
                } else {
                    self.ty(out, dom, PREC_ARROW_LEFT);
                    out.push_str(" -> ");
                    self.stack.push("_".to_string());
                }
                self.ty(out, cod, PREC_TOP);
                self.stack.pop();
                if prec >= PREC_ARROW_LEFT {
                    out.push(')');
                }
            }
        }
    }

    pub(crate) fn kind(&mut self, out: &mut String, k: &Kind) {
        match k {
            Kind::Type => out.push_str("Type"),
            Kind::Pi(h, dom, cod) => {
                if cod.mentions_bound(0) {
                    let name = self.fresh(h.name().as_str());
                    out.push('{');
                    out.push_str(&name);
                    out.push(':');
                    self.ty(out, dom, PREC_TOP);
                    out.push_str("} ");
                    self.stack.push(name);
                } else {
                    self.ty(out, dom, PREC_ARROW_LEFT);
                    out.push_str(" -> ");
                    self.stack.push("_".to_string());
                }
                self.kind(out, cod);
                self.stack.pop();
            }
        }
    }
}

pub(crate) fn render_term(t: &Term) -> String {
    let mut out = String::new();
    Printer::new(&t.free_names()).term(&mut out, t, PREC_TOP);
    out
}

pub(crate) fn render_type(ty: &Type) -> String {
    let mut out = String::new();
    Printer::new(&ty.free_names()).ty(&mut out, ty, PREC_TOP);
    out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_type(self))
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = FreeNames::default();
        self.collect_heads(&mut names);
        let mut out = String::new();
        Printer::new(&names).kind(&mut out, self);
        f.write_str(&out)
    }
}

impl fmt::Display for super::syntax::LfContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(".");
        }
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", b.name, b.ty)?;
        }
        Ok(())
    }
}
