//! The size signature, its schemas and formulas, built without a parser.

#![allow(dead_code)]

use std::sync::Arc;

use lftransport::formula::Formula;
use lftransport::lf::{ArityType, Binding, Head, Ident, Kind, Nominal, Signature, Term, Type};
use lftransport::schema::{BlockSchema, ContextSchema, CtxExpr};

pub fn c(name: &str) -> Term {
    Term::constant(name)
}

pub fn v(name: &str) -> Term {
    Term::var(name)
}

pub fn app(f: &str, args: Vec<Term>) -> Term {
    Term::app(Head::Const(Ident::new(f)), args)
}

pub fn n(i: u32) -> Term {
    Term::nominal(Nominal::base(i))
}

pub fn ty(a: &str, args: Vec<Term>) -> Type {
    Type::atom(a, args)
}

pub fn nat() -> Type {
    ty("nat", vec![])
}

pub fn tm() -> Type {
    ty("tm", vec![])
}

pub fn plus(a: Term, b: Term, c: Term) -> Type {
    ty("plus", vec![a, b, c])
}

pub fn size(m: Term, k: Term) -> Type {
    ty("size", vec![m, k])
}

pub fn one() -> Term {
    app("s", vec![c("z")])
}

pub fn o() -> ArityType {
    ArityType::Base
}

pub fn sig_size() -> Signature {
    let mut s = Signature::new();
    s.declare_type("nat", Kind::Type);
    s.declare_term("z", nat());
    s.declare_term("s", Type::arrow(nat(), nat()));
    s.declare_type("tm", Kind::Type);
    s.declare_term("app", Type::arrow(tm(), Type::arrow(tm(), tm())));
    s.declare_term("lam", Type::arrow(Type::arrow(tm(), tm()), tm()));
    s.declare_type("plus", Kind::arrow(nat(), Kind::arrow(nat(), Kind::arrow(nat(), Kind::Type))));
    s.declare_term("plus-z", Type::pi("N", nat(), plus(c("z"), v("N"), v("N"))));
    s.declare_term(
        "plus-s",
        Type::pi(
            "N1",
            nat(),
            Type::pi(
                "N2",
                nat(),
                Type::pi(
                    "N3",
                    nat(),
                    Type::arrow(
                        plus(v("N1"), v("N2"), v("N3")),
                        plus(app("s", vec![v("N1")]), v("N2"), app("s", vec![v("N3")])),
                    ),
                ),
            ),
        ),
    );
    s.declare_type("size", Kind::arrow(tm(), Kind::arrow(nat(), Kind::Type)));
    let size_app = ["M1", "M2"].iter().rev().fold(
        ["N1", "N2", "N3"].iter().rev().fold(
            Type::arrow(plus(v("N1"), v("N2"), v("N3")), size(app("app", vec![v("M1"), v("M2")]), app("s", vec![v("N3")]))),
            |acc, x| Type::pi(x, nat(), acc),
        ),
        |acc, x| Type::pi(x, tm(), acc),
    );
    s.declare_term("size-app", size_app);
    let mx = Term::app(Head::Var(Ident::new("M")), vec![v("x")]);
    let lam_m = app("lam", vec![Term::lam("y", Term::app(Head::Var(Ident::new("M")), vec![v("y")]))]);
    s.declare_term(
        "size-lam",
        Type::pi(
            "M",
            Type::arrow(tm(), tm()),
            Type::pi(
                "N",
                nat(),
                Type::arrow(
                    Type::pi("x", tm(), Type::arrow(size(v("x"), one()), size(mx, v("N")))),
                    size(lam_m, app("s", vec![v("N")])),
                ),
            ),
        ),
    );
    s
}

pub fn block(params: &[(&str, ArityType)], decl: Vec<(&str, Type)>) -> BlockSchema {
    BlockSchema::new(
        params.iter().map(|(p, a)| (Ident::new(p), a.clone())).collect(),
        decl.into_iter().map(|(x, a)| Binding::new(Ident::new(x), a)).collect(),
    )
}

pub fn c_empty() -> Arc<ContextSchema> {
    Arc::new(ContextSchema::new("Cempty", vec![BlockSchema::empty()]))
}

pub fn b_size() -> BlockSchema {
    block(&[], vec![("x", tm()), ("y", size(v("x"), one()))])
}

pub fn c_size() -> Arc<ContextSchema> {
    Arc::new(ContextSchema::new("Csize", vec![b_size()]))
}

/// `n1:tm, n2:size n1 (s z), ...` with `k` copies of the size block.
pub fn size_blocks(k: u32) -> CtxExpr {
    let mut bs = Vec::new();
    for i in 0..k {
        let (a, b) = (2 * i + 1, 2 * i + 2);
        bs.push(Binding::new(Nominal::base(a), tm()));
        bs.push(Binding::new(Nominal::base(b), size(n(a), one())));
    }
    CtxExpr::closed(bs)
}

pub fn gamma() -> CtxExpr {
    CtxExpr::var("G")
}

/// The body of the addition totality formula, open in `G`.
pub fn f_plus_body() -> Formula {
    Formula::all(
        "N1",
        o(),
        Formula::all(
            "N2",
            o(),
            Formula::imp(
                Formula::atm(gamma(), v("N1"), nat()),
                Formula::imp(
                    Formula::atm(gamma(), v("N2"), nat()),
                    Formula::ex("N3", o(), Formula::ex("D", o(), Formula::atm(gamma(), v("D"), plus(v("N1"), v("N2"), v("N3"))))),
                ),
            ),
        ),
    )
}

pub fn f_plus() -> Formula {
    Formula::ctx_pi("G", c_empty(), f_plus_body())
}

/// Every term has a size, open in `G`.
pub fn f_tm_body() -> Formula {
    Formula::all(
        "M",
        o(),
        Formula::imp(
            Formula::atm(gamma(), v("M"), tm()),
            Formula::ex("N", o(), Formula::ex("D", o(), Formula::atm(gamma(), v("D"), size(v("M"), v("N"))))),
        ),
    )
}

pub fn tp() -> Type {
    ty("tp", vec![])
}

pub fn of(m: Term, t: Term) -> Type {
    ty("of", vec![m, t])
}

/// The size signature extended with simple types and a typing judgement.
pub fn sig_stlc() -> Signature {
    let mut s = sig_size();
    s.declare_type("tp", Kind::Type);
    s.declare_term("base", tp());
    s.declare_term("arr", Type::arrow(tp(), Type::arrow(tp(), tp())));
    s.declare_type("of", Kind::arrow(tm(), Kind::arrow(tp(), Kind::Type)));
    s
}

pub fn b_of() -> BlockSchema {
    block(&[("T", o())], vec![("x", tm()), ("y", of(v("x"), v("T")))])
}

pub fn c_mix() -> Arc<ContextSchema> {
    let b1 = block(&[], vec![("x1", tm()), ("y1", size(v("x1"), one()))]);
    let b2 = block(&[("T", o())], vec![("x2", tm()), ("y2", of(v("x2"), v("T")))]);
    Arc::new(ContextSchema::new("Cmix", vec![b1, b2]))
}
