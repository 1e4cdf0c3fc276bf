//! Surface syntax for signatures, schemas, context expressions and formulas.
//!
//! Identifiers may contain letters, digits and `_ - ' + *`; a `-` directly
//! followed by `>` ends the identifier. `%` starts a comment that runs to
//! the end of the line. Names of the form `n<digits>` denote nominal
//! constants wherever context expressions and formulas allow them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use lftransport::formula::Formula;
use lftransport::lf::{erase, ArityType, Binding, Head, Ident, Kind, Nominal, Signature, Term, Type};
use lftransport::schema::{BlockSchema, ContextSchema, CtxExpr};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Colon,
    Assign,
    Dot,
    Comma,
    Bar,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Arrow,
    Turnstile,
    Implies,
    And,
    Or,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{}`", s),
            Tok::Colon => ":",
            Tok::Assign => ":=",
            Tok::Dot => ".",
            Tok::Comma => ",",
            Tok::Bar => "|",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Arrow => "->",
            Tok::Turnstile => "|-",
            Tok::Implies => "=>",
            Tok::And => "/\\",
            Tok::Or => "\\/",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{}`", s)
    }
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '\'' | '+' | '*')
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| ParseError { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let (l, k) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two = |a: char, b: char| c == a && next == Some(b);
        let (tok, width) = if two(':', '=') {
            (Tok::Assign, 2)
        } else if two('-', '>') {
            (Tok::Arrow, 2)
        } else if two('|', '-') {
            (Tok::Turnstile, 2)
        } else if two('=', '>') {
            (Tok::Implies, 2)
        } else if two('/', '\\') {
            (Tok::And, 2)
        } else if two('\\', '/') {
            (Tok::Or, 2)
        } else {
            match c {
                ':' => (Tok::Colon, 1),
                '.' => (Tok::Dot, 1),
                ',' => (Tok::Comma, 1),
                '|' => (Tok::Bar, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                '[' => (Tok::LBrack, 1),
                ']' => (Tok::RBrack, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                c if ident_char(c) => {
                    let start = i;
                    let mut j = i;
                    while j < chars.len() && ident_char(chars[j]) && !(chars[j] == '-' && chars.get(j + 1) == Some(&'>')) {
                        j += 1;
                    }
                    (Tok::Ident(chars[start..j].iter().collect()), j - start)
                }
                c => return Err(err(l, k, format!("unexpected character `{}`", c))),
            }
        };
        out.push((tok, l, k));
        i += width;
        col += width;
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

pub fn nominal_index(s: &str) -> Option<u32> {
    let digits = s.strip_prefix('n')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// How free identifiers in terms are read.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Unknown names are constants (the checker reports them).
    Signature,
    /// Unknown names are variables; `n<digits>` are nominals.
    Open,
}

struct Parser<'a> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    sig: &'a Signature,
    mode: Mode,
    /// Names bound by enclosing binders of any kind, with their arity when
    /// the binder states it. They shadow constants.
    scope: Vec<(String, Option<ArityType>)>,
    /// Arities of the term constants declared so far in signature mode.
    consts: HashMap<String, ArityType>,
    /// Arities of nominals bound by the context expression being read.
    nominals: HashMap<u32, ArityType>,
    schemas: &'a BTreeMap<String, Arc<ContextSchema>>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(text: &str, sig: &'a Signature, mode: Mode, schemas: &'a BTreeMap<String, Arc<ContextSchema>>) -> PResult<Self> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            sig,
            mode,
            scope: Vec::new(),
            consts: HashMap::new(),
            nominals: HashMap::new(),
            schemas,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let (_, line, col) = self.toks[self.pos];
        Err(ParseError { line, col, msg: msg.into() })
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", t, self.peek()))
        }
    }

    fn eat(&mut self, t: Tok) -> bool {
        if *self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => self.error(format!("expected an identifier, found {}", t)),
        }
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn head(&self, name: &str) -> Head {
        if self.scope.iter().any(|(s, _)| s == name) {
            return Head::Var(Ident::new(name));
        }
        if self.mode == Mode::Open {
            if let Some(i) = nominal_index(name) {
                let a = self.nominals.get(&i).cloned().unwrap_or(ArityType::Base);
                return Head::Nominal(Nominal::new(a, i));
            }
        }
        if self.mode == Mode::Signature || self.sig.is_term_const(&Ident::new(name)) {
            Head::Const(Ident::new(name))
        } else {
            Head::Var(Ident::new(name))
        }
    }

    /// The arity of a head, when it is known at this point.
    fn head_arity(&self, h: &Head) -> Option<ArityType> {
        match h {
            Head::Var(x) => self.scope.iter().rev().find(|(s, _)| s == x.as_str()).and_then(|(_, a)| a.clone()),
            Head::Nominal(n) => Some(n.arity.clone()),
            Head::Const(c) => match self.mode {
                Mode::Signature => self.consts.get(c.as_str()).cloned(),
                Mode::Open => self.sig.type_of(c).map(erase),
            },
            Head::Bound(_) => None,
        }
    }

    /// Eta-expand an application whose head is missing arguments, so that
    /// `lam M` may be written for `lam ([x] M x)`.
    fn saturate(&self, head: Head, spine: Vec<Term>) -> Term {
        match self.head_arity(&head) {
            Some(a) if spine.len() < a.args().len() => Term::eta_expand(head, spine, &a),
            _ => Term::App(head, spine),
        }
    }

    fn with_bound<T>(&mut self, x: &str, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.with_arity(x, None, f)
    }

    fn with_arity<T>(&mut self, x: &str, a: Option<ArityType>, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.scope.push((x.to_string(), a));
        let r = f(self);
        self.scope.pop();
        r
    }

    // Terms

    fn term(&mut self) -> PResult<Term> {
        if self.eat(Tok::LBrack) {
            let x = self.ident()?;
            self.expect(Tok::RBrack)?;
            let body = self.with_bound(&x, |p| p.term())?;
            return Ok(Term::lam(&x, body));
        }
        let (head, mut spine) = self.app_head()?;
        while self.starts_arg() {
            spine.push(self.term_arg()?);
        }
        Ok(self.saturate(head, spine))
    }

    fn starts_arg(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen)
    }

    fn app_head(&mut self) -> PResult<(Head, Vec<Term>)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((self.head(&s), Vec::new()))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                match t {
                    Term::App(h, sp) => Ok((h, sp)),
                    Term::Lam(..) => self.error("an abstraction cannot be applied in canonical form"),
                }
            }
            t => self.error(format!("expected a term, found {}", t)),
        }
    }

    fn term_arg(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(self.saturate(self.head(&s), Vec::new()))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => self.error(format!("expected a term, found {}", t)),
        }
    }

    // Types and kinds

    fn atom_type(&mut self) -> PResult<Type> {
        let a = self.ident()?;
        let mut spine = Vec::new();
        while self.starts_arg() {
            spine.push(self.term_arg()?);
        }
        Ok(Type::Atom(Ident::new(&a), spine))
    }

    fn ty(&mut self) -> PResult<Type> {
        match self.classifier()? {
            Classifier::Type(t) => Ok(t),
            Classifier::Kind(_) => self.error("expected a type, found a kind"),
        }
    }

    fn classifier(&mut self) -> PResult<Classifier> {
        if *self.peek() == Tok::LBrace {
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::Colon)?;
            let dom = self.ty()?;
            self.expect(Tok::RBrace)?;
            let cod = self.with_arity(&x, Some(erase(&dom)), |p| p.classifier())?;
            return Ok(match cod {
                Classifier::Type(t) => Classifier::Type(Type::pi(&x, dom, t)),
                Classifier::Kind(k) => Classifier::Kind(Kind::pi(&x, dom, k)),
            });
        }
        let left = match self.peek().clone() {
            Tok::Ident(s) if s == "Type" => {
                self.bump();
                return Ok(Classifier::Kind(Kind::Type));
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                t
            }
            Tok::Ident(_) => self.atom_type()?,
            t => return self.error(format!("expected a type or kind, found {}", t)),
        };
        if self.eat(Tok::Arrow) {
            Ok(match self.classifier()? {
                Classifier::Type(t) => Classifier::Type(Type::arrow(left, t)),
                Classifier::Kind(k) => Classifier::Kind(Kind::arrow(left, k)),
            })
        } else {
            Ok(Classifier::Type(left))
        }
    }

    fn arity(&mut self) -> PResult<ArityType> {
        let left = match self.peek().clone() {
            Tok::Ident(s) if s == "o" => {
                self.bump();
                ArityType::Base
            }
            Tok::LParen => {
                self.bump();
                let a = self.arity()?;
                self.expect(Tok::RParen)?;
                a
            }
            t => return self.error(format!("expected an arity type, found {}", t)),
        };
        if self.eat(Tok::Arrow) {
            Ok(ArityType::arrow(left, self.arity()?))
        } else {
            Ok(left)
        }
    }

    // Signatures

    fn signature(&mut self) -> PResult<Signature> {
        let mut sig = Signature::new();
        while !self.at_eof() {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let c = self.classifier()?;
            self.expect(Tok::Dot)?;
            match c {
                Classifier::Kind(k) => sig.declare_type(&name, k),
                Classifier::Type(t) => {
                    self.consts.insert(name.clone(), erase(&t));
                    sig.declare_term(&name, t)
                }
            }
        }
        Ok(sig)
    }

    // Schemas

    fn block(&mut self) -> PResult<BlockSchema> {
        self.expect(Tok::LBrace)?;
        let mut params = Vec::new();
        if *self.peek() != Tok::RBrace {
            loop {
                let x = self.ident()?;
                self.expect(Tok::Colon)?;
                params.push((Ident::new(&x), self.arity()?));
                if !self.eat(Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        self.expect(Tok::LParen)?;
        let saved = self.scope.len();
        self.scope.extend(params.iter().map(|(p, a)| (p.to_string(), Some(a.clone()))));
        let mut decl = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let x = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.scope.push((x.clone(), Some(erase(&ty))));
                decl.push(Binding::new(Ident::new(&x), ty));
                if !self.eat(Tok::Comma) {
                    break;
                }
            }
        }
        self.scope.truncate(saved);
        self.expect(Tok::RParen)?;
        Ok(BlockSchema::new(params, decl))
    }

    fn schemas(&mut self) -> PResult<Vec<ContextSchema>> {
        let mut out: Vec<ContextSchema> = Vec::new();
        while !self.at_eof() {
            match self.ident()?.as_str() {
                "schema" => {}
                other => return self.error(format!("expected `schema`, found `{}`", other)),
            }
            let name = self.ident()?;
            if out.iter().any(|c| c.name.as_str() == name) {
                return self.error(format!("schema `{}` is defined twice", name));
            }
            self.expect(Tok::Assign)?;
            let mut blocks = vec![self.block()?];
            while self.eat(Tok::Bar) {
                blocks.push(self.block()?);
            }
            self.expect(Tok::Dot)?;
            out.push(ContextSchema::new(&name, blocks));
        }
        Ok(out)
    }

    // Context expressions

    fn nominal_binding(&mut self) -> PResult<Binding<Nominal>> {
        let name = self.ident()?;
        let Some(i) = nominal_index(&name) else {
            return self.error(format!("expected a nominal constant `n<digits>`, found `{}`", name));
        };
        self.expect(Tok::Colon)?;
        let ty = self.ty()?;
        let a = erase(&ty);
        self.nominals.insert(i, a.clone());
        Ok(Binding::new(Nominal::new(a, i), ty))
    }

    /// `.`, empty, `G`, `G, n1:A, ...` or `n1:A, ...`; stops before `stop`.
    fn ctx_expr(&mut self, stop: &Tok) -> PResult<CtxExpr> {
        let mut g = CtxExpr::empty();
        if self.peek() == stop {
            return Ok(g);
        }
        if self.eat(Tok::Dot) {
            if !self.eat(Tok::Comma) {
                return Ok(g);
            }
        } else if let Tok::Ident(s) = self.peek().clone() {
            if nominal_index(&s).is_none() {
                self.bump();
                g.head = Some(Ident::new(&s));
                if !self.eat(Tok::Comma) {
                    return Ok(g);
                }
            }
        }
        loop {
            g.bindings.push(self.nominal_binding()?);
            if !self.eat(Tok::Comma) {
                return Ok(g);
            }
        }
    }

    // Formulas

    fn formula(&mut self) -> PResult<Formula> {
        if let Tok::Ident(kw) = self.peek().clone() {
            if matches!(kw.as_str(), "ctx" | "forall" | "exists") && matches!(self.peek2(), Tok::Ident(_)) {
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::Colon)?;
                if kw == "ctx" {
                    let name = self.ident()?;
                    let Some(c) = self.schemas.get(&name).cloned() else {
                        return self.error(format!("unknown schema `{}`", name));
                    };
                    self.expect(Tok::Dot)?;
                    let body = self.formula()?;
                    return Ok(Formula::CtxPi(Ident::new(&x), c, Box::new(body)));
                }
                let a = self.arity()?;
                self.expect(Tok::Dot)?;
                let body = self.with_arity(&x, Some(a.clone()), |p| p.formula())?;
                return Ok(if kw == "forall" { Formula::all(&x, a, body) } else { Formula::ex(&x, a, body) });
            }
        }
        let left = self.disjunction()?;
        if self.eat(Tok::Implies) {
            Ok(Formula::imp(left, self.formula()?))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let left = self.conjunction()?;
        if self.eat(Tok::Or) {
            Ok(Formula::or(left, self.disjunction()?))
        } else {
            Ok(left)
        }
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let left = self.formula_atom()?;
        if self.eat(Tok::And) {
            Ok(Formula::and(left, self.conjunction()?))
        } else {
            Ok(left)
        }
    }

    fn formula_atom(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "tt" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(s) if s == "ff" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::LBrace => {
                self.bump();
                let saved = std::mem::take(&mut self.nominals);
                let g = self.ctx_expr(&Tok::Turnstile)?;
                self.expect(Tok::Turnstile)?;
                let m = self.term()?;
                self.expect(Tok::Colon)?;
                let a = self.ty()?;
                self.expect(Tok::RBrace)?;
                self.nominals = saved;
                Ok(Formula::Atm(g, m, a))
            }
            t => self.error(format!("expected a formula, found {}", t)),
        }
    }

    fn finish(&mut self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error(format!("unexpected {}", self.peek()))
        }
    }
}

enum Classifier {
    Kind(Kind),
    Type(Type),
}

fn no_schemas() -> &'static BTreeMap<String, Arc<ContextSchema>> {
    static EMPTY: std::sync::OnceLock<BTreeMap<String, Arc<ContextSchema>>> = std::sync::OnceLock::new();
    EMPTY.get_or_init(BTreeMap::new)
}

/// `name : classifier.` declarations. Only syntax is checked here.
pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let empty = Signature::new();
    let mut p = Parser::new(text, &empty, Mode::Signature, no_schemas())?;
    let sig = p.signature()?;
    p.finish()?;
    Ok(sig)
}

/// `schema Name := Block | ... .` definitions.
pub fn parse_schemas(text: &str, sig: &Signature) -> Result<Vec<ContextSchema>, ParseError> {
    let mut p = Parser::new(text, sig, Mode::Open, no_schemas())?;
    let out = p.schemas()?;
    p.finish()?;
    Ok(out)
}

/// A closed context expression such as `n1:tm, n2:size n1 (s z)` or `.`.
pub fn parse_ctx(text: &str, sig: &Signature) -> Result<CtxExpr, ParseError> {
    let mut p = Parser::new(text, sig, Mode::Open, no_schemas())?;
    let g = p.ctx_expr(&Tok::Eof)?;
    p.finish()?;
    if let Some(h) = &g.head {
        return Err(ParseError { line: 1, col: 1, msg: format!("context variable `{}` in a closed context", h) });
    }
    Ok(g)
}

/// A type; free names that are not constants are read as variables.
pub fn parse_type(text: &str, sig: &Signature) -> Result<Type, ParseError> {
    let mut p = Parser::new(text, sig, Mode::Open, no_schemas())?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, sig, Mode::Open, no_schemas())?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// One formula, optionally followed by `.`. Schema names refer to `schemas`.
pub fn parse_formula(
    text: &str,
    sig: &Signature,
    schemas: &BTreeMap<String, Arc<ContextSchema>>,
) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, sig, Mode::Open, schemas)?;
    let f = p.formula()?;
    p.eat(Tok::Dot);
    p.finish()?;
    Ok(f)
}

/// Print a signature in the syntax `parse_signature` reads.
pub fn print_signature(sig: &Signature) -> String {
    let mut out = String::new();
    for d in sig.decls() {
        match &d.classifier {
            lftransport::lf::Classifier::Kind(k) => out.push_str(&format!("{} : {}.\n", d.name, k)),
            lftransport::lf::Classifier::Type(t) => out.push_str(&format!("{} : {}.\n", d.name, t)),
        }
    }
    out
}

pub fn print_schema(c: &ContextSchema) -> String {
    format!("schema {} := {}.", c.name, c)
}
