//! Context schemas: well-formedness, instance matching and enumeration.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::lf::{
    arity_check_term, arity_check_type, erase, lowest_unused, ArityContext, ArityType, Binding, CtxName, Head,
    Hint, Ident, LfContext, Nominal, Signature, Substitution, Term, Type,
};
use crate::pool::{eta_nominal, TermPool};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("block {block}: variable `{name}` is already assigned")]
    DuplicateVariable { block: usize, name: String },
    #[error("block {block}: the type `{ty}` of `{name}` is not well-formed at the arity level")]
    ArityKindFailure { block: usize, name: String, ty: String },
    #[error("block {block}: parameter `{param}` is used outside the pattern fragment ({detail})")]
    NotPattern { block: usize, param: String, detail: String },
    #[error("context expression headed by `{0}` cannot be matched against a schema")]
    HeadedContext(String),
    #[error("parameter `{param}` of arity `{arity}` has no closed inhabitant within the size bound")]
    PoolEmpty { param: String, arity: ArityType },
}

/// `{x1:a1, ..., xn:an}(y1:A1, ..., ym:Am)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockSchema {
    pub params: Vec<(Ident, ArityType)>,
    pub decl: Vec<Binding<Ident>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContextSchema {
    pub name: Ident,
    pub blocks: Vec<BlockSchema>,
}

/// `G ::= Γ | · | G, n:A`, stored as an optional head variable and the
/// explicit bindings that follow it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CtxExpr {
    pub head: Option<Ident>,
    pub bindings: Vec<Binding<Nominal>>,
}

impl BlockSchema {
    pub fn new(params: Vec<(Ident, ArityType)>, decl: Vec<Binding<Ident>>) -> Self {
        BlockSchema { params, decl }
    }

    pub fn empty() -> Self {
        BlockSchema::new(Vec::new(), Vec::new())
    }

    /// The arity context `blkctx(B)`: parameters followed by erased declarations.
    pub fn blkctx(&self) -> Vec<(Ident, ArityType)> {
        let mut out = self.params.clone();
        out.extend(self.decl.iter().map(|b| (b.name.clone(), erase(&b.ty))));
        out
    }

    pub fn is_param(&self, x: &Ident) -> bool {
        self.params.iter().any(|(p, _)| p == x)
    }

    pub fn param_arity(&self, x: &Ident) -> Option<&ArityType> {
        self.params.iter().find(|(p, _)| p == x).map(|(_, a)| a)
    }
}

impl ContextSchema {
    pub fn new(name: &str, blocks: Vec<BlockSchema>) -> Self {
        ContextSchema { name: Ident::new(name), blocks }
    }

    /// Every type assigned by some block declaration.
    pub fn decl_types(&self) -> impl Iterator<Item = &Type> {
        self.blocks.iter().flat_map(|b| b.decl.iter().map(|d| &d.ty))
    }
}

impl CtxExpr {
    pub fn empty() -> Self {
        CtxExpr::default()
    }

    pub fn var(name: &str) -> Self {
        CtxExpr { head: Some(Ident::new(name)), bindings: Vec::new() }
    }

    pub fn closed(bindings: Vec<Binding<Nominal>>) -> Self {
        CtxExpr { head: None, bindings }
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.head.is_none() && self.bindings.is_empty()
    }

    /// The explicit bindings as an LF context.
    pub fn to_lf(&self) -> LfContext {
        LfContext::from_nominals(&self.bindings)
    }

    pub fn from_lf(ctx: &LfContext) -> Option<CtxExpr> {
        let mut out = Vec::new();
        for b in &ctx.0 {
            match &b.name {
                CtxName::Nominal(n) => out.push(Binding::new(n.clone(), b.ty.clone())),
                CtxName::Var(_) => return None,
            }
        }
        Some(CtxExpr::closed(out))
    }

    /// Indices of all nominals bound or mentioned.
    pub fn nominal_indices(&self) -> BTreeSet<u32> {
        self.to_lf().nominal_indices()
    }

    pub fn bound_nominals(&self) -> Vec<Nominal> {
        self.bindings.iter().map(|b| b.name.clone()).collect()
    }

    pub fn apply_subst(&self, s: &Substitution) -> Result<CtxExpr, crate::lf::SubstError> {
        let bindings = self
            .bindings
            .iter()
            .map(|b| Ok(Binding::new(b.name.clone(), s.apply_type(&b.ty)?)))
            .collect::<Result<_, crate::lf::SubstError>>()?;
        Ok(CtxExpr { head: self.head.clone(), bindings })
    }
}

impl fmt::Display for CtxExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if let Some(h) = &self.head {
            write!(f, "{}", h)?;
            first = false;
        }
        for b in &self.bindings {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{}:{}", b.name, b.ty)?;
        }
        if first {
            f.write_str(".")?;
        }
        Ok(())
    }
}

impl fmt::Display for BlockSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (p, a)) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", p, a)?;
        }
        f.write_str("}(")?;
        for (i, b) in self.decl.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", b.name, b.ty)?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for ContextSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return f.write_str("(no blocks)");
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Well-formedness

pub fn check_block(sig: &Signature, block: &BlockSchema, index: usize) -> Result<(), SchemaError> {
    let base = ArityContext::from_signature(sig);
    let mut cx = base.clone();
    let mut seen: HashSet<Ident> = HashSet::new();
    for (p, a) in &block.params {
        if !seen.insert(p.clone()) {
            return Err(SchemaError::DuplicateVariable { block: index, name: p.to_string() });
        }
        cx.bind(p.clone(), a.clone());
    }
    for b in &block.decl {
        let ty_ok = arity_check_type(&cx, &b.ty);
        if !ty_ok {
            return Err(SchemaError::ArityKindFailure { block: index, name: b.name.to_string(), ty: b.ty.to_string() });
        }
        if seen.contains(&b.name) || base.get(&b.name).is_some() || base.family(&b.name).is_some() {
            return Err(SchemaError::DuplicateVariable { block: index, name: b.name.to_string() });
        }
        seen.insert(b.name.clone());
        cx.bind(b.name.clone(), erase(&b.ty));
    }
    Ok(())
}

/// Blocks are numbered from 1 in diagnostics.
pub fn check_schema(sig: &Signature, schema: &ContextSchema) -> Result<(), SchemaError> {
    for (i, b) in schema.blocks.iter().enumerate() {
        check_block(sig, b, i + 1)?;
    }
    Ok(())
}

/// Undo eta-expansion: `[z1]..[zk] h z1 .. zk` becomes `h`, re-indexed to
/// the enclosing scope. Returns `None` if `t` is not of that shape.
fn eta_head(t: &Term) -> Option<Head> {
    let mut k = 0u32;
    let mut cur = t;
    while let Term::Lam(_, body) = cur {
        k += 1;
        cur = body;
    }
    let Term::App(h, spine) = cur else { unreachable!() };
    if spine.len() as u32 != k {
        return None;
    }
    for (i, a) in spine.iter().enumerate() {
        if *a != Term::bound(k - 1 - i as u32) {
            return None;
        }
    }
    match h {
        Head::Bound(i) if *i < k => None,
        Head::Bound(i) => Some(Head::Bound(i - k)),
        other => Some(other.clone()),
    }
}

/// Report the first parameter occurrence that is not applied to distinct
/// variables (declaration variables or locally bound ones).
pub fn pattern_violation(block: &BlockSchema) -> Option<(Ident, String)> {
    fn walk_term(block: &BlockSchema, t: &Term, depth: u32) -> Option<(Ident, String)> {
        match t {
            Term::Lam(_, body) => walk_term(block, body, depth + 1),
            Term::App(h, spine) => {
                if let Head::Var(p) = h {
                    if block.is_param(p) {
                        let mut seen = Vec::new();
                        for a in spine {
                            match eta_head(a) {
                                Some(Head::Var(y)) if block.decl.iter().any(|d| d.name == y) => {
                                    if seen.contains(&Head::Var(y.clone())) {
                                        return Some((p.clone(), format!("`{}` is repeated", y)));
                                    }
                                    seen.push(Head::Var(y));
                                }
                                Some(Head::Bound(i)) if i < depth => {
                                    if seen.contains(&Head::Bound(i)) {
                                        return Some((p.clone(), "a bound variable is repeated".into()));
                                    }
                                    seen.push(Head::Bound(i));
                                }
                                _ => return Some((p.clone(), format!("argument `{}` is not a variable", a))),
                            }
                        }
                        return None;
                    }
                }
                spine.iter().find_map(|a| walk_term(block, a, depth))
            }
        }
    }
    fn walk_type(block: &BlockSchema, ty: &Type, depth: u32) -> Option<(Ident, String)> {
        match ty {
            Type::Atom(_, spine) => spine.iter().find_map(|a| walk_term(block, a, depth)),
            Type::Pi(_, dom, cod) => walk_type(block, dom, depth).or_else(|| walk_type(block, cod, depth + 1)),
        }
    }
    block.decl.iter().find_map(|d| walk_type(block, &d.ty, 0))
}

// ---------------------------------------------------------------------------
// Instance matching

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchOptions {
    /// Whether parameter instantiations may mention nominal constants.
    pub allow_param_nominals: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions { allow_param_nominals: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatch {
    /// Declaration variable to the nominal replacing it.
    pub decl_map: Vec<(Ident, Nominal)>,
    /// Parameter instantiations.
    pub params: Substitution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentMatch {
    pub block: usize,
    pub start: usize,
    pub len: usize,
    pub matched: BlockMatch,
}

pub type Segmentation = Vec<SegmentMatch>;

struct Occurrence {
    param: Ident,
    args: Vec<Head>,
    target: Term,
}

fn match_term(block: &BlockSchema, pat: &Term, tgt: &Term, depth: u32, occ: &mut Vec<Occurrence>) -> bool {
    match (pat, tgt) {
        (Term::Lam(_, p), Term::Lam(_, t)) => match_term(block, p, t, depth + 1, occ),
        (Term::App(Head::Var(p), args), _) if block.is_param(p) => {
            let mut heads = Vec::new();
            for a in args {
                match eta_head(a) {
                    Some(h @ Head::Nominal(_)) => heads.push(h),
                    Some(Head::Bound(i)) if i < depth => heads.push(Head::Bound(i)),
                    _ => return false,
                }
            }
            occ.push(Occurrence { param: p.clone(), args: heads, target: tgt.clone() });
            true
        }
        (Term::App(h1, s1), Term::App(h2, s2)) => {
            h1 == h2
                && s1.len() == s2.len()
                && s1.iter().zip(s2).all(|(a, b)| match_term(block, a, b, depth, occ))
        }
        _ => false,
    }
}

fn match_type(block: &BlockSchema, pat: &Type, tgt: &Type, depth: u32, occ: &mut Vec<Occurrence>) -> bool {
    match (pat, tgt) {
        (Type::Atom(a, s1), Type::Atom(b, s2)) => {
            a == b && s1.len() == s2.len() && s1.iter().zip(s2).all(|(x, y)| match_term(block, x, y, depth, occ))
        }
        (Type::Pi(_, d1, c1), Type::Pi(_, d2, c2)) => {
            match_type(block, d1, d2, depth, occ) && match_type(block, c1, c2, depth + 1, occ)
        }
        _ => false,
    }
}

/// Solve `P a_i = t_i` for all occurrences at once. The body is built under
/// `k` new binders; `d` counts binders crossed inside the targets.
fn solve_body(occs: &[(&[Head], &Term)], k: usize, d: u32, allow_nominals: bool) -> Option<Term> {
    if occs.iter().all(|(_, t)| matches!(t, Term::Lam(..))) {
        let inner: Vec<(&[Head], &Term)> = occs
            .iter()
            .map(|(a, t)| match t {
                Term::Lam(_, b) => (*a, &**b),
                _ => unreachable!(),
            })
            .collect();
        let body = solve_body(&inner, k, d + 1, allow_nominals)?;
        return Some(Term::Lam(Hint::new("x"), Box::new(body)));
    }
    let mut apps = Vec::new();
    for (a, t) in occs {
        match t {
            Term::App(h, sp) => apps.push((*a, h, sp)),
            Term::Lam(..) => return None,
        }
    }
    let len = apps[0].2.len();
    if apps.iter().any(|(_, _, sp)| sp.len() != len) {
        return None;
    }
    let is_arg = |h: &Head, arg: &Head| match (h, arg) {
        (Head::Nominal(n), Head::Nominal(m)) => n == m,
        (Head::Bound(b), Head::Bound(i)) => *b >= d && b - d == *i,
        _ => false,
    };
    let mut head = None;
    for j in 0..k {
        if apps.iter().all(|(a, h, _)| is_arg(h, &a[j])) {
            head = Some(Head::Bound(d + (k - 1 - j) as u32));
            break;
        }
    }
    if head.is_none() {
        let h0 = apps[0].1;
        let same = apps.iter().all(|(_, h, _)| *h == h0);
        head = match h0 {
            _ if !same => None,
            Head::Const(_) => Some(h0.clone()),
            Head::Nominal(_) if allow_nominals => Some(h0.clone()),
            Head::Bound(b) if *b < d => Some(h0.clone()),
            _ => None,
        };
    }
    let head = head?;
    let mut spine = Vec::with_capacity(len);
    for i in 0..len {
        let column: Vec<(&[Head], &Term)> = apps.iter().map(|(a, _, sp)| (*a, &sp[i])).collect();
        spine.push(solve_body(&column, k, d, allow_nominals)?);
    }
    Some(Term::App(head, spine))
}

fn default_inhabitant(
    sig: &Signature,
    arity: &ArityType,
    avoid: &BTreeSet<u32>,
    opts: MatchOptions,
) -> Option<Term> {
    if opts.allow_param_nominals {
        return Some(eta_nominal(&Nominal::new(arity.clone(), lowest_unused(avoid))));
    }
    TermPool::from_signature(sig).up_to(arity, 4).into_iter().next()
}

/// Decide whether `segment` is an instance of `block`; on success return the
/// declaration-variable replacement and parameter instantiation.
pub fn block_instance(
    sig: &Signature,
    block: &BlockSchema,
    segment: &[Binding<Nominal>],
    opts: MatchOptions,
) -> Result<Option<BlockMatch>, SchemaError> {
    if let Some((param, detail)) = pattern_violation(block) {
        return Err(SchemaError::NotPattern { block: 0, param: param.to_string(), detail });
    }
    if segment.len() != block.decl.len() {
        return Ok(None);
    }
    let mut theta = Substitution::new();
    let mut decl_map = Vec::new();
    for (d, b) in block.decl.iter().zip(segment) {
        let a = erase(&d.ty);
        if b.name.arity != a {
            return Ok(None);
        }
        theta.insert(d.name.clone(), Term::nominal(b.name.clone()), a);
        decl_map.push((d.name.clone(), b.name.clone()));
    }
    let mut patterns = Vec::new();
    let mut occ = Vec::new();
    for (d, b) in block.decl.iter().zip(segment) {
        let Ok(p) = theta.apply_type(&d.ty) else {
            return Ok(None);
        };
        if !match_type(block, &p, &b.ty, 0, &mut occ) {
            return Ok(None);
        }
        patterns.push(p);
    }

    let cx = ArityContext::from_signature(sig);
    let mut used: BTreeSet<u32> = LfContext::from_nominals(segment).nominal_indices();
    let mut params = Substitution::new();
    for (p, arity) in &block.params {
        let mine: Vec<(&[Head], &Term)> =
            occ.iter().filter(|o| &o.param == p).map(|o| (o.args.as_slice(), &o.target)).collect();
        let sol = if mine.is_empty() {
            let Some(t) = default_inhabitant(sig, arity, &used, opts) else {
                return Ok(None);
            };
            t
        } else {
            let k = mine[0].0.len();
            let Some(body) = solve_body(&mine, k, 0, opts.allow_param_nominals) else {
                return Ok(None);
            };
            let mut t = body;
            for _ in 0..k {
                t = Term::Lam(Hint::new("x"), Box::new(t));
            }
            t
        };
        if !arity_check_term(&cx, &sol, arity) {
            return Ok(None);
        }
        used.extend(sol.free_names().nominals.iter().map(|n| n.index));
        params.insert(p.clone(), sol, arity.clone());
    }

    for (p, b) in patterns.iter().zip(segment) {
        match params.apply_type(p) {
            Ok(t) if t == b.ty => {}
            _ => return Ok(None),
        }
    }
    Ok(Some(BlockMatch { decl_map, params }))
}

fn number_block(e: SchemaError, index: usize) -> SchemaError {
    match e {
        SchemaError::NotPattern { param, detail, .. } => SchemaError::NotPattern { block: index, param, detail },
        other => other,
    }
}

/// Find a segmentation of `ctx` into block instances, if there is one.
pub fn schema_instance(
    sig: &Signature,
    schema: &ContextSchema,
    ctx: &CtxExpr,
    opts: MatchOptions,
) -> Result<Option<Segmentation>, SchemaError> {
    if let Some(h) = &ctx.head {
        return Err(SchemaError::HeadedContext(h.to_string()));
    }
    for (i, b) in schema.blocks.iter().enumerate() {
        if let Some((param, detail)) = pattern_violation(b) {
            return Err(SchemaError::NotPattern { block: i + 1, param: param.to_string(), detail });
        }
    }
    let n = ctx.bindings.len();
    let mut dead = vec![false; n + 1];
    let mut path = Vec::new();
    if segment_from(sig, schema, &ctx.bindings, 0, &mut dead, &mut path, opts)? {
        Ok(Some(path))
    } else {
        Ok(None)
    }
}

fn segment_from(
    sig: &Signature,
    schema: &ContextSchema,
    bindings: &[Binding<Nominal>],
    pos: usize,
    dead: &mut [bool],
    path: &mut Segmentation,
    opts: MatchOptions,
) -> Result<bool, SchemaError> {
    if pos == bindings.len() {
        return Ok(true);
    }
    if dead[pos] {
        return Ok(false);
    }
    for (i, b) in schema.blocks.iter().enumerate() {
        let len = b.decl.len();
        if len == 0 || pos + len > bindings.len() {
            continue;
        }
        let m = block_instance(sig, b, &bindings[pos..pos + len], opts).map_err(|e| number_block(e, i + 1))?;
        if let Some(matched) = m {
            path.push(SegmentMatch { block: i, start: pos, len, matched });
            if segment_from(sig, schema, bindings, pos + len, dead, path, opts)? {
                return Ok(true);
            }
            path.pop();
        }
    }
    dead[pos] = true;
    Ok(false)
}

pub fn is_schema_instance(sig: &Signature, schema: &ContextSchema, ctx: &CtxExpr) -> bool {
    matches!(schema_instance(sig, schema, ctx, MatchOptions::default()), Ok(Some(_)))
}

// ---------------------------------------------------------------------------
// Enumeration

/// Instantiate `block` after `prefix` with the given parameter terms, using
/// the lowest unused nominal indices for the declaration variables.
pub fn instantiate_block(
    block: &BlockSchema,
    params: &[Term],
    prefix: &CtxExpr,
) -> Result<Vec<Binding<Nominal>>, crate::lf::SubstError> {
    let mut used = prefix.nominal_indices();
    for t in params {
        used.extend(t.free_names().nominals.iter().map(|n| n.index));
    }
    let mut theta = Substitution::new();
    for ((p, a), t) in block.params.iter().zip(params) {
        theta.insert(p.clone(), t.clone(), a.clone());
    }
    let mut out = Vec::new();
    for d in &block.decl {
        let a = erase(&d.ty);
        let n = Nominal::new(a.clone(), lowest_unused(&used));
        used.insert(n.index);
        let ty = theta.apply_type(&d.ty)?;
        out.push(Binding::new(n.clone(), ty));
        theta.insert(d.name.clone(), Term::nominal(n), a);
    }
    Ok(out)
}

fn cartesian(pools: &[Vec<Term>]) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = vec![Vec::new()];
    for pool in pools {
        let mut next = Vec::with_capacity(out.len() * pool.len());
        for prefix in &out {
            for t in pool {
                let mut v = prefix.clone();
                v.push(t.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// All instances built from at most `blocks_max` non-empty block
/// instantiations. Parameters range over closed terms of size at most
/// `term_size_max` built from term constants and, when permitted, the
/// nominals bound earlier in the instance.
pub fn enumerate_instances(
    sig: &Signature,
    schema: &ContextSchema,
    blocks_max: usize,
    term_size_max: usize,
    opts: MatchOptions,
) -> Result<Vec<CtxExpr>, SchemaError> {
    let constants = TermPool::from_signature(sig);
    for b in &schema.blocks {
        for (p, a) in &b.params {
            if constants.up_to(a, term_size_max).is_empty() {
                return Err(SchemaError::PoolEmpty { param: p.to_string(), arity: a.clone() });
            }
        }
    }
    let mut seen: HashSet<CtxExpr> = HashSet::new();
    let mut out = vec![CtxExpr::empty()];
    seen.insert(CtxExpr::empty());
    let mut level = vec![CtxExpr::empty()];
    for _ in 0..blocks_max {
        let mut next = Vec::new();
        for g in &level {
            let pool = if opts.allow_param_nominals {
                TermPool::with_nominals(sig, g.bound_nominals())
            } else {
                constants.clone()
            };
            for b in schema.blocks.iter().filter(|b| !b.decl.is_empty()) {
                let pools: Vec<Vec<Term>> = b.params.iter().map(|(_, a)| pool.up_to(a, term_size_max)).collect();
                for choice in cartesian(&pools) {
                    let Ok(block) = instantiate_block(b, &choice, g) else { continue };
                    let mut h = g.clone();
                    h.bindings.extend(block);
                    if seen.insert(h.clone()) {
                        next.push(h.clone());
                        out.push(h);
                    }
                }
            }
        }
        level = next;
    }
    Ok(out)
}

/// The instances that are also well-formed LF contexts.
pub fn enumerate_well_formed(
    sig: &Signature,
    schema: &ContextSchema,
    blocks_max: usize,
    term_size_max: usize,
    opts: MatchOptions,
) -> Result<Vec<CtxExpr>, SchemaError> {
    Ok(enumerate_instances(sig, schema, blocks_max, term_size_max, opts)?
        .into_iter()
        .filter(|g| crate::lf::check_context(sig, &g.to_lf()).is_ok())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lf::Kind;

    fn sig() -> Signature {
        let nat = Type::atom("nat", vec![]);
        let tm = Type::atom("tm", vec![]);
        let mut s = Signature::new();
        s.declare_type("nat", Kind::Type);
        s.declare_term("z", nat.clone());
        s.declare_type("tm", Kind::Type);
        s.declare_type("tp", Kind::Type);
        s.declare_term("unit", tp());
        s.declare_type("of", Kind::arrow(tm.clone(), Kind::arrow(tp(), Kind::Type)));
        s.declare_type("q", Kind::arrow(tm, Kind::Type));
        s
    }

    fn tp() -> Type {
        Type::atom("tp", vec![])
    }

    fn b_of() -> BlockSchema {
        BlockSchema::new(
            vec![(Ident::new("T"), ArityType::Base)],
            vec![
                Binding::new(Ident::new("x"), Type::atom("tm", vec![])),
                Binding::new(Ident::new("y"), Type::atom("of", vec![Term::var("x"), Term::var("T")])),
            ],
        )
    }

    fn seg(t: Term) -> Vec<Binding<Nominal>> {
        let n1 = Nominal::base(1);
        vec![
            Binding::new(n1.clone(), Type::atom("tm", vec![])),
            Binding::new(Nominal::base(2), Type::atom("of", vec![Term::nominal(n1), t])),
        ]
    }

    #[test]
    fn parameter_solution_is_found() {
        let m = block_instance(&sig(), &b_of(), &seg(Term::constant("unit")), MatchOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(m.params.get(&Ident::new("T")).unwrap().term, Term::constant("unit"));
    }

    #[test]
    fn nominal_parameters_follow_the_flag() {
        let t = Term::nominal(Nominal::base(1));
        assert!(block_instance(&sig(), &b_of(), &seg(t.clone()), MatchOptions::default()).unwrap().is_some());
        let strict = MatchOptions { allow_param_nominals: false };
        assert!(block_instance(&sig(), &b_of(), &seg(t), strict).unwrap().is_none());
    }

    #[test]
    fn higher_order_parameter_abstracts_nominal() {
        // {P:o->o}(x:tm, y:q (P x))
        let oo = ArityType::arrow(ArityType::Base, ArityType::Base);
        let b = BlockSchema::new(
            vec![(Ident::new("P"), oo)],
            vec![
                Binding::new(Ident::new("x"), Type::atom("tm", vec![])),
                Binding::new(
                    Ident::new("y"),
                    Type::atom("q", vec![Term::app(Head::Var(Ident::new("P")), vec![Term::var("x")])]),
                ),
            ],
        );
        let n1 = Nominal::base(1);
        let segment = vec![
            Binding::new(n1.clone(), Type::atom("tm", vec![])),
            Binding::new(Nominal::base(2), Type::atom("q", vec![Term::nominal(n1)])),
        ];
        let m = block_instance(&sig(), &b, &segment, MatchOptions::default()).unwrap().unwrap();
        assert_eq!(m.params.get(&Ident::new("P")).unwrap().term.to_string(), "[x] x");
    }

    #[test]
    fn non_pattern_is_reported() {
        let b = BlockSchema::new(
            vec![(Ident::new("P"), ArityType::arrow(ArityType::Base, ArityType::Base))],
            vec![Binding::new(
                Ident::new("y"),
                Type::atom("q", vec![Term::app(Head::Var(Ident::new("P")), vec![Term::constant("z")])]),
            )],
        );
        assert!(pattern_violation(&b).is_some());
    }

    #[test]
    fn enumeration_is_deduplicated_and_valid() {
        let c = ContextSchema::new("C", vec![b_of()]);
        let all = enumerate_instances(&sig(), &c, 2, 1, MatchOptions::default()).unwrap();
        let set: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for g in &all {
            assert!(is_schema_instance(&sig(), &c, g), "{}", g);
        }
    }
}
