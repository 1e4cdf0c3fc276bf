//! Schema subsumption with variant search, transport certificates and
//! witness extraction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::validity::{val_pos, Polarity, ValTree};
use super::variant::{make_variant, VarPermutation};
use super::{ce_derive, prunable, prune_derive, replay_derivation, tf_subord, tf_witness, Derivation, Step};
use crate::formula::{check_formula, Formula, WfEnv};
use crate::lf::{check_signature, Head, Ident, Signature, Term, Type};
use crate::schema::{check_schema, schema_instance, BlockSchema, ContextSchema, CtxExpr, MatchOptions};
use crate::subordination::{compute_subordination, SubordRel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Upper bound on candidate alignments tried per target block.
    pub max_alignments: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_alignments: 100_000 }
    }
}

/// How one target block is covered: the variant chosen, the source block it
/// relates to, and the two drop derivations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockRecord {
    pub target_block: usize,
    pub permutation: VarPermutation,
    pub variant: BlockSchema,
    pub source_block: usize,
    pub prune: Derivation,
    pub ce: Derivation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubsumptionFailure {
    /// No variant of the target block relates to any source block.
    NoVariant { block: usize, text: String, undroppable: Vec<String> },
    /// The alignment cap was reached before a variant was found.
    SearchOverflow { block: usize, tried: usize },
}

impl fmt::Display for SubsumptionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsumptionFailure::NoVariant { block, text, undroppable } => {
                write!(f, "target block {} {} is not subsumed by any source block", block + 1, text)?;
                for u in undroppable {
                    write!(f, "\n  undroppable {}", u)?;
                }
                Ok(())
            }
            SubsumptionFailure::SearchOverflow { block, tried } => write!(
                f,
                "variant search for target block {} stopped after {} alignments; raise the alignment cap",
                block + 1,
                tried
            ),
        }
    }
}

/// Structural equality of `t` (target side) and `s` (source side) up to a
/// renaming of free variables, extending `map`.
struct Renamer<'a> {
    target: &'a BlockSchema,
    source: &'a BlockSchema,
    map: BTreeMap<Ident, Ident>,
    used: BTreeSet<Ident>,
}

impl Renamer<'_> {
    fn var(&mut self, a: &Ident, b: &Ident) -> bool {
        if let Some(x) = self.map.get(a) {
            return x == b;
        }
        // Only parameters are still unmapped here; declaration variables
        // were fixed by the alignment.
        let (Some(pa), Some(pb)) = (self.target.param_arity(a), self.source.param_arity(b)) else {
            return false;
        };
        if pa != pb || self.used.contains(b) {
            return false;
        }
        self.map.insert(a.clone(), b.clone());
        self.used.insert(b.clone());
        true
    }

    fn term(&mut self, t: &Term, s: &Term) -> bool {
        match (t, s) {
            (Term::Lam(_, x), Term::Lam(_, y)) => self.term(x, y),
            (Term::App(h, xs), Term::App(k, ys)) => {
                let heads = match (h, k) {
                    (Head::Var(a), Head::Var(b)) => self.var(a, b),
                    (Head::Var(_), _) | (_, Head::Var(_)) => false,
                    _ => h == k,
                };
                heads && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.term(x, y))
            }
            _ => false,
        }
    }

    fn ty(&mut self, t: &Type, s: &Type) -> bool {
        match (t, s) {
            (Type::Atom(a, xs), Type::Atom(b, ys)) => {
                a == b && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.term(x, y))
            }
            (Type::Pi(_, d1, c1), Type::Pi(_, d2, c2)) => self.ty(d1, d2) && self.ty(c1, c2),
            _ => false,
        }
    }
}

fn free_vars(ty: &Type) -> BTreeSet<Ident> {
    ty.free_names().vars
}

/// Every parameter of the source block that its declaration mentions must
/// be a parameter of the variant with the same arity.
fn params_aligned(variant: &BlockSchema, source: &BlockSchema) -> bool {
    source.decl.iter().flat_map(|d| free_vars(&d.ty)).all(|x| match source.param_arity(&x) {
        Some(a) => variant.param_arity(&x) == Some(a),
        None => true,
    })
}

struct Search<'a> {
    rel: &'a SubordRel,
    source: &'a ContextSchema,
    f: &'a Formula,
    gamma: &'a Ident,
    cap: usize,
    tried: usize,
}

impl Search<'_> {
    fn droppable(&self, a: &Type) -> bool {
        !tf_subord(self.rel, a, self.f, self.gamma) && prunable(self.rel, self.source, a)
    }

    /// Order-preserving injections of the source declaration into the
    /// target declaration whose skipped positions are droppable.
    fn injections(&mut self, target: &BlockSchema, source: &BlockSchema, out: &mut Vec<Vec<usize>>) -> bool {
        let drop_ok: Vec<bool> = target.decl.iter().map(|d| self.droppable(&d.ty)).collect();
        let mut cur = Vec::new();
        self.inject(target, source, &drop_ok, 0, 0, &mut cur, out)
    }

    #[allow(clippy::too_many_arguments)]
    fn inject(
        &mut self,
        target: &BlockSchema,
        source: &BlockSchema,
        drop_ok: &[bool],
        i: usize,
        j: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> bool {
        let (m, n) = (source.decl.len(), target.decl.len());
        if i == m {
            if drop_ok[j..].iter().all(|d| *d) {
                self.tried += 1;
                if self.tried > self.cap {
                    return false;
                }
                out.push(cur.clone());
            }
            return true;
        }
        for k in j..=(n - (m - i)) {
            if target.decl[k].ty.head() == source.decl[i].ty.head() {
                cur.push(k);
                let go = self.inject(target, source, drop_ok, i + 1, k + 1, cur, out);
                cur.pop();
                if !go {
                    return false;
                }
            }
            if !drop_ok[k] {
                break;
            }
        }
        true
    }

    fn try_alignment(&self, target: &BlockSchema, source: &BlockSchema, iota: &[usize]) -> Option<VarPermutation> {
        let mut r = Renamer { target, source, map: BTreeMap::new(), used: BTreeSet::new() };
        for (i, &k) in iota.iter().enumerate() {
            r.map.insert(target.decl[k].name.clone(), source.decl[i].name.clone());
            r.used.insert(source.decl[i].name.clone());
        }
        for (i, &k) in iota.iter().enumerate() {
            if !r.ty(&target.decl[k].ty, &source.decl[i].ty) {
                return None;
            }
        }
        VarPermutation::completing(r.map).ok()
    }
}

/// The block rule for an already chosen variant.
fn relate_block(
    rel: &SubordRel,
    variant: &BlockSchema,
    source: &ContextSchema,
    s: usize,
    f: &Formula,
    gamma: &Ident,
) -> Option<(Derivation, Derivation)> {
    let b = &source.blocks[s];
    if !params_aligned(variant, b) {
        return None;
    }
    let prune = prune_derive(rel, source, &b.decl, &variant.decl)?;
    let ce = ce_derive(rel, gamma, &b.decl, &variant.decl, f)?;
    Some((prune, ce))
}

fn undroppable(rel: &SubordRel, block: &BlockSchema, source: &ContextSchema, f: &Formula, gamma: &Ident) -> Vec<String> {
    let mut out = Vec::new();
    for d in &block.decl {
        let mut why = Vec::new();
        if let Some(w) = tf_witness(rel, &d.ty, f, gamma) {
            why.push(format!("formula: {}", w));
        }
        if let Some(b) = source.decl_types().find(|b| rel.contains(d.ty.head(), b.head())) {
            why.push(format!("schema {}: {} <= {}", source.name, d.ty.head(), b.head()));
        }
        if !why.is_empty() {
            out.push(format!("{}:{} ({})", d.name, d.ty, why.join("; ")));
        }
    }
    out
}

/// Does `source` subsume `target` relative to `f` and `gamma`? Returns one
/// record per target block.
pub fn schema_subsumes(
    rel: &SubordRel,
    source: &ContextSchema,
    f: &Formula,
    gamma: &Ident,
    target: &ContextSchema,
    cfg: SearchConfig,
) -> Result<Vec<BlockRecord>, SubsumptionFailure> {
    let mut records = Vec::new();
    for (t, block) in target.blocks.iter().enumerate() {
        let mut search = Search { rel, source, f, gamma, cap: cfg.max_alignments, tried: 0 };
        let mut found = None;
        'sources: for (s, sb) in source.blocks.iter().enumerate() {
            if sb.decl.len() > block.decl.len() {
                continue;
            }
            let mut cands = Vec::new();
            let complete = search.injections(block, sb, &mut cands);
            for iota in &cands {
                let Some(pi) = search.try_alignment(block, sb, iota) else { continue };
                let Ok(variant) = make_variant(&pi, block) else { continue };
                if let Some((prune, ce)) = relate_block(rel, &variant, source, s, f, gamma) {
                    found = Some(BlockRecord { target_block: t, permutation: pi, variant, source_block: s, prune, ce });
                    break 'sources;
                }
            }
            if !complete {
                return Err(SubsumptionFailure::SearchOverflow { block: t, tried: cfg.max_alignments });
            }
        }
        match found {
            Some(r) => records.push(r),
            None => {
                return Err(SubsumptionFailure::NoVariant {
                    block: t,
                    text: block.to_string(),
                    undroppable: undroppable(rel, block, source, f, gamma),
                })
            }
        }
    }
    Ok(records)
}

/// Evidence for the two side conditions of the transport rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportCertificate {
    pub source: Arc<ContextSchema>,
    pub target: Arc<ContextSchema>,
    pub gamma: Ident,
    pub formula: Formula,
    pub blocks: Vec<BlockRecord>,
    pub validity: ValTree,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TransportFailure {
    #[error("ill-formed input: {0}")]
    IllFormedInput(String),
    #[error("schema subsumption fails: {0}")]
    Subsumption(SubsumptionFailure),
    #[error("val+ does not hold for {0}")]
    Validity(String),
}

impl TransportCertificate {
    /// Every subordination fact `a !<= b` used to justify a drop.
    pub fn facts(&self) -> BTreeSet<(Ident, Ident)> {
        self.blocks.iter().flat_map(|r| r.ce.drop_facts().into_iter().chain(r.prune.drop_facts())).collect()
    }

    /// Re-check every recorded derivation without searching.
    pub fn replay(&self, sig: &Signature) -> Result<(), String> {
        let rel = compute_subordination(sig);
        let mut covered = vec![false; self.target.blocks.len()];
        for r in &self.blocks {
            let tb = self.target.blocks.get(r.target_block).ok_or("record for a missing target block")?;
            let sb = self.source.blocks.get(r.source_block).ok_or("record for a missing source block")?;
            covered[r.target_block] = true;
            let v = make_variant(&r.permutation, tb).map_err(|e| e.to_string())?;
            if v != r.variant {
                return Err(format!("target block {}: recorded variant differs", r.target_block + 1));
            }
            if !params_aligned(&v, sb) {
                return Err(format!("target block {}: parameters do not align", r.target_block + 1));
            }
            if !replay_derivation(&r.prune, &sb.decl, &v.decl, |a| prunable(&rel, &self.source, a)) {
                return Err(format!("target block {}: pruning derivation does not replay", r.target_block + 1));
            }
            let ce_ok = |a: &Type| !tf_subord(&rel, a, &self.formula, &self.gamma);
            if !replay_derivation(&r.ce, &sb.decl, &v.decl, ce_ok) {
                return Err(format!("target block {}: subsumption derivation does not replay", r.target_block + 1));
            }
        }
        if let Some(t) = covered.iter().position(|c| !c) {
            return Err(format!("target block {} is not covered", t + 1));
        }
        if self.validity.polarity != Polarity::Pos || self.validity.formula != self.formula {
            return Err("validity derivation concludes a different judgement".into());
        }
        if !self.validity.replay(&self.gamma) {
            return Err("validity derivation does not replay".into());
        }
        Ok(())
    }
}

fn facts_text(facts: &[(Ident, Ident)]) -> String {
    if facts.is_empty() {
        return "vacuously".into();
    }
    let parts: Vec<String> = facts.iter().map(|(a, b)| format!("{} !<= {}", a, b)).collect();
    format!("since {}", parts.join(", "))
}

fn write_derivation(f: &mut fmt::Formatter<'_>, label: &str, d: &Derivation) -> fmt::Result {
    for s in &d.steps {
        match s.step {
            Step::Keep => writeln!(f, "  {} keep {}:{}", label, s.name, s.ty)?,
            Step::Drop => writeln!(f, "  {} drop {}:{} {}", label, s.name, s.ty, facts_text(&s.facts))?,
        }
    }
    Ok(())
}

impl fmt::Display for TransportCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "transport {} from {} to {}", self.gamma, self.source.name, self.target.name)?;
        writeln!(f, "formula {}", self.formula)?;
        for r in &self.blocks {
            writeln!(
                f,
                "block {} {} variant {} by {} from source block {} {}",
                r.target_block + 1,
                self.target.blocks[r.target_block],
                r.variant,
                r.permutation,
                r.source_block + 1,
                self.source.blocks[r.source_block]
            )?;
            write_derivation(f, "prune", &r.prune)?;
            write_derivation(f, "ce", &r.ce)?;
        }
        write!(f, "{}", self.validity)
    }
}

/// Check both side conditions of the transport rule for moving
/// `ctx gamma:source. f` to `ctx gamma:target. f`.
pub fn transport_check(
    sig: &Signature,
    rel: &SubordRel,
    source: &Arc<ContextSchema>,
    target: &Arc<ContextSchema>,
    gamma: &Ident,
    f: &Formula,
    cfg: SearchConfig,
) -> Result<TransportCertificate, TransportFailure> {
    let ill = |e: String| TransportFailure::IllFormedInput(e);
    check_signature(sig).map_err(|e| ill(e.to_string()))?;
    check_schema(sig, source).map_err(|e| ill(format!("schema {}: {}", source.name, e)))?;
    check_schema(sig, target).map_err(|e| ill(format!("schema {}: {}", target.name, e)))?;
    let closed = Formula::CtxPi(gamma.clone(), source.clone(), Box::new(f.clone()));
    check_formula(sig, &closed, &WfEnv::new()).map_err(|e| ill(e.to_string()))?;
    let blocks = schema_subsumes(rel, source, f, gamma, target, cfg).map_err(TransportFailure::Subsumption)?;
    let validity = val_pos(gamma, f).ok_or_else(|| TransportFailure::Validity(f.to_string()))?;
    Ok(TransportCertificate {
        source: source.clone(),
        target: target.clone(),
        gamma: gamma.clone(),
        formula: f.clone(),
        blocks,
        validity,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("context is not an instance of schema {0}")]
    NotInstance(String),
    #[error("segment at position {start} uses target block {block}, which the certificate does not cover")]
    SegmentationMismatch { block: usize, start: usize },
}

/// Build a source-schema instance related to `target_ctx` by applying the
/// recorded drops block by block.
pub fn transport_witness(
    sig: &Signature,
    cert: &TransportCertificate,
    target_ctx: &CtxExpr,
) -> Result<CtxExpr, WitnessError> {
    let not_instance = || WitnessError::NotInstance(cert.target.name.to_string());
    let segs = schema_instance(sig, &cert.target, target_ctx, MatchOptions::default())
        .map_err(|_| not_instance())?
        .ok_or_else(not_instance)?;
    let mut out = CtxExpr::empty();
    for seg in segs {
        let rec = cert
            .blocks
            .iter()
            .find(|r| r.target_block == seg.block)
            .ok_or(WitnessError::SegmentationMismatch { block: seg.block + 1, start: seg.start })?;
        for k in rec.ce.kept_positions() {
            out.bindings.push(target_ctx.bindings[seg.start + k].clone());
        }
    }
    Ok(out)
}
