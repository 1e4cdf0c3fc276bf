//! Bounded semantic oracles. Quantifiers range over finite pools of
//! terms and schema instances, so a universal statement can be refuted but
//! never confirmed; such verdicts come back as `Unknown`.

mod harness;
mod minimization;

use std::fmt;

use crate::formula::Formula;
use crate::lf::{check_context, check_term, check_type, ArityType, Nominal, Signature, Substitution};
use crate::pool::TermPool;
use crate::schema::{enumerate_instances, CtxExpr, MatchOptions};

pub use harness::{
    ill_formed_contexts, sample_permutations, verify_atoms, verify_ill_formed, verify_transport, verify_variants, AtomBounds,
};
pub use minimization::{enumerate_contexts, type_pool, verify_minimization, MinBounds};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Largest term (counted in head occurrences) a quantifier ranges over.
    pub term_size_max: usize,
    /// Most block instantiations in a context instance.
    pub blocks_max: usize,
    /// Fresh base-arity nominals added to each term pool, beyond those the
    /// formula already mentions.
    pub fresh_nominals: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { term_size_max: 2, blocks_max: 2, fresh_nominals: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Valid,
    Invalid,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Valid => "Valid",
            Verdict::Invalid => "Invalid",
            Verdict::Unknown => "Unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict3 {
    pub verdict: Verdict,
    /// Choices and atom outcomes that justify the verdict, outermost first.
    pub trace: Vec<String>,
}

impl Verdict3 {
    fn leaf(verdict: Verdict, line: String) -> Self {
        Verdict3 { verdict, trace: vec![line] }
    }

    fn with(verdict: Verdict, line: String, mut inner: Verdict3) -> Self {
        inner.trace.insert(0, line);
        inner.verdict = verdict;
        inner
    }

    fn bare(verdict: Verdict) -> Self {
        Verdict3 { verdict, trace: Vec::new() }
    }
}

/// The validity of a closed atom: the context and type are well-formed and
/// the term checks against the type.
pub fn atom_holds(sig: &Signature, g: &CtxExpr, m: &crate::lf::Term, a: &crate::lf::Type) -> Result<(), String> {
    if let Some(h) = &g.head {
        return Err(format!("context variable {} is not instantiated", h));
    }
    let ctx = g.to_lf();
    check_context(sig, &ctx).map_err(|e| format!("context: {}", e))?;
    check_type(sig, &ctx, a).map_err(|e| format!("type: {}", e))?;
    check_term(sig, &ctx, m, a).map_err(|e| format!("term: {}", e))
}

struct Evaluator<'a> {
    sig: &'a Signature,
    b: Bounds,
}

impl Evaluator<'_> {
    fn pool(&self, f: &Formula) -> TermPool {
        let mut noms: Vec<Nominal> = f.nominals().into_iter().collect();
        let next = noms.iter().map(|n| n.index + 1).max().unwrap_or(1);
        noms.extend((next..).take(self.b.fresh_nominals).map(Nominal::base));
        TermPool::with_nominals(self.sig, noms)
    }

    fn instances(&self, x: &str, alpha: &ArityType, body: &Formula) -> Vec<(String, Formula)> {
        let pool = self.pool(body);
        pool.up_to(alpha, self.b.term_size_max)
            .into_iter()
            .filter_map(|m| {
                let s = Substitution::single(x, m.clone(), alpha.clone());
                body.subst_terms(&s).ok().map(|f| (format!("{} := {}", x, m), f))
            })
            .collect()
    }

    fn eval(&self, f: &Formula) -> Verdict3 {
        use Verdict::*;
        match f {
            Formula::Top => Verdict3::leaf(Valid, "tt".into()),
            Formula::Bot => Verdict3::leaf(Invalid, "ff".into()),
            Formula::Atm(g, m, a) => match atom_holds(self.sig, g, m, a) {
                Ok(()) => Verdict3::leaf(Valid, format!("{} holds", f)),
                Err(e) => Verdict3::leaf(Invalid, format!("{} fails: {}", f, e)),
            },
            Formula::Imp(a, b) => {
                let va = self.eval(a);
                if va.verdict == Invalid {
                    return Verdict3::with(Valid, "antecedent fails".into(), va);
                }
                let vb = self.eval(b);
                match (va.verdict, vb.verdict) {
                    (_, Valid) => Verdict3::with(Valid, "consequent holds".into(), vb),
                    (Valid, Invalid) => Verdict3::with(Invalid, "antecedent holds, consequent fails".into(), vb),
                    _ => Verdict3::bare(Unknown),
                }
            }
            Formula::And(a, b) => {
                let va = self.eval(a);
                if va.verdict == Invalid {
                    return Verdict3::with(Invalid, "left conjunct fails".into(), va);
                }
                let vb = self.eval(b);
                match (va.verdict, vb.verdict) {
                    (_, Invalid) => Verdict3::with(Invalid, "right conjunct fails".into(), vb),
                    (Valid, Valid) => Verdict3::bare(Valid),
                    _ => Verdict3::bare(Unknown),
                }
            }
            Formula::Or(a, b) => {
                let va = self.eval(a);
                if va.verdict == Valid {
                    return Verdict3::with(Valid, "left disjunct holds".into(), va);
                }
                let vb = self.eval(b);
                match (va.verdict, vb.verdict) {
                    (_, Valid) => Verdict3::with(Valid, "right disjunct holds".into(), vb),
                    (Invalid, Invalid) => Verdict3::bare(Invalid),
                    _ => Verdict3::bare(Unknown),
                }
            }
            Formula::All(x, alpha, body) => {
                for (line, inst) in self.instances(x.as_str(), alpha, body) {
                    let v = self.eval(&inst);
                    if v.verdict == Invalid {
                        return Verdict3::with(Invalid, line, v);
                    }
                }
                Verdict3::leaf(Unknown, format!("no counterexample for {} within bounds", x))
            }
            Formula::Ex(x, alpha, body) => {
                for (line, inst) in self.instances(x.as_str(), alpha, body) {
                    let v = self.eval(&inst);
                    if v.verdict == Valid {
                        return Verdict3::with(Valid, line, v);
                    }
                }
                Verdict3::leaf(Unknown, format!("no witness for {} within bounds", x))
            }
            Formula::CtxPi(g, c, body) => {
                let Ok(insts) = enumerate_instances(self.sig, c, self.b.blocks_max, self.b.term_size_max, MatchOptions::default())
                else {
                    return Verdict3::leaf(Unknown, format!("instances of {} cannot be enumerated", c.name));
                };
                for inst in insts {
                    let mut sigma = crate::formula::CtxVarSubst::new();
                    sigma.insert(g.clone(), inst.clone());
                    let v = self.eval(&body.subst_ctx(&sigma));
                    if v.verdict == Invalid {
                        return Verdict3::with(Invalid, format!("{} := {}", g, inst), v);
                    }
                }
                Verdict3::leaf(Unknown, format!("no counterexample for {} within bounds", g))
            }
        }
    }
}

/// Bounded approximation of validity for a closed, well-formed formula.
/// `Valid` and `Invalid` are exact; `Unknown` means the bounds ran out.
pub fn bounded_validity(sig: &Signature, f: &Formula, b: Bounds) -> Verdict3 {
    Evaluator { sig, b }.eval(f)
}

/// One checked property with the number of cases examined and any failures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Obligation {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Obligation {
    pub fn new(name: &str) -> Self {
        Obligation { name: name.to_string(), ..Obligation::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, failure: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(failure());
        }
    }

    fn merge(&mut self, other: Obligation) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub obligations: Vec<Obligation>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.obligations.iter().all(Obligation::passed)
    }

    pub fn failures(&self) -> usize {
        self.obligations.iter().map(|o| o.failures.len()).sum()
    }

    pub fn extend(&mut self, other: Report) {
        self.obligations.extend(other.obligations);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.obligations {
            if o.passed() {
                writeln!(f, "PASS {} ({} cases)", o.name, o.checked)?;
            } else {
                writeln!(f, "FAIL {} ({} of {} cases)", o.name, o.failures.len(), o.checked)?;
                for x in o.failures.iter().take(5) {
                    writeln!(f, "  {}", x)?;
                }
            }
        }
        let failed = self.obligations.iter().filter(|o| !o.passed()).count();
        write!(f, "{} passed, {} failed", self.obligations.len() - failed, failed)
    }
}
