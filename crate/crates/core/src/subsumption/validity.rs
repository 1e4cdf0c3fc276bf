//! The judgements `val+` and `val-`: a formula holds (resp. fails) whenever
//! its context variable is instantiated with a context that is pruned too far.

use std::fmt;

use crate::formula::Formula;
use crate::lf::Ident;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValRule {
    /// `val- ff`
    Bot,
    /// `val- {G |- M : A}` when the context variable heads `G`.
    Atom,
    /// `val- F1 => F2` from `val+ F1` and `val- F2`.
    ImpNeg,
    /// `val- F1 \/ F2` from both.
    OrNeg,
    AndNegLeft,
    AndNegRight,
    /// `val+ tt`
    Top,
    OrPosLeft,
    OrPosRight,
    AndPos,
    /// `val+ F1 => F2` from `val- F1`.
    ImpPosAnte,
    /// `val+ F1 => F2` from `val+ F2`.
    ImpPosCons,
    /// Quantifiers and context abstractions over other variables pass
    /// through in either polarity.
    All,
    Ex,
    CtxPi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Pos,
    Neg,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValTree {
    pub polarity: Polarity,
    pub rule: ValRule,
    pub formula: Formula,
    pub children: Vec<ValTree>,
}

pub fn val_pos(gamma: &Ident, f: &Formula) -> Option<ValTree> {
    let node = |rule, children| Some(ValTree { polarity: Polarity::Pos, rule, formula: f.clone(), children });
    match f {
        Formula::Top => node(ValRule::Top, vec![]),
        Formula::Or(a, b) => {
            if let Some(t) = val_pos(gamma, a) {
                node(ValRule::OrPosLeft, vec![t])
            } else {
                node(ValRule::OrPosRight, vec![val_pos(gamma, b)?])
            }
        }
        Formula::And(a, b) => node(ValRule::AndPos, vec![val_pos(gamma, a)?, val_pos(gamma, b)?]),
        Formula::Imp(a, b) => {
            if let Some(t) = val_neg(gamma, a) {
                node(ValRule::ImpPosAnte, vec![t])
            } else {
                node(ValRule::ImpPosCons, vec![val_pos(gamma, b)?])
            }
        }
        Formula::All(_, _, b) => node(ValRule::All, vec![val_pos(gamma, b)?]),
        Formula::Ex(_, _, b) => node(ValRule::Ex, vec![val_pos(gamma, b)?]),
        Formula::CtxPi(g, _, b) if g != gamma => node(ValRule::CtxPi, vec![val_pos(gamma, b)?]),
        _ => None,
    }
}

pub fn val_neg(gamma: &Ident, f: &Formula) -> Option<ValTree> {
    let node = |rule, children| Some(ValTree { polarity: Polarity::Neg, rule, formula: f.clone(), children });
    match f {
        Formula::Bot => node(ValRule::Bot, vec![]),
        Formula::Atm(g, _, _) if g.head.as_ref() == Some(gamma) => node(ValRule::Atom, vec![]),
        Formula::Imp(a, b) => node(ValRule::ImpNeg, vec![val_pos(gamma, a)?, val_neg(gamma, b)?]),
        Formula::Or(a, b) => node(ValRule::OrNeg, vec![val_neg(gamma, a)?, val_neg(gamma, b)?]),
        Formula::And(a, b) => {
            if let Some(t) = val_neg(gamma, a) {
                node(ValRule::AndNegLeft, vec![t])
            } else {
                node(ValRule::AndNegRight, vec![val_neg(gamma, b)?])
            }
        }
        Formula::All(_, _, b) => node(ValRule::All, vec![val_neg(gamma, b)?]),
        Formula::Ex(_, _, b) => node(ValRule::Ex, vec![val_neg(gamma, b)?]),
        Formula::CtxPi(g, _, b) if g != gamma => node(ValRule::CtxPi, vec![val_neg(gamma, b)?]),
        _ => None,
    }
}

impl ValTree {
    /// Check every node against its rule.
    pub fn replay(&self, gamma: &Ident) -> bool {
        use Polarity::*;
        use ValRule::*;
        let kids: Vec<(Polarity, &Formula)> = self.children.iter().map(|c| (c.polarity, &c.formula)).collect();
        let ok = match (self.polarity, self.rule, &self.formula) {
            (Pos, Top, Formula::Top) | (Neg, Bot, Formula::Bot) => kids.is_empty(),
            (Neg, Atom, Formula::Atm(g, _, _)) => kids.is_empty() && g.head.as_ref() == Some(gamma),
            (Neg, ImpNeg, Formula::Imp(a, b)) => kids == [(Pos, &**a), (Neg, &**b)],
            (Neg, OrNeg, Formula::Or(a, b)) => kids == [(Neg, &**a), (Neg, &**b)],
            (Neg, AndNegLeft, Formula::And(a, _)) => kids == [(Neg, &**a)],
            (Neg, AndNegRight, Formula::And(_, b)) => kids == [(Neg, &**b)],
            (Pos, OrPosLeft, Formula::Or(a, _)) => kids == [(Pos, &**a)],
            (Pos, OrPosRight, Formula::Or(_, b)) => kids == [(Pos, &**b)],
            (Pos, AndPos, Formula::And(a, b)) => kids == [(Pos, &**a), (Pos, &**b)],
            (Pos, ImpPosAnte, Formula::Imp(a, _)) => kids == [(Neg, &**a)],
            (Pos, ImpPosCons, Formula::Imp(_, b)) => kids == [(Pos, &**b)],
            (p, All, Formula::All(_, _, b)) | (p, Ex, Formula::Ex(_, _, b)) => kids == [(p, &**b)],
            (p, CtxPi, Formula::CtxPi(g, _, b)) => g != gamma && kids == [(p, &**b)],
            _ => false,
        };
        ok && self.children.iter().all(|c| c.replay(gamma))
    }

    fn write_lines(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let sign = match self.polarity {
            Polarity::Pos => "val+",
            Polarity::Neg => "val-",
        };
        writeln!(f, "{:indent$}{} {:?}: {}", "", sign, self.rule, self.formula, indent = 2 * depth)?;
        for c in &self.children {
            c.write_lines(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for ValTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_lines(f, 0)
    }
}
