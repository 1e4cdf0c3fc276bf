//! Variable permutations and block variants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lf::{ArityType, Binding, Head, Ident, SubstError, Substitution, Term};
use crate::schema::BlockSchema;

/// A finite-support bijection on variable names. Only non-identity pairs
/// are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VarPermutation {
    map: BTreeMap<Ident, Ident>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("not a permutation: {0}")]
pub struct NotPermutation(pub String);

impl VarPermutation {
    pub fn identity() -> Self {
        VarPermutation::default()
    }

    /// A permutation given by all of its non-identity pairs. The sources
    /// and targets must be the same set.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Ident, Ident)>) -> Result<Self, NotPermutation> {
        let mut map = BTreeMap::new();
        for (a, b) in pairs {
            if a == b {
                continue;
            }
            if map.insert(a.clone(), b).is_some() {
                return Err(NotPermutation(format!("`{}` is mapped twice", a)));
            }
        }
        let dom: BTreeSet<&Ident> = map.keys().collect();
        let img: BTreeSet<&Ident> = map.values().collect();
        if dom != img {
            return Err(NotPermutation("sources and targets differ".into()));
        }
        Ok(VarPermutation { map })
    }

    /// Extend an injective partial map to a permutation. Targets that are
    /// not themselves sources are sent back to the unused sources, pairing
    /// both sides in sorted order.
    pub fn completing(pairs: impl IntoIterator<Item = (Ident, Ident)>) -> Result<Self, NotPermutation> {
        let mut map = BTreeMap::new();
        for (a, b) in pairs {
            if let Some(old) = map.insert(a.clone(), b.clone()) {
                if old != b {
                    return Err(NotPermutation(format!("`{}` is mapped twice", a)));
                }
            }
        }
        let img: BTreeSet<Ident> = map.values().cloned().collect();
        if img.len() != map.len() {
            return Err(NotPermutation("two variables share a target".into()));
        }
        let dom: BTreeSet<Ident> = map.keys().cloned().collect();
        let free_sources: Vec<Ident> = dom.difference(&img).cloned().collect();
        let open_targets: Vec<Ident> = img.difference(&dom).cloned().collect();
        for (t, s) in open_targets.into_iter().zip(free_sources) {
            map.insert(t, s);
        }
        VarPermutation::from_pairs(map)
    }

    pub fn apply(&self, x: &Ident) -> Ident {
        self.map.get(x).cloned().unwrap_or_else(|| x.clone())
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Ident, &Ident)> {
        self.map.iter()
    }

    pub fn inverse(&self) -> VarPermutation {
        VarPermutation { map: self.map.iter().map(|(a, b)| (b.clone(), a.clone())).collect() }
    }
}

impl fmt::Display for VarPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.map.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.map.iter().map(|(a, b)| format!("{}->{}", a, b)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `[x1]...[xk] z x1 ... xk` for a variable `z` of arity `alpha`.
fn eta_var(z: &Ident, alpha: &ArityType) -> Term {
    Term::eta_expand(Head::Var(z.clone()), Vec::new(), alpha)
}

/// The substitution replacing each `x` in the support of `pi` by `pi.x`,
/// annotated with the arity `x` has in `blkctx` (base arity otherwise).
pub fn permutation_substitution(pi: &VarPermutation, blkctx: &[(Ident, ArityType)]) -> Substitution {
    let mut s = Substitution::new();
    for (x, z) in pi.pairs() {
        let alpha = blkctx.iter().find(|(y, _)| y == x).map(|(_, a)| a.clone()).unwrap_or(ArityType::Base);
        s.insert(x.clone(), eta_var(z, &alpha), alpha);
    }
    s
}

/// The variant `pi.B`: parameters and declaration variables renamed, and
/// declaration types rewritten by the permutation substitution.
pub fn make_variant(pi: &VarPermutation, block: &BlockSchema) -> Result<BlockSchema, SubstError> {
    let s = permutation_substitution(pi, &block.blkctx());
    let params = block.params.iter().map(|(x, a)| (pi.apply(x), a.clone())).collect();
    let decl = block
        .decl
        .iter()
        .map(|d| Ok(Binding::new(pi.apply(&d.name), s.apply_type(&d.ty)?)))
        .collect::<Result<_, SubstError>>()?;
    Ok(BlockSchema::new(params, decl))
}
