//! Canonical LF: syntax, hereditary substitution and the formation judgements.

pub mod arity;
pub mod check;
mod print;
pub mod signature;
pub mod subst;
pub mod syntax;

pub use arity::{arity_check_term, arity_check_type, ArityContext};
pub use check::{check_context, check_kind, check_signature, check_term, check_type, synth_term, LfError, LfResult};
pub use signature::{Classifier, Declaration, Signature};
pub use subst::{erase, erase_kind, instantiate_term, instantiate_type, SubstEntry, SubstError, Substitution};
pub use syntax::{
    lowest_unused, ArityType, Binding, CtxName, FreeNames, Head, Hint, Ident, Kind, LfContext, Nominal, Term, Type,
};

