//! Canonical LF with subordination, context schemas and a checker for
//! transporting context-quantified theorems between schemas.

pub mod formula;
pub mod lf;
pub mod oracle;
pub mod pool;
pub mod schema;
pub mod subordination;
pub mod subsumption;
