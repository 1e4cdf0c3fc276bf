use std::collections::HashMap;

use super::syntax::{Ident, Kind, Type};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classifier {
    /// A type constant `a : K`.
    Kind(Kind),
    /// A term constant `c : A`.
    Type(Type),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Declaration {
    pub name: Ident,
    pub classifier: Classifier,
}

/// An ordered list of constant declarations.
///
/// Duplicate names are representable; `check_signature` rejects them.
/// Lookups resolve to the first declaration of a name.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    decls: Vec<Declaration>,
    index: HashMap<Ident, usize>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls
    }
}

impl Eq for Signature {}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn from_decls(decls: impl IntoIterator<Item = Declaration>) -> Self {
        let mut sig = Signature::new();
        for d in decls {
            sig.push(d);
        }
        sig
    }

    pub fn push(&mut self, decl: Declaration) {
        self.index.entry(decl.name.clone()).or_insert(self.decls.len());
        self.decls.push(decl);
    }

    pub fn declare_type(&mut self, name: &str, kind: Kind) {
        self.push(Declaration { name: Ident::new(name), classifier: Classifier::Kind(kind) });
    }

    pub fn declare_term(&mut self, name: &str, ty: Type) {
        self.push(Declaration { name: Ident::new(name), classifier: Classifier::Type(ty) });
    }

    pub fn decls(&self) -> &[Declaration] {
        &self.decls
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    /// Position of the first declaration of `name`.
    pub fn position(&self, name: &Ident) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn get(&self, name: &Ident) -> Option<&Declaration> {
        self.position(name).map(|i| &self.decls[i])
    }

    pub fn kind_of(&self, name: &Ident) -> Option<&Kind> {
        match self.get(name).map(|d| &d.classifier) {
            Some(Classifier::Kind(k)) => Some(k),
            _ => None,
        }
    }

    pub fn type_of(&self, name: &Ident) -> Option<&Type> {
        match self.get(name).map(|d| &d.classifier) {
            Some(Classifier::Type(t)) => Some(t),
            _ => None,
        }
    }

    pub fn is_type_const(&self, name: &Ident) -> bool {
        self.kind_of(name).is_some()
    }

    pub fn is_term_const(&self, name: &Ident) -> bool {
        self.type_of(name).is_some()
    }

    pub fn type_constants(&self) -> impl Iterator<Item = &Ident> {
        self.decls.iter().filter_map(|d| match d.classifier {
            Classifier::Kind(_) => Some(&d.name),
            Classifier::Type(_) => None,
        })
    }

    pub fn term_constants(&self) -> impl Iterator<Item = (&Ident, &Type)> {
        self.decls.iter().filter_map(|d| match &d.classifier {
            Classifier::Type(t) => Some((&d.name, t)),
            Classifier::Kind(_) => None,
        })
    }
}
