//! Interned symbols: every named entity (class, property, individual, rule
//! variable) is folded into a dense integer handle by a [`SymbolTable`].
//!
//! Interning is bijective on (lexical, kind): the same name with the same
//! kind always yields the same id, and distinct pairs yield distinct ids.
//! Classes and individuals may share a lexical name (punning); any other
//! kind overlap is a conflict.

use std::collections::HashMap;
use std::fmt;

use crate::model::ModelError;

/// What a name denotes. Fixed at first interning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Class,
    Property,
    Individual,
    Variable,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SymbolKind::Class => "class",
            SymbolKind::Property => "property",
            SymbolKind::Individual => "individual",
            SymbolKind::Variable => "variable",
        };
        f.write_str(s)
    }
}

/// Dense handle into a [`SymbolTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
struct SymbolInfo {
    lexical: String,
    kind: SymbolKind,
    declared: bool,
}

/// Intern table. Ids are assigned densely in first-seen order, which makes
/// every downstream iteration deterministic.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    infos: Vec<SymbolInfo>,
    index: HashMap<(String, SymbolKind), SymbolId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of interned symbols.
    pub fn len(&self) -> usize {
        self.infos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.infos.is_empty()
    }

    fn validate_name(name: &str) -> Result<(), ModelError> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(ModelError::InvalidName { name: name.to_string() });
        }
        Ok(())
    }

    fn insert(&mut self, name: &str, kind: SymbolKind, declared: bool) -> SymbolId {
        let id = SymbolId(self.infos.len() as u32);
        self.infos.push(SymbolInfo { lexical: name.to_string(), kind, declared });
        self.index.insert((name.to_string(), kind), id);
        id
    }

    fn other_kind_of(&self, name: &str, kind: SymbolKind) -> Option<SymbolKind> {
        [SymbolKind::Class, SymbolKind::Property, SymbolKind::Individual, SymbolKind::Variable]
            .into_iter()
            .filter(|k| *k != kind)
            .find(|k| self.index.contains_key(&(name.to_string(), *k)))
    }

    /// Intern a name, declaring it. The name must be fresh or already bound
    /// to the same kind; any other existing binding is a [`ModelError::KindConflict`].
    /// Variables are exempt from the conflict check: `?x` is syntactically
    /// distinct from an individual `x` and the two may coexist.
    pub fn intern(&mut self, name: &str, kind: SymbolKind) -> Result<SymbolId, ModelError> {
        Self::validate_name(name)?;
        if let Some(&id) = self.index.get(&(name.to_string(), kind)) {
            self.infos[id.index()].declared = true;
            return Ok(id);
        }
        if kind != SymbolKind::Variable {
            if let Some(existing) = self.other_kind_of(name, kind) {
                if existing != SymbolKind::Variable {
                    return Err(ModelError::KindConflict {
                        name: name.to_string(),
                        existing,
                        requested: kind,
                    });
                }
            }
        }
        Ok(self.insert(name, kind, true))
    }

    /// Intern a declaration that may pun: a class and an individual may share
    /// a lexical name and get distinct ids. Every other overlap still conflicts.
    pub fn intern_punned(&mut self, name: &str, kind: SymbolKind) -> Result<SymbolId, ModelError> {
        Self::validate_name(name)?;
        if let Some(&id) = self.index.get(&(name.to_string(), kind)) {
            self.infos[id.index()].declared = true;
            return Ok(id);
        }
        if let Some(existing) = self.other_kind_of(name, kind) {
            let puns = matches!(
                (existing, kind),
                (SymbolKind::Class, SymbolKind::Individual)
                    | (SymbolKind::Individual, SymbolKind::Class)
            ) || existing == SymbolKind::Variable
                || kind == SymbolKind::Variable;
            if !puns {
                return Err(ModelError::KindConflict {
                    name: name.to_string(),
                    existing,
                    requested: kind,
                });
            }
        }
        Ok(self.insert(name, kind, true))
    }

    /// Intern a reference without declaring it. Used by the parsers: a name
    /// mentioned in an axiom or fact does not count as a declaration, and the
    /// knowledge-base builder rejects undeclared references later.
    pub fn reference(&mut self, name: &str, kind: SymbolKind) -> Result<SymbolId, ModelError> {
        Self::validate_name(name)?;
        if let Some(&id) = self.index.get(&(name.to_string(), kind)) {
            return Ok(id);
        }
        if let Some(existing) = self.other_kind_of(name, kind) {
            let puns = matches!(
                (existing, kind),
                (SymbolKind::Class, SymbolKind::Individual)
                    | (SymbolKind::Individual, SymbolKind::Class)
            ) || existing == SymbolKind::Variable
                || kind == SymbolKind::Variable;
            if !puns {
                return Err(ModelError::KindConflict {
                    name: name.to_string(),
                    existing,
                    requested: kind,
                });
            }
        }
        Ok(self.insert(name, kind, false))
    }

    /// Intern a synthetic symbol (fresh normalization names, ⊤, ⊥). The
    /// lexical forms used for these cannot be written in the document
    /// grammar, so they never collide with user names.
    pub(crate) fn intern_internal(&mut self, name: &str, kind: SymbolKind) -> SymbolId {
        if let Some(&id) = self.index.get(&(name.to_string(), kind)) {
            return id;
        }
        self.insert(name, kind, true)
    }

    pub fn lookup(&self, name: &str, kind: SymbolKind) -> Option<SymbolId> {
        self.index.get(&(name.to_string(), kind)).copied()
    }

    pub fn lexical(&self, id: SymbolId) -> &str {
        &self.infos[id.index()].lexical
    }

    pub fn kind(&self, id: SymbolId) -> SymbolKind {
        self.infos[id.index()].kind
    }

    pub fn is_declared(&self, id: SymbolId) -> bool {
        self.infos.get(id.index()).is_some_and(|i| i.declared)
    }

    /// All declared ids of one kind, ascending.
    pub fn declared_of_kind(&self, kind: SymbolKind) -> Vec<SymbolId> {
        self.infos
            .iter()
            .enumerate()
            .filter(|(_, i)| i.declared && i.kind == kind)
            .map(|(n, _)| SymbolId(n as u32))
            .collect()
    }

    /// All ids, ascending.
    pub fn ids(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.infos.len() as u32).map(SymbolId)
    }
}
