//! A small knowledge-base engine: an interned TBox/ABox/rule model, a
//! line-oriented document language, EL-style classification, forward-chaining
//! materialization with justification provenance, and conjunctive query
//! evaluation over the materialized facts.
//!
//! The pieces compose into one pipeline: parse documents into a
//! [`model::KnowledgeBase`], classify the class hierarchy with
//! [`reasoner::classify`], saturate the ABox with [`engine::saturate`], then
//! answer queries with [`query::evaluate`] or explain derived facts with
//! [`engine::justify`].

pub mod engine;
pub mod model;
pub mod query;
pub mod reasoner;
pub mod symbol;
pub mod text;

pub use model::{Atom, Axiom, AxiomId, AxiomKind, ClassExpression, Fact, KnowledgeBase, Rule, Term};
pub use symbol::{SymbolId, SymbolKind, SymbolTable};
