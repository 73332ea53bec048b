//! Core of theoryforge: surface syntax, the internal equational-theory form,
//! derived-construction generators, a term engine, theory combinators and a
//! simple well-formedness checker.

pub mod checker;
pub mod combinators;
pub mod engine;
pub mod eqtheory;
pub mod generators;
pub mod syntax;
