//! Bounded verification of annotated imperative programs over a
//! finite-domain constraint store.

pub mod solver;
pub mod lang;
pub mod harness;
pub mod translate;
pub mod engine;
