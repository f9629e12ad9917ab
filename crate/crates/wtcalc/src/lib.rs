//! Diagrams, tensor semantics, rewrite-rule soundness and exact coefficient
//! solving for the well-tempered ZX and ZH calculi.

pub mod diagram;
pub mod semantics;
pub mod rules;
pub mod soundness;
pub mod solver;
pub mod gadgets;
pub mod rewrite;
