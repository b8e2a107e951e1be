//! Automorphism groups of bounded-treewidth graphs compiled into explicit
//! context-free grammars, and those grammars compiled into extended
//! formulations of the corresponding permutation polytopes.
//!
//! The pipeline: [`graph`] → [`decomp`] (tree decomposition, made
//! permutation yielding) → [`annotate`] (bags annotated with partial
//! automorphisms) → [`grammar`] (one variable per position and annotated
//! bag) → [`polytope`] (rule-flow extended formulation, exact feasibility).
//! [`oracle`] provides brute-force ground truth for small graphs.

pub mod annotate;
pub mod cli;
pub mod decomp;
pub mod grammar;
pub mod graph;
pub mod oracle;
pub mod perm;
pub mod polytope;
