//! Grounding and least-fixpoint evaluation of Datalog programs over
//! commutative semirings.
//!
//! A [`program::Program`] and an annotated [`instance::Instance`] are
//! grounded into a polynomial system ([`grounding::Grounding`]) whose least
//! fixpoint gives the annotations of the IDB atoms. The system can be solved
//! directly by Kleene iteration, or after conversion to 2-canonical form by
//! the rank-bounded or the absorptive best-first solver.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod axioms;
pub mod canonical;
pub mod classify;
pub mod decomposition;
pub mod eval;
pub mod grounder;
pub mod grounding;
pub mod instance;
pub mod program;
pub mod semiring;
pub mod solver;
