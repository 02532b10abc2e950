//! MuCLP: constraint logic programs with arbitrarily nested least/greatest
//! fixpoint predicates over linear integer arithmetic and Booleans, plus the
//! machinery to decide their validity by reduction to predicate constraint
//! satisfaction with function variables and well-foundedness constraints
//! (pfwCSP).
//!
//! This crate is the pure, `no_std`-compatible core:
//!
//! * [`ast`] — sorted terms, formulas, equations, programs;
//! * [`parse`] / [`print`] — the concrete MuCLP text format;
//! * [`wellformed`] — sort checking, positivity, query normalization;
//! * [`transform`] — De Morgan duals, NNF, capture-avoiding substitution,
//!   prenex CNF;
//! * [`eval`] — a bounded-domain reference evaluator of the nested fixpoint
//!   semantics (the testing oracle);
//! * [`pfwcsp`] — clauses over predicate/function variables, CHC/co-CHC
//!   classification, solution application, instance grounding;
//! * [`reduce`] — the three-step reduction from MuCLP validity to pfwCSP
//!   satisfiability;
//! * [`templates`] — stratified template families and the parameter lattice
//!   driving candidate synthesis;
//! * [`cycles`] — elementary-circuit enumeration for well-foundedness
//!   counterexamples;
//! * [`encoders`] — front ends turning transition systems, games, and
//!   bisimulation questions into MuCLP programs.
//!
//! Everything here is deterministic and IO-free; process management, SMT
//! solving, and the CLI live in the companion `muval` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod ast;
pub mod cycles;
pub mod encoders;
pub mod eval;
pub mod gen;
pub mod parse;
pub mod pfwcsp;
pub mod print;
pub mod reduce;
pub mod sexp;
pub mod simplify;
pub mod smtlib;
pub mod templates;
pub mod transform;
pub mod wellformed;

pub use ast::{Equation, FixKind, Formula, MuClpProgram, Name, Sort, Term, Value};
pub use pfwcsp::{CandidateSolution, Clause, ExampleInstance, Lambda, LambdaBody, PfwCsp};
