//! Equality of term graphs and the algebraic laws they satisfy.

pub mod axioms;
pub mod iso;
pub mod random;
pub mod term;

pub use axioms::{check_axioms, naturality_counterexample, AxiomBounds, AxiomReport, EquationReport, Failure, LawError};
pub use iso::{isomorphic, IsoChecker, IsoError, IsoWitness};
pub use term::{unfold, Term, UnfoldError};
