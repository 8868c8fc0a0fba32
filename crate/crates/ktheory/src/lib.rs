//! Finitely generated abelian groups, exact sequences and a case-analysis
//! solver for six-term sequences of K-groups.
//!
//! All integer work goes through [`matrix::smith`]. Groups are kept in
//! invariant-factor form so equality is isomorphism.

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod builtins;
pub mod extension;
pub mod format;
pub mod group;
pub mod hom;
pub mod matrix;
pub mod oracle;
pub mod sixterm;

pub use builtins::{builtin_ktheory_scenario, BUILTIN_NAMES};
pub use extension::{solve_extension, DEFAULT_BOUND};
pub use group::{group_from_presentation, FgAbelianGroup};
pub use hom::{check_exact, ExactnessReport, GroupHom};
pub use matrix::{smith_normal_form, IntMatrix};
pub use sixterm::{
    six_term_solve, solve_system, Arrow, Assignment, Constraint, Node, SequenceSystem,
    SixTermSequence, SystemSolution,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KtheoryError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("ill-defined homomorphism: {0}")]
    IllDefinedHom(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("bound {bound} is below the largest invariant factor {needed}")]
    BoundTooSmall { bound: u64, needed: String },
    #[error("no consistent assignment: {0}")]
    Inconsistent(String),
    #[error("underdetermined: {0}")]
    Underdetermined(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("parse error: {0}")]
    Parse(String),
}
