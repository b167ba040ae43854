//! Symbolic reasoning over assertions: program-logic transformers and a
//! decision procedure for the linear fragment.

pub mod calculus;
pub mod decide;
pub mod linear;
pub mod normal;

pub use calculus::{project_sense, sp, sp_sense, wp, wp_raw};
pub use decide::{
    eliminate_exists, eliminate_quantifiers, equivalent, find_model, is_satisfiable, is_valid,
    project_think, satisfying_cube, simplify,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("nonlinear atom outside the supported fragment: {0}")]
    NonLinear(String),
    #[error("quantifier left after elimination")]
    ResidualQuantifier,
    #[error("formula is unsatisfiable")]
    Unsatisfiable,
}
