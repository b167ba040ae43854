//! Controller language: syntax, variables, parsing, printing, substitution.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod real;
pub mod subst;
pub mod vars;

pub use ast::{name, AExp, AOp, BExp, Cmd, Formula, ModeExpr, Name, ROp};
pub use parser::{parse_bexp, parse_controller, parse_formula};
pub use real::Real;
pub use subst::{substitute, Subst};
pub use vars::{VarClass, VarTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LangError {
    #[error("bad declaration: {0}")]
    Declaration(String),
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: undeclared identifier `{name}`")]
    Undeclared {
        line: usize,
        col: usize,
        name: String,
    },
}

impl LangError {
    pub(crate) fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        LangError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }
}
