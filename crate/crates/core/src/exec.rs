//! Concrete semantics: expression evaluation, command execution and
//! satisfaction of assertions at a valuation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lang::{AExp, AOp, BExp, Cmd, Formula, ModeExpr, Name, VarTable};

/// Absolute tolerance for `=` in concrete evaluation.
pub const EPS_EQ: f64 = 1e-9;

/// A controller state: think variables to reals, sense variables to
/// booleans, and the current mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Valuation {
    pub think: BTreeMap<Name, f64>,
    pub sense: BTreeMap<Name, bool>,
    pub act: Name,
}

/// Values of logical variables.
pub type LogicalEnv = BTreeMap<Name, f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExecError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error(transparent)]
    Logic(#[from] crate::logic::LogicError),
}

impl Valuation {
    /// Think variables 0, sense variables false, the first declared mode.
    pub fn defaults(vars: &VarTable) -> Self {
        Valuation {
            think: vars.think().iter().map(|x| (x.clone(), 0.0)).collect(),
            sense: vars.sense().iter().map(|x| (x.clone(), false)).collect(),
            act: vars.modes()[0].clone(),
        }
    }

    pub fn with_think(mut self, x: &str, v: f64) -> Self {
        self.think.insert(x.into(), v);
        self
    }

    pub fn with_sense(mut self, x: &str, b: bool) -> Self {
        self.sense.insert(x.into(), b);
        self
    }

    pub fn with_mode(mut self, m: &str) -> Self {
        self.act = m.into();
        self
    }
}

pub fn eval_aexp(a: &AExp, sigma: &Valuation, gamma: &LogicalEnv) -> Result<f64, ExecError> {
    Ok(match a {
        AExp::Num(r) => r.to_f64(),
        AExp::Think(x) => *sigma
            .think
            .get(x)
            .ok_or_else(|| ExecError::Unbound(x.to_string()))?,
        AExp::Logical(v) => *gamma
            .get(v)
            .ok_or_else(|| ExecError::Unbound(v.to_string()))?,
        AExp::Bin(op, l, r) => {
            let (l, r) = (eval_aexp(l, sigma, gamma)?, eval_aexp(r, sigma, gamma)?);
            match op {
                AOp::Add => l + r,
                AOp::Sub => l - r,
                AOp::Mul => l * r,
            }
        }
    })
}

pub fn eval_bexp(b: &BExp, sigma: &Valuation) -> Result<bool, ExecError> {
    let empty = LogicalEnv::new();
    Ok(match b {
        BExp::True => true,
        BExp::False => false,
        BExp::Sense(x) => *sigma
            .sense
            .get(x)
            .ok_or_else(|| ExecError::Unbound(x.to_string()))?,
        BExp::Cmp(op, l, r) => op.compare(
            eval_aexp(l, sigma, &empty)?,
            eval_aexp(r, sigma, &empty)?,
            EPS_EQ,
        ),
        BExp::Not(a) => !eval_bexp(a, sigma)?,
        BExp::Or(a, c) => eval_bexp(a, sigma)? || eval_bexp(c, sigma)?,
        BExp::And(a, c) => eval_bexp(a, sigma)? && eval_bexp(c, sigma)?,
    })
}

pub fn exec_cmd(c: &Cmd, sigma: &Valuation) -> Result<Valuation, ExecError> {
    match c {
        Cmd::Skip => Ok(sigma.clone()),
        Cmd::Assign(x, a) => {
            let v = eval_aexp(a, sigma, &LogicalEnv::new())?;
            let mut out = sigma.clone();
            out.think.insert(x.clone(), v);
            Ok(out)
        }
        Cmd::SetMode(_, m) => {
            let mut out = sigma.clone();
            out.act = m.clone();
            Ok(out)
        }
        Cmd::Seq(a, b) => exec_cmd(b, &exec_cmd(a, sigma)?),
        Cmd::If(g, t, e) => {
            if eval_bexp(g, sigma)? {
                exec_cmd(t, sigma)
            } else {
                exec_cmd(e, sigma)
            }
        }
    }
}

fn mode_value<'a>(e: &'a ModeExpr, sigma: &'a Valuation) -> &'a Name {
    match e {
        ModeExpr::Lit(m) => m,
        ModeExpr::Act(_) => &sigma.act,
    }
}

/// Truth of a quantifier-free formula at `(sigma, gamma)`.
pub fn holds_qf(sigma: &Valuation, gamma: &LogicalEnv, phi: &Formula) -> Result<bool, ExecError> {
    Ok(match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Sense(x) => *sigma
            .sense
            .get(x)
            .ok_or_else(|| ExecError::Unbound(x.to_string()))?,
        Formula::Cmp(op, l, r) => op.compare(
            eval_aexp(l, sigma, gamma)?,
            eval_aexp(r, sigma, gamma)?,
            EPS_EQ,
        ),
        Formula::ModeEq(l, r) => mode_value(l, sigma) == mode_value(r, sigma),
        Formula::Not(a) => !holds_qf(sigma, gamma, a)?,
        Formula::Or(a, b) => holds_qf(sigma, gamma, a)? || holds_qf(sigma, gamma, b)?,
        Formula::And(a, b) => holds_qf(sigma, gamma, a)? && holds_qf(sigma, gamma, b)?,
        Formula::Exists(..) | Formula::Forall(..) => {
            return Err(crate::logic::LogicError::ResidualQuantifier.into());
        }
    })
}

/// Truth of `phi` at `(sigma, gamma)`. Quantifiers are eliminated first.
pub fn holds(
    sigma: &Valuation,
    gamma: &LogicalEnv,
    phi: &Formula,
    vars: &VarTable,
) -> Result<bool, ExecError> {
    if phi.is_quantifier_free() {
        return holds_qf(sigma, gamma, phi);
    }
    let closed = crate::logic::eliminate_quantifiers(phi, vars)?;
    holds_qf(sigma, gamma, &closed)
}

/// `sigma |= phi`: true for every value of the free logical variables.
pub fn satisfied_by(sigma: &Valuation, phi: &Formula, vars: &VarTable) -> Result<bool, ExecError> {
    let mut free = Vec::new();
    phi.collect_free_logical(&mut Vec::new(), &mut free);
    free.sort();
    free.dedup();
    if free.is_empty() {
        return holds(sigma, &LogicalEnv::new(), phi, vars);
    }
    let closed = free
        .into_iter()
        .rev()
        .fold(phi.clone(), |acc, v| Formula::Forall(v, Box::new(acc)));
    holds(sigma, &LogicalEnv::new(), &closed, vars)
}
