//! Concrete syntax printing. Output parses back to the same tree.

use std::fmt;

use super::ast::{AExp, AOp, BExp, Cmd, Formula, ModeExpr};

fn aop_prec(op: AOp) -> u8 {
    match op {
        AOp::Add | AOp::Sub => 1,
        AOp::Mul => 2,
    }
}

fn aexp_prec(a: &AExp) -> u8 {
    match a {
        AExp::Bin(op, ..) => aop_prec(*op),
        _ => 3,
    }
}

impl fmt::Display for AExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AExp::Num(r) => write!(f, "{r}"),
            AExp::Think(x) | AExp::Logical(x) => f.write_str(x),
            AExp::Bin(op, l, r) => {
                let p = aop_prec(*op);
                if aexp_prec(l) < p {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                let sym = match op {
                    AOp::Add => "+",
                    AOp::Sub => "-",
                    AOp::Mul => "*",
                };
                if aexp_prec(r) <= p {
                    write!(f, " {sym} ({r})")
                } else {
                    write!(f, " {sym} {r}")
                }
            }
        }
    }
}

impl fmt::Display for ModeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeExpr::Lit(m) | ModeExpr::Act(m) => f.write_str(m),
        }
    }
}

fn form_prec(phi: &Formula) -> u8 {
    match phi {
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        Formula::Not(..) => 3,
        Formula::Exists(..) | Formula::Forall(..) => 0,
        _ => 4,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, min: u8) -> fmt::Result {
    if form_prec(child) < min {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Sense(x) => f.write_str(x),
            Formula::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol()),
            Formula::ModeEq(l, r) => write!(f, "{l} = {r}"),
            Formula::Not(a) => {
                f.write_str("!")?;
                // `!x < 1` would also parse, but the bracketed form reads better.
                if matches!(**a, Formula::Cmp(..) | Formula::ModeEq(..)) {
                    write!(f, "({a})")
                } else {
                    write_child(f, a, 3)
                }
            }
            Formula::Or(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(" || ")?;
                write_child(f, b, 2)
            }
            Formula::And(a, b) => {
                write_child(f, a, 2)?;
                f.write_str(" && ")?;
                write_child(f, b, 3)
            }
            Formula::Exists(v, body) => write!(f, "(exists {v}. {body})"),
            Formula::Forall(v, body) => write!(f, "(forall {v}. {body})"),
        }
    }
}

impl fmt::Display for BExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Formula::from(self))
    }
}

impl fmt::Display for Cmd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cmd::Skip => f.write_str("skip"),
            Cmd::Assign(x, a) => write!(f, "{x} := {a}"),
            Cmd::SetMode(x, m) => write!(f, "{x} := {m}"),
            Cmd::Seq(a, b) => {
                if matches!(**a, Cmd::Seq(..)) {
                    write!(f, "{{{a}}}; {b}")
                } else {
                    write!(f, "{a}; {b}")
                }
            }
            Cmd::If(g, t, e) => {
                write!(f, "if {g} then ")?;
                write_branch(f, t)?;
                f.write_str(" else ")?;
                write_branch(f, e)
            }
        }
    }
}

fn write_branch(f: &mut fmt::Formatter<'_>, c: &Cmd) -> fmt::Result {
    if matches!(c, Cmd::Seq(..)) {
        write!(f, "{{{c}}}")
    } else {
        write!(f, "{c}")
    }
}
