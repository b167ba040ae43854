//! Weakest preconditions and strongest postconditions.

use crate::lang::subst::subst_aexp;
use crate::lang::{substitute, AExp, Cmd, Formula, Name, ROp, Subst, VarTable};

use super::decide::{eliminate_exists, simplify};
use super::LogicError;

/// Syntactic weakest precondition, without simplification.
pub fn wp_raw(c: &Cmd, phi: &Formula) -> Formula {
    match c {
        Cmd::Skip => phi.clone(),
        Cmd::Assign(x, a) => substitute(phi, &Subst::Think(x.clone(), a.clone())),
        Cmd::SetMode(xa, m) => substitute(phi, &Subst::Act(xa.clone(), m.clone())),
        Cmd::Seq(c1, c2) => wp_raw(c1, &wp_raw(c2, phi)),
        Cmd::If(b, c1, c2) => {
            let b: Formula = b.into();
            Formula::or(
                Formula::and(b.clone(), wp_raw(c1, phi)),
                Formula::and(Formula::not(b), wp_raw(c2, phi)),
            )
        }
    }
}

pub fn wp(c: &Cmd, phi: &Formula, vars: &VarTable) -> Formula {
    simplify(&wp_raw(c, phi), vars)
}

fn fresh_for(phi: &Formula, vars: &VarTable) -> Name {
    let mut taken = Vec::new();
    phi.all_logical_names(&mut taken);
    loop {
        let v = vars.fresh_logical();
        if !taken.contains(&v) {
            return v;
        }
    }
}

/// Strongest postcondition. The existential introduced by an assignment is
/// eliminated on the spot, so the result is quantifier-free.
pub fn sp(c: &Cmd, phi: &Formula, vars: &VarTable) -> Result<Formula, LogicError> {
    Ok(match c {
        Cmd::Skip => phi.clone(),
        Cmd::Assign(x, a) => {
            let v = fresh_for(phi, vars);
            let old = AExp::Logical(v.clone());
            let body = Formula::and(
                substitute(phi, &Subst::Think(x.clone(), old.clone())),
                Formula::cmp(ROp::Eq, AExp::Think(x.clone()), subst_aexp(a, x, &old)),
            );
            eliminate_exists(&Formula::Exists(v, Box::new(body)), vars)?
        }
        Cmd::SetMode(xa, m) => {
            let before = Formula::disj(
                vars.modes()
                    .iter()
                    .map(|mj| substitute(phi, &Subst::Act(xa.clone(), mj.clone()))),
            );
            simplify(&Formula::and(before, Formula::mode_is(xa, m)), vars)
        }
        Cmd::Seq(c1, c2) => sp(c2, &sp(c1, phi, vars)?, vars)?,
        Cmd::If(b, c1, c2) => {
            let b: Formula = b.into();
            let t = sp(
                c1,
                &simplify(&Formula::and(b.clone(), phi.clone()), vars),
                vars,
            )?;
            let e = sp(
                c2,
                &simplify(&Formula::and(Formula::not(b), phi.clone()), vars),
                vars,
            )?;
            simplify(&Formula::or(t, e), vars)
        }
    })
}

/// Postcondition of the sensor writing `value` into `xs`.
pub fn sp_sense(xs: &Name, value: bool, phi: &Formula, vars: &VarTable) -> Formula {
    let forgot = forget_sense(xs, phi);
    let lit = if value {
        Formula::Sense(xs.clone())
    } else {
        Formula::not(Formula::Sense(xs.clone()))
    };
    simplify(&Formula::and(forgot, lit), vars)
}

fn forget_sense(xs: &Name, phi: &Formula) -> Formula {
    Formula::or(
        substitute(phi, &Subst::Sense(xs.clone(), Formula::True)),
        substitute(phi, &Subst::Sense(xs.clone(), Formula::False)),
    )
}

/// `phi` with every sense variable existentially projected out.
pub fn project_sense(phi: &Formula, vars: &VarTable) -> Formula {
    let out = vars
        .sense()
        .iter()
        .fold(phi.clone(), |acc, xs| forget_sense(xs, &acc));
    simplify(&out, vars)
}
