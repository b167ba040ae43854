//! Capture-avoiding substitution on assertions.

use super::ast::{name, AExp, Formula, ModeExpr, Name};
use super::vars::is_logical_identifier;

/// What to replace, and with what.
#[derive(Clone, Debug)]
pub enum Subst {
    /// `phi[a/x]` for a think variable `x`.
    Think(Name, AExp),
    /// `phi[psi/xs]` for a sense variable. In practice `psi` is `true` or `false`.
    Sense(Name, Formula),
    /// `phi[m/xa]` for the act variable.
    Act(Name, Name),
}

impl Subst {
    fn free_logical(&self) -> Vec<Name> {
        let mut out = Vec::new();
        match self {
            Subst::Think(_, a) => a.collect_logical(&mut out),
            Subst::Sense(_, psi) => psi.collect_free_logical(&mut Vec::new(), &mut out),
            Subst::Act(..) => {}
        }
        out
    }
}

pub fn subst_aexp(a: &AExp, x: &str, by: &AExp) -> AExp {
    match a {
        AExp::Think(y) if &**y == x => by.clone(),
        AExp::Bin(op, l, r) => AExp::bin(*op, subst_aexp(l, x, by), subst_aexp(r, x, by)),
        _ => a.clone(),
    }
}

fn rename_logical(a: &AExp, from: &str, to: &Name) -> AExp {
    match a {
        AExp::Logical(v) if &**v == from => AExp::Logical(to.clone()),
        AExp::Bin(op, l, r) => AExp::bin(
            *op,
            rename_logical(l, from, to),
            rename_logical(r, from, to),
        ),
        _ => a.clone(),
    }
}

/// Replaces free occurrences of logical variable `from` by `to`.
pub fn rename_bound(phi: &Formula, from: &str, to: &Name) -> Formula {
    match phi {
        Formula::Cmp(op, l, r) => Formula::Cmp(
            *op,
            rename_logical(l, from, to),
            rename_logical(r, from, to),
        ),
        Formula::Not(a) => Formula::not(rename_bound(a, from, to)),
        Formula::And(a, b) => Formula::and(rename_bound(a, from, to), rename_bound(b, from, to)),
        Formula::Or(a, b) => Formula::or(rename_bound(a, from, to), rename_bound(b, from, to)),
        Formula::Exists(v, _) | Formula::Forall(v, _) if &**v == from => phi.clone(),
        Formula::Exists(v, a) => Formula::Exists(v.clone(), Box::new(rename_bound(a, from, to))),
        Formula::Forall(v, a) => Formula::Forall(v.clone(), Box::new(rename_bound(a, from, to))),
        _ => phi.clone(),
    }
}

/// A logical variable name not in `taken`.
pub fn fresh_avoiding(taken: &[Name]) -> Name {
    let next = taken
        .iter()
        .filter(|n| is_logical_identifier(n))
        .filter_map(|n| n[2..].parse::<u64>().ok())
        .max()
        .map_or(0, |m| m + 1);
    name(&format!("_v{next}"))
}

/// `phi[s]`. Bound logical variables that would capture a free variable of
/// the replacement are renamed first. Purely syntactic: `xa = Acl` with
/// `Brk` for `xa` gives `Brk = Acl`, which `simplify` later folds.
pub fn substitute(phi: &Formula, s: &Subst) -> Formula {
    let free = s.free_logical();
    go(phi, s, &free)
}

fn go(phi: &Formula, s: &Subst, free: &[Name]) -> Formula {
    match phi {
        Formula::True | Formula::False => phi.clone(),
        Formula::Sense(x) => match s {
            Subst::Sense(y, psi) if x == y => psi.clone(),
            _ => phi.clone(),
        },
        Formula::Cmp(op, l, r) => match s {
            Subst::Think(x, a) => Formula::Cmp(*op, subst_aexp(l, x, a), subst_aexp(r, x, a)),
            _ => phi.clone(),
        },
        Formula::ModeEq(l, r) => match s {
            Subst::Act(xa, m) => {
                let sub = |e: &ModeExpr| match e {
                    ModeExpr::Act(a) if a == xa => ModeExpr::Lit(m.clone()),
                    other => other.clone(),
                };
                Formula::ModeEq(sub(l), sub(r))
            }
            _ => phi.clone(),
        },
        Formula::Not(a) => Formula::not(go(a, s, free)),
        Formula::And(a, b) => Formula::and(go(a, s, free), go(b, s, free)),
        Formula::Or(a, b) => Formula::or(go(a, s, free), go(b, s, free)),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let (v, body) = if free.contains(v) {
                let mut taken = free.to_vec();
                phi.all_logical_names(&mut taken);
                let w = fresh_avoiding(&taken);
                let renamed = rename_bound(body, v, &w);
                (w, renamed)
            } else {
                (v.clone(), (**body).clone())
            };
            let body = Box::new(go(&body, s, free));
            if matches!(phi, Formula::Exists(..)) {
                Formula::Exists(v, body)
            } else {
                Formula::Forall(v, body)
            }
        }
    }
}
