//! Quantifier elimination, satisfiability, models, simplification.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use super::linear::{bounds_of, eliminate, find_point, is_feasible, LinAtom, LinExpr, Rel};
use super::normal::{complement, dnf_formula, linear_part, to_dnf, Cube, LVar, Lit};
use super::LogicError;
use crate::exec::Valuation;
use crate::lang::{Formula, Name, VarTable};

/// Equivalent quantifier-free formula. `forall v. phi` is handled as
/// `!(exists v. !phi)`.
pub fn eliminate_quantifiers(phi: &Formula, vars: &VarTable) -> Result<Formula, LogicError> {
    if phi.is_quantifier_free() {
        return Ok(phi.clone());
    }
    Ok(match phi {
        Formula::Not(a) => Formula::not(eliminate_quantifiers(a, vars)?),
        Formula::And(a, b) => Formula::and(
            eliminate_quantifiers(a, vars)?,
            eliminate_quantifiers(b, vars)?,
        ),
        Formula::Or(a, b) => Formula::or(
            eliminate_quantifiers(a, vars)?,
            eliminate_quantifiers(b, vars)?,
        ),
        Formula::Exists(v, body) => {
            let body = eliminate_quantifiers(body, vars)?;
            eliminate_exists_qf(v, &body, vars)?
        }
        Formula::Forall(v, body) => {
            let body = eliminate_quantifiers(body, vars)?;
            let inner = eliminate_exists_qf(v, &Formula::not(body), vars)?;
            simplify(&Formula::not(inner), vars)
        }
        _ => phi.clone(),
    })
}

/// Eliminates `exists` binders. Kept as a separate entry point for callers
/// that only ever build existentials.
pub fn eliminate_exists(phi: &Formula, vars: &VarTable) -> Result<Formula, LogicError> {
    eliminate_quantifiers(phi, vars)
}

fn eliminate_exists_qf(v: &Name, body: &Formula, vars: &VarTable) -> Result<Formula, LogicError> {
    let lv = LVar::Logical(v.clone());
    let mut cubes = Vec::new();
    for cube in to_dnf(body)? {
        let mut atoms = BTreeSet::new();
        let mut rest = Cube::new();
        for l in cube {
            match l {
                Lit::Lin(a) if a.mentions(&lv) => {
                    atoms.insert(a);
                }
                Lit::Opaque(op, ref a, ref b, _)
                    if a.mentions_logical(v) || b.mentions_logical(v) =>
                {
                    return Err(LogicError::NonLinear(
                        Formula::Cmp(op, a.clone(), b.clone()).to_string(),
                    ));
                }
                other => {
                    rest.insert(other);
                }
            }
        }
        if let Some(projected) = eliminate(&atoms, &lv) {
            rest.extend(projected.into_iter().map(Lit::Lin));
            cubes.push(rest);
        }
    }
    Ok(simplify(&dnf_formula(&cubes), vars))
}

fn allowed_modes<'a>(cube: &Cube, vars: &'a VarTable) -> Vec<&'a Name> {
    vars.modes()
        .iter()
        .filter(|m| {
            cube.iter().all(|l| match l {
                Lit::Mode(_, n, true) => n == *m,
                Lit::Mode(_, n, false) => n != *m,
                _ => true,
            })
        })
        .collect()
}

fn sense_clash(cube: &Cube) -> bool {
    cube.iter()
        .any(|l| matches!(l, Lit::Sense(x, b) if cube.contains(&Lit::Sense(x.clone(), !b))))
}

/// `Ok(true)` if satisfiable, `Ok(false)` if not, an error when an opaque
/// literal leaves the question open.
fn cube_sat(cube: &Cube, vars: &VarTable) -> Result<bool, LogicError> {
    if sense_clash(cube) || allowed_modes(cube, vars).is_empty() {
        return Ok(false);
    }
    let (atoms, opaque) = linear_part(cube);
    if !is_feasible(&atoms) {
        return Ok(false);
    }
    if opaque {
        let culprit = cube.iter().find(|l| matches!(l, Lit::Opaque(..))).unwrap();
        return Err(LogicError::NonLinear(
            super::normal::lit_formula(culprit).to_string(),
        ));
    }
    Ok(true)
}

fn prepare(phi: &Formula, vars: &VarTable) -> Result<Formula, LogicError> {
    if phi.is_quantifier_free() {
        Ok(phi.clone())
    } else {
        eliminate_quantifiers(phi, vars)
    }
}

/// The first satisfiable disjunct of the DNF, in DNF order.
pub fn satisfying_cube(phi: &Formula, vars: &VarTable) -> Result<Option<Cube>, LogicError> {
    let phi = prepare(phi, vars)?;
    let mut pending = None;
    for cube in to_dnf(&phi)? {
        match cube_sat(&cube, vars) {
            Ok(true) => return Ok(Some(cube)),
            Ok(false) => {}
            Err(e) => pending = pending.or(Some(e)),
        }
    }
    match pending {
        Some(e) => Err(e),
        None => Ok(None),
    }
}

pub fn is_satisfiable(phi: &Formula, vars: &VarTable) -> Result<bool, LogicError> {
    Ok(satisfying_cube(phi, vars)?.is_some())
}

pub fn equivalent(phi: &Formula, psi: &Formula, vars: &VarTable) -> Result<bool, LogicError> {
    let xor = Formula::or(
        Formula::and(phi.clone(), Formula::not(psi.clone())),
        Formula::and(Formula::not(phi.clone()), psi.clone()),
    );
    Ok(!is_satisfiable(&xor, vars)?)
}

/// `phi` is valid iff its negation is unsatisfiable.
pub fn is_valid(phi: &Formula, vars: &VarTable) -> Result<bool, LogicError> {
    Ok(!is_satisfiable(&Formula::not(phi.clone()), vars)?)
}

/// A valuation satisfying `phi`. Unconstrained sense variables are false,
/// an unconstrained mode is the first allowed one in declaration order, and
/// each think variable is the midpoint of its feasible range (0 if free,
/// one past the bound if half-bounded).
pub fn find_model(phi: &Formula, vars: &VarTable) -> Result<Valuation, LogicError> {
    let cube = satisfying_cube(phi, vars)?.ok_or(LogicError::Unsatisfiable)?;
    let mut sigma = Valuation::defaults(vars);
    for l in &cube {
        if let Lit::Sense(x, b) = l {
            sigma.sense.insert(x.clone(), *b);
        }
    }
    sigma.act = allowed_modes(&cube, vars)[0].clone();
    let (atoms, _) = linear_part(&cube);
    let order: Vec<LVar> = vars
        .think()
        .iter()
        .map(|x| LVar::Think(x.clone()))
        .collect();
    let point = find_point(&atoms, &order).ok_or(LogicError::Unsatisfiable)?;
    for (v, val) in point {
        if let LVar::Think(x) = v {
            sigma.think.insert(x, val.to_f64().unwrap_or(f64::NAN));
        }
    }
    Ok(sigma)
}

/// Keeps the tightest single-variable bounds; an exact point becomes an
/// equality.
fn tighten(atoms: BTreeSet<LinAtom<LVar>>) -> BTreeSet<LinAtom<LVar>> {
    let singles: BTreeSet<LVar> = atoms
        .iter()
        .filter(|a| a.expr.coeffs.len() == 1)
        .flat_map(|a| a.vars().cloned())
        .collect();
    let mut out: BTreeSet<LinAtom<LVar>> = atoms
        .iter()
        .filter(|a| a.expr.coeffs.len() != 1)
        .cloned()
        .collect();
    for v in singles {
        let b = bounds_of(&atoms, &v);
        let x = LinExpr::var(v.clone());
        if let Some(p) = b.point() {
            let a = LinAtom::new(x.sub(&LinExpr::constant(p.clone())), Rel::Eq);
            out.insert(a);
            continue;
        }
        if let Some((lo, strict)) = &b.lo {
            let rel = if *strict { Rel::Lt } else { Rel::Le };
            out.insert(LinAtom::new(LinExpr::constant(lo.clone()).sub(&x), rel));
        }
        if let Some((hi, strict)) = &b.hi {
            let rel = if *strict { Rel::Lt } else { Rel::Le };
            out.insert(LinAtom::new(x.sub(&LinExpr::constant(hi.clone())), rel));
        }
    }
    out.into_iter()
        .filter_map(|a| match a.normalize() {
            super::linear::Norm::Atom(a) => Some(a),
            _ => None,
        })
        .collect()
}

/// Simplified cube, or `None` when it is unsatisfiable.
fn simplify_cube(cube: Cube, vars: &VarTable) -> Option<Cube> {
    if sense_clash(&cube) {
        return None;
    }
    let allowed = allowed_modes(&cube, vars);
    if allowed.is_empty() {
        return None;
    }
    let (atoms, _) = linear_part(&cube);
    if !is_feasible(&atoms) {
        return None;
    }
    let mut out: Cube = cube
        .into_iter()
        .filter(|l| !matches!(l, Lit::Mode(..) | Lit::Lin(_)))
        .collect();
    let had_mode = allowed.len() < vars.modes().len();
    if had_mode {
        let act = vars.act().clone();
        if allowed.len() == 1 {
            out.insert(Lit::Mode(act, allowed[0].clone(), true));
        } else {
            for m in vars.modes().iter().filter(|m| !allowed.contains(m)) {
                out.insert(Lit::Mode(act.clone(), m.clone(), false));
            }
        }
    }
    out.extend(tighten(atoms).into_iter().map(Lit::Lin));
    Some(out)
}

/// Merges `R & l` with `R & !l` into `R`, and drops cubes that contain
/// another cube. Runs to a fixpoint.
fn merge_cubes(mut cubes: BTreeSet<Cube>, vars: &VarTable) -> BTreeSet<Cube> {
    loop {
        let mut changed = false;
        'outer: for c in cubes.iter() {
            for l in c {
                let Some(nl) = complement(l, vars.modes()) else {
                    continue;
                };
                let mut other = c.clone();
                other.remove(l);
                other.insert(nl);
                if cubes.contains(&other) {
                    let mut r = c.clone();
                    r.remove(l);
                    let (c, other) = (c.clone(), other);
                    cubes.remove(&c);
                    cubes.remove(&other);
                    cubes.insert(r);
                    changed = true;
                    break 'outer;
                }
            }
        }
        let list: Vec<Cube> = cubes.iter().cloned().collect();
        for (i, b) in list.iter().enumerate() {
            if list
                .iter()
                .enumerate()
                .any(|(j, a)| i != j && a.len() < b.len() && a.is_subset(b))
            {
                cubes.remove(b);
                changed = true;
            }
        }
        if !changed {
            return cubes;
        }
    }
}

/// Logically equivalent formula in a compact disjunctive form. Formulas
/// with quantifiers come back unchanged.
pub fn simplify(phi: &Formula, vars: &VarTable) -> Formula {
    if !phi.is_quantifier_free() {
        return phi.clone();
    }
    let Ok(d) = to_dnf(phi) else {
        return phi.clone();
    };
    let cubes: BTreeSet<Cube> = d
        .into_iter()
        .filter_map(|c| simplify_cube(c, vars))
        .collect();
    if cubes.iter().any(|c| c.is_empty()) {
        return Formula::True;
    }
    let cubes = merge_cubes(cubes, vars);
    let list: Vec<Cube> = cubes.into_iter().collect();
    dnf_formula(&list)
}

/// Projects out a think variable: `exists x. phi`.
pub fn project_think(phi: &Formula, x: &Name, vars: &VarTable) -> Result<Formula, LogicError> {
    let lv = LVar::Think(x.clone());
    let mut cubes = Vec::new();
    for cube in to_dnf(phi)? {
        let (mut atoms, mut rest) = (BTreeSet::new(), Cube::new());
        for l in cube {
            match l {
                Lit::Lin(a) if a.mentions(&lv) => {
                    atoms.insert(a);
                }
                Lit::Opaque(op, ref a, ref b, _) if a.mentions_think(x) || b.mentions_think(x) => {
                    return Err(LogicError::NonLinear(
                        Formula::Cmp(op, a.clone(), b.clone()).to_string(),
                    ));
                }
                other => {
                    rest.insert(other);
                }
            }
        }
        if let Some(p) = eliminate(&atoms, &lv) {
            rest.extend(p.into_iter().map(Lit::Lin));
            cubes.push(rest);
        }
    }
    Ok(simplify(&dnf_formula(&cubes), vars))
}
