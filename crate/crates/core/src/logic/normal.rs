//! Disjunctive normal form over sense, mode and linear literals.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use super::linear::{normalize_all, q, LinAtom, LinExpr, Norm, Rel, Q};
use super::LogicError;
use crate::lang::{AExp, AOp, Formula, ModeExpr, Name, ROp, Real};

/// Arithmetic variables of assertions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LVar {
    Think(Name),
    Logical(Name),
}

impl LVar {
    fn to_aexp(&self) -> AExp {
        match self {
            LVar::Think(x) => AExp::Think(x.clone()),
            LVar::Logical(v) => AExp::Logical(v.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lit {
    Sense(Name, bool),
    /// `(act, mode, polarity)`: `act = mode` or its negation.
    Mode(Name, Name, bool),
    Lin(LinAtom<LVar>),
    /// A comparison outside the linear fragment, with its polarity.
    Opaque(ROp, AExp, AExp, bool),
}

pub type Cube = BTreeSet<Lit>;
pub type Dnf = Vec<Cube>;

pub fn linearize(a: &AExp) -> Option<LinExpr<LVar>> {
    Some(match a {
        AExp::Num(r) => LinExpr::constant(r.0.clone()),
        AExp::Think(x) => LinExpr::var(LVar::Think(x.clone())),
        AExp::Logical(v) => LinExpr::var(LVar::Logical(v.clone())),
        AExp::Bin(op, l, r) => {
            let (l, r) = (linearize(l)?, linearize(r)?);
            match op {
                AOp::Add => l.add(&r),
                AOp::Sub => l.sub(&r),
                AOp::Mul if l.is_constant() => r.scale(&l.constant),
                AOp::Mul if r.is_constant() => l.scale(&r.constant),
                AOp::Mul => return None,
            }
        }
    })
}

/// `l op r` as a single atom over `l - r`.
pub fn cmp_atom(op: ROp, l: &AExp, r: &AExp) -> Option<LinAtom<LVar>> {
    let e = linearize(l)?.sub(&linearize(r)?);
    let neg = || e.scale(&q(-1));
    Some(match op {
        ROp::Eq => LinAtom::new(e.clone(), Rel::Eq),
        ROp::Lt => LinAtom::new(e.clone(), Rel::Lt),
        ROp::Le => LinAtom::new(e.clone(), Rel::Le),
        ROp::Gt => LinAtom::new(neg(), Rel::Lt),
        ROp::Ge => LinAtom::new(neg(), Rel::Le),
    })
}

fn lin_cubes(atoms: Vec<LinAtom<LVar>>) -> Dnf {
    // each atom is one disjunct
    let mut out = Vec::new();
    for a in atoms {
        match a.normalize() {
            Norm::True => return vec![Cube::new()],
            Norm::False => {}
            Norm::Atom(a) => out.push([Lit::Lin(a)].into_iter().collect()),
        }
    }
    out
}

fn single(l: Lit) -> Dnf {
    vec![[l].into_iter().collect()]
}

fn constant(b: bool) -> Dnf {
    if b {
        vec![Cube::new()]
    } else {
        Vec::new()
    }
}

/// Cheap literal-level contradiction check for a cube.
fn clashes(cube: &Cube) -> bool {
    let mut pos_mode: Option<&Name> = None;
    for l in cube {
        match l {
            Lit::Sense(x, b) if cube.contains(&Lit::Sense(x.clone(), !b)) => return true,
            Lit::Mode(a, m, true) => {
                if cube.contains(&Lit::Mode(a.clone(), m.clone(), false)) {
                    return true;
                }
                if pos_mode.is_some_and(|p| p != m) {
                    return true;
                }
                pos_mode = Some(m);
            }
            _ => {}
        }
    }
    false
}

fn product(a: Dnf, b: Dnf) -> Dnf {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a {
        for y in &b {
            let c: Cube = x.union(y).cloned().collect();
            if !clashes(&c) {
                out.push(c);
            }
        }
    }
    out
}

/// DNF of a quantifier-free formula. Literals are normalized and cubes with
/// an obvious clash are dropped; linear feasibility is not checked here.
pub fn to_dnf(phi: &Formula) -> Result<Dnf, LogicError> {
    dnf(phi, true)
}

fn dnf(phi: &Formula, pos: bool) -> Result<Dnf, LogicError> {
    Ok(match phi {
        Formula::True => constant(pos),
        Formula::False => constant(!pos),
        Formula::Sense(x) => single(Lit::Sense(x.clone(), pos)),
        Formula::ModeEq(l, r) => match (l, r) {
            (ModeExpr::Lit(a), ModeExpr::Lit(b)) => constant((a == b) == pos),
            (ModeExpr::Act(_), ModeExpr::Act(_)) => constant(pos),
            (ModeExpr::Act(x), ModeExpr::Lit(m)) | (ModeExpr::Lit(m), ModeExpr::Act(x)) => {
                single(Lit::Mode(x.clone(), m.clone(), pos))
            }
        },
        Formula::Cmp(op, l, r) => match cmp_atom(*op, l, r) {
            Some(atom) if pos => lin_cubes(vec![atom]),
            Some(atom) => lin_cubes(atom.negate()),
            None => single(Lit::Opaque(*op, l.clone(), r.clone(), pos)),
        },
        Formula::Not(a) => dnf(a, !pos)?,
        Formula::And(a, b) if pos => product(dnf(a, true)?, dnf(b, true)?),
        Formula::Or(a, b) if !pos => product(dnf(a, false)?, dnf(b, false)?),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let mut l = dnf(a, pos)?;
            l.extend(dnf(b, pos)?);
            l
        }
        Formula::Exists(..) | Formula::Forall(..) => return Err(LogicError::ResidualQuantifier),
    })
}

fn term(c: &Q, v: &LVar) -> AExp {
    if c.is_one() {
        v.to_aexp()
    } else {
        AExp::bin(AOp::Mul, AExp::Num(Real(c.clone())), v.to_aexp())
    }
}

/// Readable comparison for a normalized atom: variables on the left, the
/// constant on the right, leading coefficient positive.
pub fn atom_formula(a: &LinAtom<LVar>) -> Formula {
    let flip = a
        .expr
        .coeffs
        .values()
        .next()
        .is_some_and(|c| c.is_negative());
    let e = if flip {
        a.expr.scale(&q(-1))
    } else {
        a.expr.clone()
    };
    let mut lhs: Option<AExp> = None;
    for (v, c) in &e.coeffs {
        lhs = Some(match lhs {
            None => term(c, v),
            Some(acc) if c.is_negative() => AExp::bin(AOp::Sub, acc, term(&-c, v)),
            Some(acc) => AExp::bin(AOp::Add, acc, term(c, v)),
        });
    }
    let lhs = lhs.unwrap_or_else(|| AExp::Num(Real(Q::zero())));
    let rhs = AExp::Num(Real(-e.constant.clone()));
    let op = match (a.rel, flip) {
        (Rel::Eq, _) => ROp::Eq,
        (Rel::Lt, false) => ROp::Lt,
        (Rel::Le, false) => ROp::Le,
        (Rel::Lt, true) => ROp::Gt,
        (Rel::Le, true) => ROp::Ge,
    };
    Formula::Cmp(op, lhs, rhs)
}

pub fn lit_formula(l: &Lit) -> Formula {
    let polar = |f: Formula, pos: bool| if pos { f } else { Formula::not(f) };
    match l {
        Lit::Sense(x, pos) => polar(Formula::Sense(x.clone()), *pos),
        Lit::Mode(a, m, pos) => polar(Formula::mode_is(a, m), *pos),
        Lit::Lin(a) => atom_formula(a),
        Lit::Opaque(op, l, r, pos) => polar(Formula::Cmp(*op, l.clone(), r.clone()), *pos),
    }
}

pub fn cube_formula(c: &Cube) -> Formula {
    Formula::conj(c.iter().map(lit_formula))
}

pub fn dnf_formula(d: &[Cube]) -> Formula {
    Formula::disj(d.iter().map(cube_formula))
}

/// The linear atoms of a cube, or `None` if some opaque literal is present.
pub fn linear_part(c: &Cube) -> (BTreeSet<LinAtom<LVar>>, bool) {
    let mut atoms = BTreeSet::new();
    let mut opaque = false;
    for l in c {
        match l {
            Lit::Lin(a) => {
                atoms.insert(a.clone());
            }
            Lit::Opaque(..) => opaque = true,
            _ => {}
        }
    }
    (atoms, opaque)
}

/// Single-atom complement, when one exists.
pub fn complement(l: &Lit, modes: &[Name]) -> Option<Lit> {
    match l {
        Lit::Sense(x, b) => Some(Lit::Sense(x.clone(), !b)),
        Lit::Mode(a, m, false) => Some(Lit::Mode(a.clone(), m.clone(), true)),
        Lit::Mode(a, m, true) => match modes {
            [x, y] => Some(Lit::Mode(
                a.clone(),
                if x == m { y.clone() } else { x.clone() },
                true,
            )),
            _ => Some(Lit::Mode(a.clone(), m.clone(), false)),
        },
        Lit::Lin(a) if a.rel != Rel::Eq => {
            let neg = a.negate();
            match normalize_all(neg) {
                Some(s) if s.len() == 1 => s.into_iter().next().map(Lit::Lin),
                _ => None,
            }
        }
        Lit::Opaque(op, l, r, pos) => Some(Lit::Opaque(*op, l.clone(), r.clone(), !pos)),
        Lit::Lin(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_formula, VarTable};

    #[test]
    fn atoms_print_naturally() {
        let v = VarTable::new(&["cnt", "y"], &["xs"], "xa", &["Acl", "Brk"]).unwrap();
        for (src, want) in [
            ("cnt + 1 < 2", "cnt < 1"),
            ("1 <= cnt", "cnt >= 1"),
            ("2 * cnt = cnt + 3", "cnt = 3"),
            ("cnt - y > 0.5", "cnt - y > 0.5"),
            ("3 * cnt < y", "cnt - 1/3 * y < 0"),
        ] {
            let f = parse_formula(src, &v).unwrap();
            let d = to_dnf(&f).unwrap();
            assert_eq!(dnf_formula(&d).to_string(), want, "{src}");
        }
    }

    #[test]
    fn negated_equality_splits() {
        let v = VarTable::new(&["cnt"], &["xs"], "xa", &["Acl", "Brk"]).unwrap();
        let d = to_dnf(&parse_formula("!(cnt = 0)", &v).unwrap()).unwrap();
        assert_eq!(d.len(), 2);
        let d = to_dnf(&parse_formula("xs && !xs", &v).unwrap()).unwrap();
        assert!(d.is_empty());
        let d = to_dnf(&parse_formula("Brk = Acl || cnt * cnt < 1", &v).unwrap()).unwrap();
        assert!(matches!(d[0].iter().next(), Some(Lit::Opaque(..))));
    }
}
