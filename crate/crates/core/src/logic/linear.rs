//! Exact linear constraints and Fourier–Motzkin elimination.
//!
//! An atom is `sum(c_i * v_i) + k  REL  0` with `REL` one of `=`, `<`, `<=`.
//! Variables are generic so the same kernel serves assertions (think and
//! logical variables) and sensor predicates (plant state and input).

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinExpr<V: Ord> {
    pub coeffs: BTreeMap<V, Q>,
    pub constant: Q,
}

impl<V: Ord + Clone> LinExpr<V> {
    pub fn constant(k: Q) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: k,
        }
    }

    pub fn var(v: V) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, Q::one());
        LinExpr {
            coeffs,
            constant: Q::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, v: &V) -> Q {
        self.coeffs.get(v).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            let e = out.coeffs.entry(v.clone()).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                out.coeffs.remove(v);
            }
        }
        out.constant += &other.constant;
        out
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return LinExpr::constant(Q::zero());
        }
        LinExpr {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), c * k))
                .collect(),
            constant: &self.constant * k,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&q(-1)))
    }

    /// Replaces `v` by `by`.
    pub fn substitute(&self, v: &V, by: &Self) -> Self {
        match self.coeffs.get(v) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.coeffs.remove(v);
                rest.add(&by.scale(c))
            }
        }
    }

    pub fn eval(&self, env: &BTreeMap<V, Q>) -> Option<Q> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * env.get(v)?;
        }
        Some(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Eq,
    Lt,
    Le,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinAtom<V: Ord> {
    pub expr: LinExpr<V>,
    pub rel: Rel,
}

/// Result of normalizing an atom: it may turn out to be constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Norm<V: Ord> {
    True,
    False,
    Atom(LinAtom<V>),
}

fn holds_const(k: &Q, rel: Rel) -> bool {
    match rel {
        Rel::Eq => k.is_zero(),
        Rel::Lt => k.is_negative(),
        Rel::Le => !k.is_positive(),
    }
}

impl<V: Ord + Clone> LinAtom<V> {
    pub fn new(expr: LinExpr<V>, rel: Rel) -> Self {
        LinAtom { expr, rel }
    }

    /// Canonical scaling: equalities get leading coefficient 1, inequalities
    /// leading coefficient +1 or -1.
    pub fn normalize(self) -> Norm<V> {
        let Some(lead) = self.expr.coeffs.values().next().cloned() else {
            return if holds_const(&self.expr.constant, self.rel) {
                Norm::True
            } else {
                Norm::False
            };
        };
        let k = match self.rel {
            Rel::Eq => lead.recip(),
            Rel::Lt | Rel::Le => lead.abs().recip(),
        };
        Norm::Atom(LinAtom {
            expr: self.expr.scale(&k),
            rel: self.rel,
        })
    }

    /// The negation as a disjunction of atoms.
    pub fn negate(&self) -> Vec<LinAtom<V>> {
        let neg = self.expr.scale(&q(-1));
        match self.rel {
            Rel::Eq => vec![
                LinAtom::new(self.expr.clone(), Rel::Lt),
                LinAtom::new(neg, Rel::Lt),
            ],
            Rel::Lt => vec![LinAtom::new(neg, Rel::Le)],
            Rel::Le => vec![LinAtom::new(neg, Rel::Lt)],
        }
    }

    pub fn mentions(&self, v: &V) -> bool {
        self.expr.coeffs.contains_key(v)
    }

    pub fn vars(&self) -> impl Iterator<Item = &V> {
        self.expr.coeffs.keys()
    }

    pub fn holds_at(&self, env: &BTreeMap<V, Q>) -> Option<bool> {
        self.expr.eval(env).map(|k| holds_const(&k, self.rel))
    }
}

/// Normalizes a conjunction. `None` if some atom is constantly false.
pub fn normalize_all<V: Ord + Clone>(
    atoms: impl IntoIterator<Item = LinAtom<V>>,
) -> Option<BTreeSet<LinAtom<V>>> {
    let mut out = BTreeSet::new();
    for a in atoms {
        match a.normalize() {
            Norm::True => {}
            Norm::False => return None,
            Norm::Atom(a) => {
                out.insert(a);
            }
        }
    }
    Some(out)
}

/// Projects `v` out of a conjunction: the result is satisfiable at a point
/// iff the input is satisfiable for some value of `v` there. `None` means
/// the conjunction is unsatisfiable.
pub fn eliminate<V: Ord + Clone>(
    atoms: &BTreeSet<LinAtom<V>>,
    v: &V,
) -> Option<BTreeSet<LinAtom<V>>> {
    // one-point rule: c*v + r = 0 gives v = -r/c
    if let Some(eq) = atoms.iter().find(|a| a.rel == Rel::Eq && a.mentions(v)) {
        let c = eq.expr.coeff(v);
        let mut rest = eq.expr.clone();
        rest.coeffs.remove(v);
        let solution = rest.scale(&(-c.recip()));
        return normalize_all(
            atoms
                .iter()
                .filter(|a| *a != eq)
                .map(|a| LinAtom::new(a.expr.substitute(v, &solution), a.rel)),
        );
    }
    let (mut lower, mut upper, mut keep) = (Vec::new(), Vec::new(), Vec::new());
    for a in atoms {
        let c = a.expr.coeff(v);
        if c.is_zero() {
            keep.push(a.clone());
        } else if c.is_positive() {
            upper.push(a);
        } else {
            lower.push(a);
        }
    }
    for l in &lower {
        for u in &upper {
            let (al, au) = (l.expr.coeff(v), u.expr.coeff(v));
            let combined = u.expr.scale(&-al).add(&l.expr.scale(&au));
            let rel = if l.rel == Rel::Lt || u.rel == Rel::Lt {
                Rel::Lt
            } else {
                Rel::Le
            };
            keep.push(LinAtom::new(combined, rel));
        }
    }
    normalize_all(keep)
}

fn all_vars<V: Ord + Clone>(atoms: &BTreeSet<LinAtom<V>>) -> BTreeSet<V> {
    atoms.iter().flat_map(|a| a.vars().cloned()).collect()
}

pub fn is_feasible<V: Ord + Clone>(atoms: &BTreeSet<LinAtom<V>>) -> bool {
    let mut cur = atoms.clone();
    for v in all_vars(atoms) {
        match eliminate(&cur, &v) {
            Some(next) => cur = next,
            None => return false,
        }
    }
    // after eliminating everything only constants remain, and those were
    // checked by normalization
    cur.is_empty()
}

/// Bounds on a single variable implied by a conjunction that mentions no
/// other variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// `(value, strict)`
    pub lo: Option<(Q, bool)>,
    pub hi: Option<(Q, bool)>,
}

impl Bounds {
    pub fn unbounded() -> Self {
        Bounds { lo: None, hi: None }
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Some((l, ls)), Some((h, hs))) => l > h || (l == h && (*ls || *hs)),
            _ => false,
        }
    }

    pub fn point(&self) -> Option<&Q> {
        match (&self.lo, &self.hi) {
            (Some((l, false)), Some((h, false))) if l == h => Some(l),
            _ => None,
        }
    }

    fn tighten_lo(&mut self, b: Q, strict: bool) {
        let better = match &self.lo {
            None => true,
            Some((cur, cs)) => b > *cur || (b == *cur && strict && !cs),
        };
        if better {
            self.lo = Some((b, strict));
        }
    }

    fn tighten_hi(&mut self, b: Q, strict: bool) {
        let better = match &self.hi {
            None => true,
            Some((cur, cs)) => b < *cur || (b == *cur && strict && !cs),
        };
        if better {
            self.hi = Some((b, strict));
        }
    }

    /// Interior choice: the point, the midpoint, one past a single bound, or 0.
    pub fn pick(&self) -> Q {
        match (&self.lo, &self.hi) {
            (Some((l, _)), Some((h, _))) => (l + h) / q(2),
            (Some((l, _)), None) => l + q(1),
            (None, Some((h, _))) => h - q(1),
            (None, None) => Q::zero(),
        }
    }
}

/// Collects the bounds the atoms place on `v`, treating every other
/// variable as already substituted away. Atoms mentioning other variables
/// are ignored.
pub fn bounds_of<V: Ord + Clone>(atoms: &BTreeSet<LinAtom<V>>, v: &V) -> Bounds {
    let mut b = Bounds::unbounded();
    for a in atoms {
        if a.expr.coeffs.len() != 1 || !a.mentions(v) {
            continue;
        }
        let c = a.expr.coeff(v);
        let at = -&a.expr.constant / &c;
        match a.rel {
            Rel::Eq => {
                b.tighten_lo(at.clone(), false);
                b.tighten_hi(at, false);
            }
            Rel::Lt | Rel::Le => {
                let strict = a.rel == Rel::Lt;
                if c.is_positive() {
                    b.tighten_hi(at, strict);
                } else {
                    b.tighten_lo(at, strict);
                }
            }
        }
    }
    b
}

/// A satisfying point, built by eliminating variables in order and then
/// choosing each value from its bounds given the later choices.
/// `order` fixes which variables get values; variables of the atoms not in
/// `order` are appended.
pub fn find_point<V: Ord + Clone>(
    atoms: &BTreeSet<LinAtom<V>>,
    order: &[V],
) -> Option<BTreeMap<V, Q>> {
    let mut vars: Vec<V> = order.to_vec();
    for v in all_vars(atoms) {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let mut stages = vec![atoms.clone()];
    for v in &vars {
        let next = eliminate(stages.last().unwrap(), v)?;
        stages.push(next);
    }
    let mut env: BTreeMap<V, Q> = BTreeMap::new();
    for (i, v) in vars.iter().enumerate().rev() {
        let substituted: BTreeSet<LinAtom<V>> = stages[i]
            .iter()
            .map(|a| {
                let mut e = a.expr.clone();
                for (w, val) in &env {
                    e = e.substitute(w, &LinExpr::constant(val.clone()));
                }
                LinAtom::new(e, a.rel)
            })
            .collect();
        let b = bounds_of(&substituted, v);
        debug_assert!(!b.is_empty());
        let val = b.point().cloned().unwrap_or_else(|| b.pick());
        env.insert(v.clone(), val);
    }
    Some(env)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ge(v: &'static str, k: i64) -> LinAtom<&'static str> {
        // k - v <= 0
        LinAtom::new(LinExpr::constant(q(k)).sub(&LinExpr::var(v)), Rel::Le)
    }

    fn lt(v: &'static str, k: i64) -> LinAtom<&'static str> {
        LinAtom::new(LinExpr::var(v).sub(&LinExpr::constant(q(k))), Rel::Lt)
    }

    #[test]
    fn empty_interval_is_infeasible() {
        let s = normalize_all([
            ge("v", 0),
            LinAtom::new(LinExpr::var("v").add(&LinExpr::constant(q(1))), Rel::Le),
        ])
        .unwrap();
        assert!(!is_feasible(&s));
    }

    #[test]
    fn strictness_is_tracked() {
        let s = normalize_all([ge("x", 1), lt("x", 1)]).unwrap();
        assert!(!is_feasible(&s));
        let s = normalize_all([ge("x", 1), lt("x", 2)]).unwrap();
        let p = find_point(&s, &["x"]).unwrap();
        assert_eq!(p["x"], Q::new(3.into(), 2.into()));
    }

    #[test]
    fn one_point_rule() {
        // v = 0 and x = v + 1
        let e1 = LinAtom::new(LinExpr::var("v"), Rel::Eq);
        let e2 = LinAtom::new(
            LinExpr::var("x")
                .sub(&LinExpr::var("v"))
                .sub(&LinExpr::constant(q(1))),
            Rel::Eq,
        );
        let s = normalize_all([e1, e2]).unwrap();
        let out = eliminate(&s, &"v").unwrap();
        assert_eq!(out.len(), 1);
        let a = out.iter().next().unwrap();
        assert_eq!(a.rel, Rel::Eq);
        assert_eq!(a.expr.coeff(&"x"), q(1));
        assert_eq!(a.expr.constant, q(-1));
    }

    #[test]
    fn canonical_scaling() {
        let a = LinAtom::new(
            LinExpr::var("x").scale(&q(2)).sub(&LinExpr::constant(q(2))),
            Rel::Lt,
        );
        let b = lt("x", 1);
        assert_eq!(a.normalize(), b.normalize());
    }
}
