//! Threshold sensors: each sense variable is a conjunction of affine
//! comparisons in the plant state `x` and the input `i`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::interval::{Interval, IntervalSet};
use crate::lang::{parse_formula, Formula, LangError, Name, VarTable};
use crate::logic::linear::{bounds_of, eliminate, normalize_all, Bounds, LinAtom, LinExpr, Rel, Q};
use crate::logic::normal::{cmp_atom, LVar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SVar {
    X,
    I,
}

/// Sensor reading: sense variable to boolean.
pub type SensorOutput = BTreeMap<Name, bool>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SensorError {
    #[error("sensor for `{var}`: {msg}")]
    Predicate { var: String, msg: String },
    #[error(transparent)]
    Syntax(#[from] LangError),
    #[error("input {0} is outside the input domain")]
    InputOutOfDomain(f64),
    #[error("non-finite value {0}")]
    NonFinite(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensorSpec {
    /// Name of the plant state in predicate text.
    pub state: Name,
    /// Name of the input in predicate text.
    pub input: Name,
    pub domain: Interval,
    /// In declaration order.
    pub preds: Vec<(Name, Vec<LinAtom<SVar>>)>,
}

fn exact(x: f64) -> Result<Q, SensorError> {
    BigRational::from_float(x).ok_or(SensorError::NonFinite(x))
}

fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn interval_of(b: &Bounds) -> Interval {
    let (lo, lo_open) =
        b.lo.as_ref()
            .map_or((f64::NEG_INFINITY, true), |(v, s)| (to_f64(v), *s));
    let (hi, hi_open) =
        b.hi.as_ref()
            .map_or((f64::INFINITY, true), |(v, s)| (to_f64(v), *s));
    Interval::new(lo, lo_open, hi, hi_open)
}

impl SensorSpec {
    /// Builds a sensor from predicate text such as `v + i >= 1` or
    /// `v - i <= 0.25 && v - i >= -0.25`.
    pub fn parse(
        state: &str,
        input: &str,
        domain: Interval,
        preds: &[(String, String)],
    ) -> Result<SensorSpec, SensorError> {
        if domain.is_empty() {
            return Err(SensorError::Predicate {
                var: String::new(),
                msg: "empty input domain".into(),
            });
        }
        // predicates never mention modes, but the table needs one
        let spare = |base: &str| {
            let mut n = base.to_string();
            while n == state || n == input {
                n.push('\'');
            }
            n
        };
        let (act, mode) = (spare("act"), spare("mode"));
        let table = VarTable::new(&[state, input], &[], &act, &[mode.as_str()])?;
        let mut out = Vec::new();
        for (var, text) in preds {
            let err = |msg: &str| SensorError::Predicate {
                var: var.clone(),
                msg: msg.to_string(),
            };
            let f = parse_formula(text, &table)?;
            let mut atoms = Vec::new();
            collect_conj(&f, &mut atoms).map_err(|m| err(&m))?;
            let mut lin = Vec::new();
            for (op, l, r) in atoms {
                let a = cmp_atom(op, &l, &r)
                    .ok_or_else(|| err("predicate is not affine in state and input"))?;
                let expr = LinExpr {
                    coeffs: a
                        .expr
                        .coeffs
                        .into_iter()
                        .map(|(v, c)| match v {
                            LVar::Think(n) if *n == *state => Ok((SVar::X, c)),
                            LVar::Think(_) => Ok((SVar::I, c)),
                            LVar::Logical(_) => Err(err("logical variables are not allowed")),
                        })
                        .collect::<Result<_, _>>()?,
                    constant: a.expr.constant,
                };
                lin.push(LinAtom::new(expr, a.rel));
            }
            out.push((Name::from(var.as_str()), lin));
        }
        Ok(SensorSpec {
            state: state.into(),
            input: input.into(),
            domain,
            preds: out,
        })
    }

    pub fn sense_vars(&self) -> impl Iterator<Item = &Name> {
        self.preds.iter().map(|(n, _)| n)
    }

    /// All outputs, true before false, first variable most significant.
    pub fn outputs(&self) -> Vec<SensorOutput> {
        let n = self.preds.len();
        (0..1usize << n)
            .map(|k| {
                self.preds
                    .iter()
                    .enumerate()
                    .map(|(j, (name, _))| (name.clone(), (k >> (n - 1 - j)) & 1 == 0))
                    .collect()
            })
            .collect()
    }

    pub fn sense_eval(&self, x: f64, i: f64) -> Result<SensorOutput, SensorError> {
        if !self.domain.contains(i) {
            return Err(SensorError::InputOutOfDomain(i));
        }
        let env: BTreeMap<SVar, Q> = [(SVar::X, exact(x)?), (SVar::I, exact(i)?)]
            .into_iter()
            .collect();
        Ok(self
            .preds
            .iter()
            .map(|(name, atoms)| {
                (
                    name.clone(),
                    atoms.iter().all(|a| a.holds_at(&env) == Some(true)),
                )
            })
            .collect())
    }

    fn domain_atoms(&self) -> Vec<LinAtom<SVar>> {
        let i = LinExpr::var(SVar::I);
        let mut out = Vec::new();
        let d = &self.domain;
        if d.lo.is_finite() {
            let lo = LinExpr::constant(exact(d.lo).unwrap());
            out.push(LinAtom::new(
                lo.sub(&i),
                if d.lo_open { Rel::Lt } else { Rel::Le },
            ));
        }
        if d.hi.is_finite() {
            let hi = LinExpr::constant(exact(d.hi).unwrap());
            out.push(LinAtom::new(
                i.sub(&hi),
                if d.hi_open { Rel::Lt } else { Rel::Le },
            ));
        }
        out
    }

    /// Conjunctions over `(x, i)`, one per disjunct, describing `out`.
    fn cubes(&self, out: &SensorOutput) -> Vec<Vec<LinAtom<SVar>>> {
        let mut cubes: Vec<Vec<LinAtom<SVar>>> = vec![self.domain_atoms()];
        for (name, atoms) in &self.preds {
            let want = out.get(name).copied().unwrap_or(false);
            let options: Vec<Vec<LinAtom<SVar>>> = if want {
                vec![atoms.clone()]
            } else {
                atoms
                    .iter()
                    .flat_map(|a| a.negate())
                    .map(|a| vec![a])
                    .collect()
            };
            cubes = cubes
                .iter()
                .flat_map(|c| {
                    options.iter().map(move |o| {
                        let mut c = c.clone();
                        c.extend(o.iter().cloned());
                        c
                    })
                })
                .collect();
        }
        cubes
    }

    /// Plant states from which some admissible input produces `out`.
    pub fn preimage(&self, out: &SensorOutput) -> IntervalSet {
        let mut parts = Vec::new();
        for cube in self.cubes(out) {
            let Some(atoms) = normalize_all(cube) else {
                continue;
            };
            let Some(projected) = eliminate(&atoms, &SVar::I) else {
                continue;
            };
            let b = bounds_of(&projected, &SVar::X);
            if !b.is_empty() {
                parts.push(interval_of(&b));
            }
        }
        IntervalSet::from_parts(parts)
    }

    /// Inputs in the domain that produce `out` at plant state `x`.
    pub fn feasible_inputs(&self, x: f64, out: &SensorOutput) -> Result<IntervalSet, SensorError> {
        let xq = LinExpr::constant(exact(x)?);
        let mut parts = Vec::new();
        for cube in self.cubes(out) {
            let fixed = cube
                .into_iter()
                .map(|a| LinAtom::new(a.expr.substitute(&SVar::X, &xq), a.rel));
            let Some(atoms) = normalize_all(fixed) else {
                continue;
            };
            let b = bounds_of(&atoms, &SVar::I);
            if !b.is_empty() {
                parts.push(interval_of(&b));
            }
        }
        Ok(IntervalSet::from_parts(parts))
    }

    /// Sense variables of this sensor, as a set.
    pub fn names(&self) -> BTreeSet<Name> {
        self.sense_vars().cloned().collect()
    }
}

fn collect_conj(
    f: &Formula,
    out: &mut Vec<(crate::lang::ROp, crate::lang::AExp, crate::lang::AExp)>,
) -> Result<(), String> {
    match f {
        Formula::And(a, b) => {
            collect_conj(a, out)?;
            collect_conj(b, out)
        }
        Formula::Cmp(op, l, r) => {
            out.push((*op, l.clone(), r.clone()));
            Ok(())
        }
        _ => Err("expected a conjunction of comparisons".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn braking() -> SensorSpec {
        SensorSpec::parse(
            "v",
            "i",
            Interval::closed(-0.2, 0.2),
            &[("xs".into(), "v + i >= 1".into())],
        )
        .unwrap()
    }

    fn out(b: bool) -> SensorOutput {
        [("xs".into(), b)].into_iter().collect()
    }

    #[test]
    fn evaluation() {
        let s = braking();
        assert_eq!(s.sense_eval(0.9, 0.1).unwrap(), out(true));
        assert_eq!(s.sense_eval(0.95, 0.0).unwrap(), out(false));
        assert_eq!(s.sense_eval(1.0, 0.0).unwrap(), out(true));
        assert!(s.sense_eval(1.0, 0.3).is_err());
    }

    #[test]
    fn preimages() {
        let s = braking();
        assert_eq!(s.preimage(&out(true)).to_string(), "[0.8, inf)");
        assert_eq!(s.preimage(&out(false)).to_string(), "(-inf, 1.2)");
        let plain = SensorSpec::parse(
            "v",
            "i",
            Interval::closed(-0.2, 0.2),
            &[("xs".into(), "v >= 1".into())],
        )
        .unwrap();
        assert_eq!(plain.preimage(&out(true)).to_string(), "[1, inf)");
    }

    #[test]
    fn inputs() {
        let s = braking();
        // 0.95 is not exact in binary; the bound is 1 - fl(0.95)
        let f = s.feasible_inputs(0.95, &out(false)).unwrap();
        assert!(f.approx_eq(&"[-0.2, 0.05)".parse().unwrap(), 1e-12), "{f}");
        assert!(f.parts()[0].hi_open);
        let t = s.feasible_inputs(0.9, &out(true)).unwrap();
        assert!(t.approx_eq(&IntervalSet::closed(0.1, 0.2), 1e-12), "{t}");
        assert!(s.feasible_inputs(2.0, &out(false)).unwrap().is_empty());
    }

    #[test]
    fn absolute_value_form() {
        let s = SensorSpec::parse(
            "v",
            "i",
            Interval::full(),
            &[("xs".into(), "v - i <= 0.25 && v - i >= -0.25".into())],
        )
        .unwrap();
        assert_eq!(s.preimage(&out(true)), IntervalSet::full());
        assert_eq!(s.preimage(&out(false)), IntervalSet::full());
        assert_eq!(
            s.feasible_inputs(1.0, &out(true)).unwrap().to_string(),
            "[0.75, 1.25]"
        );
        assert_eq!(
            s.feasible_inputs(1.0, &out(false)).unwrap().to_string(),
            "(-inf, 0.75) | (1.25, inf)"
        );
        assert_eq!(s.outputs(), vec![out(true), out(false)]);
    }
}
