//! Properties of the assertion language and the program-logic transformers,
//! checked against the concrete interpreter.

use proptest::prelude::*;
use sds_core::exec::{exec_cmd, holds, LogicalEnv, Valuation};
use sds_core::lang::{
    name, parse_controller, parse_formula, AExp, AOp, BExp, Cmd, Formula, ModeExpr, ROp, Real,
    VarTable,
};
use sds_core::logic::linear::{find_point, is_feasible, normalize_all, q, LinAtom, LinExpr, Rel};
use sds_core::logic::{equivalent, simplify, sp, wp};

fn vars() -> VarTable {
    VarTable::new(&["a", "b"], &["s"], "xa", &["M1", "M2"]).unwrap()
}

fn half(n: i64) -> Real {
    Real(num_rational::BigRational::new(n.into(), 2.into()))
}

fn rop() -> impl Strategy<Value = ROp> {
    prop_oneof![
        Just(ROp::Eq),
        Just(ROp::Lt),
        Just(ROp::Le),
        Just(ROp::Gt),
        Just(ROp::Ge)
    ]
}

/// Linear expressions over `a`, `b` and optionally one logical variable.
fn aexp(logical: bool) -> impl Strategy<Value = AExp> {
    let mut leaves = vec![
        (-6i64..=6).prop_map(|n| AExp::Num(half(n))).boxed(),
        Just(AExp::think("a")).boxed(),
        Just(AExp::think("b")).boxed(),
    ];
    if logical {
        leaves.push(Just(AExp::Logical(name("_v0"))).boxed());
    }
    let leaf = proptest::strategy::Union::new(leaves);
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| AExp::bin(AOp::Add, l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| AExp::bin(AOp::Sub, l, r)),
            ((-3i64..=3), inner).prop_map(|(k, e)| AExp::bin(AOp::Mul, AExp::Num(half(k)), e)),
        ]
    })
}

fn bexp() -> impl Strategy<Value = BExp> {
    let leaf = prop_oneof![
        Just(BExp::True),
        Just(BExp::False),
        Just(BExp::Sense(name("s"))),
        (rop(), aexp(false), aexp(false)).prop_map(|(o, l, r)| BExp::Cmp(o, l, r)),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|b| BExp::Not(Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| BExp::And(Box::new(l), Box::new(r))),
            (inner.clone(), inner).prop_map(|(l, r)| BExp::Or(Box::new(l), Box::new(r))),
        ]
    })
}

fn cmd() -> impl Strategy<Value = Cmd> {
    let leaf = prop_oneof![
        Just(Cmd::Skip),
        (prop_oneof![Just("a"), Just("b")], aexp(false)).prop_map(|(x, e)| Cmd::Assign(name(x), e)),
        prop_oneof![Just("M1"), Just("M2")].prop_map(|m| Cmd::SetMode(name("xa"), name(m))),
    ];
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Cmd::seq(l, r)),
            (bexp(), inner.clone(), inner).prop_map(|(g, t, e)| Cmd::ite(g, t, e)),
        ]
    })
}

fn mode_eq() -> impl Strategy<Value = Formula> {
    prop_oneof![Just("M1"), Just("M2")]
        .prop_map(|m| Formula::ModeEq(ModeExpr::Act(name("xa")), ModeExpr::Lit(name(m))))
}

fn formula_with(quantified: bool) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        Just(Formula::Sense(name("s"))),
        mode_eq(),
        (rop(), aexp(false), aexp(false)).prop_map(|(o, l, r)| Formula::Cmp(o, l, r)),
    ];
    let inner = leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::or(l, r)),
        ]
    });
    if !quantified {
        return inner.boxed();
    }
    let q_atom = (rop(), aexp(true), aexp(true)).prop_map(|(o, l, r)| Formula::Cmp(o, l, r));
    (inner, q_atom, any::<bool>(), any::<bool>())
        .prop_map(|(f, qa, forall, conj)| {
            let body = if conj {
                Formula::and(qa, f.clone())
            } else {
                Formula::or(qa, f.clone())
            };
            let q = if forall {
                Formula::Forall(name("_v0"), Box::new(body))
            } else {
                Formula::Exists(name("_v0"), Box::new(body))
            };
            Formula::and(q, f)
        })
        .boxed()
}

fn valuation() -> impl Strategy<Value = Valuation> {
    ((-8i64..=8), (-8i64..=8), any::<bool>(), any::<bool>()).prop_map(|(a, b, s, m)| {
        Valuation::defaults(&vars())
            .with_think("a", a as f64 / 2.0)
            .with_think("b", b as f64 / 2.0)
            .with_sense("s", s)
            .with_mode(if m { "M1" } else { "M2" })
    })
}

fn sat(phi: &Formula, sigma: &Valuation, v: &VarTable) -> bool {
    holds(sigma, &LogicalEnv::new(), phi, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn formula_print_parse_roundtrip(phi in formula_with(true)) {
        let v = vars();
        let text = phi.to_string();
        let back = parse_formula(&text, &v).unwrap();
        prop_assert_eq!(back, phi, "{}", text);
    }

    #[test]
    fn command_print_parse_roundtrip(c in cmd()) {
        let v = vars();
        let text = c.to_string();
        let back = parse_controller(&text, &v).unwrap();
        // sequences may re-associate, so compare printed forms
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn wp_agrees_with_execution(c in cmd(), phi in formula_with(false), sigma in valuation()) {
        let v = vars();
        let w = wp(&c, &phi, &v);
        let after = exec_cmd(&c, &sigma).unwrap();
        prop_assert_eq!(sat(&w, &sigma, &v), sat(&phi, &after, &v));
    }

    #[test]
    fn sp_contains_every_image(c in cmd(), phi in formula_with(false), sigma in valuation()) {
        let v = vars();
        prop_assume!(sat(&phi, &sigma, &v));
        let post = sp(&c, &phi, &v).unwrap();
        let after = exec_cmd(&c, &sigma).unwrap();
        prop_assert!(sat(&post, &after, &v), "post = {}", post);
    }

    #[test]
    fn simplify_preserves_truth(phi in formula_with(true), sigma in valuation()) {
        let v = vars();
        let s = simplify(&phi, &v);
        prop_assert_eq!(sat(&s, &sigma, &v), sat(&phi, &sigma, &v), "{} vs {}", phi, s);
    }

    #[test]
    fn equivalence_is_reflexive_and_respects_negation(phi in formula_with(false)) {
        let v = vars();
        prop_assert!(equivalent(&phi, &simplify(&phi, &v), &v).unwrap());
        let neg = Formula::not(phi.clone());
        let either = Formula::or(phi.clone(), neg);
        prop_assert!(equivalent(&either, &Formula::True, &v).unwrap());
    }

    #[test]
    fn feasibility_matches_witness(
        rows in proptest::collection::vec(((-3i64..=3), (-3i64..=3), (-4i64..=4), 0u8..3), 1..6)
    ) {
        let atoms: Vec<LinAtom<u8>> = rows
            .iter()
            .map(|&(cx, cy, k, r)| {
                let e = LinExpr::var(0u8)
                    .scale(&q(cx))
                    .add(&LinExpr::var(1u8).scale(&q(cy)))
                    .add(&LinExpr::constant(q(k)));
                LinAtom::new(e, [Rel::Eq, Rel::Lt, Rel::Le][r as usize])
            })
            .collect();
        match normalize_all(atoms.clone()) {
            None => {
                let origin = [(0u8, q(0)), (1u8, q(0))].into_iter().collect();
                prop_assert!(atoms.iter().any(|a| a.holds_at(&origin) == Some(false)));
            }
            Some(set) => {
                let point = find_point(&set, &[0u8, 1u8]);
                prop_assert_eq!(point.is_some(), is_feasible(&set));
                if let Some(p) = point {
                    let mut env = p.clone();
                    env.entry(0).or_insert_with(|| q(0));
                    env.entry(1).or_insert_with(|| q(0));
                    for a in &atoms {
                        prop_assert_eq!(a.holds_at(&env), Some(true));
                    }
                }
            }
        }
    }
}
