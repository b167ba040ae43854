//! Properties of interval sets, plant flows and sensors.

use proptest::prelude::*;
use sds_core::interval::{Interval, IntervalSet};
use sds_core::plant::{parse_rhs, Direction, PlantSpec};
use sds_core::sensor::SensorSpec;

fn endpoint() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => (-20i32..=20).prop_map(|n| n as f64 / 4.0),
        1 => Just(f64::NEG_INFINITY),
        1 => Just(f64::INFINITY),
    ]
}

fn interval() -> impl Strategy<Value = Interval> {
    (endpoint(), endpoint(), any::<bool>(), any::<bool>()).prop_map(|(a, b, lo, hi)| {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Interval::new(a, lo, b, hi)
    })
}

fn set() -> impl Strategy<Value = IntervalSet> {
    proptest::collection::vec(interval(), 0..4).prop_map(IntervalSet::from_parts)
}

fn probe() -> impl Strategy<Value = f64> {
    (-44i32..=44).prop_map(|n| n as f64 / 8.0)
}

fn braking_plant() -> PlantSpec {
    PlantSpec::new(
        "v",
        [
            ("Acl".into(), parse_rhs("(2 - v) * log(2)", "v").unwrap()),
            ("Brk".into(), parse_rhs("-0.5", "v").unwrap()),
        ],
    )
}

fn cruise_plant() -> PlantSpec {
    PlantSpec::new(
        "v",
        [("m1".into(), parse_rhs("0.02 * (-v + 19)", "v").unwrap())],
    )
}

fn threshold_sensor() -> SensorSpec {
    SensorSpec::parse(
        "v",
        "i",
        Interval::closed(-0.2, 0.2),
        &[("xs".into(), "v + i >= 1".into())],
    )
    .unwrap()
}

fn band_sensor() -> SensorSpec {
    let band = "v - i <= 0.25 && v - i >= -0.25";
    let unit = "v + 2 * i >= 0.5";
    SensorSpec::parse(
        "v",
        "i",
        Interval::closed(-1.0, 1.0),
        &[("near".into(), band.into()), ("up".into(), unit.into())],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn set_operations_are_pointwise(a in set(), b in set(), x in probe()) {
        prop_assert_eq!(a.union(&b).contains(x), a.contains(x) || b.contains(x));
        prop_assert_eq!(a.intersect(&b).contains(x), a.contains(x) && b.contains(x));
    }

    #[test]
    fn normalized_parts_are_disjoint_and_ordered(a in set()) {
        for w in a.parts().windows(2) {
            prop_assert!(w[0].hi < w[1].lo || (w[0].hi == w[1].lo && w[0].hi_open && w[1].lo_open));
        }
        prop_assert!(a.parts().iter().all(|p| !p.is_empty()));
    }

    #[test]
    fn text_roundtrip(a in set()) {
        let back: IntervalSet = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn volume_is_subadditive(a in set(), b in set()) {
        let (va, vb, vu) = (a.volume(), b.volume(), a.union(&b).volume());
        prop_assert!(vu <= va + vb || (va + vb).is_infinite());
        prop_assert!(a.intersect(&b).volume() <= va.min(vb));
    }

    #[test]
    fn braking_flow_matches_closed_form(x0 in 0.0f64..2.0) {
        let p = braking_plant();
        let acl = p.flow("Acl", x0, Direction::Forward).unwrap();
        prop_assert!((acl - (1.0 + x0 / 2.0)).abs() <= 1e-6);
        let brk = p.flow("Brk", x0, Direction::Forward).unwrap();
        prop_assert!((brk - (x0 - 0.5)).abs() <= 1e-9);
    }

    #[test]
    fn cruise_flow_matches_closed_form(x0 in -1.0f64..20.0) {
        let x1 = cruise_plant().flow("m1", x0, Direction::Forward).unwrap();
        let exact = 19.0 + (x0 - 19.0) * (-0.02f64).exp();
        prop_assert!((x1 - exact).abs() <= 1e-9);
    }

    #[test]
    fn reverse_flow_undoes_forward(x0 in 0.0f64..2.0, brake in any::<bool>()) {
        let p = braking_plant();
        let m = if brake { "Brk" } else { "Acl" };
        let x1 = p.flow(m, x0, Direction::Forward).unwrap();
        let back = p.flow(m, x1, Direction::Reverse).unwrap();
        prop_assert!((back - x0).abs() <= 1e-6);
    }

    #[test]
    fn flow_is_monotone(x in 0.0f64..2.0, y in 0.0f64..2.0) {
        let p = braking_plant();
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        for m in ["Acl", "Brk"] {
            let fl = p.flow(m, lo, Direction::Forward).unwrap();
            let fh = p.flow(m, hi, Direction::Forward).unwrap();
            prop_assert!(fl <= fh);
        }
    }

    #[test]
    fn interval_image_contains_pointwise_images(lo in 0.0f64..1.0, w in 0.0f64..1.0, t in 0.0f64..=1.0) {
        let p = braking_plant();
        let s = IntervalSet::closed(lo, lo + w);
        let x = lo + w * t;
        for m in ["Acl", "Brk"] {
            let img = p.flow_interval(m, &s, Direction::Forward).unwrap();
            let fx = p.flow(m, x, Direction::Forward).unwrap();
            prop_assert!(img.contains_within(fx, 1e-12), "{} {}", img, fx);
        }
    }

    #[test]
    fn readings_lie_in_their_preimage(x in -2.0f64..3.0, t in 0.0f64..=1.0, band in any::<bool>()) {
        let s = if band { band_sensor() } else { threshold_sensor() };
        let i = s.domain.lo + (s.domain.hi - s.domain.lo) * t;
        let out = s.sense_eval(x, i).unwrap();
        prop_assert!(s.preimage(&out).contains(x));
        prop_assert!(s.feasible_inputs(x, &out).unwrap().contains(i));
    }

    #[test]
    fn preimage_points_have_a_witness_input(x in -2.0f64..3.0, band in any::<bool>()) {
        let s = if band { band_sensor() } else { threshold_sensor() };
        let mut covered = false;
        for out in s.outputs() {
            let inside = s.preimage(&out).contains(x);
            let feasible = s.feasible_inputs(x, &out).unwrap();
            prop_assert_eq!(inside, !feasible.is_empty());
            if let Some(part) = feasible.largest() {
                covered = true;
                let i = part.midpoint();
                prop_assert_eq!(s.sense_eval(x, i).unwrap(), out);
            }
        }
        prop_assert!(covered);
    }
}
