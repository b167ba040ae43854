#![no_main]

use libfuzzer_sys::fuzz_target;
use sds_core::interval::IntervalSet;

fuzz_target!(|src: &str| {
    if let Ok(s) = src.parse::<IntervalSet>() {
        let again: IntervalSet = s.to_string().parse().expect("printed set parses");
        assert_eq!(again, s);
    }
});
