#![no_main]

use libfuzzer_sys::fuzz_target;
use sds_core::problem::parse_problem;

fuzz_target!(|src: &str| {
    let _ = parse_problem(src);
});
