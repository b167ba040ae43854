#![no_main]

use libfuzzer_sys::fuzz_target;
use sds_core::plant::parse_rhs;

fuzz_target!(|src: &str| {
    if let Ok(e) = parse_rhs(src, "v") {
        let _ = e.eval(0.5, 1.0);
    }
});
