#![no_main]

use libfuzzer_sys::fuzz_target;
use sds_core::lang::{parse_formula, VarTable};

fuzz_target!(|src: &str| {
    let vars = VarTable::new(&["cnt", "y"], &["xs", "ys"], "xa", &["Acl", "Brk"]).unwrap();
    if let Ok(f) = parse_formula(src, &vars) {
        let again = parse_formula(&f.to_string(), &vars).expect("printed formula parses");
        assert_eq!(again, f);
    }
});
