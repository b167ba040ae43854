#![no_main]

use libfuzzer_sys::fuzz_target;
use sds_core::lang::{parse_controller, VarTable};

fuzz_target!(|src: &str| {
    let vars = VarTable::new(&["cnt", "y"], &["xs", "ys"], "xa", &["Acl", "Brk"]).unwrap();
    if let Ok(c) = parse_controller(src, &vars) {
        let printed = c.to_string();
        let again = parse_controller(&printed, &vars).expect("printed controller parses");
        assert_eq!(again.to_string(), printed);
    }
});
