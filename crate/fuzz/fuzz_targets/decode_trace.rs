#![no_main]

use libfuzzer_sys::fuzz_target;
use sds_core::trace::TraceFile;

fuzz_target!(|src: &str| {
    if let Ok(t) = TraceFile::decode(src) {
        let again = TraceFile::decode(&t.to_json()).expect("encoded trace decodes");
        assert_eq!(again, t);
    }
});
