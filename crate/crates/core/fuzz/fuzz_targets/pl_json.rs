#![no_main]

use libfuzzer_sys::fuzz_target;
use toric_gs::io::{parse_pl, pl_from_value, pl_to_value};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_pl(text) {
        assert_eq!(pl_from_value(&pl_to_value(&f)).expect("canonical form parses"), f);
    }
});
