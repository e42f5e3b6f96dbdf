#![no_main]

use libfuzzer_sys::fuzz_target;
use toric_gs::io::{parse_g_spec, weight_from_value, weight_to_value};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_g_spec(text) {
        assert_eq!(weight_from_value(&weight_to_value(&g)).expect("canonical form parses"), g);
    }
});
