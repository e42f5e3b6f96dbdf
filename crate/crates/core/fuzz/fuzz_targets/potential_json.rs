#![no_main]

use libfuzzer_sys::fuzz_target;
use toric_gs::io::{parse_potential, potential_from_value, potential_to_value};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(u) = parse_potential(text) {
        assert_eq!(potential_from_value(&potential_to_value(&u)).expect("canonical form parses"), u);
        let _ = u.check_admissible((-1.0, 1.0));
    }
});
