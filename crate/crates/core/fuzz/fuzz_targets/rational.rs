#![no_main]

use libfuzzer_sys::fuzz_target;
use toric_gs::rational::{format_rational, parse_rational};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Some(q) = parse_rational(text) {
        let printed = format_rational(&q);
        if printed.len() <= toric_gs::rational::MAX_LITERAL_LEN {
            assert_eq!(parse_rational(&printed), Some(q));
        }
    }
});
