#![no_main]

use libfuzzer_sys::fuzz_target;
use toric_gs::io::PolytopeInput;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(input) = PolytopeInput::parse(text) {
        let again = PolytopeInput::from_value(&input.to_value()).expect("canonical form parses");
        assert_eq!(again, input);
        if let Ok(p) = input.build() {
            assert!(p.volume_f64() > 0.0);
        }
    }
});
