#![no_main]

use libfuzzer_sys::fuzz_target;
use toric_gs::io::RunInputs;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inputs) = RunInputs::parse(text) {
        let again = RunInputs::from_value(&inputs.to_value()).expect("canonical form parses");
        assert_eq!(again, inputs);
    }
});
