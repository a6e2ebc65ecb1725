#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(economy) = eqlab::Economy::from_json_str(text) {
        // Parsed economies must survive validation and re-serialization
        // without panicking, whatever the field values are.
        let _ = eqlab::validate_economy(&economy);
        let round = economy.to_json_string();
        let _ = eqlab::Economy::from_json_str(&round);
    }
});
