#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(prices) = eqlab::cli::parse_price_list(text) {
        // Accepted price vectors are the parser's contract: strictly
        // positive, finite, at least two entries.
        assert!(prices.len() >= 2);
        assert!(prices.values().iter().all(|p| *p > 0.0 && p.is_finite()));
    }
});
