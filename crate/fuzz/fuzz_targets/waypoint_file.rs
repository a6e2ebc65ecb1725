#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(waypoints) = eqlab::cli::parse_waypoints(text) {
        assert!(!waypoints.is_empty());
        // Waypoint lists that also satisfy the path invariants must build
        // without panicking.
        let _ = eqlab::PricePath::new(waypoints);
    }
});
