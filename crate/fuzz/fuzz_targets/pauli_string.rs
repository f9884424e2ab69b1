#![no_main]

use libfuzzer_sys::fuzz_target;
use tricode_core::PauliOperator;

fuzz_target!(|data: &str| {
    if let Ok(p) = data.parse::<PauliOperator>() {
        // Display and parse round-trip.
        let back: PauliOperator = p.to_string().parse().expect("printed operator parses");
        assert_eq!(back, p);
        let _ = p.multiply(&p);
    }
});
