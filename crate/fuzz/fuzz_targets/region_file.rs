#![no_main]

use libfuzzer_sys::fuzz_target;
use tricode_core::regions::parse_region_file;
use tricode_core::{KpRegions, Lattice};

fuzz_target!(|data: &str| {
    let Ok(centers) = parse_region_file(data) else {
        return;
    };
    let lat = Lattice::new(12, 12).unwrap();
    if let Ok(kp) = KpRegions::from_centers(&lat, &centers) {
        kp.validate(&lat).expect("built regions validate");
    }
});
