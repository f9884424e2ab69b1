#![no_main]

use libfuzzer_sys::fuzz_target;
use tricode_cli::spec::{ExperimentSpec, Grid, LoadedSpec};

fuzz_target!(|data: &str| {
    let Ok(spec) = ExperimentSpec::from_json(data) else {
        return;
    };
    // Skip inputs that only ask for a huge amount of work.
    let big_grid = matches!(spec.grid, Some(Grid::Range { count, .. }) if count > 10_000);
    if spec.sizes.len() > 64 || big_grid {
        return;
    }
    if let Ok(cells) = spec.line_cells() {
        for c in cells {
            let sum = c.p_x + c.p_z + c.p_g;
            assert!((sum - 1.0).abs() <= 1e-9, "{c:?}");
        }
    }
    if spec.resolution <= 64 {
        let _ = spec.phase_cells();
    }
    if let Ok(loaded) = LoadedSpec::from_spec(spec) {
        let _ = loaded.hash();
    }
});
