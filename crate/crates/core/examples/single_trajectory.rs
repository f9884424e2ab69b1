//! Times one trajectory: `cargo run --release --example single_trajectory -- 16 0.85`.

use std::time::Instant;

use tricode_core::circuit::{Circuit, CircuitConfig};
use tricode_core::regions::preset;
use tricode_core::Lattice;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let l: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(16);
    let p_g: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.85);
    let lat = Lattice::new(l, l).expect("lattice");
    let regions = preset(&lat, "default").expect("regions");
    let cfg = CircuitConfig::new(l, l, 1.0 - p_g, 0.0, p_g);
    let circuit = Circuit::new(cfg, regions).expect("circuit");
    for id in 0..3 {
        let start = Instant::now();
        let r = circuit.run_trajectory(id).expect("trajectory");
        println!("trajectory {id}: {:?} in {:.3}s", r.mean, start.elapsed().as_secs_f64());
    }
}
