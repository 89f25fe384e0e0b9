//! Regenerates the shipped synthetic benchmark:
//! `cargo run --example gen_synthetic -- [DIR] [SEED]`

use std::path::PathBuf;

use act_core::synthetic::{generate, SyntheticOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "data/synthetic".into()));
    let seed: u64 = args
        .next()
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(7);
    let bench = generate(&SyntheticOptions::new(seed)).expect("generation failed");
    bench.write_dir(&dir).expect("write failed");
    println!("wrote {}", dir.display());
}
