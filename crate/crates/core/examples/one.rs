//! Runs a single orbit estimation and prints the report as JSON.
//!
//! cargo run --release -p jetorbit-core --example one -- <family> <n> <r>

use jetorbit::orbit::{estimate_invariant_count, DEFAULT_REL_TOL};
use jetorbit::{Family, StructureGroupSpec};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args[0].parse().expect("family");
    let n: usize = args[1].parse().expect("n");
    let r: usize = args[2].parse().expect("r");
    let spec = StructureGroupSpec::new(family, n).expect("n >= 1");
    let start = std::time::Instant::now();
    let report = estimate_invariant_count(&spec, r, 5, 42, DEFAULT_REL_TOL).expect("estimate");
    println!("{}", serde_json::to_string(&report).expect("json"));
    eprintln!("{:.2}s", start.elapsed().as_secs_f64());
}
