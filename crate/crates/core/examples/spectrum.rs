//! Prints the singular values of one generator matrix.
//!
//! cargo run --release -p jetorbit-core --example spectrum -- <family> <n> <r> [seed]

use jetorbit::orbit::{sample_rank, DEFAULT_REL_TOL};
use jetorbit::{Family, StructureGroupSpec};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args
        .first()
        .map_or("on", String::as_str)
        .parse()
        .expect("family");
    let n: usize = args.get(1).map_or(Ok(2), |s| s.parse()).expect("n");
    let r: usize = args.get(2).map_or(Ok(2), |s| s.parse()).expect("r");
    let seed: u64 = args.get(3).map_or(Ok(42), |s| s.parse()).expect("seed");
    let spec = StructureGroupSpec::new(family, n).expect("n >= 1");
    let est = sample_rank(&spec, r, seed, DEFAULT_REL_TOL).expect("generator matrix");
    println!(
        "rank {} gap {:?} ambiguous {}",
        est.rank, est.gap, est.ambiguous
    );
    for (i, s) in est.singular_values.iter().enumerate() {
        println!("{:>4} {s:.6e}", i + 1);
    }
}
