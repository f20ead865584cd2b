//! Prints invariant counts and singular gaps over a grid of configurations.
//!
//! cargo run --release -p jetorbit-core --example sweep -- [n_max] [r_max]

use std::time::Instant;

use jetorbit::orbit::{estimate_invariant_count, DEFAULT_REL_TOL};
use jetorbit::{Family, StructureGroupSpec};

fn main() {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let n_max = args.next().unwrap_or(3);
    let r_max = args.next().unwrap_or(3);
    println!("family  n  r  fiber  group  rank  count  bound  gap        ambiguous  secs");
    for family in Family::ALL {
        for n in 1..=n_max {
            for r in 0..=r_max {
                let spec = StructureGroupSpec::new(family, n).expect("n >= 1");
                let start = Instant::now();
                match estimate_invariant_count(&spec, r, 5, 42, DEFAULT_REL_TOL) {
                    Ok(rep) => println!(
                        "{:<7} {:>2} {:>2} {:>6} {:>6} {:>5} {:>6} {:>6}  {:<10} {:<10} {:.2}",
                        family.short_name(),
                        n,
                        r,
                        rep.fiber_dim,
                        rep.group_dim,
                        rep.rank,
                        rep.invariant_count,
                        rep.bound,
                        rep.singular_gap
                            .map_or("inf".to_string(), |g| format!("{g:.2e}")),
                        rep.ambiguous,
                        start.elapsed().as_secs_f64()
                    ),
                    Err(e) => println!("{:<7} {:>2} {:>2} error: {e}", family.short_name(), n, r),
                }
            }
        }
    }
}
