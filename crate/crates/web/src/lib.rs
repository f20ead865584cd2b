//! Browser bindings. Each exported function takes plain arguments and
//! returns a JSON string, or an error message for the page to show.

use jetorbit::action::SectionJet;
use jetorbit::bounds::{bound_table, lower_bound};
use jetorbit::group::group_dimension;
use jetorbit::orbit::{estimate_invariant_count, sample_rank, sample_seed, DEFAULT_REL_TOL};
use jetorbit::{Family, StructureGroupSpec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Smaller than the CLI guard: the page runs on one thread.
pub const WEB_LIMIT: usize = 2_000_000;

fn spec(family: &str, n: usize) -> Result<StructureGroupSpec, String> {
    let family: Family = family
        .parse()
        .map_err(|e: jetorbit::JetError| e.to_string())?;
    StructureGroupSpec::new(family, n).map_err(|e| e.to_string())
}

fn guard(spec: &StructureGroupSpec, r: usize) -> Result<(), String> {
    let load = SectionJet::<f64>::flat_len(spec, r) * group_dimension(spec.n, r + 1);
    if load > WEB_LIMIT {
        return Err(format!(
            "n={} r={r} is too large for the browser ({load} > {WEB_LIMIT})",
            spec.n
        ));
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("value serializes")
}

pub fn table_json(family: &str, n_max: usize, r_max: usize) -> Result<String, String> {
    if !(1..=12).contains(&n_max) || !(1..=12).contains(&r_max) {
        return Err("n_max and r_max must lie in 1..=12".into());
    }
    let family: Family = family
        .parse()
        .map_err(|e: jetorbit::JetError| e.to_string())?;
    Ok(to_json(&bound_table(family, n_max, r_max)))
}

pub fn orbit_json(
    family: &str,
    n: usize,
    r: usize,
    samples: usize,
    seed: u64,
) -> Result<String, String> {
    let s = spec(family, n)?;
    guard(&s, r)?;
    let report = estimate_invariant_count(&s, r, samples, seed, DEFAULT_REL_TOL)
        .map_err(|e| e.to_string())?;
    Ok(to_json(&report))
}

#[derive(Serialize)]
struct Spectrum {
    fiber_dim: usize,
    group_dim: usize,
    rank: usize,
    bound: i64,
    gap: Option<f64>,
    rel_tol: f64,
    singular_values: Vec<f64>,
}

/// Singular values of the generator matrix at the first basepoint of a run
/// with `seed`.
pub fn spectrum_json(family: &str, n: usize, r: usize, seed: u64) -> Result<String, String> {
    let s = spec(family, n)?;
    guard(&s, r)?;
    let est =
        sample_rank(&s, r, sample_seed(seed, 0), DEFAULT_REL_TOL).map_err(|e| e.to_string())?;
    Ok(to_json(&Spectrum {
        fiber_dim: SectionJet::<f64>::flat_len(&s, r),
        group_dim: group_dimension(n, r + 1),
        rank: est.rank,
        bound: lower_bound(&s, r),
        gap: est.gap,
        rel_tol: DEFAULT_REL_TOL,
        singular_values: est.singular_values,
    }))
}

#[wasm_bindgen(js_name = boundTable)]
pub fn bound_table_js(family: &str, n_max: usize, r_max: usize) -> Result<String, JsError> {
    table_json(family, n_max, r_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = orbit)]
pub fn orbit_js(
    family: &str,
    n: usize,
    r: usize,
    samples: usize,
    seed: u32,
) -> Result<String, JsError> {
    orbit_json(family, n, r, samples, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = spectrum)]
pub fn spectrum_js(family: &str, n: usize, r: usize, seed: u32) -> Result<String, JsError> {
    spectrum_json(family, n, r, seed as u64).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn table() {
        let v = parse(&table_json("co", 6, 5).unwrap());
        assert_eq!(v["entries"].as_array().unwrap().len(), 30);
        assert_eq!(v["entries"][29]["value"], 3702);
        assert!(table_json("co", 0, 5).is_err());
        assert!(table_json("sp", 2, 2).is_err());
    }

    #[test]
    fn orbit() {
        let v = parse(&orbit_json("on", 2, 2, 5, 42).unwrap());
        assert_eq!(v["invariant_count"], 1);
        assert!(orbit_json("on", 2, 2, 1, 42).is_err());
    }

    #[test]
    fn spectrum_of_dagger_case() {
        let v = parse(&spectrum_json("on", 2, 2, 42).unwrap());
        let sv = v["singular_values"].as_array().unwrap();
        assert_eq!(sv.len(), 18);
        assert_eq!(v["rank"], 17);
        assert!(v["gap"].as_f64().unwrap() > 1e3);
    }

    #[test]
    fn large_runs_are_refused() {
        let e = orbit_json("on", 6, 4, 3, 1).unwrap_err();
        assert!(e.contains("too large"), "{e}");
    }
}
