//! Plumbing behind the `jetorbit` binary: the orbit acceptance set used by
//! `verify`, the resource guard, and the JSON-lines ledger.

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;

use jetorbit::action::SectionJet;
use jetorbit::bounds::{
    verify_table, ReferenceTable, TableVerification, CONFORMAL_TABLE, ORTHOGONAL_TABLE,
};
use jetorbit::group::group_dimension;
use jetorbit::orbit::{estimate_invariant_count, DEFAULT_REL_TOL};
use jetorbit::{Family, OrbitReport, StructureGroupSpec};
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest `fiber_dim · group_dim` an orbit run accepts without `--force`.
pub const RESOURCE_LIMIT: u128 = 10_000_000;

pub const VERIFY_SAMPLES: usize = 5;
pub const VERIFY_SEED: u64 = 42;

/// What an orbit check demands of `invariant_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Exactly(i64),
    EqualsBound,
    AtLeast(i64),
}

#[derive(Debug, Clone, Copy)]
pub struct OrbitCheck {
    pub family: Family,
    pub n: usize,
    pub r: usize,
    pub expect: Expect,
}

pub const ORBIT_CHECKS: [OrbitCheck; 6] = [
    OrbitCheck {
        family: Family::Orthogonal,
        n: 2,
        r: 2,
        expect: Expect::Exactly(1),
    },
    OrbitCheck {
        family: Family::Orthogonal,
        n: 2,
        r: 3,
        expect: Expect::Exactly(2),
    },
    OrbitCheck {
        family: Family::Orthogonal,
        n: 3,
        r: 2,
        expect: Expect::Exactly(3),
    },
    OrbitCheck {
        family: Family::Trivial,
        n: 2,
        r: 1,
        expect: Expect::Exactly(2),
    },
    OrbitCheck {
        family: Family::Trivial,
        n: 2,
        r: 2,
        expect: Expect::EqualsBound,
    },
    OrbitCheck {
        family: Family::Conformal,
        n: 3,
        r: 4,
        expect: Expect::AtLeast(10),
    },
];

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub check: OrbitCheck,
    /// `Err` holds the error message of a failed estimation.
    pub report: Result<OrbitReport, String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        let Ok(report) = &self.report else {
            return false;
        };
        if report.ambiguous {
            return false;
        }
        let c = report.invariant_count;
        match self.check.expect {
            Expect::Exactly(v) => c == v,
            Expect::EqualsBound => c == report.bound,
            Expect::AtLeast(v) => c >= v,
        }
    }

    pub fn describe(&self) -> String {
        let c = &self.check;
        let want = match c.expect {
            Expect::Exactly(v) => format!("= {v}"),
            Expect::EqualsBound => "= bound".to_string(),
            Expect::AtLeast(v) => format!(">= {v}"),
        };
        let got = match &self.report {
            Ok(r) if r.ambiguous => format!("{} (ambiguous)", r.invariant_count),
            Ok(r) => format!("{} (bound {})", r.invariant_count, r.bound),
            Err(e) => format!("error: {e}"),
        };
        let status = if self.passed() { "ok" } else { "FAIL" };
        format!(
            "orbit {} n={} r={}: {got}, want {want}: {status}",
            c.family.short_name(),
            c.n,
            c.r
        )
    }
}

pub fn run_orbit_checks() -> Vec<CheckOutcome> {
    ORBIT_CHECKS
        .iter()
        .map(|&check| {
            let spec = StructureGroupSpec {
                family: check.family,
                n: check.n,
            };
            let report = estimate_invariant_count(
                &spec,
                check.r,
                VERIFY_SAMPLES,
                VERIFY_SEED,
                DEFAULT_REL_TOL,
            )
            .map_err(|e| e.to_string());
            CheckOutcome { check, report }
        })
        .collect()
}

/// Reference tables in the layout of [`ReferenceTable`], `null` for a dash.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct References {
    pub orthogonal: ReferenceTable,
    pub conformal: ReferenceTable,
}

impl Default for References {
    fn default() -> Self {
        References {
            orthogonal: ORTHOGONAL_TABLE,
            conformal: CONFORMAL_TABLE,
        }
    }
}

impl References {
    pub fn verify(&self) -> TableVerification {
        let a = verify_table(Family::Orthogonal, &self.orthogonal);
        let b = verify_table(Family::Conformal, &self.conformal);
        TableVerification {
            cells: a.cells + b.cells,
            mismatches: a.mismatches.into_iter().chain(b.mismatches).collect(),
        }
    }
}

/// `fiber_dim · group_dim` of an orbit run at `(spec, r)`.
pub fn workload(spec: &StructureGroupSpec, r: usize) -> u128 {
    SectionJet::<f64>::flat_len(spec, r) as u128 * group_dimension(spec.n, r + 1) as u128
}

#[derive(Serialize)]
struct LedgerLine<'a> {
    #[serde(flatten)]
    report: &'a OrbitReport,
    timestamp: String,
    version: &'static str,
}

/// One ledger line for `report`, without the trailing newline.
pub fn ledger_line(report: &OrbitReport, timestamp: String) -> String {
    serde_json::to_string(&LedgerLine {
        report,
        timestamp,
        version: VERSION,
    })
    .expect("report serializes")
}

/// Appends `report` to the JSON-lines file at `path`.
///
/// The line goes out in a single `write` on an `O_APPEND` descriptor, so
/// concurrent writers do not interleave within a line.
pub fn ledger_append(report: &OrbitReport, path: &Path) -> io::Result<()> {
    let stamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
    let mut line = ledger_line(report, stamp);
    line.push('\n');
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    file.write_all(line.as_bytes())?;
    file.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workload_of_dagger_case() {
        let s = StructureGroupSpec {
            family: Family::Orthogonal,
            n: 2,
        };
        assert_eq!(workload(&s, 2), 18 * 18);
        let big = StructureGroupSpec {
            family: Family::Orthogonal,
            n: 6,
        };
        assert!(workload(&big, 5) > RESOURCE_LIMIT);
        assert!(workload(&big, 2) <= RESOURCE_LIMIT);
    }

    #[test]
    fn ledger_line_keeps_report_fields_first() {
        let s = StructureGroupSpec {
            family: Family::Trivial,
            n: 1,
        };
        let report = estimate_invariant_count(&s, 1, 3, 1, DEFAULT_REL_TOL).unwrap();
        let line = ledger_line(&report, "2026-01-01T00:00:00.000Z".into());
        assert!(
            line.starts_with("{\"family\":\"id\",\"n\":1,\"r\":1,"),
            "{line}"
        );
        assert!(line.ends_with(&format!(
            ",\"timestamp\":\"2026-01-01T00:00:00.000Z\",\"version\":\"{VERSION}\"}}"
        )));
        assert!(!line.contains('\n'));
    }

    #[test]
    fn embedded_references_round_trip() {
        let refs = References::default();
        let back: References =
            serde_json::from_str(&serde_json::to_string(&refs).unwrap()).unwrap();
        assert!(back.verify().passed());
        assert_eq!(back.verify().cells, 60);
    }
}
