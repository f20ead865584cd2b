//! Closed-form lower bound on the number of invariants and the published
//! reference tables for metrics and conformal structures.
//!
//! A fiber of dimension `(n² − m)·C(n+r, n)` acted on by a group of
//! dimension `n·(C(n+r+1, n) − 1)` has quotient dimension at least the
//! difference, which is [`lower_bound`].

use serde::Serialize;

use crate::chart::{Family, StructureGroupSpec};
use crate::poly::binomial;

/// `(n² − m)·C(n+r, n) − n·C(n+r+1, n) + n` in exact integer arithmetic.
pub fn lower_bound(spec: &StructureGroupSpec, r: usize) -> i64 {
    let n = spec.n as u64;
    let d = spec.chart_dimension() as i128;
    let fiber = d * binomial(n + r as u64, n) as i128;
    let group = n as i128 * binomial(n + r as u64 + 1, n) as i128 - n as i128;
    i64::try_from(fiber - group).expect("bound fits in i64")
}

/// Rows `n = 1..=6`, columns `r = 1..=5`; `None` is a dash.
pub type ReferenceTable = [[Option<i64>; 5]; 6];

/// Minimum number of `O_n`-invariants, as published.
pub const ORTHOGONAL_TABLE: ReferenceTable = [
    [Some(0), Some(0), Some(0), Some(0), Some(0)],
    [None, Some(0), Some(2), Some(5), Some(9)],
    [None, Some(3), Some(18), Some(45), Some(87)],
    [None, Some(14), Some(74), Some(200), Some(424)],
    [None, Some(40), Some(215), Some(635), Some(1475)],
    [None, Some(90), Some(510), Some(1644), Some(4164)],
];

/// Minimum number of `CO_n`-invariants, as published.
pub const CONFORMAL_TABLE: ReferenceTable = [
    [None, None, None, None, None],
    [None, None, None, None, None],
    [None, None, None, Some(10), Some(31)],
    [None, None, Some(39), Some(130), Some(298)],
    [None, Some(19), Some(159), Some(509), Some(1223)],
    [None, Some(62), Some(426), Some(1434), Some(3702)],
];

/// The one published cell where the exact count exceeds the bound:
/// metrics on surfaces at order 2 (Gaussian curvature).
pub const DAGGER_CELL: (Family, usize, usize, i64) = (Family::Orthogonal, 2, 2, 1);

/// A bound as it is displayed: non-negative values are printed, negative
/// ones become a dash.
pub fn displayed(bound: i64) -> Option<i64> {
    (bound >= 0).then_some(bound)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub n: usize,
    pub r: usize,
    /// `null` for a dash.
    pub value: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTable {
    pub family: Family,
    pub n_max: usize,
    pub r_max: usize,
    pub entries: Vec<TableEntry>,
}

fn dagger_note(family: Family, n: usize, r: usize) -> Option<String> {
    let (f, dn, dr, exact) = DAGGER_CELL;
    (family == f && n == dn && r == dr).then(|| format!("exact count is {exact}"))
}

pub fn bound_table(family: Family, n_max: usize, r_max: usize) -> BoundTable {
    let mut entries = Vec::with_capacity(n_max * r_max);
    for n in 1..=n_max {
        let spec = StructureGroupSpec { family, n };
        for r in 1..=r_max {
            entries.push(TableEntry {
                n,
                r,
                value: displayed(lower_bound(&spec, r)),
                note: dagger_note(family, n, r),
            });
        }
    }
    BoundTable {
        family,
        n_max,
        r_max,
        entries,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = crate::error::JetError;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(crate::error::JetError::Config(format!(
                "unknown format '{other}'"
            ))),
        }
    }
}

pub fn render_table(family: Family, n_max: usize, r_max: usize, format: TableFormat) -> String {
    let table = bound_table(family, n_max, r_max);
    match format {
        TableFormat::Markdown => render_markdown(&table),
        TableFormat::Csv => render_csv(&table),
        TableFormat::Json => {
            let mut s = serde_json::to_string_pretty(&table).expect("table serializes");
            s.push('\n');
            s
        }
    }
}

fn render_markdown(table: &BoundTable) -> String {
    let mut out = String::new();
    out.push_str("| n\\r |");
    for r in 1..=table.r_max {
        out.push_str(&format!(" {r} |"));
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in 1..=table.r_max {
        out.push_str("---|");
    }
    out.push('\n');
    let mut notes = Vec::new();
    for row in table.entries.chunks(table.r_max.max(1)) {
        if row.is_empty() {
            continue;
        }
        out.push_str(&format!("| {} |", row[0].n));
        for e in row {
            let mut cell = e.value.map_or("-".to_string(), |v| v.to_string());
            if let Some(note) = &e.note {
                cell.push('†');
                notes.push(format!("† n={}, r={}: {note}", e.n, e.r));
            }
            out.push_str(&format!(" {cell} |"));
        }
        out.push('\n');
    }
    for note in notes {
        out.push('\n');
        out.push_str(&note);
        out.push('\n');
    }
    out
}

fn render_csv(table: &BoundTable) -> String {
    let mut out = String::from("family,n,r,value\n");
    for e in &table.entries {
        let v = e.value.map_or(String::new(), |v| v.to_string());
        out.push_str(&format!(
            "{},{},{},{}\n",
            table.family.short_name(),
            e.n,
            e.r,
            v
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub family: Family,
    pub n: usize,
    pub r: usize,
    pub expected: Option<i64>,
    pub computed: Option<i64>,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |v: Option<i64>| v.map_or("-".to_string(), |v| v.to_string());
        write!(
            f,
            "{} n={} r={}: table has {}, formula gives {}",
            self.family,
            self.n,
            self.r,
            show(self.expected),
            show(self.computed)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableVerification {
    pub cells: usize,
    pub mismatches: Vec<Mismatch>,
}

impl TableVerification {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Recomputes every cell of `expected` (rows `n = 1..`, columns `r = 1..`).
pub fn verify_table(family: Family, expected: &ReferenceTable) -> TableVerification {
    let mut mismatches = Vec::new();
    let mut cells = 0;
    for (i, row) in expected.iter().enumerate() {
        let spec = StructureGroupSpec { family, n: i + 1 };
        for (j, &want) in row.iter().enumerate() {
            cells += 1;
            let got = displayed(lower_bound(&spec, j + 1));
            if got != want {
                mismatches.push(Mismatch {
                    family,
                    n: i + 1,
                    r: j + 1,
                    expected: want,
                    computed: got,
                });
            }
        }
    }
    TableVerification { cells, mismatches }
}

/// Both reference tables against the formula.
pub fn verify_embedded_tables() -> TableVerification {
    let a = verify_table(Family::Orthogonal, &ORTHOGONAL_TABLE);
    let b = verify_table(Family::Conformal, &CONFORMAL_TABLE);
    TableVerification {
        cells: a.cells + b.cells,
        mismatches: a.mismatches.into_iter().chain(b.mismatches).collect(),
    }
}
