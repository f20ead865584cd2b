//! Charts for `Gl_n/G` and the left action of `Gl_n` in them.
//!
//! | family     | `G`              | chart                                 | action                         |
//! |------------|------------------|---------------------------------------|--------------------------------|
//! | Orthogonal | `O_n`            | SPD matrices `S` (upper triangle)     | `S ↦ A S Aᵀ`                   |
//! | Conformal  | `CO_n`           | SPD with `det S = 1`                  | `S ↦ A S Aᵀ / det(A S Aᵀ)^(1/n)` |
//! | Trivial    | `{I}`            | invertible `X` (row-major)            | `X ↦ A X`                      |
//! | Scalars    | `{kI : k ≠ 0}`   | `X` with `|det X| = 1`                | `X ↦ A X / |det(A X)|^(1/n)`   |
//!
//! Points are stored in *ambient* coordinates. For the two normalized
//! families the last ambient coordinate (`S_nn`, resp. `X_nn`) is determined
//! by the others through the determinant constraint, so the intrinsic chart
//! uses the first `n² − dim G` ambient coordinates.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{JetError, Result};
use crate::linalg::{condition_number, Matrix, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Metrics, `G = O_n`.
    #[serde(rename = "on")]
    Orthogonal,
    /// Conformal structures, `G = CO_n`.
    #[serde(rename = "co")]
    Conformal,
    /// Parallelizations, `G = {I}`.
    #[serde(rename = "id")]
    Trivial,
    /// Fields of projective frames, `G = {kI : k ≠ 0}`.
    #[serde(rename = "scalar")]
    Scalars,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Orthogonal,
        Family::Conformal,
        Family::Trivial,
        Family::Scalars,
    ];

    /// Command-line name.
    pub fn short_name(self) -> &'static str {
        match self {
            Family::Orthogonal => "on",
            Family::Conformal => "co",
            Family::Trivial => "id",
            Family::Scalars => "scalar",
        }
    }

    fn symmetric(self) -> bool {
        matches!(self, Family::Orthogonal | Family::Conformal)
    }

    fn normalized(self) -> bool {
        matches!(self, Family::Conformal | Family::Scalars)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Family {
    type Err = JetError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "on" | "o" | "orthogonal" => Ok(Family::Orthogonal),
            "co" | "conformal" => Ok(Family::Conformal),
            "id" | "trivial" => Ok(Family::Trivial),
            "scalar" | "scalars" => Ok(Family::Scalars),
            other => Err(JetError::Config(format!("unknown family '{other}'"))),
        }
    }
}

/// A structure group `G ⊂ Gl_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StructureGroupSpec {
    pub family: Family,
    pub n: usize,
}

impl StructureGroupSpec {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(JetError::Config("dimension n must be at least 1".into()));
        }
        Ok(StructureGroupSpec { family, n })
    }

    /// `dim G`.
    pub fn group_dim(&self) -> usize {
        let n = self.n;
        match self.family {
            Family::Orthogonal => n * (n - 1) / 2,
            Family::Conformal => n * (n - 1) / 2 + 1,
            Family::Trivial => 0,
            Family::Scalars => 1,
        }
    }

    /// `dim Gl_n/G = n² − dim G`.
    pub fn chart_dimension(&self) -> usize {
        self.n * self.n - self.group_dim()
    }

    /// Number of stored coordinates per point.
    pub fn ambient_dimension(&self) -> usize {
        if self.family.symmetric() {
            self.n * (self.n + 1) / 2
        } else {
            self.n * self.n
        }
    }

    /// `(row, col)` of each ambient coordinate.
    pub fn ambient_layout(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        if self.family.symmetric() {
            (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
        } else {
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
        }
    }
}

impl fmt::Display for StructureGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={})", self.family, self.n)
    }
}

/// A point of the chart in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint<T> {
    pub coords: Vec<T>,
}

impl<T: Ring> ChartPoint<T> {
    pub fn new(spec: &StructureGroupSpec, coords: Vec<T>) -> Result<Self> {
        if coords.len() != spec.ambient_dimension() {
            return Err(JetError::Length {
                expected: spec.ambient_dimension(),
                got: coords.len(),
            });
        }
        Ok(ChartPoint { coords })
    }

    pub fn to_matrix(&self, spec: &StructureGroupSpec) -> Matrix<T> {
        let n = spec.n;
        let zero = self.coords[0].zero_like();
        let mut m = Matrix::from_rows(n, vec![zero; n * n]);
        for ((i, j), c) in spec.ambient_layout().into_iter().zip(&self.coords) {
            m.set(i, j, c.clone());
            if spec.family.symmetric() && i != j {
                m.set(j, i, c.clone());
            }
        }
        m
    }

    pub fn from_matrix(spec: &StructureGroupSpec, m: &Matrix<T>) -> Self {
        let coords = spec
            .ambient_layout()
            .into_iter()
            .map(|(i, j)| m.get(i, j).clone())
            .collect();
        ChartPoint { coords }
    }
}

/// Left action of `a ∈ Gl_n` on a chart point.
pub fn pointwise_action<T: Ring>(
    spec: &StructureGroupSpec,
    a: &Matrix<T>,
    p: &ChartPoint<T>,
) -> Result<ChartPoint<T>> {
    if a.dim() != spec.n {
        return Err(JetError::Length {
            expected: spec.n,
            got: a.dim(),
        });
    }
    if a.lead_matrix().determinant() == 0.0 {
        return Err(JetError::Domain("acting matrix is singular".into()));
    }
    let x = p.to_matrix(spec);
    let moved = if spec.family.symmetric() {
        a.mul(&x).mul(&a.transpose())
    } else {
        a.mul(&x)
    };
    let moved = match spec.family {
        Family::Orthogonal | Family::Trivial => moved,
        Family::Conformal => {
            let factor = moved.det()?.pow_real(-1.0 / spec.n as f64)?;
            moved.scale_by(&factor)
        }
        Family::Scalars => {
            let factor = moved.det()?.signed_abs()?.pow_real(-1.0 / spec.n as f64)?;
            moved.scale_by(&factor)
        }
    };
    Ok(ChartPoint::from_matrix(spec, &moved))
}

/// How far a real point is from satisfying its chart constraint: for the
/// normalized families `| |det| − 1 |`, otherwise 0 if the point is
/// admissible (SPD resp. invertible) and infinity if not.
pub fn constraint_residual(spec: &StructureGroupSpec, p: &ChartPoint<f64>) -> f64 {
    let m = p.to_matrix(spec).lead_matrix();
    let det = m.determinant();
    let admissible = if spec.family.symmetric() {
        m.clone().cholesky().is_some()
    } else {
        det != 0.0
    };
    if !admissible {
        return f64::INFINITY;
    }
    if spec.family.normalized() {
        (det.abs() - 1.0).abs()
    } else {
        0.0
    }
}

/// Off-diagonal half-width for SPD sampling; keeps Gershgorin discs of
/// `I + sym` at least 0.1 away from zero for any `n`.
pub(crate) fn offdiag_halfwidth(n: usize) -> f64 {
    if n <= 3 {
        0.3
    } else {
        0.6 / (n - 1) as f64
    }
}

/// Random admissible chart point near the identity.
pub fn random_chart_point(spec: &StructureGroupSpec, seed: u64) -> ChartPoint<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_chart_point_with(spec, &mut rng)
}

pub(crate) fn random_chart_point_with(
    spec: &StructureGroupSpec,
    rng: &mut impl Rng,
) -> ChartPoint<f64> {
    let n = spec.n;
    let m: Matrix<f64> = if spec.family.symmetric() {
        let w = offdiag_halfwidth(n);
        let mut m = Matrix::from_rows(n, vec![0.0; n * n]);
        for i in 0..n {
            m.set(i, i, 1.0 + rng.gen_range(-0.3..0.3));
            for j in i + 1..n {
                let v = rng.gen_range(-w..w);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    } else {
        loop {
            let entries: Vec<f64> = (0..n * n)
                .map(|k| {
                    let base = if k / n == k % n { 1.0 } else { 0.0 };
                    base + rng.gen_range(-0.3..0.3)
                })
                .collect();
            let cand = Matrix::from_rows(n, entries);
            let lead = cand.lead_matrix();
            if condition_number(&lead) < 50.0 && lead.determinant() > 0.0 {
                break cand;
            }
        }
    };
    let m = if spec.family.normalized() {
        let det = m.det().expect("cofactor determinant");
        m.scale_by(&det.abs().powf(-1.0 / n as f64))
    } else {
        m
    };
    ChartPoint::from_matrix(spec, &m)
}
