//! Counting scalar differential invariants of `G`-structures.
//!
//! Invariants of order `r` of `G`-structures on an `n`-manifold correspond
//! to functions on the orbit space of the jet group `G^(r+1)_n` acting on
//! the fiber `J^r_0(R^n, Gl_n/G)`. This crate implements that action
//! concretely on truncated Taylor polynomials and measures the generic
//! orbit dimension numerically:
//!
//! - [`poly`]: truncated multivariate polynomials and jet composition
//! - [`group`]: the jet group, inversion, Lie-algebra basis
//! - [`chart`]: charts of `Gl_n/G` for the supported structure groups
//! - [`action`]: the prolonged action on section jets
//! - [`orbit`]: generator matrices, numerical rank, invariant counts
//! - [`bounds`]: the closed-form lower bound and its reference tables
//!
//! ```
//! use jetorbit::{Family, StructureGroupSpec};
//!
//! let metrics = StructureGroupSpec::new(Family::Orthogonal, 2).unwrap();
//! let report = jetorbit::orbit::estimate_invariant_count(&metrics, 2, 5, 42, 1e-9).unwrap();
//! // Gaussian curvature
//! assert_eq!(report.invariant_count, 1);
//! ```

pub mod action;
pub mod bounds;
pub mod chart;
pub mod error;
pub mod group;
pub mod linalg;
pub mod orbit;
pub mod poly;
pub mod scalar;

pub use action::{act_on_section, SectionJet};
pub use chart::{Family, StructureGroupSpec};
pub use error::{JetError, Result};
pub use group::JetGroupElement;
pub use orbit::OrbitReport;
pub use poly::{JetMap, MultiIndex, TruncatedPolynomial};
pub use scalar::{Dual, Scalar};
