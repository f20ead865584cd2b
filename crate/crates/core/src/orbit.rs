//! Generic orbit dimension of the jet-group action on the fiber, and the
//! resulting count of functionally independent differential invariants.
//!
//! At a basepoint `μ` the orbit map `g ↦ g·μ` is linearized by pushing each
//! Lie-algebra basis vector through the action over [`Dual`] scalars. The
//! resulting tangent vectors are the columns of the generator matrix; its
//! numerical rank at a generic basepoint is the dimension of the maximal
//! orbits, and `fiber_dim − rank` is the invariant count.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::{act_on_section, SectionJet};
use crate::bounds::lower_bound;
use crate::chart::{random_chart_point_with, ChartPoint, Family, StructureGroupSpec};
use crate::error::{JetError, Result};
use crate::group::{
    group_dimension, lie_basis, perturbed_identity, shifted_identity, LieGeneratorIndex,
};
use crate::linalg::Ring;
use crate::poly::{Basis, JetMap, TruncatedPolynomial};
use crate::scalar::Dual;

/// Default relative singular-value cutoff.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Gap `σ_rank / σ_(rank+1)` below which a rank is flagged as ambiguous.
pub const GAP_THRESHOLD: f64 = 1e3;

pub const CAVEAT: &str = "invariant_count = fiber_dim - generic orbit dimension; identifying it \
with the number of functionally independent differential invariants assumes the union of maximal \
orbits has a manifold quotient (conjectural)";

/// Tangent vectors of the orbit map at a basepoint, one column per
/// Lie-algebra generator.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    pub matrix: DMatrix<f64>,
    pub basepoint: SectionJet<f64>,
}

impl GeneratorMatrix {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// Random basepoint jet: admissible constant term near the identity,
/// higher coefficients `U(−1, 1) / degree!`. For the normalized families
/// the jet is rescaled by `|det|^(−1/n)` so the constraint holds to order
/// `r` as a jet identity.
pub fn random_section(spec: &StructureGroupSpec, order: usize, seed: u64) -> SectionJet<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_section_with(spec, order, &mut rng)
}

fn random_section_with(
    spec: &StructureGroupSpec,
    order: usize,
    rng: &mut impl Rng,
) -> SectionJet<f64> {
    let n = spec.n;
    let base = random_chart_point_with(spec, rng);
    let basis = Basis::get(n, order);
    let comps: Vec<TruncatedPolynomial<f64>> = base
        .coords
        .iter()
        .map(|&c0| {
            let mut coeffs = vec![0.0; basis.len()];
            coeffs[0] = c0;
            for d in 1..=order {
                let scale = 1.0 / factorial(d);
                for k in basis.degree_range(d) {
                    coeffs[k] = rng.gen_range(-1.0..1.0) * scale;
                }
            }
            TruncatedPolynomial::from_coeffs(n, order, coeffs).expect("basis length")
        })
        .collect();
    let comps = match spec.family {
        Family::Orthogonal | Family::Trivial => comps,
        Family::Conformal | Family::Scalars => {
            let m = ChartPoint { coords: comps }.to_matrix(spec);
            let factor = m
                .det()
                .and_then(|d| d.signed_abs())
                .and_then(|d| d.pow_real(-1.0 / n as f64))
                .expect("base point is admissible");
            ChartPoint::from_matrix(spec, &m.scale_by(&factor)).coords
        }
    };
    SectionJet::new(*spec, JetMap::new(n, order, comps)).expect("shape matches spec")
}

/// `d/dε|₀ (id + ε x^α e_i) · μ` in flattened fiber coordinates.
pub fn infinitesimal_generator(
    generator: &LieGeneratorIndex,
    mu: &SectionJet<f64>,
) -> Result<Vec<f64>> {
    let n = mu.spec().n;
    let g = perturbed_identity(generator, n, mu.order() + 1);
    let mu_dual = mu.map_scalars(Dual::constant);
    let moved = act_on_section(&g, &mu_dual)?;
    Ok(moved.flatten().into_iter().map(|d| d.eps).collect())
}

/// Central finite-difference approximation of [`infinitesimal_generator`]
/// using only real arithmetic.
pub fn finite_difference_generator(
    generator: &LieGeneratorIndex,
    mu: &SectionJet<f64>,
    h: f64,
) -> Result<Vec<f64>> {
    let n = mu.spec().n;
    let r = mu.order() + 1;
    let plus = act_on_section(&shifted_identity(generator, n, r, h), mu)?.flatten();
    let minus = act_on_section(&shifted_identity(generator, n, r, -h), mu)?.flatten();
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect())
}

/// `‖a − b‖ / max(‖a‖, 1)`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / norm.max(1.0)
}

pub fn build_generator_matrix(mu: &SectionJet<f64>) -> Result<GeneratorMatrix> {
    let spec = mu.spec();
    let r = mu.order();
    let gens = lie_basis(spec.n, r + 1);
    let rows = SectionJet::<f64>::flat_len(spec, r);
    let columns = compute_columns(&gens, mu)?;
    let matrix = DMatrix::from_fn(rows, gens.len(), |i, j| columns[j][i]);
    Ok(GeneratorMatrix {
        matrix,
        basepoint: mu.clone(),
    })
}

#[cfg(feature = "parallel")]
fn compute_columns(gens: &[LieGeneratorIndex], mu: &SectionJet<f64>) -> Result<Vec<Vec<f64>>> {
    use rayon::prelude::*;
    gens.par_iter()
        .map(|g| infinitesimal_generator(g, mu))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn compute_columns(gens: &[LieGeneratorIndex], mu: &SectionJet<f64>) -> Result<Vec<Vec<f64>>> {
    gens.iter()
        .map(|g| infinitesimal_generator(g, mu))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEstimate {
    pub rank: usize,
    /// `σ_rank / max(σ_(rank+1), ε·σ_max)`, ε being machine epsilon, so
    /// the gap stays finite; `None` when there is no trailing singular
    /// value (full rank, or the zero matrix).
    pub gap: Option<f64>,
    pub ambiguous: bool,
    /// Descending.
    pub singular_values: Vec<f64>,
}

/// Rank from singular values: count of `σ_i >= rel_tol · σ_max`.
pub fn rank_from_singular_values(mut sv: Vec<f64>, rel_tol: f64) -> RankEstimate {
    sv.sort_by(|a, b| b.total_cmp(a));
    let max = sv.first().copied().unwrap_or(0.0);
    let rank = if max > 0.0 {
        sv.iter().take_while(|&&s| s >= rel_tol * max).count()
    } else {
        0
    };
    let gap = if rank == 0 || rank == sv.len() {
        None
    } else {
        Some(sv[rank - 1] / sv[rank].max(f64::EPSILON * max))
    };
    let ambiguous = gap.is_some_and(|g| g < GAP_THRESHOLD);
    RankEstimate {
        rank,
        gap,
        ambiguous,
        singular_values: sv,
    }
}

pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> RankEstimate {
    if m.nrows() == 0 || m.ncols() == 0 {
        return rank_from_singular_values(Vec::new(), rel_tol);
    }
    rank_from_singular_values(
        m.clone().singular_values().iter().copied().collect(),
        rel_tol,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub family: Family,
    pub n: usize,
    pub r: usize,
    pub fiber_dim: usize,
    pub group_dim: usize,
    pub rank: usize,
    pub invariant_count: i64,
    pub bound: i64,
    /// Smallest gap among samples attaining the maximal rank; `null` when
    /// those matrices have no trailing singular values.
    pub singular_gap: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub ambiguous: bool,
    pub caveat: String,
    #[serde(default)]
    pub sample_ranks: Vec<usize>,
}

/// Seed of the `index`-th basepoint of a run.
pub fn sample_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Rank estimate over a single basepoint.
pub fn sample_rank(
    spec: &StructureGroupSpec,
    order: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<RankEstimate> {
    let mu = random_section(spec, order, seed);
    let gm = build_generator_matrix(&mu)?;
    Ok(numerical_rank(&gm.matrix, rel_tol))
}

/// Generic orbit dimension as the maximum rank over `samples` random
/// basepoints.
///
/// The report is ambiguous when the maximal rank is attained only once or
/// when any sample attaining it has a singular gap below
/// [`GAP_THRESHOLD`].
pub fn estimate_invariant_count(
    spec: &StructureGroupSpec,
    order: usize,
    samples: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<OrbitReport> {
    if samples < 3 {
        return Err(JetError::Config(format!(
            "at least 3 samples are needed, got {samples}"
        )));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(JetError::Config(format!(
            "rel_tol must lie in (0, 1), got {rel_tol}"
        )));
    }
    let estimates: Vec<RankEstimate> = (0..samples)
        .map(|i| sample_rank(spec, order, sample_seed(seed, i), rel_tol))
        .collect::<Result<_>>()?;
    let rank = estimates.iter().map(|e| e.rank).max().unwrap_or(0);
    let retained: Vec<&RankEstimate> = estimates.iter().filter(|e| e.rank == rank).collect();
    let ambiguous = retained.len() < 2 || retained.iter().any(|e| e.ambiguous);
    let singular_gap = retained
        .iter()
        .filter_map(|e| e.gap)
        .min_by(|a, b| a.total_cmp(b));

    let fiber_dim = SectionJet::<f64>::flat_len(spec, order);
    let invariant_count = fiber_dim as i64 - rank as i64;
    let bound = lower_bound(spec, order);
    if bound >= 0 && invariant_count < bound {
        return Err(JetError::BoundViolation {
            count: invariant_count,
            bound,
        });
    }
    Ok(OrbitReport {
        family: spec.family,
        n: spec.n,
        r: order,
        fiber_dim,
        group_dim: group_dimension(spec.n, order + 1),
        rank,
        invariant_count,
        bound,
        singular_gap,
        samples,
        seed,
        ambiguous,
        caveat: CAVEAT.to_string(),
        sample_ranks: estimates.iter().map(|e| e.rank).collect(),
    })
}

/// Largest relative error between dual-number and finite-difference
/// generator columns over `columns` randomly chosen generators.
pub fn dual_vs_finite_difference(
    spec: &StructureGroupSpec,
    order: usize,
    columns: usize,
    seed: u64,
    h: f64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = random_section_with(spec, order, &mut rng);
    let gens = lie_basis(spec.n, order + 1);
    let mut worst = 0.0f64;
    for _ in 0..columns {
        let g = &gens[rng.gen_range(0..gens.len())];
        let exact = infinitesimal_generator(g, &mu)?;
        let approx = finite_difference_generator(g, &mu, h)?;
        worst = worst.max(relative_error(&exact, &approx));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::LieGeneratorIndex;
    use crate::poly::MultiIndex;

    fn spec(f: Family, n: usize) -> StructureGroupSpec {
        StructureGroupSpec::new(f, n).unwrap()
    }

    #[test]
    fn rank_threshold_arithmetic() {
        let e = rank_from_singular_values(vec![1e-12, 1.0, 1e-3], 1e-9);
        assert_eq!(e.rank, 2);
        let gap = e.gap.unwrap();
        assert!((gap / 1e9 - 1.0).abs() < 1e-9);
        assert!(!e.ambiguous);

        let zero = numerical_rank(&DMatrix::zeros(4, 3), 1e-9);
        assert_eq!(zero.rank, 0);

        let id = numerical_rank(&DMatrix::identity(5, 5), 1e-9);
        assert_eq!(id.rank, 5);
        assert_eq!(id.gap, None);

        let vague = rank_from_singular_values(vec![1.0, 1e-8], 1e-9);
        assert_eq!(vague.rank, 2);
        let vague = rank_from_singular_values(vec![1.0, 2e-9, 5e-10], 1e-9);
        assert_eq!(vague.rank, 2);
        assert!(vague.ambiguous);
    }

    #[test]
    fn scaling_generator_on_a_point_metric() {
        // n = 1, r = 0: (1+ε)x scales Dξ by 1+ε, so s ↦ (1+ε)² s, ε-part 2s.
        let s = spec(Family::Orthogonal, 1);
        let p = ChartPoint::new(&s, vec![1.7]).unwrap();
        let mu = SectionJet::constant(s, 0, &p).unwrap();
        let g = LieGeneratorIndex {
            component: 0,
            alpha: MultiIndex::new(vec![1]),
        };
        let col = infinitesimal_generator(&g, &mu).unwrap();
        assert_eq!(col.len(), 1);
        assert!((col[0] - 3.4).abs() < 1e-14);
    }

    #[test]
    fn dual_matches_finite_differences() {
        for f in Family::ALL {
            for n in 1..=3 {
                for r in 0..=2 {
                    let err = dual_vs_finite_difference(&spec(f, n), r, 10, 7, 1e-4).unwrap();
                    assert!(err < 1e-6, "{f} n={n} r={r}: {err:e}");
                }
            }
        }
    }

    #[test]
    fn top_degree_generator_on_constant_metric() {
        // Checked against finite differences rather than asserted zero.
        let s = spec(Family::Orthogonal, 2);
        let p = crate::chart::random_chart_point(&s, 11);
        let mu = SectionJet::constant(s, 1, &p).unwrap();
        for g in lie_basis(2, 2).iter().filter(|g| g.alpha.degree() == 2) {
            let exact = infinitesimal_generator(g, &mu).unwrap();
            let approx = finite_difference_generator(g, &mu, 1e-4).unwrap();
            assert!(relative_error(&exact, &approx) < 1e-6);
        }
    }

    #[test]
    fn generator_matrix_shapes() {
        let cases = [
            (Family::Orthogonal, 2, 2, 18, 18),
            (Family::Conformal, 3, 3, 100, 102),
            (Family::Trivial, 2, 1, 12, 10),
        ];
        for (f, n, r, rows, cols) in cases {
            let mu = random_section(&spec(f, n), r, 1);
            let gm = build_generator_matrix(&mu).unwrap();
            assert_eq!((gm.rows(), gm.cols()), (rows, cols), "{f} n={n} r={r}");
        }
    }

    #[test]
    fn random_sections_satisfy_constraints() {
        for f in [Family::Conformal, Family::Scalars] {
            for n in 1..=3 {
                for seed in 0..5 {
                    let mu = random_section(&spec(f, n), 3, seed);
                    assert!(mu.constraint_residual().unwrap() < 1e-10);
                }
            }
        }
        let a = random_section(&spec(Family::Orthogonal, 3), 2, 42);
        assert_eq!(a, random_section(&spec(Family::Orthogonal, 3), 2, 42));
    }

    #[test]
    fn dagger_cell_has_one_invariant() {
        let report =
            estimate_invariant_count(&spec(Family::Orthogonal, 2), 2, 5, 42, DEFAULT_REL_TOL)
                .unwrap();
        assert_eq!(report.fiber_dim, 18);
        assert_eq!(report.group_dim, 18);
        assert_eq!(report.invariant_count, 1);
        assert_eq!(report.bound, 0);
        assert!(!report.ambiguous);
    }

    #[test]
    fn too_few_samples() {
        assert!(estimate_invariant_count(&spec(Family::Trivial, 2), 1, 2, 0, 1e-9).is_err());
    }
}
