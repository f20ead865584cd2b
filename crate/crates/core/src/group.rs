//! The jet group `G^r_n`: `r`-jets at the origin of local diffeomorphisms
//! of `R^n` that fix the origin, under truncated composition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{JetError, Result};
use crate::linalg::{condition_number, Matrix};
use crate::poly::{monomial_count, Basis, JetMap, MultiIndex, TruncatedPolynomial};
use crate::scalar::{Dual, Scalar};

/// Linear parts with a condition number above this are rejected by
/// [`JetGroupElement::invert`].
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct JetGroupElement<S> {
    map: JetMap<S>,
    condition: f64,
}

impl<S: Scalar> JetGroupElement<S> {
    /// Wraps a jet map, checking that it fixes the origin and maps `R^n`
    /// to itself.
    pub fn from_map(map: JetMap<S>) -> Result<Self> {
        if map.source_dim() != map.target_dim() {
            return Err(JetError::Config(format!(
                "jet group elements map R^n to itself, got {} -> {}",
                map.source_dim(),
                map.target_dim()
            )));
        }
        if map.order() == 0 {
            return Err(JetError::Config(
                "jet group order must be at least 1".into(),
            ));
        }
        if !map.has_zero_constant() {
            return Err(JetError::Domain(
                "jet group elements must fix the origin".into(),
            ));
        }
        let condition = condition_number(&linear_part(&map).lead_matrix());
        Ok(JetGroupElement { map, condition })
    }

    pub fn identity(n: usize, order: usize) -> Self {
        assert!(n >= 1 && order >= 1, "identity needs n >= 1 and r >= 1");
        JetGroupElement {
            map: JetMap::identity(n, order),
            condition: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.map.source_dim()
    }

    pub fn order(&self) -> usize {
        self.map.order()
    }

    pub fn map(&self) -> &JetMap<S> {
        &self.map
    }

    pub fn into_map(self) -> JetMap<S> {
        self.map
    }

    /// Condition number of the real linear part, recorded at construction.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// The `n×n` matrix of degree-one coefficients (row = component).
    pub fn linear_part(&self) -> Matrix<S> {
        linear_part(&self.map)
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(S) -> T + Copy) -> JetGroupElement<T> {
        JetGroupElement {
            map: self.map.map(f),
            condition: self.condition,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert!(
            self.dim() == other.dim() && self.order() == other.order(),
            "group elements of different shape"
        );
        let map = self
            .map
            .compose(&other.map)
            .expect("group elements fix the origin");
        let condition = condition_number(&linear_part(&map).lead_matrix());
        JetGroupElement { map, condition }
    }

    /// Group inverse.
    ///
    /// Writing `g(x) = Lx + N(x)` with `N` of degree `>= 2`, the inverse is
    /// the fixed point of `h = L⁻¹(x − N∘h)`. Starting from `h = L⁻¹x`, every
    /// pass fixes one more degree, so `r − 1` passes give the exact
    /// order-`r` jet.
    pub fn invert(&self) -> Result<Self> {
        if self.condition.is_nan() || self.condition > MAX_CONDITION {
            return Err(JetError::Conditioning {
                cond: self.condition,
                limit: MAX_CONDITION,
            });
        }
        let n = self.dim();
        let r = self.order();
        let lin = self.linear_part();
        let lin_inv = lin.inverse()?;

        let nonlinear: Vec<TruncatedPolynomial<S>> = self
            .map
            .components()
            .iter()
            .map(|c| {
                let mut c = c.clone();
                for k in Basis::get(n, r).degree_range(1) {
                    c.coeffs_mut()[k] = S::zero();
                }
                c
            })
            .collect();
        let nonlinear = JetMap::new(n, r, nonlinear);
        let identity = JetMap::<S>::identity(n, r);

        let mut h = apply_linear(&lin_inv, &identity);
        for _ in 1..r {
            let nh = nonlinear.compose(&h)?;
            let rhs: Vec<TruncatedPolynomial<S>> = identity
                .components()
                .iter()
                .zip(nh.components())
                .map(|(x, y)| x.sub(y))
                .collect();
            h = apply_linear(&lin_inv, &JetMap::new(n, r, rhs));
        }
        JetGroupElement::from_map(h)
    }

    /// Largest coefficient deviation from `other` (real parts).
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.map
            .components()
            .iter()
            .zip(other.map.components())
            .map(|(a, b)| a.sub(b).max_abs())
            .fold(0.0, f64::max)
    }
}

fn linear_part<S: Scalar>(map: &JetMap<S>) -> Matrix<S> {
    let n = map.source_dim();
    let mut entries = Vec::with_capacity(n * n);
    for comp in map.components() {
        for j in 0..n {
            entries.push(if map.order() >= 1 {
                comp.coeffs()[1 + j]
            } else {
                S::zero()
            });
        }
    }
    Matrix::from_rows(n, entries)
}

fn apply_linear<S: Scalar>(a: &Matrix<S>, map: &JetMap<S>) -> JetMap<S> {
    let n = a.dim();
    let r = map.order();
    let components = (0..n)
        .map(|i| {
            let mut acc = TruncatedPolynomial::zero(map.source_dim(), r);
            for j in 0..n {
                acc.add_scaled(map.component(j), *a.get(i, j));
            }
            acc
        })
        .collect();
    JetMap::new(map.source_dim(), r, components)
}

/// A basis vector `x^alpha ∂/∂x_component` of the Lie algebra of `G^r_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LieGeneratorIndex {
    /// 0-based coordinate the vector field points along.
    pub component: usize,
    pub alpha: MultiIndex,
}

/// Basis of the Lie algebra of `G^r_n`: every `(i, alpha)` with
/// `1 <= |alpha| <= r`, ordered by monomial and then by component.
/// Its length is the group dimension `n·(C(n+r, n) − 1)`.
pub fn lie_basis(n: usize, r: usize) -> Vec<LieGeneratorIndex> {
    let basis = Basis::get(n, r);
    basis
        .indices()
        .iter()
        .skip(1)
        .flat_map(|alpha| {
            (0..n).map(move |component| LieGeneratorIndex {
                component,
                alpha: alpha.clone(),
            })
        })
        .collect()
}

/// Dimension of `G^r_n`.
pub fn group_dimension(n: usize, r: usize) -> usize {
    n * (monomial_count(n, r) - 1)
}

/// `id + ε·x^alpha e_i` as an element over perturbation scalars.
pub fn perturbed_identity(
    generator: &LieGeneratorIndex,
    n: usize,
    r: usize,
) -> JetGroupElement<Dual> {
    let mut map = JetMap::<Dual>::identity(n, r).into_components();
    assert!(generator.component < n, "generator component out of range");
    let d = generator.alpha.degree() as usize;
    assert!(d >= 1 && d <= r, "generator degree {d} outside 1..={r}");
    let pos = Basis::get(n, r)
        .position(&generator.alpha)
        .expect("generator fits the order");
    map[generator.component].coeffs_mut()[pos] += Dual::epsilon();
    JetGroupElement {
        map: JetMap::new(n, r, map),
        condition: 1.0,
    }
}

/// `id + h·x^alpha e_i` over the reals, for finite-difference checks.
pub fn shifted_identity(
    generator: &LieGeneratorIndex,
    n: usize,
    r: usize,
    h: f64,
) -> JetGroupElement<f64> {
    perturbed_identity(generator, n, r).map_scalars(|d| d.re + h * d.eps)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// Random element near the identity: linear part `I + U(−0.3, 0.3)`
/// (redrawn until its condition number is below 50) and higher
/// coefficients `U(−1, 1) / degree!`.
pub fn group_random(n: usize, r: usize, seed: u64) -> JetGroupElement<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    group_random_with(n, r, &mut rng)
}

pub(crate) fn group_random_with(n: usize, r: usize, rng: &mut impl Rng) -> JetGroupElement<f64> {
    let basis = Basis::get(n, r);
    let linear = loop {
        let m: Vec<f64> = (0..n * n)
            .map(|k| {
                let base = if k / n == k % n { 1.0 } else { 0.0 };
                base + rng.gen_range(-0.3..0.3)
            })
            .collect();
        let cond = condition_number(&nalgebra::DMatrix::from_row_slice(n, n, &m));
        if cond < 50.0 {
            break m;
        }
    };
    let components = (0..n)
        .map(|i| {
            let mut coeffs = vec![0.0; basis.len()];
            for j in 0..n {
                coeffs[1 + j] = linear[i * n + j];
            }
            for d in 2..=r {
                let scale = 1.0 / factorial(d);
                for k in basis.degree_range(d) {
                    coeffs[k] = rng.gen_range(-1.0..1.0) * scale;
                }
            }
            TruncatedPolynomial::from_coeffs(n, r, coeffs).expect("basis length")
        })
        .collect();
    JetGroupElement::from_map(JetMap::new(n, r, components)).expect("origin is fixed")
}
