//! The action of `G^(r+1)_n` on `r`-jets of sections of the bundle of
//! `G`-structures, `J^r_0(R^n, Gl_n/G)`:
//!
//! ```text
//! j^(r+1)ξ · j^r μ = j^r( (Dξ·μ) ∘ ξ⁻¹ ),   (Dξ·μ)(v) = Dξ|_v · μ(v)
//! ```
//!
//! where the inner dot is the pointwise `Gl_n` action of [`crate::chart`].

use crate::chart::{pointwise_action, ChartPoint, Family, StructureGroupSpec};
use crate::error::{JetError, Result};
use crate::group::JetGroupElement;
use crate::linalg::{Matrix, Ring};
use crate::poly::{monomial_count, JetMap, TruncatedPolynomial};
use crate::scalar::Scalar;

/// An `r`-jet at 0 of a map `R^n -> Gl_n/G`, in ambient chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionJet<S> {
    spec: StructureGroupSpec,
    jet: JetMap<S>,
}

impl<S: Scalar> SectionJet<S> {
    pub fn new(spec: StructureGroupSpec, jet: JetMap<S>) -> Result<Self> {
        if jet.source_dim() != spec.n {
            return Err(JetError::Length {
                expected: spec.n,
                got: jet.source_dim(),
            });
        }
        if jet.target_dim() != spec.ambient_dimension() {
            return Err(JetError::Length {
                expected: spec.ambient_dimension(),
                got: jet.target_dim(),
            });
        }
        Ok(SectionJet { spec, jet })
    }

    /// Constant jet at a chart point.
    pub fn constant(spec: StructureGroupSpec, order: usize, point: &ChartPoint<S>) -> Result<Self>
    where
        S: Ring,
    {
        let comps = point
            .coords
            .iter()
            .map(|&c| TruncatedPolynomial::constant(spec.n, order, c))
            .collect();
        SectionJet::new(spec, JetMap::new(spec.n, order, comps))
    }

    pub fn spec(&self) -> &StructureGroupSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.jet.order()
    }

    pub fn jet(&self) -> &JetMap<S> {
        &self.jet
    }

    /// Value at the origin.
    pub fn base_point(&self) -> ChartPoint<S>
    where
        S: Ring,
    {
        ChartPoint {
            coords: self
                .jet
                .components()
                .iter()
                .map(|c| c.constant_term())
                .collect(),
        }
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(S) -> T + Copy) -> SectionJet<T> {
        SectionJet {
            spec: self.spec,
            jet: self.jet.map(f),
        }
    }

    /// Length of [`flatten`]: `dim(Gl_n/G) · C(n+r, n)`.
    pub fn flat_len(spec: &StructureGroupSpec, order: usize) -> usize {
        spec.chart_dimension() * monomial_count(spec.n, order)
    }

    /// Linear coordinates on the fiber: intrinsic chart coordinate major,
    /// graded-lex monomial minor.
    pub fn flatten(&self) -> Vec<S> {
        let d = self.spec.chart_dimension();
        self.jet.components()[..d]
            .iter()
            .flat_map(|c| c.coeffs().iter().copied())
            .collect()
    }
}

impl<S: Scalar> SectionJet<S>
where
    S: Ring,
{
    /// Residual of the determinant constraint as a jet: the largest
    /// coefficient of `|det M(v)| − 1`. Zero for the unnormalized families.
    pub fn constraint_residual(&self) -> Result<f64> {
        if !matches!(self.spec.family, Family::Conformal | Family::Scalars) {
            return Ok(0.0);
        }
        let m = ChartPoint {
            coords: self.jet.components().to_vec(),
        }
        .to_matrix(&self.spec);
        let det = m.det()?.signed_abs()?;
        let one = det.one_like();
        Ok(det.sub(&one).max_abs())
    }
}

/// Inverse of [`SectionJet::flatten`].
///
/// For the normalized families the dropped coordinate is recovered from the
/// determinant constraint, which is affine in it: `det M = s·C + R` with `C`
/// the leading principal minor. The positive-determinant sheet is used.
pub fn unflatten(
    spec: &StructureGroupSpec,
    order: usize,
    values: &[f64],
) -> Result<SectionJet<f64>> {
    let expected = SectionJet::<f64>::flat_len(spec, order);
    if values.len() != expected {
        return Err(JetError::Length {
            expected,
            got: values.len(),
        });
    }
    let n = spec.n;
    let per = monomial_count(n, order);
    let mut comps: Vec<TruncatedPolynomial<f64>> = values
        .chunks(per)
        .map(|c| TruncatedPolynomial::from_coeffs(n, order, c.to_vec()))
        .collect::<Result<_>>()?;
    if matches!(spec.family, Family::Conformal | Family::Scalars) {
        let zero = TruncatedPolynomial::zero(n, order);
        comps.push(zero.clone());
        let m = ChartPoint {
            coords: comps.clone(),
        }
        .to_matrix(spec);
        let rest = m.det()?;
        let minor = if n == 1 {
            zero.one_like()
        } else {
            let mut lead = Vec::with_capacity((n - 1) * (n - 1));
            for i in 0..n - 1 {
                for j in 0..n - 1 {
                    lead.push(m.get(i, j).clone());
                }
            }
            Matrix::from_rows(n - 1, lead).det()?
        };
        let last = zero.one_like().sub(&rest).mul(&minor.try_recip()?);
        *comps.last_mut().expect("pushed above") = last;
    }
    SectionJet::new(*spec, JetMap::new(n, order, comps))
}

/// `Dξ` as a matrix of order-`r` polynomials for `g` of order `r + 1`;
/// entry `(i, j)` is `∂ξ_i/∂v_j`.
pub fn jacobian_jet<S: Scalar>(g: &JetGroupElement<S>) -> Matrix<TruncatedPolynomial<S>> {
    let n = g.dim();
    let mut entries = Vec::with_capacity(n * n);
    for comp in g.map().components() {
        for j in 0..n {
            entries.push(comp.partial(j));
        }
    }
    Matrix::from_rows(n, entries)
}

/// `g · μ` for `g ∈ G^(r+1)_n` and an `r`-jet `μ`.
pub fn act_on_section<S: Scalar + Ring>(
    g: &JetGroupElement<S>,
    mu: &SectionJet<S>,
) -> Result<SectionJet<S>> {
    let r = mu.order();
    if g.order() != r + 1 {
        return Err(JetError::Config(format!(
            "an order-{r} section jet is acted on by G^{} jets, got order {}",
            r + 1,
            g.order()
        )));
    }
    if g.dim() != mu.spec.n {
        return Err(JetError::Length {
            expected: mu.spec.n,
            got: g.dim(),
        });
    }
    let jac = jacobian_jet(g);
    let values = ChartPoint {
        coords: mu.jet.components().to_vec(),
    };
    let moved = pointwise_action(&mu.spec, &jac, &values)?;
    let moved = JetMap::new(mu.spec.n, r, moved.coords);
    let inverse = g.invert()?.map().truncate(r);
    let jet = moved.compose(&inverse)?;
    SectionJet::new(mu.spec, jet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::random_chart_point;
    use crate::group::group_random;

    type P = TruncatedPolynomial<f64>;

    fn spec(f: Family, n: usize) -> StructureGroupSpec {
        StructureGroupSpec::new(f, n).unwrap()
    }

    #[test]
    fn jacobian_examples() {
        let id = JetGroupElement::<f64>::identity(2, 3);
        let j = jacobian_jet(&id);
        assert_eq!(j.get(0, 0), &P::constant(2, 2, 1.0));
        assert_eq!(j.get(0, 1), &P::zero(2, 2));

        let g = JetGroupElement::from_map(JetMap::new(
            1,
            2,
            vec![P::from_terms(1, 2, &[(&[1], 1.0), (&[2], 1.0)])],
        ))
        .unwrap();
        assert_eq!(
            jacobian_jet(&g).get(0, 0),
            &P::from_terms(1, 1, &[(&[0], 1.0), (&[1], 2.0)])
        );

        let g = JetGroupElement::from_map(JetMap::new(
            2,
            2,
            vec![
                P::from_terms(2, 2, &[(&[1, 0], 1.0), (&[0, 2], 1.0)]),
                P::from_terms(2, 2, &[(&[0, 1], 1.0)]),
            ],
        ))
        .unwrap();
        let j = jacobian_jet(&g);
        assert_eq!(j.get(0, 0), &P::constant(2, 1, 1.0));
        assert_eq!(j.get(0, 1), &P::from_terms(2, 1, &[(&[0, 1], 2.0)]));
        assert_eq!(j.get(1, 0), &P::zero(2, 1));
        assert_eq!(j.get(1, 1), &P::constant(2, 1, 1.0));
    }

    #[test]
    fn identity_acts_trivially() {
        let s = spec(Family::Orthogonal, 2);
        let p = random_chart_point(&s, 9);
        let mut mu = SectionJet::constant(s, 2, &p).unwrap();
        mu.jet = JetMap::new(
            2,
            2,
            mu.jet
                .components()
                .iter()
                .map(|c| c.add(&P::from_terms(2, 2, &[(&[1, 1], 0.25), (&[0, 1], -0.5)])))
                .collect(),
        );
        let out = act_on_section(&JetGroupElement::identity(2, 3), &mu).unwrap();
        assert_eq!(out, mu);
    }

    #[test]
    fn linear_element_on_constant_metric() {
        let s = spec(Family::Orthogonal, 2);
        let p = random_chart_point(&s, 2);
        let mu = SectionJet::constant(s, 2, &p).unwrap();
        let a = [1.1, 0.2, -0.3, 0.9];
        let g = JetGroupElement::from_map(JetMap::new(
            2,
            3,
            vec![
                P::from_terms(2, 3, &[(&[1, 0], a[0]), (&[0, 1], a[1])]),
                P::from_terms(2, 3, &[(&[1, 0], a[2]), (&[0, 1], a[3])]),
            ],
        ))
        .unwrap();
        let out = act_on_section(&g, &mu).unwrap();
        let am = Matrix::from_rows(2, a.to_vec());
        let want = am.mul(&p.to_matrix(&s)).mul(&am.transpose());
        let want = ChartPoint::from_matrix(&s, &want);
        for (c, w) in out.jet().components().iter().zip(&want.coords) {
            assert!((c.constant_term() - w).abs() < 1e-14);
            assert!(c.coeffs()[1..].iter().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn one_dimensional_hand_oracle() {
        // ξ = x + x², μ(v) = 1 + v at order 1:
        // Dξ = 1 + 2v, a = (1+2v)²(1+v) = 1 + 5v, ξ⁻¹ = v + O(v²) ⇒ 1 + 5v
        let s = spec(Family::Orthogonal, 1);
        let g = JetGroupElement::from_map(JetMap::new(
            1,
            2,
            vec![P::from_terms(1, 2, &[(&[1], 1.0), (&[2], 1.0)])],
        ))
        .unwrap();
        let mu = SectionJet::new(
            s,
            JetMap::new(1, 1, vec![P::from_terms(1, 1, &[(&[0], 1.0), (&[1], 1.0)])]),
        )
        .unwrap();
        let out = act_on_section(&g, &mu).unwrap();
        assert_eq!(out.jet().component(0).coeffs(), &[1.0, 5.0]);
    }

    #[test]
    fn order_mismatch_rejected() {
        let s = spec(Family::Trivial, 2);
        let p = random_chart_point(&s, 0);
        let mu = SectionJet::constant(s, 2, &p).unwrap();
        let g = group_random(2, 2, 0);
        assert!(matches!(act_on_section(&g, &mu), Err(JetError::Config(_))));
    }

    #[test]
    fn flatten_lengths() {
        let s = spec(Family::Orthogonal, 2);
        assert_eq!(SectionJet::<f64>::flat_len(&s, 2), 18);
        let p = random_chart_point(&s, 0);
        let mu = SectionJet::constant(s, 2, &p).unwrap();
        assert_eq!(mu.flatten().len(), 18);
        assert!(matches!(
            unflatten(&s, 2, &[0.0; 17]),
            Err(JetError::Length {
                expected: 18,
                got: 17
            })
        ));
        let co = spec(Family::Conformal, 3);
        assert_eq!(SectionJet::<f64>::flat_len(&co, 3), 100);
    }

    #[test]
    fn unflatten_recovers_normalized_coordinate() {
        let s = spec(Family::Conformal, 2);
        let p = random_chart_point(&s, 5);
        let mu = SectionJet::constant(s, 1, &p).unwrap();
        let back = unflatten(&s, 1, &mu.flatten()).unwrap();
        for (a, b) in back.jet().components().iter().zip(mu.jet().components()) {
            assert!(a.sub(b).max_abs() < 1e-14);
        }
        assert!(back.constraint_residual().unwrap() < 1e-14);
    }
}
