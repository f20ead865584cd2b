use jetorbit::action::{act_on_section, unflatten, SectionJet};
use jetorbit::chart::{constraint_residual, pointwise_action, random_chart_point, ChartPoint};
use jetorbit::group::{group_random, JetGroupElement};
use jetorbit::linalg::Matrix;
use jetorbit::orbit::{estimate_invariant_count, random_section, DEFAULT_REL_TOL};
use jetorbit::poly::{monomial_count, JetMap, TruncatedPolynomial};
use jetorbit::{Dual, Family, StructureGroupSpec};
use proptest::prelude::*;

type P = TruncatedPolynomial<f64>;

fn poly_strategy(n: usize, r: usize) -> impl Strategy<Value = P> {
    prop::collection::vec(-1.0f64..1.0, monomial_count(n, r))
        .prop_map(move |c| P::from_coeffs(n, r, c).unwrap())
}

/// Polynomial with constant term in [0.5, 1.5].
fn positive_poly_strategy(n: usize, r: usize) -> impl Strategy<Value = P> {
    (poly_strategy(n, r), 0.5f64..1.5).prop_map(|(mut p, c0)| {
        p.coeffs_mut()[0] = c0;
        p
    })
}

fn zero_constant(p: P) -> P {
    let mut p = p;
    p.coeffs_mut()[0] = 0.0;
    p
}

fn jet_strategy(n: usize, r: usize, origin_fixed: bool) -> impl Strategy<Value = JetMap<f64>> {
    prop::collection::vec(poly_strategy(n, r), n).prop_map(move |comps| {
        let comps = if origin_fixed {
            comps.into_iter().map(zero_constant).collect()
        } else {
            comps
        };
        JetMap::new(n, r, comps)
    })
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3, 0usize..=4)
}

fn rel_close(a: &P, b: &P, tol: f64) -> bool {
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    a.sub(b).max_abs() <= tol * scale
}

fn jets_close(a: &JetMap<f64>, b: &JetMap<f64>, tol: f64) -> bool {
    a.components()
        .iter()
        .zip(b.components())
        .all(|(x, y)| rel_close(x, y, tol))
}

proptest! {
    #[test]
    fn multiplication_is_commutative_and_associative(
        (p, q, s) in shape().prop_flat_map(|(n, r)| (poly_strategy(n, r), poly_strategy(n, r), poly_strategy(n, r)))
    ) {
        prop_assert!(rel_close(&p.mul(&q), &q.mul(&p), 1e-12));
        prop_assert!(rel_close(&p.mul(&q).mul(&s), &p.mul(&q.mul(&s)), 1e-12));
    }

    #[test]
    fn leibniz_rule(
        (p, q, i) in (1usize..=3, 1usize..=4)
            .prop_flat_map(|(n, r)| (poly_strategy(n, r), poly_strategy(n, r), 0..n))
    ) {
        let lhs = p.mul(&q).partial(i);
        let r = p.order() - 1;
        let rhs = p.partial(i).mul(&q.truncate(r)).add(&p.truncate(r).mul(&q.partial(i)));
        prop_assert!(rel_close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn composition_is_associative(
        (f, g, h) in shape().prop_flat_map(|(n, r)| (
            jet_strategy(n, r, false),
            jet_strategy(n, r, true),
            jet_strategy(n, r, true),
        ))
    ) {
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert!(jets_close(&left, &right, 1e-10));
    }

    #[test]
    fn real_power_exponents_add(
        (p, e1, e2) in shape().prop_flat_map(|(n, r)| (positive_poly_strategy(n, r), -2.0f64..2.0, -2.0f64..2.0))
    ) {
        let lhs = p.pow_real(e1 + e2).unwrap();
        let rhs = p.pow_real(e1).unwrap().mul(&p.pow_real(e2).unwrap());
        prop_assert!(rel_close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn perturbation_scalars_match_central_differences(
        (p, q, g, e) in (1usize..=3, 1usize..=3).prop_flat_map(|(n, r)| (
            positive_poly_strategy(n, r),
            poly_strategy(n, r),
            jet_strategy(n, r, true),
            -1.5f64..1.5,
        ))
    ) {
        // F(t) = ((p + t q)^e · (p + t q)) ∘ g
        let n = p.vars();
        let r = p.order();
        let eval = |t: f64| -> P {
            let s = p.add(&q.scale(t));
            let v = s.pow_real(e).unwrap().mul(&s);
            JetMap::new(n, r, vec![v; n]).compose(&g).unwrap().component(0).clone()
        };
        let dual_p: TruncatedPolynomial<Dual> = TruncatedPolynomial::from_coeffs(
            n,
            r,
            p.coeffs().iter().zip(q.coeffs()).map(|(&a, &b)| Dual::new(a, b)).collect(),
        ).unwrap();
        let dual_g = g.map(Dual::constant);
        let v = dual_p.pow_real(e).unwrap().mul(&dual_p);
        let exact = JetMap::new(n, r, vec![v; n]).compose(&dual_g).unwrap().component(0).map(|d| d.eps);
        let h = 1e-4;
        let fd = eval(h).sub(&eval(-h)).scale(1.0 / (2.0 * h));
        prop_assert!(rel_close(&exact, &fd, 1e-6), "{:?} vs {:?}", exact, fd);
    }

    #[test]
    fn group_axioms(seeds in prop::array::uniform3(any::<u64>()), n in 1usize..=3, r in 1usize..=4) {
        let [a, b, c] = seeds.map(|s| group_random(n, r, s));
        let id = JetGroupElement::identity(n, r);
        let ab_c = a.compose(&b).compose(&c);
        let a_bc = a.compose(&b.compose(&c));
        prop_assert!(ab_c.max_deviation(&a_bc) < 1e-10);
        prop_assert_eq!(a.compose(&id), a.clone());
        prop_assert_eq!(id.compose(&a), a.clone());
        let inv = a.invert().unwrap();
        prop_assert!(a.compose(&inv).max_deviation(&id) < 1e-10);
        prop_assert!(inv.compose(&a).max_deviation(&id) < 1e-10);
        prop_assert!(inv.invert().unwrap().max_deviation(&a) < 1e-9);
    }

    #[test]
    fn linear_parts_multiply(s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..=3, r in 1usize..=3) {
        let a = group_random(n, r, s1);
        let b = group_random(n, r, s2);
        let prod = a.linear_part().mul(&b.linear_part());
        let lin = a.compose(&b).linear_part();
        for (x, y) in prod.entries().iter().zip(lin.entries()) {
            prop_assert!((x - y).abs() < 1e-14);
        }
    }
}

fn spec(f: Family, n: usize) -> StructureGroupSpec {
    StructureGroupSpec::new(f, n).unwrap()
}

fn random_linear(n: usize, seed: u64) -> Matrix<f64> {
    group_random(n, 1, seed).linear_part()
}

#[test]
fn pointwise_action_is_a_left_action() {
    for f in Family::ALL {
        for n in 1..=4 {
            let s = spec(f, n);
            for seed in 0..25u64 {
                let a = random_linear(n, seed);
                let b = random_linear(n, seed + 1000);
                let p = random_chart_point(&s, seed + 2000);
                let lhs = pointwise_action(&s, &a.mul(&b), &p).unwrap();
                let rhs = pointwise_action(&s, &a, &pointwise_action(&s, &b, &p).unwrap()).unwrap();
                for (x, y) in lhs.coords.iter().zip(&rhs.coords) {
                    assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{s} seed {seed}");
                }
                assert!(constraint_residual(&s, &lhs) < 1e-10);
                // The normalized families divide by det^(1/n), which rounds.
                let id = Matrix::identity_like(n, &0.0);
                let fixed = pointwise_action(&s, &id, &p).unwrap();
                if matches!(f, Family::Orthogonal | Family::Trivial) {
                    assert_eq!(fixed, p);
                } else {
                    for (x, y) in fixed.coords.iter().zip(&p.coords) {
                        assert!((x - y).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0));
                    }
                }
            }
        }
    }
}

/// Rotation by `t` in the (i, j) plane.
fn givens(n: usize, i: usize, j: usize, t: f64) -> Matrix<f64> {
    let mut m = Matrix::identity_like(n, &0.0);
    m.set(i, i, t.cos());
    m.set(j, j, t.cos());
    m.set(i, j, -t.sin());
    m.set(j, i, t.sin());
    m
}

#[test]
fn stabilizers_of_the_identity_point() {
    for n in 2..=4 {
        let q = givens(n, 0, n - 1, 0.7).mul(&givens(n, 0, 1, -1.3));
        let on = spec(Family::Orthogonal, n);
        let id = ChartPoint::from_matrix(&on, &Matrix::identity_like(n, &0.0));
        let out = pointwise_action(&on, &q, &id).unwrap();
        for (x, y) in out.coords.iter().zip(&id.coords) {
            assert!((x - y).abs() < 1e-12);
        }
        let co = spec(Family::Conformal, n);
        let scaled = q.scale_by(&2.5);
        let out = pointwise_action(&co, &scaled, &id).unwrap();
        for (x, y) in out.coords.iter().zip(&id.coords) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

fn section_deviation(a: &SectionJet<f64>, b: &SectionJet<f64>) -> f64 {
    a.jet()
        .components()
        .iter()
        .zip(b.jet().components())
        .map(|(x, y)| x.sub(y).max_abs() / x.max_abs().max(1.0))
        .fold(0.0, f64::max)
}

#[test]
fn order_zero_action_is_pointwise() {
    for f in Family::ALL {
        for n in 1..=3 {
            let s = spec(f, n);
            for seed in 0..10u64 {
                let g = group_random(n, 1, seed);
                let p = random_chart_point(&s, seed + 77);
                let mu = SectionJet::constant(s, 0, &p).unwrap();
                let out = act_on_section(&g, &mu).unwrap();
                let direct = pointwise_action(&s, &g.linear_part(), &p).unwrap();
                for (c, d) in out.jet().components().iter().zip(&direct.coords) {
                    assert!((c.constant_term() - d).abs() < 1e-13);
                }
            }
        }
    }
}

#[test]
fn action_preserves_constraints() {
    for f in [Family::Conformal, Family::Scalars] {
        for n in 1..=3 {
            for r in 0..=3 {
                let s = spec(f, n);
                for seed in 0..10u64 {
                    let g = group_random(n, r + 1, seed);
                    let mu = random_section(&s, r, seed + 5);
                    let out = act_on_section(&g, &mu).unwrap();
                    assert!(
                        out.constraint_residual().unwrap() < 1e-9,
                        "{s} r={r} seed {seed}"
                    );
                }
            }
        }
    }
}

#[test]
fn flatten_is_a_bijection_onto_jets() {
    for f in Family::ALL {
        for n in 1..=3 {
            for r in 0..=3 {
                let s = spec(f, n);
                let mu = random_section(&s, r, 31);
                let flat = mu.flatten();
                assert_eq!(flat.len(), SectionJet::<f64>::flat_len(&s, r));
                let back = unflatten(&s, r, &flat).unwrap();
                assert!(section_deviation(&back, &mu) < 1e-12, "{s} r={r}");
                assert_eq!(back.flatten(), flat);
            }
        }
    }
}

#[test]
fn identity_acts_trivially_on_random_sections() {
    for f in Family::ALL {
        for n in 1..=3 {
            for r in 0..=3 {
                let s = spec(f, n);
                let mu = random_section(&s, r, 3);
                let out = act_on_section(&JetGroupElement::identity(n, r + 1), &mu).unwrap();
                assert!(section_deviation(&out, &mu) < 1e-14);
            }
        }
    }
}

#[test]
fn jet_action_is_a_left_action() {
    for f in Family::ALL {
        let mut triples = 0;
        for n in 1..=3 {
            for r in 0..=3 {
                let s = spec(f, n);
                for seed in 0..9u64 {
                    let g1 = group_random(n, r + 1, 3 * seed);
                    let g2 = group_random(n, r + 1, 3 * seed + 1);
                    let mu = random_section(&s, r, 3 * seed + 2);
                    let lhs = act_on_section(&g1.compose(&g2), &mu).unwrap();
                    let rhs = act_on_section(&g1, &act_on_section(&g2, &mu).unwrap()).unwrap();
                    let dev = section_deviation(&lhs, &rhs);
                    assert!(dev < 1e-9, "{s} r={r} seed {seed}: {dev:e}");
                    triples += 1;
                }
            }
        }
        assert!(triples >= 100);
    }
}

#[test]
fn group_round_trips() {
    for i in 0..100u64 {
        let n = 1 + (i % 3) as usize;
        let r = 1 + (i / 3 % 4) as usize;
        let g = group_random(n, r, 9000 + i);
        let id = JetGroupElement::identity(n, r);
        let inv = g.invert().unwrap();
        assert!(g.compose(&inv).max_deviation(&id) < 1e-10, "n={n} r={r}");
        assert!(
            inv.invert().unwrap().max_deviation(&g) < 1e-9,
            "n={n} r={r}"
        );
    }
}

#[test]
fn frame_bundles_have_no_surplus_invariants() {
    for f in [Family::Trivial, Family::Scalars] {
        for n in 1..=3 {
            for r in 0..=2 {
                let s = spec(f, n);
                let report = estimate_invariant_count(&s, r, 3, 42, DEFAULT_REL_TOL).unwrap();
                assert_eq!(report.invariant_count, report.bound.max(0), "{s} r={r}");
            }
        }
    }
}
