use adelic_core::group::{build_sample, good_points, sofic_quality, Family, GroupSpec, Word};
use adelic_core::group_ring::{operator_matrix, GroupRingElement};
use adelic_core::linalg::{
    gcd_minor_divisors, is_unimodular, kernel_length_brute, kernel_length_local, kernel_length_mod_power,
    smith_normal_form, ExactMatrix,
};
use adelic_core::measure::adelic_measure;
use adelic_core::ring::{gcd, PrimeIdeal, Ring, RingElement};
use adelic_core::spectral::{exact_moments, positive_operator, spectral_summary};
use num_traits::ToPrimitive;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn ring_element(ring: Ring) -> impl Strategy<Value = RingElement> {
    (-12i64..=12, -12i64..=12).prop_map(move |(a, b)| match ring {
        Ring::Integers => RingElement::integer(a),
        Ring::Gaussian => RingElement::gaussian(a, b),
    })
}

fn any_ring() -> impl Strategy<Value = Ring> {
    prop_oneof![Just(Ring::Integers), Just(Ring::Gaussian)]
}

fn matrix(ring: Ring, max: usize) -> impl Strategy<Value = ExactMatrix> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(ring_element(ring), r * c)
            .prop_map(move |entries| ExactMatrix::new(ring, r, c, entries).unwrap())
    })
}

fn square(ring: Ring, max: usize) -> impl Strategy<Value = ExactMatrix> {
    (1..=max).prop_flat_map(move |n| {
        proptest::collection::vec(ring_element(ring), n * n)
            .prop_map(move |entries| ExactMatrix::new(ring, n, n, entries).unwrap())
    })
}

fn element_on_z(max_terms: usize) -> impl Strategy<Value = GroupRingElement> {
    proptest::collection::vec((-3i64..=3, -4i64..=4), 1..=max_terms).prop_map(|terms| {
        GroupRingElement::from_terms(
            Ring::Integers,
            terms.into_iter().map(|(k, c)| (Word::power(0, k), RingElement::integer(c))),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_multiplicative((x, y) in any_ring().prop_flat_map(|r| (ring_element(r), ring_element(r)))) {
        let prod = &x * &y;
        prop_assert_eq!(prod.norm(), x.norm() * y.norm());
        prop_assert!(prod.ceil() <= x.ceil() * y.ceil() + 1e-9);
        prop_assert!((&x + &y).ceil() <= x.ceil() + y.ceil() + 1e-9);
    }

    #[test]
    fn gcd_divides_and_is_canonical((x, y) in any_ring().prop_flat_map(|r| (ring_element(r), ring_element(r)))) {
        let g = gcd(&x, &y);
        prop_assert!(g.is_canonical());
        if !g.is_zero() {
            prop_assert!(g.divides(&x) && g.divides(&y));
        } else {
            prop_assert!(x.is_zero() && y.is_zero());
        }
    }

    #[test]
    fn smith_form_matches_minors(a in any_ring().prop_flat_map(|r| matrix(r, 4))) {
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.reconstruct(), a.clone());
        prop_assert!(is_unimodular(&s.p) && is_unimodular(&s.q));
        prop_assert_eq!(s.divisors.clone(), gcd_minor_divisors(&a).unwrap());
        for w in s.divisors.windows(2) {
            prop_assert!(w[0].divides(&w[1]));
        }
    }

    #[test]
    fn kernel_length_routes_agree(a in square(Ring::Integers, 3), p in prop_oneof![Just(2i64), Just(3)], i in 1u32..=2) {
        let m = PrimeIdeal::new(&RingElement::integer(p)).unwrap();
        let structural = kernel_length_mod_power(&a, &m, i).unwrap();
        prop_assert_eq!(structural, kernel_length_local(&a, &m, i).unwrap());
        prop_assert_eq!(structural, kernel_length_brute(&a, &m, i).unwrap());
    }

    #[test]
    fn operator_is_a_homomorphism(a in element_on_z(3), b in element_on_z(3), n in 3usize..9) {
        let z = GroupSpec::free_abelian(1).unwrap();
        let x = build_sample(&z, &Family::Torus(vec![n])).unwrap();
        let ab = operator_matrix(&a.try_mul(&b).unwrap(), &x).unwrap();
        let prod = operator_matrix(&a, &x).unwrap().try_mul(&operator_matrix(&b, &x).unwrap()).unwrap();
        prop_assert_eq!(ab, prod);
        let sum = operator_matrix(&a.try_add(&b).unwrap(), &x).unwrap();
        prop_assert_eq!(sum, operator_matrix(&a, &x).unwrap().try_add(&operator_matrix(&b, &x).unwrap()).unwrap());
    }

    #[test]
    fn adjoint_is_an_involution(a in element_on_z(4), n in 2usize..8) {
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        let z = GroupSpec::free_abelian(1).unwrap();
        let x = build_sample(&z, &Family::Torus(vec![n])).unwrap();
        let adj = operator_matrix(&a.adjoint(), &x).unwrap();
        prop_assert_eq!(adj, operator_matrix(&a, &x).unwrap().conjugate_transpose());
    }

    #[test]
    fn measure_is_a_probability(a in element_on_z(3), n in 2usize..10) {
        let z = GroupSpec::free_abelian(1).unwrap();
        let x = build_sample(&z, &Family::Torus(vec![n])).unwrap();
        let nu = adelic_measure(&a, &x).unwrap();
        let total: BigRational = nu.masses().values().cloned().sum();
        prop_assert!(total.is_one());
        prop_assert!(nu.masses().values().all(|m| *m > BigRational::zero()));
    }

    #[test]
    fn first_moments(a in element_on_z(3), n in 2usize..10) {
        let z = GroupSpec::free_abelian(1).unwrap();
        let x = build_sample(&z, &Family::Torus(vec![n])).unwrap();
        let b = positive_operator(&a, &x).unwrap();
        let m = exact_moments(&b, 2).unwrap();
        prop_assert!(m[0].is_one());
        // m_1 = Σ|a_w|² once the torus is longer than the support
        if n > 6 {
            let s: i64 = a.terms().values().map(|c| { let v: i64 = c.re().try_into().unwrap(); v * v }).sum();
            prop_assert_eq!(m[1].clone(), BigRational::from_integer(BigInt::from(s)));
        }
    }

    #[test]
    fn spectral_invariants(a in element_on_z(4), n in 1usize..14) {
        let z = GroupSpec::free_abelian(1).unwrap();
        let x = build_sample(&z, &Family::Torus(vec![n])).unwrap();
        let s = spectral_summary(&a, &x, 4).unwrap();
        let m = &s.moments;
        prop_assert!(&m[0] * &m[2] >= &m[1] * &m[1]);
        for (l, ml) in m.iter().enumerate() {
            let power_sum: f64 = s.eigenvalues.iter().map(|v| v.powi(l as i32)).sum();
            let exact = ml.to_f64().unwrap() * n as f64;
            prop_assert!((power_sum - exact).abs() <= 1e-8 * exact.abs().max(1.0), "l={} {} vs {}", l, power_sum, exact);
        }
        prop_assert!(s.spectral_det_plus >= BigInt::from(1));
        prop_assert_eq!(s.mu_zero(), adelic_measure(&a, &x).unwrap().zero_mass());
    }

    #[test]
    fn quality_is_antitone(n in 3usize..40, seed in 0u64..50) {
        let z = GroupSpec::free_abelian(1).unwrap();
        let fam = Family::Perturbed {
            base: Box::new(Family::Torus(vec![n])),
            epsilon: BigRational::new(1.into(), 5.into()),
            seed,
        };
        let x = build_sample(&z, &fam).unwrap();
        let q: Vec<BigRational> = (0..5).map(|r| sofic_quality(&x, &z, r).unwrap()).collect();
        for w in q.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert!(q[0].is_one());
        let good = good_points(&x, &z, 1).unwrap();
        prop_assert_eq!(good.len(), n);
    }
}

#[test]
fn lamplighter_operator_homomorphism() {
    let g = GroupSpec::lamplighter();
    let x = build_sample(&g, &Family::WreathQuotient(3)).unwrap();
    let a = GroupRingElement::parse("1 + 2*a - b", Ring::Integers, &g).unwrap();
    let b = GroupRingElement::parse("a*b - 3*a^-1", Ring::Integers, &g).unwrap();
    let lhs = operator_matrix(&a.try_mul(&b).unwrap(), &x).unwrap();
    let rhs = operator_matrix(&a, &x).unwrap().try_mul(&operator_matrix(&b, &x).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
}
