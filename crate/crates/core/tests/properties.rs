//! Randomized invariants. The seed is fixed unless `PROPTEST_RNG_SEED` is set.

use heckenil_core::basis::{hecke_on_poly, to_poly, BasisTag, Degree, PolyRep};
use heckenil_core::hecke::{hecke_t, u_op, HeckeSpec};
use heckenil_core::nilpotency::{index_fast, modified_degree, ns_formula, s_index, IndexSpec, Variant};
use heckenil_core::series::{named_form, NamedForm};
use heckenil_core::QSeries;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

const DEFAULT_SEED: u64 = 0x5eed_2026;

fn config(cases: u32) -> Config {
    let seed = std::env::var("PROPTEST_RNG_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    Config { cases, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() }
}

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5, 7, 11, 13])
}

fn series(p: u32, len: usize) -> impl Strategy<Value = QSeries> {
    prop::collection::vec(0..p as i64, len).prop_map(move |v| QSeries::from_ints(p, &v).unwrap())
}

fn prime_and_series(len: usize) -> impl Strategy<Value = (u32, QSeries)> {
    prime().prop_flat_map(move |p| (Just(p), series(p, len)))
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn frobenius((p, f) in prime_and_series(400)) {
        let lhs = f.pow(p as u64);
        let rhs = f.dilate(p as usize);
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn leibniz(p in prime(), seed in any::<u64>()) {
        let mk = |s: u64| {
            let v: Vec<i64> = (0..300u64).map(|i| ((i.wrapping_mul(s | 1) >> 7) % p as u64) as i64).collect();
            QSeries::from_ints(p, &v).unwrap()
        };
        let (f, g) = (mk(seed), mk(seed.rotate_left(17)));
        let lhs = f.mul(&g).unwrap().theta_op();
        let rhs = f.theta_op().mul(&g).unwrap().add(&f.mul(&g.theta_op()).unwrap()).unwrap();
        prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn theta_fermat((p, f) in prime_and_series(200)) {
        let mut t = f.clone();
        for _ in 0..p {
            t = t.theta_op();
        }
        let once = f.theta_op();
        prop_assert_eq!(t.coeffs(), once.coeffs());
    }

    #[test]
    fn hecke_is_u_plus_dilation(p in prime(), ell in prop::sample::select(vec![2u64, 3, 5, 7]), k in 1u64..6) {
        prop_assume!(ell != p as u64);
        let f = named_form(NamedForm::Delta, p, 600).unwrap().pow(k);
        let t = hecke_t(&f, &HeckeSpec::new(ell, p)).unwrap();
        let u = u_op(&f, ell as usize).unwrap();
        let w = HeckeSpec::new(ell, p).weight_factor_mod_p(12 * k as i64);
        let low = f.dilate_to(ell as usize, t.precision()).scale(&w);
        let sum = u.truncate(t.precision()).add(&low).unwrap();
        prop_assert_eq!(t.coeffs(), sum.coeffs());
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn unitriangular_round_trip(p in prop::sample::select(vec![2u32, 3, 5, 7]), coeffs in prop::collection::vec(0u32..7, 1..120)) {
        let tag = BasisTag::delta(p).unwrap();
        let pr = PolyRep::new(tag, coeffs.iter().map(|c| c % p).collect());
        let d = pr.coeffs().len().saturating_sub(1).max(1);
        let q = pr.expand(d + 1 + 16).unwrap();
        prop_assert_eq!(to_poly(&q, tag, d, 16).unwrap(), pr);
    }

    #[test]
    fn hecke_operators_commute(
        p in prop::sample::select(vec![2u32, 3, 5, 7]),
        k in 1u64..25,
        pair in prop::sample::subsequence(vec![2u64, 3, 5, 7, 11], 2),
    ) {
        let (a, b) = (pair[0], pair[1]);
        prop_assume!(a != p as u64 && b != p as u64);
        let f = named_form(NamedForm::Delta, p, 4000).unwrap().pow(k);
        let wt = 12 * k as i64;
        let t = |g: &QSeries, ell: u64| hecke_t(g, &HeckeSpec::new(ell, p).with_weight(wt)).unwrap();
        let ab = t(&t(&f, a), b);
        let ba = t(&t(&f, b), a);
        let n = ab.precision().min(ba.precision());
        prop_assert_eq!(&ab.coeffs()[..n], &ba.coeffs()[..n]);
    }

    #[test]
    fn strict_degree_descent(p in prop::sample::select(vec![2u32, 3, 5, 7]), k in 1u64..300, sel in 0usize..4) {
        let ells: &[u64] = match p { 2 => &[3, 5, 7, 11], 3 => &[2, 5, 7, 13], 5 => &[11, 19, 29, 31], _ => &[13, 29, 41, 43] };
        let ell = ells[sel];
        let tag = BasisTag::delta(p).unwrap();
        let img = hecke_on_poly(&PolyRep::monomial(tag, k as usize), ell, p != 2, 16).unwrap();
        prop_assert!(img.degree() < Degree::Finite(k as i64));
    }

    #[test]
    fn frobenius_index_monotone(p in prop::sample::select(vec![5u32, 7]), k in 1u64..=100, sel in 0usize..4) {
        let ells: &[u64] = if p == 5 { &[11, 19, 29, 31] } else { &[13, 29, 41, 43] };
        let spec = IndexSpec::delta(p, ells[sel]);
        prop_assert!(index_fast(p as u64 * k, &spec).unwrap() <= index_fast(k, &spec).unwrap());
    }

    #[test]
    fn s_index_recursion(k in 1u64..400, v in prop::sample::select(vec![Variant::S19Prime, Variant::S29Double, Variant::STriple(7)])) {
        prop_assume!(match v { Variant::STriple(_) => k % 2 != 0 && k % 3 != 0, _ => true });
        let s = s_index(k, v).unwrap();
        prop_assert!(s >= 1);
        match modified_degree(k, v).unwrap() {
            Degree::Finite(d) if d >= 1 => prop_assert!(s <= 1 + s_index(d as u64, v).unwrap()),
            _ => prop_assert_eq!(s, 1),
        }
    }
}

proptest! {
    #![proptest_config(config(2000))]

    #[test]
    fn ns_formula_is_order_sqrt_k(h in 0u64..500_000) {
        let k = 2 * h + 1;
        let n = ns_formula(k).unwrap() as f64;
        let r = (k as f64).sqrt();
        prop_assert!(0.5 * r < n && n < 1.5 * r, "k = {}, N = {}", k, n);
    }
}
