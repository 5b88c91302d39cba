use heckenil_core::arith::kronecker;
use heckenil_core::basis::*;
use heckenil_core::hecke::{hecke_t, iterated_coeff, HeckeSpec};
use heckenil_core::nilpotency::{index_fast, nilpotency_index, IndexSpec};
use heckenil_core::partitions::{power_partition_d2_identity, tcore_delta_identity};
use heckenil_core::ring::Fp;
use heckenil_core::series::{euler_product, named_form, theta_expansion, EtaQuotient, NamedForm, Series, ThetaKind};
use heckenil_core::QSeries;

#[test]
fn eta_and_cube_match_theta_series() {
    for p in [2u32, 3, 5, 7] {
        let n = 10_000;
        let eta = named_form(NamedForm::EtaProduct(24, 1), p, n).unwrap();
        assert!(eta.agrees_with(&theta_expansion(ThetaKind::Eta, p, n, 24).unwrap()), "p = {p}");
        // eta(8z)^3 = q prod (1 - q^{8n})^3
        let cube = euler_product(8, p, n).unwrap().pow(3).shift(1).truncate(n);
        assert!(cube.agrees_with(&theta_expansion(ThetaKind::Eta3, p, n, 8).unwrap()), "p = {p}");
    }
}

#[test]
fn theta_quotient() {
    for p in [3u32, 5, 7] {
        let n = 5000;
        let big = named_form(NamedForm::ThetaBig, p, n).unwrap();
        assert!(big.agrees_with(&theta_expansion(ThetaKind::ThetaSqSum, p, n, 1).unwrap()));
        // Both sides carry q^{10/24}; compare the cores.
        let fp = Fp::new(p).unwrap();
        let core = |f: &[(u64, i64)]| Series::new(fp, EtaQuotient::new(f).expand_core(&fp, n));
        let lhs = big.mul(&core(&[(1, 2), (4, 2)])).unwrap();
        assert!(lhs.agrees_with(&core(&[(2, 5)])), "p = {p}");
    }
}

#[test]
fn level_four_mod_3_identities() {
    let n = 1000;
    let f3 = Fp::new(3).unwrap();
    assert_eq!(named_form(NamedForm::PForm, 3, n).unwrap().coeffs(), QSeries::one(f3, n).coeffs());
    let theta4 = named_form(NamedForm::ThetaBig, 3, n).unwrap().pow(4);
    let f = named_form(NamedForm::FForm, 3, n).unwrap();
    let rhs = QSeries::one(f3, n).add(&f.scale(&2)).unwrap();
    assert!(theta4.agrees_with(&rhs));
    let d2 = named_form(NamedForm::DDelta(2), 3, n).unwrap();
    assert!(d2.pow(2).agrees_with(&named_form(NamedForm::GForm, 3, n).unwrap()));
}

#[test]
fn ker_u3() {
    let app = level2_apparatus(30, 3000).unwrap();
    assert!(app.kernel_failures().unwrap().is_empty());
    assert!(app.h_of_delta().unwrap().is_zero());
}

#[test]
fn f_basis_support_and_theta_squared() {
    for m in (1..=100usize).filter(|m| m % 5 != 0) {
        let (i, j) = (m / 5, m % 5);
        let f = f_basis_element(i, j).unwrap().expand(500).unwrap();
        let allowed: [usize; 2] = if j == 1 || j == 4 { [1, 4] } else { [2, 3] };
        for (n, &c) in f.coeffs().iter().enumerate() {
            assert!(c == 0 || allowed.contains(&(n % 5)), "f_{m} has q^{n}");
        }
        let chi = kronecker(j as i64, 5).rem_euclid(5) as u32;
        assert_eq!(f.theta_op().theta_op().coeffs(), f.scale(&chi).coeffs(), "f_{m}");
    }
}

#[test]
fn projection_commutes_with_hecke() {
    let n = 13 * 400;
    for e in 1..=8u64 {
        let f = named_form(NamedForm::FForm, 3, n).unwrap().pow(e);
        for ell in [5u64, 7, 11, 13] {
            let t = |g: &QSeries| hecke_t(g, &HeckeSpec::new(ell, 3).with_weight(2 * e as i64)).unwrap();
            let image = t(&f);
            for i in 0..6usize {
                let j = i * ell as usize % 6;
                let lhs = t(&rho_projection(&f, i));
                assert!(lhs.agrees_with(&rho_projection(&image, j)), "F^{e}, ell = {ell}, i = {i}");
            }
        }
    }
}

#[test]
fn w_spans_map_as_predicted() {
    let w1 = w_span(WSpan::W1, 3 * 61 + 3);
    let w5 = w_span(WSpan::W5, 3 * 61 + 3);
    for ell in [5u64, 7, 11, 13] {
        for k in (1..=60usize).filter(|k| k % 2 != 0 && k % 3 != 0) {
            let img = hecke_on_poly(&d2_power_in_f(k), ell, true, 16).unwrap();
            let source_w1 = k % 6 == 1;
            let target_w1 = source_w1 == (ell % 6 == 1);
            let span = if target_w1 { &w1 } else { &w5 };
            assert!(span.contains(img.coeffs()), "D2^{k} | T'_{ell}");
        }
    }
}

#[test]
fn closed_formula_mod_p_matches_repeated_hecke() {
    let p = 5;
    let f5 = Fp::new(p).unwrap();
    for ell in [2u64, 3] {
        for r in 1..=4u32 {
            let len = ell.pow(r) as usize * 31;
            let d = named_form(NamedForm::Delta, p, len).unwrap();
            let mut t = d.clone();
            for _ in 0..r {
                t = hecke_t(&t, &HeckeSpec::new(ell, p)).unwrap();
            }
            let acc = |m: u64| d.coeff(m as usize).copied();
            for n in 0..=30u64 {
                let v = iterated_coeff(&f5, &acc, r, n, ell, 12).unwrap();
                assert_eq!(v, t.coeffs()[n as usize], "ell = {ell}, r = {r}, n = {n}");
            }
        }
    }
}

#[test]
fn weight_factor_is_weight_independent() {
    for (p, ells) in [(3u32, [5u64, 7, 11, 13]), (5, [11, 19, 29, 31]), (7, [13, 29, 41, 43])] {
        for ell in ells {
            for k in (0..200i64).step_by(2) {
                assert_eq!(HeckeSpec::new(ell, p).weight_factor_mod_p(k), (ell % p as u64) as u32);
            }
        }
    }
}

#[test]
fn trajectories_descend_to_zero() {
    let specs = [IndexSpec::delta(3, 7), IndexSpec::delta(5, 19), IndexSpec::delta(7, 13), IndexSpec::d2(5)];
    for spec in specs {
        for k in [1u64, 5, 7, 11, 25, 49, 77, 121] {
            let rep = nilpotency_index(k, &spec).unwrap();
            let t = &rep.degree_trajectory;
            assert_eq!(t.len(), rep.index, "{spec:?} k = {k}");
            assert_eq!(t.last(), Some(&Degree::NegInf));
            assert!(t.windows(2).all(|w| w[1] < w[0]));
            assert_eq!(index_fast(k, &spec).unwrap(), rep.index);
        }
    }
}

#[test]
fn partition_generating_identities() {
    for (p, t) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
        assert!(tcore_delta_identity(p, t, 2000, true).unwrap(), "({p}, {t})");
    }
    // The unscaled identity is false for p = 3.
    assert!(!tcore_delta_identity(3, 1, 2000, false).unwrap());
    for r in [1, 5, 7] {
        assert!(power_partition_d2_identity(r, 2000).unwrap(), "r = {r}");
    }
}
