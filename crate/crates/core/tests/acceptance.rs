//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Two statements are false as written and print FAIL: the mod-7 refined bound at k = 3
//! (criterion 1) and the literal a_3(8n-1) congruence (criterion 7). The tests pin those
//! failures to exactly the known counterexamples, so any other regression still panics.

use heckenil_core::hecke::iterated_coeff;
use heckenil_core::nilpotency::*;
use heckenil_core::partitions::*;
use heckenil_core::ring::{CoeffRing, Fp, Integers};
use heckenil_core::series::{
    euler_product_in, named_form, named_form_in, theta_expansion_in, EtaQuotient, NamedForm, Series, ThetaKind,
};
use num_bigint::BigInt;

// Tolerances. All comparisons are exact unless stated.
const THM13_K_MAX: u64 = 500;
const LEVEL4_K_MAX: u64 = 300;
const REDUCTION_K_MAX: u64 = 60;
const TABLE2_K_MAX: u64 = 2000;
const CONJ17_K_MAX: u64 = 2000;
const TCORE3_N_MAX: u64 = 10_000;
const TCORE5_N_MAX: u64 = 1_000;
const POWER12_N_MAX: u64 = 10_000;
const TRUNCATED_PRECISION: usize = 10_000;
const IDENTITY_PRECISION: usize = 10_000;

fn line(n: u32, ok: bool, detail: &str) {
    println!("criterion {n:>2}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
}

#[test]
fn criterion_01_delta_bounds() {
    let ks: Vec<u64> = (1..=THM13_K_MAX).collect();
    let cases: [(u32, &[u64]); 3] = [(3, &[2, 5, 7, 13]), (5, &[11, 19, 29, 31]), (7, &[13, 29, 41, 43])];
    let mut linear_fail = Vec::new();
    for (p, ells) in cases {
        for &ell in ells {
            let rep = verify_thm13(&ks, &IndexSpec::delta(p, ell), false).unwrap();
            if !rep.passed() {
                linear_fail.push((p, ell, rep.failures.clone()));
            }
        }
    }
    // Refined bounds: ell = 61 (p = 5) and ell = 29 (p = 7).
    let refined = |p: u32, ell: u64| -> Vec<u64> {
        let idx = nilpotency_indices(&ks, &IndexSpec::delta(p, ell)).unwrap();
        ks.iter()
            .zip(&idx)
            .filter(|&(&k, &n)| remark_bound(k, p, ell).is_some_and(|b| n > b))
            .map(|(&k, _)| k)
            .collect()
    };
    let r61 = refined(5, 61);
    let r29 = refined(7, 29);
    assert_eq!(remark_bound(600, 5, 61), None, "refined bounds only where p does not divide k");
    assert_eq!(remark_bound(601, 5, 61), Some(101));
    let ok = linear_fail.is_empty() && r61.is_empty() && r29.is_empty();
    line(
        1,
        ok,
        &format!(
            "linear bounds k <= {THM13_K_MAX}: {} violations; refined ell=61: {} violations; \
             refined ell=29 mod 7: violations at k = {r29:?} (Delta^3 | T'_29 = 4q + ... mod 7, index 2 > 1)",
            linear_fail.len(),
            r61.len()
        ),
    );
    assert!(linear_fail.is_empty(), "{linear_fail:?}");
    assert!(r61.is_empty(), "{r61:?}");
    // The only refined-bound counterexample in range.
    assert_eq!(r29, vec![3]);
    assert_eq!(index_fast(3, &IndexSpec::delta(7, 29)).unwrap(), 2);
}

#[test]
fn criterion_02_level4() {
    let ks: Vec<u64> = (1..=LEVEL4_K_MAX).filter(|k| k % 2 != 0 && k % 3 != 0).collect();
    let mut bad = Vec::new();
    for ell in [5u64, 7, 11, 13] {
        let idx = nilpotency_indices(&ks, &IndexSpec::d2(ell)).unwrap();
        for (&k, &n) in ks.iter().zip(&idx) {
            if n > 1 + (k / 3) as usize {
                bad.push((ell, k));
            }
        }
    }
    let mut red_bad = Vec::new();
    for ell in [5u64, 7, 11, 13] {
        let d2 = IndexSpec::d2(ell);
        let dl = IndexSpec::delta(3, ell);
        for k in 1..=REDUCTION_K_MAX {
            let base = index_fast(k, &d2).unwrap();
            if index_fast(3 * k, &d2).unwrap() > base {
                red_bad.push(("3k", ell, k));
            }
            if index_fast(2 * k, &d2).unwrap() > index_fast(k, &dl).unwrap() {
                red_bad.push(("2k", ell, k));
            }
        }
    }
    let ok = bad.is_empty() && red_bad.is_empty();
    line(
        2,
        ok,
        &format!(
            "D2 bound 1+k/3 for gcd(k,6)=1, k <= {LEVEL4_K_MAX}: {} violations; reductions k <= {REDUCTION_K_MAX}: {} violations",
            bad.len(),
            red_bad.len()
        ),
    );
    assert!(ok, "{bad:?} {red_bad:?}");
}

#[test]
fn criterion_03_table2() {
    let rep = verify_conjectures(TABLE2_K_MAX, Variant::D19Table).unwrap();
    line(3, rep.passed(), &format!("{} (exact integer equality)", rep.summary()));
    assert!(rep.passed());
    assert!(rep.checked >= 1590);
}

#[test]
fn criterion_04_s19() {
    let c: Vec<i64> = (0..4).map(|t| s_index(5u64.pow(t) + 1, Variant::S19Prime).unwrap() as i64 - 1).collect();
    let rec = ConjectureParams::for_variant(Variant::S19Prime).unwrap().recurrence;
    let seeds_ok = c[0] == 0 && c[1] == 2 && (0..4).all(|t| Some(c[t]) == rec.value(t));
    let rep = verify_conjectures(CONJ17_K_MAX, Variant::S19Prime).unwrap();
    let ok = seeds_ok && rep.passed();
    line(4, ok, &format!("c_0..c_3 = {c:?}; {}; {:?}", rep.summary(), rep.notes));
    assert!(ok);
}

#[test]
fn criterion_05_mod7() {
    let y = |k: u64| s_index(k, Variant::S29Double).unwrap() as i64 - 1;
    let (y1, y2, y3) = (y(2 * 7 + 1), y(2 * 49 + 1), y(2 * 343 + 1));
    let rec = ConjectureParams::for_variant(Variant::S29Double).unwrap().recurrence;
    let ok = y1 == 3 && y2 == 16 && y3 == 86 && rec.value(3) == Some(86);
    line(5, ok, &format!("y_1, y_2, y_3 = {y1}, {y2}, {y3}; recurrence y_3 = {:?}", rec.value(3)));
    assert!(ok);
}

#[test]
fn criterion_06_prop15() {
    let mut runs: Vec<(String, CongruenceReport)> = Vec::new();
    let mut push = |label: String, r: heckenil_core::Result<CongruenceReport>| runs.push((label, r.unwrap()));
    for m in [1, 3, 5] {
        push(format!("p=2 ell=5 m={m}"), check_prop15(Prop15Case::OneA, 2, 5, m, TRUNCATED_PRECISION, false));
    }
    for m in [1, 3] {
        push(format!("p=7 ell=13 m={m}"), check_prop15(Prop15Case::OneA, 7, 13, m, TRUNCATED_PRECISION, false));
    }
    for m in [1, 2, 3] {
        let ell = prop15_ell(Prop15Case::Two, 2, m);
        push(format!("p=2 part 2 Delta m={m} ell={ell}"), check_prop15(Prop15Case::Two, 2, ell, m, TRUNCATED_PRECISION, false));
        push(format!("p=2 part 2 D3 m={m} ell={ell}"), check_prop15(Prop15Case::Two, 2, ell, m, TRUNCATED_PRECISION, true));
    }
    for m in [1, 3] {
        push(format!("p=3 D2 ell=5 m={m}"), check_prop15(Prop15Case::OneB, 3, 5, m, TRUNCATED_PRECISION, false));
    }
    let l = prop15_ell(Prop15Case::OneA, 23, 1);
    push(format!("p=23 ell={l}"), check_prop15(Prop15Case::OneA, 23, l, 1, TRUNCATED_PRECISION, false));
    let l = prop15_ell(Prop15Case::OneB, 11, 1);
    push(format!("p=11 ell={l}"), check_prop15(Prop15Case::OneB, 11, l, 1, TRUNCATED_PRECISION, false));
    let l = prop15_ell(Prop15Case::OneC, 7, 1);
    push(format!("D3 p=7 ell={l}"), check_prop15(Prop15Case::OneC, 7, l, 1, TRUNCATED_PRECISION, false));
    push("D4 p=5 ell=13".into(), check_prop15(Prop15Case::OneD, 5, 13, 1, TRUNCATED_PRECISION, false));

    let failed: Vec<&str> = runs.iter().filter(|(_, r)| !r.passed()).map(|(l, _)| l.as_str()).collect();
    let exact = runs.iter().filter(|(_, r)| r.rigor == Rigor::ExactBasis).count();
    let truncated: Vec<_> = runs.iter().filter(|(_, r)| r.rigor == Rigor::Truncated).collect();
    assert!(truncated.iter().all(|(_, r)| r.precision.unwrap_or(0) >= TRUNCATED_PRECISION));
    line(
        6,
        failed.is_empty(),
        &format!("{} cases ({exact} exact in basis, {} truncated to {TRUNCATED_PRECISION}); failed: {failed:?}", runs.len(), truncated.len()),
    );
    for (l, r) in &runs {
        println!("    {l}: {}", r.summary());
    }
    // The exact-basis cases of the criterion must be decided exactly.
    for (l, r) in &runs {
        if l.starts_with("p=2 ell=5") || l.starts_with("p=7 ell=13") || l.starts_with("p=3 D2") || l.contains("part 2 Delta") {
            assert_eq!(r.rigor, Rigor::ExactBasis, "{l}");
        }
    }
    assert!(failed.is_empty());
}

#[test]
fn criterion_07_tcores() {
    let literal = check_thm16(3, 1, 1, &[2], 1, TCORE3_N_MAX).unwrap();
    let scaled_note = literal.notes.iter().find(|n| n.contains("divided by 3")).cloned().unwrap_or_default();
    let five = check_thm16(5, 1, 2, &[19], 1, TCORE5_N_MAX).unwrap();
    let seven = check_thm16(7, 1, 2, &[13, 41], 1, 200).unwrap();
    let ok = literal.passed() && five.passed() && seven.passed();
    line(
        7,
        ok,
        &format!(
            "a_3(8n-1) = -a_3(2n-1) literal: {} failures of {} (first n = {:?}; a_3(7) = 0, a_3(1) = 1); \
             scaled form: {scaled_note}; a_5(19n-1): {}; Delta^k | T'_13 | T'_41 mod 7: {}",
            literal.failures.len(),
            literal.checked,
            literal.failures.first(),
            five.summary(),
            seven.summary()
        ),
    );
    assert!(five.passed() && seven.passed());
    assert_eq!(five.rigor, Rigor::ExactBasis);
    // The literal statement fails from n = 1 on; the rescaled statement holds throughout.
    assert_eq!(literal.failures.first(), Some(&1));
    assert!(scaled_note.contains(": 0 failures"), "{scaled_note}");
    let a3 = tcore_series(3, 3, 8).unwrap();
    assert_eq!((a3.coeffs()[7], a3.coeffs()[1]), (0, 1));
}

#[test]
fn criterion_08_power_partitions() {
    let rep = check_thm18(1, 2, &[5], 0, POWER12_N_MAX).unwrap();
    let r5 = check_thm18(5, 1, &[5], 1, 1000).unwrap();
    let r7 = check_thm18(7, 1, &[5], 1, 1000).unwrap();
    let ok = rep.passed();
    line(
        8,
        ok,
        &format!(
            "p_12((5n-1)/2) = 0 mod 3: {}; exponent readings holding: r=5 -> {}, r=7 -> {}",
            rep.summary(),
            r5.get("readings_holding").unwrap_or("?"),
            r7.get("readings_holding").unwrap_or("?")
        ),
    );
    println!("    r=5 notes: {:?}", r5.notes);
    assert!(ok);
    assert!(r5.passed() && r7.passed());
}

fn direct(c: &dyn Fn(u64) -> BigInt, r: u32, n: u64, ell: u64, w: &BigInt) -> BigInt {
    if r == 0 {
        return c(n);
    }
    let mut v = direct(c, r - 1, ell * n, ell, w);
    if n % ell == 0 {
        v += w * direct(c, r - 1, n / ell, ell, w);
    }
    v
}

fn lemma_oracle(c: &dyn Fn(u64) -> BigInt, limit: u64, k: i64) -> (u64, Vec<(u64, u32, u64)>) {
    let z = Integers::<BigInt>::new();
    let acc = |m: u64| (m < limit).then(|| c(m));
    let (mut checked, mut bad) = (0, Vec::new());
    for ell in [2u64, 3, 5] {
        let w = BigInt::from(ell).pow((k - 1) as u32);
        for r in 0..=6u32 {
            for n in 0..=50u64 {
                if ell.pow(r) * n >= limit {
                    continue;
                }
                checked += 1;
                if iterated_coeff(&z, &acc, r, n, ell, k).unwrap() != direct(c, r, n, ell, &w) {
                    bad.push((ell, r, n));
                }
            }
        }
    }
    (checked, bad)
}

fn frobenius_ok(p: u32) -> bool {
    let f = named_form(NamedForm::Delta, p, IDENTITY_PRECISION).unwrap();
    f.pow(p as u64).agrees_with(&f.dilate(p as usize))
}

#[test]
fn criterion_09_oracles() {
    // Closed formula for c_r(n) against direct iteration, over Z.
    let seq = |m: u64| BigInt::from((m.wrapping_mul(2_654_435_761) % 100_003) as i64 - 50_001);
    let (n_seq, bad_seq) = lemma_oracle(&seq, 5u64.pow(6) * 51, 12);
    let delta = named_form_in(Integers::<i128>::new(), NamedForm::Delta, 40_000).unwrap();
    let tau = |m: u64| BigInt::from(delta.coeffs()[m as usize]);
    let (n_tau, bad_tau) = lemma_oracle(&tau, 40_000, 12);

    // Hook lengths against the generating function.
    let mut hook_bad = Vec::new();
    for t in 1..=7u64 {
        let s = heckenil_core::partitions::tcore_series_in(Integers::<i64>::new(), t, 31);
        for n in 0..=30u64 {
            if brute_force_tcore(t, n).unwrap() as i64 != s.coeffs()[n as usize] {
                hook_bad.push((t, n));
            }
        }
    }

    // Frobenius, Leibniz and eta/theta identities.
    let frob = [2u32, 3, 5, 7, 11].iter().all(|&p| frobenius_ok(p));
    let leibniz = [5u32, 7, 13].iter().all(|&p| {
        let f = named_form(NamedForm::Delta, p, IDENTITY_PRECISION).unwrap();
        let g = named_form(NamedForm::DDelta(2), p, IDENTITY_PRECISION).unwrap();
        let lhs = f.mul(&g).unwrap().theta_op();
        let rhs = f.theta_op().mul(&g).unwrap().add(&f.mul(&g.theta_op()).unwrap()).unwrap();
        lhs.coeffs() == rhs.coeffs()
    });
    let z = Integers::<i64>::new();
    let n = IDENTITY_PRECISION;
    let eta = theta_expansion_in(z, ThetaKind::Eta, n, 24).unwrap();
    let eta_prod = euler_product_in(z, 24, n).shift(1).truncate(n);
    let eta3 = theta_expansion_in(z, ThetaKind::Eta3, n, 8).unwrap();
    let eta3_prod = euler_product_in(z, 8, n).pow(3).shift(1).truncate(n);
    let theta = theta_expansion_in(z, ThetaKind::ThetaSqSum, n, 1).unwrap();
    // theta * eta(z)^2 eta(4z)^2 = eta(2z)^5 avoids dividing by eta; both sides carry q^{10/24}.
    let core = |f: &[(u64, i64)]| Series::new(z, EtaQuotient::new(f).expand_core(&z, n));
    let theta_lhs = theta.mul(&core(&[(1, 2), (4, 2)])).unwrap();
    let theta_rhs = core(&[(2, 5)]);
    let theta_ok = eta.coeffs() == eta_prod.coeffs()
        && eta3.coeffs() == eta3_prod.coeffs()
        && theta_lhs.coeffs() == theta_rhs.coeffs();
    let fp = Fp::new(7).unwrap();
    let d24 = named_form_in(fp, NamedForm::Delta, n).unwrap();
    let via_eta = EtaQuotient::new(&[(1, 24)]).expand(fp, n).unwrap();
    let delta_ok = d24.coeffs() == via_eta.coeffs() && frob_series_ok(&d24);

    let ok = bad_seq.is_empty() && bad_tau.is_empty() && hook_bad.is_empty() && frob && leibniz && theta_ok && delta_ok;
    line(
        9,
        ok,
        &format!(
            "closed formula vs direct: {n_seq} generic + {n_tau} tau cases, {} mismatches; \
             hook lengths t <= 7, n <= 30: {} mismatches; Frobenius {frob}, Leibniz {leibniz}, \
             eta/theta {theta_ok} (precision {IDENTITY_PRECISION})",
            bad_seq.len() + bad_tau.len(),
            hook_bad.len()
        ),
    );
    assert!(ok, "{bad_seq:?} {bad_tau:?} {hook_bad:?}");
}

fn frob_series_ok<R: CoeffRing<Elem = u32>>(f: &Series<R>) -> bool {
    let p = f.ring().characteristic().unwrap() as u64;
    let fp = f.pow(p);
    fp.coeffs().iter().enumerate().all(|(i, &c)| if i as u64 % p == 0 { c == f.coeffs()[i / p as usize] } else { c == 0 })
}

#[test]
fn criterion_10_crossover() {
    let rep = crossover_check(&BoundTable::medvedovsky());
    line(10, rep.passed(), &format!("{} (strict inequality)", rep.summary()));
    for n in &rep.notes {
        println!("    {n}");
    }
    assert!(rep.passed());
    assert_eq!(rep.rigor, Rigor::Arithmetic);
}
