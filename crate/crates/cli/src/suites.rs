//! The seeded basis-invariant suite behind `verify --suite basis`.

use heckenil_core::basis::{
    d2_power_in_f, hecke_on_poly, level2_apparatus, shared_matrix, to_poly, w_span, BasisTag, Degree, PolyRep,
    WSpan,
};
use heckenil_core::report::{CongruenceReport, Rigor};
use heckenil_core::Result;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

const MAX_DEGREE: usize = 200;

fn default_ell(p: u32) -> u64 {
    match p {
        2 => 5,
        3 => 7,
        5 => 19,
        _ => 13,
    }
}

pub fn basis_suite(seed: u64, samples: usize, slack: usize) -> Result<Vec<CongruenceReport>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let tags: Vec<BasisTag> = [2u32, 3, 5, 7]
        .into_iter()
        .map(BasisTag::delta)
        .chain([Ok(BasisTag::f_basis())])
        .collect::<Result<_>>()?;

    let mut round = CongruenceReport::new("basis.round_trip", Rigor::ExactBasis)
        .param("seed", seed)
        .param("max_degree", MAX_DEGREE);
    let mut sample_no = 0;
    for &tag in &tags {
        for _ in 0..samples {
            let d = rng.random_range(1..=MAX_DEGREE);
            let coeffs: Vec<u32> = (0..=d).map(|_| rng.random_range(0..tag.p)).collect();
            let pr = PolyRep::new(tag, coeffs);
            let q = pr.expand(d + 1 + slack)?;
            round.record(sample_no, to_poly(&q, tag, d, slack)? == pr);
            sample_no += 1;
        }
    }

    let mut columns = CongruenceReport::new("basis.matrix_columns", Rigor::ExactBasis).param("seed", seed);
    let mut descent = CongruenceReport::new("basis.strict_descent", Rigor::ExactBasis).param("seed", seed);
    for &tag in &tags[..4] {
        let ell = default_ell(tag.p);
        let modified = tag.p != 2;
        let m = shared_matrix(tag, ell, modified, MAX_DEGREE, slack)?;
        for _ in 0..samples.min(8) {
            let j = rng.random_range(0..=MAX_DEGREE);
            let direct = hecke_on_poly(&PolyRep::monomial(tag, j), ell, modified, slack)?;
            columns.record(j as u64, m.column(j) == direct);
            if j > 0 {
                descent.record(j as u64, direct.degree() < Degree::Finite(j as i64));
            }
        }
    }

    let n = 1000;
    let app = level2_apparatus(30, 3 * n)?;
    let mut level4 = CongruenceReport::new("basis.level4", Rigor::Truncated);
    level4.precision = Some(3 * n);
    level4.record(0, app.d2.pow(2).agrees_with(&app.g));
    level4.record(1, app.h_of_delta()?.is_zero());
    level4.record(2, app.kernel_failures()?.is_empty());
    level4.note("0: D2^2 = G; 1: h(Delta) = 0; 2: U_3 kills g_i for i != 2 mod 3, i <= 30");

    let mut spans = CongruenceReport::new("basis.w_spans", Rigor::ExactBasis);
    let (w1, w5) = (w_span(WSpan::W1, 186), w_span(WSpan::W5, 186));
    for ell in [5u64, 7, 11, 13] {
        for k in (1..=60usize).filter(|k| k % 2 != 0 && k % 3 != 0) {
            let img = hecke_on_poly(&d2_power_in_f(k), ell, true, slack)?;
            let to_w1 = (k % 6 == 1) == (ell % 6 == 1);
            let span = if to_w1 { &w1 } else { &w5 };
            spans.record(k as u64, span.contains(img.coeffs()));
        }
    }
    spans.n_range = (1, 60);

    Ok(vec![round, columns, descent, level4, spans])
}
