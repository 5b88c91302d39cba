//! Hecke and `U` operators on q-expansions, and the closed formula for iterated coefficients.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::ring::{CoeffRing, Fp};
use crate::series::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeckeSpec {
    pub ell: u64,
    /// Falls back to the series' own weight when `None`.
    pub weight: Option<i64>,
    pub p: u32,
    /// Use `T'_ell = T_ell - 2` when `ell = 1 mod p`.
    pub modified: bool,
    /// Nebentypus as a Kronecker discriminant; `None` is the trivial character.
    pub character: Option<i64>,
}

impl HeckeSpec {
    pub fn new(ell: u64, p: u32) -> Self {
        HeckeSpec { ell, weight: None, p, modified: false, character: None }
    }

    pub fn modified(ell: u64, p: u32) -> Self {
        HeckeSpec { modified: true, ..Self::new(ell, p) }
    }

    pub fn with_weight(mut self, k: i64) -> Self {
        self.weight = Some(k);
        self
    }

    pub fn with_character(mut self, d: i64) -> Self {
        self.character = Some(d);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !arith::is_prime(self.ell) {
            return Err(Error::Hypothesis(format!("ell = {} is not prime", self.ell)));
        }
        if self.modified {
            let r = self.ell % self.p as u64;
            if self.ell == self.p as u64 || !(r == 1 || r == self.p as u64 - 1) {
                return Err(Error::Hypothesis(format!(
                    "modified operator needs ell = +-1 mod p; ell = {} and p = {}",
                    self.ell, self.p
                )));
            }
        }
        Ok(())
    }

    /// Whether the `-2` shift of the modified operator applies.
    pub fn subtracts_two(&self) -> bool {
        self.modified && self.ell % self.p as u64 == 1
    }

    /// `chi(ell) ell^{k-1}` mod `p`.
    pub fn weight_factor_mod_p(&self, k: i64) -> u32 {
        let p = self.p as u64;
        let chi = self.character.map_or(1, |d| arith::kronecker(d, self.ell as i64));
        if self.ell % p == 0 {
            return if k == 1 { arith::residue(chi as i64, self.p) } else { 0 };
        }
        let e = (k - 1).rem_euclid(p as i64 - 1) as u64;
        let v = arith::pow_mod(self.ell, e, p);
        arith::residue(chi as i64 * v as i64, self.p)
    }
}

/// `ell^{k-1}` (times the character) as a ring element.
fn weight_factor<R: CoeffRing>(ring: &R, spec: &HeckeSpec, k: i64) -> Result<R::Elem> {
    match ring.characteristic() {
        Some(_) => Ok(ring.from_i64(spec.weight_factor_mod_p(k) as i64)),
        None => {
            if k < 1 {
                return Err(Error::Hypothesis(format!("ell^(k-1) is not integral at k = {k}")));
            }
            let chi = spec.character.map_or(1, |d| arith::kronecker(d, spec.ell as i64));
            let v = ring.int_pow(spec.ell, (k - 1) as u64);
            Ok(ring.mul(&ring.from_i64(chi as i64), &v))
        }
    }
}

/// `f | T_ell`; precision drops to `floor(N / ell)`.
pub fn hecke_t<R: CoeffRing>(f: &Series<R>, spec: &HeckeSpec) -> Result<Series<R>> {
    spec.validate()?;
    if let Some(p) = f.ring().characteristic() {
        if p != spec.p {
            return Err(Error::ModulusMismatch { left: p, right: spec.p });
        }
    }
    let k = spec.weight.or(f.weight()).ok_or(Error::MissingWeight)?;
    let ell = spec.ell as usize;
    if f.precision() < ell {
        return Err(Error::PrecisionTooLow { need: ell, have: f.precision() });
    }
    let ring = f.ring();
    let factor = weight_factor(ring, spec, k)?;
    let out_len = f.precision() / ell;
    let c = f.coeffs();
    let mut out: Vec<R::Elem> = (0..out_len).map(|n| c[ell * n].clone()).collect();
    for m in 0..out_len.div_ceil(ell) {
        let n = ell * m;
        out[n] = ring.add(&out[n], &ring.mul(&factor, &c[m]));
    }
    if spec.subtracts_two() {
        let two = ring.from_i64(2);
        for (n, v) in out.iter_mut().enumerate() {
            *v = ring.sub(v, &ring.mul(&two, &c[n]));
        }
    }
    let mut s = Series::new(ring.clone(), out).with_weight(k);
    if let Some(l) = f.level() {
        s = s.with_level(l);
    }
    Ok(s)
}

/// `f | U_m`: coefficient `n` becomes `c(mn)`.
pub fn u_op<R: CoeffRing>(f: &Series<R>, m: usize) -> Result<Series<R>> {
    if m == 0 || f.precision() < m {
        return Err(Error::PrecisionTooLow { need: m.max(1), have: f.precision() });
    }
    let out = f.coeffs().iter().step_by(m).cloned().collect::<Vec<_>>();
    let mut s = Series::new(f.ring().clone(), out[..f.precision() / m].to_vec());
    if let Some(w) = f.weight() {
        s = s.with_weight(w);
    }
    Ok(s)
}

/// `c_r(n)` for `f | T_ell^r` from the closed binomial formula in `s = v_ell(n)`.
///
/// `coeff(m)` returns `c(m)` or `None` when out of range. Terms whose index is not an
/// integer vanish, as do binomials `C(r, i)` with `i > r`.
pub fn iterated_coeff<R: CoeffRing>(
    ring: &R,
    coeff: &dyn Fn(u64) -> Option<R::Elem>,
    r: u32,
    n: u64,
    ell: u64,
    k: i64,
) -> Result<R::Elem> {
    let spec = HeckeSpec::new(ell, ring.characteristic().unwrap_or(2));
    let w = weight_factor(ring, &spec, k)?;
    let get = |m: u64| coeff(m).ok_or(Error::AccessorRange { index: m });
    if n == 0 {
        let base = ring.add(&ring.one(), &w);
        return Ok(ring.mul(&ring.pow(&base, r as u64), &get(0)?));
    }
    let s = arith::valuation(n, ell);
    let binom = pascal_row(ring, r);
    let b = |i: i64| -> R::Elem {
        if i < 0 || i > r as i64 {
            ring.zero()
        } else {
            binom[i as usize].clone()
        }
    };
    // c(ell^e n) for possibly negative e; zero when not an integer index.
    let shifted = |e: i64| -> Result<Option<R::Elem>> {
        if e >= 0 {
            let m = ell
                .checked_pow(e as u32)
                .and_then(|x| x.checked_mul(n))
                .ok_or(Error::AccessorRange { index: u64::MAX })?;
            get(m).map(Some)
        } else if (-e) as u32 <= s {
            get(n / ell.pow((-e) as u32)).map(Some)
        } else {
            Ok(None)
        }
    };
    let mut total = ring.zero();
    let (r, s) = (r as i64, s as i64);
    for i in 0..=s.min(r) {
        if let Some(c) = shifted(r - 2 * i)? {
            let t = ring.mul(&b(i), &ring.mul(&ring.pow(&w, i as u64), &c));
            total = ring.add(&total, &t);
        }
    }
    for j in (s + 1)..=((r + s) / 2) {
        let coef = ring.sub(&b(j), &b(j - s - 1));
        if ring.is_zero(&coef) {
            continue;
        }
        if let Some(c) = shifted(r - 2 * j)? {
            let t = ring.mul(&coef, &ring.mul(&ring.pow(&w, j as u64), &c));
            total = ring.add(&total, &t);
        }
    }
    Ok(total)
}

fn pascal_row<R: CoeffRing>(ring: &R, r: u32) -> Vec<R::Elem> {
    let mut row = vec![ring.one()];
    for _ in 0..r {
        let mut next = vec![ring.one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = ring.add(&row[i - 1], &row[i]);
        }
        row = next;
    }
    row
}

/// `c(ell^{p^r} n) - ell^{k-1} c(ell^{p^r - 2} n)` mod `p`, the value of `c_{p^r}(n)` mod `p`
/// for `ell` not dividing `n`.
pub fn iterated_coeff_mod_p(
    coeff: &dyn Fn(u64) -> Option<u32>,
    r: u32,
    n: u64,
    ell: u64,
    k: i64,
    p: u32,
) -> Result<u32> {
    if n % ell == 0 {
        return Err(Error::EllDividesN { ell, n });
    }
    if ell == p as u64 || r == 0 {
        return Err(Error::Hypothesis("need r >= 1 and ell != p".into()));
    }
    let pr = (p as u64)
        .checked_pow(r)
        .ok_or_else(|| Error::TooLarge(format!("p^r with p = {p}, r = {r}")))?;
    let at = |e: u64| -> Result<u32> {
        let m = u32::try_from(e)
            .ok()
            .and_then(|e| ell.checked_pow(e))
            .and_then(|x| x.checked_mul(n))
            .ok_or(Error::AccessorRange { index: u64::MAX })?;
        coeff(m).ok_or(Error::AccessorRange { index: m })
    };
    let fp = Fp::new(p)?;
    let w = HeckeSpec::new(ell, p).weight_factor_mod_p(k);
    let hi = at(pr)?;
    let lo = at(pr - 2)?;
    Ok(fp.sub(&hi, &fp.mul(&w, &lo)))
}

/// Exact Ramanujan `tau(n)` through Hecke multiplicativity, for `n` with all prime-power
/// factors taken from a table of `tau` at primes.
pub fn tau_exact(n: u64, tau_at: &dyn Fn(u64) -> BigInt) -> BigInt {
    if n == 0 {
        return BigInt::from(0);
    }
    let mut result = BigInt::from(1);
    let mut m = n;
    let mut q = 2u64;
    while m > 1 {
        if q * q > m {
            q = m;
        }
        if m % q == 0 {
            let a = arith::valuation(m, q);
            m /= q.pow(a);
            // tau(q^{a+1}) = tau(q) tau(q^a) - q^11 tau(q^{a-1})
            let tq = tau_at(q);
            let q11 = BigInt::from(q).pow(11);
            let (mut prev, mut cur) = (BigInt::from(1), tq.clone());
            for _ in 1..a {
                let next = &tq * &cur - &q11 * &prev;
                prev = cur;
                cur = next;
            }
            result *= cur;
        }
        q += 1;
    }
    result
}
