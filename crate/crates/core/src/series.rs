//! Truncated q-expansions and the classical forms built from them.
//!
//! A [`Series`] knows exactly `precision` coefficients `c(0..N)`; nothing beyond that is
//! ever reported. Eta quotients are expanded through sparse pentagonal / Jacobi factors, and
//! over `F_p` their exponents are first pushed through Frobenius (`E(q)^p = E(q^p)`) so an
//! exponent such as 24 costs a couple of sparse passes instead of 24.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::ring::{CoeffRing, Fp};

pub use crate::arith::kronecker;

#[derive(Debug, Clone, PartialEq)]
pub struct Series<R: CoeffRing> {
    ring: R,
    coeffs: Vec<R::Elem>,
    weight: Option<i64>,
    level: Option<u64>,
}

impl<R: CoeffRing> Series<R> {
    pub fn new(ring: R, coeffs: Vec<R::Elem>) -> Self {
        Series { ring, coeffs, weight: None, level: None }
    }

    pub fn from_i64(ring: R, values: &[i64]) -> Self {
        let coeffs = values.iter().map(|&v| ring.from_i64(v)).collect();
        Series::new(ring, coeffs)
    }

    pub fn zero(ring: R, precision: usize) -> Self {
        let coeffs = vec![ring.zero(); precision];
        Series::new(ring, coeffs)
    }

    /// The constant 1 (weight 0) to the given precision.
    pub fn one(ring: R, precision: usize) -> Self {
        Self::monomial(ring, 0, precision).with_weight(0)
    }

    /// `q^e` to the given precision (zero if `e >= precision`).
    pub fn monomial(ring: R, e: usize, precision: usize) -> Self {
        let mut s = Self::zero(ring, precision);
        if e < precision {
            s.coeffs[e] = s.ring.one();
        }
        s
    }

    pub fn with_weight(mut self, weight: i64) -> Self {
        self.weight = Some(weight);
        self
    }

    pub fn with_level(mut self, level: u64) -> Self {
        self.level = Some(level);
        self
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }
    pub fn weight(&self) -> Option<i64> {
        self.weight
    }
    pub fn level(&self) -> Option<u64> {
        self.level
    }
    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<R::Elem> {
        self.coeffs
    }

    /// `c(n)`, or `None` when `n` is beyond the known precision.
    pub fn coeff(&self, n: usize) -> Option<&R::Elem> {
        self.coeffs.get(n)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    /// Index of the first nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !self.ring.is_zero(c))
    }

    pub fn truncate(mut self, precision: usize) -> Self {
        self.coeffs.truncate(precision);
        self
    }

    /// Coefficientwise equality on the shared precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = self.precision().min(other.precision());
        self.coeffs[..n] == other.coeffs[..n]
    }

    fn binary(&self, other: &Self, f: impl Fn(&R::Elem, &R::Elem) -> R::Elem) -> Result<Self> {
        self.ring.check_same(&other.ring)?;
        let n = self.precision().min(other.precision());
        let coeffs = (0..n).map(|i| f(&self.coeffs[i], &other.coeffs[i])).collect();
        Ok(Series {
            ring: self.ring.clone(),
            coeffs,
            weight: same(self.weight, other.weight),
            level: lcm_opt(self.level, other.level),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.binary(other, |a, b| self.ring.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.binary(other, |a, b| self.ring.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        self.map(|c| self.ring.neg(c))
    }

    pub fn scale(&self, s: &R::Elem) -> Self {
        self.map(|c| self.ring.mul(s, c))
    }

    fn map(&self, f: impl Fn(&R::Elem) -> R::Elem) -> Self {
        Series {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
            weight: self.weight,
            level: self.level,
        }
    }

    /// Truncated product; precision is the smaller of the two, weights add.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.ring.check_same(&other.ring)?;
        let n = self.precision().min(other.precision());
        let coeffs = self.ring.mul_dense(&self.coeffs[..n], &other.coeffs[..n], n);
        Ok(Series {
            ring: self.ring.clone(),
            coeffs,
            weight: self.weight.zip(other.weight).map(|(a, b)| a + b),
            level: lcm_opt(self.level, other.level),
        })
    }

    /// `f^e`. In characteristic `p <= 7` with `e >= p` the exponent is split into base-`p`
    /// digits and each digit block is a dilation of `f` (Frobenius).
    pub fn pow(&self, e: u64) -> Self {
        let n = self.precision();
        let mut acc = Series::one(self.ring.clone(), n);
        acc.level = self.level;
        match self.ring.characteristic() {
            Some(p) if p <= 7 && e >= p as u64 => {
                let mut scale = 1usize;
                for d in arith::digits(e, p as u64) {
                    if d > 0 {
                        let block = self.dilate_to(scale, n);
                        acc = acc.mul(&block.pow_binary(d)).expect("same ring");
                    }
                    scale = scale.saturating_mul(p as usize);
                }
            }
            _ => acc = self.pow_binary(e),
        }
        acc.weight = self.weight.map(|w| w * e as i64);
        acc
    }

    fn pow_binary(&self, mut e: u64) -> Self {
        let mut acc = Series::one(self.ring.clone(), self.precision());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        acc.weight = None;
        acc
    }

    /// Substitution `q -> q^m`. Indices below `m * N` are determined.
    pub fn dilate(&self, m: usize) -> Self {
        assert!(m >= 1);
        let n = self.precision().saturating_mul(m);
        let mut coeffs = vec![self.ring.zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * m] = c.clone();
        }
        Series {
            ring: self.ring.clone(),
            coeffs,
            weight: self.weight,
            level: self.level.map(|l| l * m as u64),
        }
    }

    /// `f(q^m)` truncated to `len` coefficients (at most `m * N`).
    pub fn dilate_to(&self, m: usize, len: usize) -> Self {
        assert!(m >= 1);
        let len = len.min(self.precision().saturating_mul(m));
        let mut coeffs = vec![self.ring.zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            match i.checked_mul(m) {
                Some(j) if j < len => coeffs[j] = c.clone(),
                _ => break,
            }
        }
        Series {
            ring: self.ring.clone(),
            coeffs,
            weight: self.weight,
            level: self.level.map(|l| l * m as u64),
        }
    }

    /// Multiplication by `q^s`.
    pub fn shift(&self, s: usize) -> Self {
        let mut coeffs = vec![self.ring.zero(); s];
        coeffs.extend(self.coeffs.iter().cloned());
        Series { coeffs, ..self.clone() }
    }

    /// `θ = q d/dq`: coefficient `n` becomes `n c(n)`. Over `F_p` the weight grows by `p + 1`.
    pub fn theta_op(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| self.ring.mul(&self.ring.from_i64(n as i64), c))
            .collect();
        let bump = match self.ring.characteristic() {
            Some(p) => p as i64 + 1,
            None => 2,
        };
        Series {
            ring: self.ring.clone(),
            coeffs,
            weight: self.weight.map(|w| w + bump),
            level: self.level,
        }
    }
}

fn same(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) if x == y => Some(x),
        _ => None,
    }
}

fn lcm_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x / arith::gcd(x, y) * y),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Sorted `(exponent, coefficient)` terms of `E(q^delta) = prod (1 - q^{delta n})` below `len`.
pub fn pentagonal_terms(delta: usize, len: usize) -> Vec<(usize, i64)> {
    let mut terms = vec![(0usize, 1i64)];
    let mut m = 1usize;
    loop {
        let a = delta * m * (3 * m - 1) / 2;
        if a >= len {
            break;
        }
        let sign = if m % 2 == 1 { -1 } else { 1 };
        terms.push((a, sign));
        let b = delta * m * (3 * m + 1) / 2;
        if b < len {
            terms.push((b, sign));
        }
        m += 1;
    }
    terms.sort_unstable();
    terms
}

/// Terms of `E(q^delta)^3 = sum (-1)^n (2n+1) q^{delta n(n+1)/2}` below `len`.
pub fn jacobi_cube_terms(delta: usize, len: usize) -> Vec<(usize, i64)> {
    let mut terms = Vec::new();
    let mut n = 0usize;
    loop {
        let e = delta * n * (n + 1) / 2;
        if e >= len {
            break;
        }
        let sign = if n % 2 == 0 { 1 } else { -1 };
        terms.push((e, sign * (2 * n as i64 + 1)));
        n += 1;
    }
    terms
}

/// `prod_{n>=1} (1 - q^{delta n})` to precision `n` over `F_p`.
pub fn euler_product(delta: usize, p: u32, n: usize) -> Result<QSeries> {
    let ring = Fp::new(p)?;
    Ok(euler_product_in(ring, delta, n))
}

pub fn euler_product_in<R: CoeffRing>(ring: R, delta: usize, n: usize) -> Series<R> {
    assert!(delta >= 1);
    let mut coeffs = vec![ring.zero(); n];
    for (e, c) in pentagonal_terms(delta, n) {
        coeffs[e] = ring.from_i64(c);
    }
    Series::new(ring, coeffs)
}

/// One sparse pass of an expansion plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pass {
    /// Multiply (`true`) or divide (`false`) by `E(q^delta)`.
    Euler(usize, bool),
    /// Multiply or divide by `E(q^delta)^3` through its Jacobi series.
    Cube(usize, bool),
}

/// `q^{sum delta r / 24} prod eta(delta z)^{r}` up to the leading power of `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaQuotient {
    /// `delta -> r`.
    pub factors: BTreeMap<u64, i64>,
}

impl EtaQuotient {
    pub fn new(factors: &[(u64, i64)]) -> Self {
        let mut map = BTreeMap::new();
        for &(d, r) in factors {
            assert!(d >= 1);
            *map.entry(d).or_insert(0) += r;
        }
        map.retain(|_, r| *r != 0);
        EtaQuotient { factors: map }
    }

    /// Leading exponent `sum delta r / 24`; errors unless it is a nonnegative integer.
    pub fn q_order(&self) -> Result<usize> {
        let s: i64 = self.factors.iter().map(|(&d, &r)| d as i64 * r).sum();
        if s < 0 || s % 24 != 0 {
            return Err(Error::NonIntegralExponent(format!(
                "eta quotient {:?} has leading exponent {s}/24",
                self.factors
            )));
        }
        Ok((s / 24) as usize)
    }

    /// Weight `sum r / 2` when integral.
    pub fn weight(&self) -> Option<i64> {
        let s: i64 = self.factors.values().sum();
        (s % 2 == 0).then_some(s / 2)
    }

    pub fn level(&self) -> u64 {
        self.factors.keys().fold(1, |l, &d| l / arith::gcd(l, d) * d)
    }

    pub fn pow(&self, j: u64) -> Self {
        EtaQuotient {
            factors: self
                .factors
                .iter()
                .map(|(&d, &r)| (d, r * j as i64))
                .filter(|(_, r)| *r != 0)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut map = self.factors.clone();
        for (&d, &r) in &other.factors {
            *map.entry(d).or_insert(0) += r;
        }
        map.retain(|_, r| *r != 0);
        EtaQuotient { factors: map }
    }

    /// Sparse passes reproducing `prod E(q^delta)^r` below `len`. In characteristic `p` the
    /// exponents are rewritten with balanced base-`p` digits, moving `p^i` into `q^{delta p^i}`.
    fn plan(&self, characteristic: Option<u32>, len: usize) -> Vec<Pass> {
        let mut net: BTreeMap<u64, i64> = BTreeMap::new();
        match characteristic {
            Some(p) => {
                let p = p as i64;
                let mut work = self.factors.clone();
                while let Some((&d, &r)) = work.iter().next() {
                    work.remove(&d);
                    if d as usize >= len {
                        continue;
                    }
                    let digit = balanced_digit(r, p);
                    if digit != 0 {
                        *net.entry(d).or_insert(0) += digit;
                    }
                    let carry = (r - digit) / p;
                    if carry != 0 {
                        *work.entry(d * p as u64).or_insert(0) += carry;
                    }
                }
            }
            None => net = self.factors.clone(),
        }
        let mut passes = Vec::new();
        for (&d, &r) in &net {
            let d = d as usize;
            if d >= len || r == 0 {
                continue;
            }
            let up = r > 0;
            let mut m = r.unsigned_abs();
            while m >= 3 {
                passes.push(Pass::Cube(d, up));
                m -= 3;
            }
            for _ in 0..m {
                passes.push(Pass::Euler(d, up));
            }
        }
        passes
    }

    /// The series with the `q^{order}` factor removed, to precision `len`.
    pub fn expand_core<R: CoeffRing>(&self, ring: &R, len: usize) -> Vec<R::Elem> {
        let mut data = vec![ring.zero(); len];
        if len == 0 {
            return data;
        }
        data[0] = ring.one();
        self.apply_core(ring, &mut data);
        data
    }

    /// Multiply `data` in place by the core of this quotient.
    pub fn apply_core<R: CoeffRing>(&self, ring: &R, data: &mut Vec<R::Elem>) {
        let len = data.len();
        for pass in self.plan(ring.characteristic(), len) {
            match pass {
                Pass::Euler(d, true) => *data = ring.mul_sparse(data, &pentagonal_terms(d, len), len),
                Pass::Euler(d, false) => ring.div_sparse(data, &pentagonal_terms(d, len)),
                Pass::Cube(d, true) => *data = ring.mul_sparse(data, &jacobi_cube_terms(d, len), len),
                Pass::Cube(d, false) => ring.div_sparse(data, &jacobi_cube_terms(d, len)),
            }
        }
    }

    /// Full q-expansion to precision `n`.
    pub fn expand<R: CoeffRing>(&self, ring: R, n: usize) -> Result<Series<R>> {
        let order = self.q_order()?;
        let mut coeffs = vec![ring.zero(); order.min(n)];
        coeffs.extend(self.expand_core(&ring, n.saturating_sub(order)));
        let mut s = Series::new(ring, coeffs).with_level(self.level());
        s.weight = self.weight();
        Ok(s)
    }
}

/// Balanced digit of `r` base `p`: `(-p/2, p/2]` for odd `p`, non-adjacent form for `p = 2`.
fn balanced_digit(r: i64, p: i64) -> i64 {
    if p == 2 {
        return match r.rem_euclid(4) {
            1 => 1,
            3 => -1,
            _ => 0,
        };
    }
    let d = r.rem_euclid(p);
    if d > p / 2 {
        d - p
    } else {
        d
    }
}

/// The classical forms used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NamedForm {
    /// `eta(delta z)^e`.
    EtaProduct(u64, i64),
    Delta,
    /// `D_delta = eta(delta z)^{24/delta}`, `delta | 24`.
    DDelta(u64),
    E2,
    E4,
    E6,
    /// `N E_2(N z) - E_2(z)`.
    E2N(u64),
    ThetaBig,
    FForm,
    AForm,
    GForm,
    PForm,
}

impl NamedForm {
    pub fn eta_quotient(&self) -> Option<EtaQuotient> {
        Some(match *self {
            NamedForm::EtaProduct(d, e) => EtaQuotient::new(&[(d, e)]),
            NamedForm::Delta => EtaQuotient::new(&[(1, 24)]),
            NamedForm::DDelta(d) => EtaQuotient::new(&[(d, 24 / d as i64)]),
            NamedForm::ThetaBig => EtaQuotient::new(&[(2, 5), (1, -2), (4, -2)]),
            NamedForm::FForm => EtaQuotient::new(&[(4, 8), (2, -4)]),
            NamedForm::AForm => EtaQuotient::new(&[(2, 16), (1, -8)]),
            NamedForm::GForm => EtaQuotient::new(&[(2, 24)]),
            _ => return None,
        })
    }

    pub fn weight(&self) -> Option<i64> {
        match self {
            NamedForm::E2 | NamedForm::E2N(_) | NamedForm::PForm => Some(2),
            NamedForm::E4 => Some(4),
            NamedForm::E6 => Some(6),
            other => other.eta_quotient().and_then(|q| q.weight()),
        }
    }

    pub fn level(&self) -> u64 {
        match self {
            NamedForm::E2 | NamedForm::E4 | NamedForm::E6 => 1,
            NamedForm::E2N(n) => *n,
            NamedForm::PForm => 2,
            other => other.eta_quotient().map_or(1, |q| q.level()),
        }
    }
}

/// q-expansion of a named form in any coefficient ring.
pub fn named_form_in<R: CoeffRing>(ring: R, tag: NamedForm, n: usize) -> Result<Series<R>> {
    if let NamedForm::DDelta(d) = tag {
        if d == 0 || 24 % d != 0 {
            return Err(Error::UnsupportedForm(format!("D_delta needs delta | 24, got {d}")));
        }
    }
    let series = match tag {
        NamedForm::E2 => eisenstein(ring, 1, -24, n),
        NamedForm::E4 => eisenstein(ring, 3, 240, n),
        NamedForm::E6 => eisenstein(ring, 5, -504, n),
        NamedForm::E2N(_) | NamedForm::PForm => {
            let m = match tag {
                NamedForm::E2N(m) => m,
                _ => 2,
            };
            if m < 2 {
                return Err(Error::UnsupportedForm(format!("E_2,N needs N >= 2, got {m}")));
            }
            let e2 = eisenstein(ring.clone(), 1, -24, n);
            let scaled = e2.dilate_to(m as usize, n).scale(&ring.from_i64(m as i64));
            scaled.sub(&e2)?
        }
        other => other.eta_quotient().expect("eta-quotient form").expand(ring, n)?,
    };
    let mut series = series.with_level(tag.level());
    series.weight = tag.weight();
    Ok(series)
}

/// q-expansion of a named form mod `p`.
pub fn named_form(tag: NamedForm, p: u32, n: usize) -> Result<QSeries> {
    named_form_in(Fp::new(p)?, tag, n)
}

/// `1 + c sum sigma_{j}(n) q^n`.
fn eisenstein<R: CoeffRing>(ring: R, j: u32, c: i64, n: usize) -> Series<R> {
    let mut sigma = vec![ring.zero(); n];
    let cr = ring.from_i64(c);
    for d in 1..n {
        let dj = ring.pow(&ring.from_i64(d as i64), j as u64);
        let term = ring.mul(&cr, &dj);
        let mut m = d;
        while m < n {
            sigma[m] = ring.add(&sigma[m], &term);
            m += d;
        }
    }
    if n > 0 {
        sigma[0] = ring.one();
    }
    Series::new(ring, sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThetaKind {
    /// `eta(scale z) = sum chi_12(n) q^{scale n^2 / 24}`.
    Eta,
    /// `eta(scale z)^3 = sum chi_{-4}(n) n q^{scale n^2 / 8}`.
    Eta3,
    /// `sum_{n in Z} q^{scale n^2}`.
    ThetaSqSum,
}

/// Sparse theta series in any ring.
pub fn theta_expansion_in<R: CoeffRing>(
    ring: R,
    kind: ThetaKind,
    n: usize,
    scale: u64,
) -> Result<Series<R>> {
    let (den, disc) = match kind {
        ThetaKind::Eta => (24, 12),
        ThetaKind::Eta3 => (8, -4),
        ThetaKind::ThetaSqSum => (1, 1),
    };
    if scale == 0 || scale % den != 0 {
        return Err(Error::NonIntegralExponent(format!(
            "{kind:?} at scale {scale} has exponents in (1/{den})Z"
        )));
    }
    let step = (scale / den) as usize;
    let mut coeffs = vec![ring.zero(); n];
    if kind == ThetaKind::ThetaSqSum && n > 0 {
        coeffs[0] = ring.one();
    }
    let mut m = 1usize;
    while step * m * m < n {
        let e = step * m * m;
        let c = match kind {
            ThetaKind::Eta => kronecker(disc, m as i64) as i64,
            ThetaKind::Eta3 => kronecker(disc, m as i64) as i64 * m as i64,
            ThetaKind::ThetaSqSum => 2,
        };
        coeffs[e] = ring.add(&coeffs[e], &ring.from_i64(c));
        m += 1;
    }
    Ok(Series::new(ring, coeffs))
}

pub fn theta_expansion(kind: ThetaKind, p: u32, n: usize, scale: u64) -> Result<QSeries> {
    theta_expansion_in(Fp::new(p)?, kind, n, scale)
}

pub type QSeries = Series<Fp>;

impl QSeries {
    pub fn modulus(&self) -> u32 {
        self.ring.modulus()
    }

    /// Series mod `p` from integer coefficients.
    pub fn from_ints(p: u32, values: &[i64]) -> Result<Self> {
        Ok(Series::from_i64(Fp::new(p)?, values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Integers;

    fn ints(n: usize, f: impl Fn(usize) -> i64) -> Vec<i64> {
        (0..n).map(f).collect()
    }

    #[test]
    fn euler_product_examples() {
        let e = euler_product(1, 5, 13).unwrap();
        let want = QSeries::from_ints(5, &[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]).unwrap();
        assert_eq!(e.coeffs(), want.coeffs());
        assert_eq!(euler_product(2, 3, 3).unwrap().coeffs(), &[1, 0, 2]);
        assert_eq!(euler_product(1, 2, 1).unwrap().coeffs(), &[1]);
    }

    #[test]
    fn delta_mod_5() {
        let d = named_form(NamedForm::Delta, 5, 4).unwrap();
        assert_eq!(d.coeffs(), &[0, 1, 1, 2]);
        assert_eq!(d.weight(), Some(12));
        let d2 = named_form(NamedForm::DDelta(2), 3, 2).unwrap();
        assert_eq!(d2.coeffs(), &[0, 1]);
    }

    #[test]
    fn frobenius_plan_matches_characteristic_zero() {
        let z = Integers::<num_bigint::BigInt>::new();
        for p in [2u32, 3, 5, 7, 11, 23] {
            let fp = Fp::new(p).unwrap();
            for tag in [
                NamedForm::Delta,
                NamedForm::FForm,
                NamedForm::AForm,
                NamedForm::DDelta(3),
                NamedForm::DDelta(4),
                NamedForm::ThetaBig,
            ] {
                let exact = named_form_in(z, tag, 200).unwrap();
                let fast = named_form_in(fp, tag, 200).unwrap();
                let reduced: Vec<u32> =
                    exact.coeffs().iter().map(|v| crate::ring::reduce_int(v, &fp)).collect();
                assert_eq!(fast.coeffs(), &reduced[..], "{tag:?} mod {p}");
            }
        }
    }

    #[test]
    fn tau_values() {
        let d = named_form_in(Integers::<i64>::new(), NamedForm::Delta, 6).unwrap();
        assert_eq!(d.coeffs(), &[0, 1, -24, 252, -1472, 4830]);
    }

    #[test]
    fn pow_uses_frobenius_correctly() {
        let d = named_form(NamedForm::Delta, 5, 60).unwrap();
        let d5 = d.pow(5);
        for n in 0..60 {
            let want = if n % 5 == 0 { d.coeffs()[n / 5] } else { 0 };
            assert_eq!(d5.coeffs()[n], want);
        }
        assert_eq!(d5.weight(), Some(60));
        let e = euler_product(1, 2, 64).unwrap();
        let mut slow = QSeries::one(Fp::new(2).unwrap(), 64);
        for _ in 0..24 {
            slow = slow.mul(&e).unwrap();
        }
        assert_eq!(e.pow(24).coeffs(), slow.coeffs());
    }

    #[test]
    fn theta_examples() {
        let t = theta_expansion(ThetaKind::Eta, 5, 50, 24).unwrap();
        let mut want = vec![0u32; 50];
        want[1] = 1;
        want[25] = 4;
        want[49] = 4;
        assert_eq!(t.coeffs(), &want[..]);
        assert_eq!(theta_expansion(ThetaKind::ThetaSqSum, 3, 5, 1).unwrap().coeffs(), &[1, 2, 0, 0, 2]);
        let t3 = theta_expansion(ThetaKind::Eta3, 7, 10, 8).unwrap();
        assert_eq!(t3.coeffs()[1], 1);
        assert_eq!(t3.coeffs()[9], 4);
        assert!(theta_expansion(ThetaKind::Eta, 5, 10, 12).is_err());
    }

    #[test]
    fn p_form_is_one_mod_3() {
        let p = named_form(NamedForm::PForm, 3, 50).unwrap();
        assert_eq!(p.coeffs(), QSeries::one(Fp::new(3).unwrap(), 50).coeffs());
    }

    #[test]
    fn theta_op_basics() {
        let f = Fp::new(5).unwrap();
        let d = named_form(NamedForm::Delta, 5, 10).unwrap();
        assert_eq!(d.theta_op().coeffs()[2], 2 * 1 % 5);
        assert_eq!(d.theta_op().weight(), Some(18));
        assert!(QSeries::one(f, 10).theta_op().is_zero());
        let s = Series::from_i64(Integers::<i64>::new(), &ints(5, |i| i as i64));
        assert_eq!(s.theta_op().coeffs(), &[0, 1, 4, 9, 16]);
    }

    #[test]
    fn modulus_mismatch_is_rejected() {
        let a = euler_product(1, 5, 10).unwrap();
        let b = euler_product(1, 7, 10).unwrap();
        assert!(matches!(a.mul(&b), Err(Error::ModulusMismatch { .. })));
    }
}
