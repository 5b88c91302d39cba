//! Polynomial-basis representations of forms mod p and the Hecke action on them.
//!
//! Level one mod `p <= 7` is `F_p[Delta]`; level four mod 3 is `F_3[F]`, inside which the
//! powers of `D_2 = F - F^3` are tracked separately. Every basis power is `q^i + ...`, so
//! conversion from a q-expansion is a unitriangular solve, and every solve is followed by a
//! residual check over `slack` extra coefficients.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::hecke::HeckeSpec;
use crate::ring::{CoeffRing, Fp};
use crate::series::{named_form, EtaQuotient, NamedForm, QSeries, Series};

pub const DEFAULT_SLACK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Delta,
    F,
    D2Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisTag {
    pub kind: BasisKind,
    pub p: u32,
}

impl BasisTag {
    pub fn delta(p: u32) -> Result<Self> {
        if ![2, 3, 5, 7].contains(&p) {
            return Err(Error::UnsupportedForm(format!("F_p[Delta] basis needs p in {{2,3,5,7}}, got {p}")));
        }
        Ok(BasisTag { kind: BasisKind::Delta, p })
    }

    pub fn f_basis() -> Self {
        BasisTag { kind: BasisKind::F, p: 3 }
    }

    pub fn d2_span() -> Self {
        BasisTag { kind: BasisKind::D2Span, p: 3 }
    }

    pub fn generator(&self) -> EtaQuotient {
        match self.kind {
            BasisKind::Delta => NamedForm::Delta.eta_quotient(),
            BasisKind::F => NamedForm::FForm.eta_quotient(),
            BasisKind::D2Span => NamedForm::DDelta(2).eta_quotient(),
        }
        .expect("basis generators are eta quotients")
    }

    /// Weight of one power of the generator.
    pub fn unit_weight(&self) -> i64 {
        match self.kind {
            BasisKind::Delta => 12,
            BasisKind::F => 2,
            BasisKind::D2Span => 6,
        }
    }

    pub fn ring(&self) -> Fp {
        Fp::new(self.p).expect("validated modulus")
    }

    pub fn name(&self) -> String {
        match self.kind {
            BasisKind::Delta => format!("delta{}", self.p),
            BasisKind::F => "f".into(),
            BasisKind::D2Span => "d2".into(),
        }
    }
}

/// Degree of a polynomial representative; the zero form has degree `NegInf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Degree {
    NegInf,
    Finite(i64),
}

impl Degree {
    pub fn finite(self) -> Option<i64> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl std::fmt::Display for Degree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// `sum coeffs[i] b^i` for the basis generator `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyRep {
    pub basis: BasisTag,
    coeffs: Vec<u32>,
}

impl PolyRep {
    /// Residues are reduced and trailing zeros trimmed.
    pub fn new(basis: BasisTag, coeffs: Vec<u32>) -> Self {
        let mut coeffs: Vec<u32> = coeffs.into_iter().map(|c| c % basis.p).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyRep { basis, coeffs }
    }

    pub fn from_i64(basis: BasisTag, coeffs: &[i64]) -> Self {
        Self::new(basis, coeffs.iter().map(|&c| arith::residue(c, basis.p)).collect())
    }

    pub fn zero(basis: BasisTag) -> Self {
        PolyRep { basis, coeffs: Vec::new() }
    }

    pub fn monomial(basis: BasisTag, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = 1 % basis.p;
        Self::new(basis, coeffs)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInf,
            n => Degree::Finite(n as i64 - 1),
        }
    }

    /// Degree of the second-highest nonzero term.
    pub fn second_degree(&self) -> Degree {
        let n = self.coeffs.len();
        if n < 2 {
            return Degree::NegInf;
        }
        match self.coeffs[..n - 1].iter().rposition(|&c| c != 0) {
            Some(i) => Degree::Finite(i as i64),
            None => Degree::NegInf,
        }
    }

    /// Lowest index with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, self.basis.p - 1)
    }

    /// `self + s * other`.
    pub fn combine(&self, other: &Self, s: u32) -> Self {
        assert_eq!(self.basis, other.basis);
        let p = self.basis.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| (self.coeff(i) + s % p * other.coeff(i)) % p).collect();
        Self::new(self.basis, coeffs)
    }

    pub fn scale(&self, s: u32) -> Self {
        let p = self.basis.p;
        Self::new(self.basis, self.coeffs.iter().map(|&c| c * (s % p) % p).collect())
    }

    /// Polynomial product in the generator.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.basis, other.basis);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.basis);
        }
        let ring = self.basis.ring();
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        Self::new(self.basis, ring.mul_dense(&self.coeffs, &other.coeffs, n))
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::monomial(self.basis, 0);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Shift by a power of the generator.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(self.basis, coeffs)
    }

    /// q-expansion to precision `n`.
    pub fn expand(&self, n: usize) -> Result<QSeries> {
        let table = basis_table(self.basis, self.coeffs.len().saturating_sub(1), n)?;
        let p = self.basis.p;
        let mut acc = vec![0u32; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 || i >= n {
                continue;
            }
            for (s, &r) in acc.iter_mut().zip(&table.rows[i][..n]) {
                *s = (*s + a * r) % p;
            }
        }
        let mut s = Series::new(self.basis.ring(), acc);
        if let Some(k) = self.homogeneous_weight() {
            s = s.with_weight(k);
        }
        Ok(s)
    }

    /// Weight when the representative is a single monomial.
    pub fn homogeneous_weight(&self) -> Option<i64> {
        let nz: Vec<usize> = (0..self.coeffs.len()).filter(|&i| self.coeffs[i] != 0).collect();
        match nz.as_slice() {
            [i] => Some(*i as i64 * self.basis.unit_weight()),
            _ => None,
        }
    }
}

/// q-expansions of `b^0..=b^d` to a common precision.
#[derive(Debug)]
pub struct BasisTable {
    pub tag: BasisTag,
    pub precision: usize,
    pub rows: Vec<Vec<u32>>,
}

impl BasisTable {
    fn build(tag: BasisTag, d: usize, n: usize) -> Result<Self> {
        let ring = tag.ring();
        let gen = tag.generator();
        let s = gen.q_order()?;
        let mut core = gen.pow(0).expand_core(&ring, n);
        let mut rows = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let mut row = vec![0u32; n];
            let off = s * i;
            if off < n {
                row[off..].copy_from_slice(&core[..n - off]);
            }
            rows.push(row);
            if i < d {
                gen.apply_core(&ring, &mut core);
            }
        }
        Ok(BasisTable { tag, precision: n, rows })
    }

    pub fn degree(&self) -> usize {
        self.rows.len() - 1
    }
}

type TableCache = RwLock<HashMap<BasisTag, Arc<BasisTable>>>;

fn table_cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared expansions covering at least degree `d` and precision `n`. Grows geometrically.
pub fn basis_table(tag: BasisTag, d: usize, n: usize) -> Result<Arc<BasisTable>> {
    if let Some(t) = table_cache().read().expect("cache lock").get(&tag) {
        if t.degree() >= d && t.precision >= n {
            return Ok(t.clone());
        }
    }
    let mut cache = table_cache().write().expect("cache lock");
    let (d0, n0) = cache.get(&tag).map_or((0, 0), |t| (t.degree(), t.precision));
    if d0 >= d && n0 >= n {
        return Ok(cache[&tag].clone());
    }
    let d = d.max(d0 + d0 / 2).max(8);
    let n = n.max(n0 + n0 / 2).max(d + 1 + DEFAULT_SLACK);
    let t = Arc::new(BasisTable::build(tag, d, n)?);
    cache.insert(tag, t.clone());
    Ok(t)
}

/// Expansions of `b^0..=b^d` to precision `n`.
pub fn basis_q_matrix(tag: BasisTag, d: usize, n: usize) -> Result<Vec<QSeries>> {
    if n < d + 1 {
        return Err(Error::PrecisionTooLow { need: d + 1, have: n });
    }
    let t = basis_table(tag, d, n)?;
    Ok(t.rows[..=d]
        .iter()
        .enumerate()
        .map(|(i, r)| Series::new(tag.ring(), r[..n].to_vec()).with_weight(i as i64 * tag.unit_weight()))
        .collect())
}

/// Unitriangular solve of `v` (first `d + 1 + slack` coefficients) against the basis rows,
/// with residual verification on the slack window.
fn solve_in(table: &BasisTable, v: &[u32], d: usize, slack: usize) -> Result<PolyRep> {
    let p = table.tag.p;
    let len = d + 1 + slack;
    debug_assert!(v.len() >= len && table.precision >= len && table.degree() >= d);
    let mut acc: Vec<u32> = v[..len].to_vec();
    let mut coeffs = vec![0u32; d + 1];
    for n in 0..=d {
        let a = acc[n] % p;
        if a == 0 {
            continue;
        }
        coeffs[n] = a;
        let neg = p - a;
        for (s, &r) in acc[n..].iter_mut().zip(&table.rows[n][n..len]) {
            *s += neg * r;
        }
        // Keep the lazy accumulators bounded.
        if n % 4096 == 4095 {
            acc.iter_mut().for_each(|x| *x %= p);
        }
    }
    if let Some(i) = (d + 1..len).find(|&i| acc[i] % p != 0) {
        return Err(Error::ResidualNonzero { basis: table.tag, degree_bound: d, index: i });
    }
    Ok(PolyRep::new(table.tag, coeffs))
}

/// Express `f` in the basis up to degree `d`, verified over `slack` further coefficients.
pub fn to_poly(f: &QSeries, tag: BasisTag, d: usize, slack: usize) -> Result<PolyRep> {
    if f.modulus() != tag.p {
        return Err(Error::ModulusMismatch { left: f.modulus(), right: tag.p });
    }
    let need = d + 1 + slack;
    if f.precision() < need {
        return Err(Error::PrecisionTooLow { need, have: f.precision() });
    }
    let table = basis_table(tag, d, need)?;
    solve_in(&table, f.coeffs(), d, slack)
}

/// `ell^{w-1}` (times the character) must agree across the weights `w = unit * j`, `j <= d`.
fn uniform_weight_factor(tag: BasisTag, spec: &HeckeSpec, d: usize) -> Result<u32> {
    let period = 2 * (tag.p as usize - 1).max(1);
    let factor = spec.weight_factor_mod_p(0);
    for j in 1..=d.min(period) {
        if spec.weight_factor_mod_p(tag.unit_weight() * j as i64) != factor {
            return Err(Error::Hypothesis(format!(
                "ell^(k-1) mod {} varies across the weights of {:?}; apply T to a homogeneous representative",
                tag.p, tag.kind
            )));
        }
    }
    Ok(factor)
}

/// `P | T_ell` (or `T'_ell`), computed on q-expansions and solved back with degree bound
/// `deg P`.
pub fn hecke_on_poly(pr: &PolyRep, ell: u64, modified: bool, slack: usize) -> Result<PolyRep> {
    let tag = pr.basis;
    let Degree::Finite(d) = pr.degree() else {
        return Ok(pr.clone());
    };
    let d = d as usize;
    let spec = HeckeSpec { modified, ..HeckeSpec::new(ell, tag.p) };
    spec.validate()?;
    let k = match pr.homogeneous_weight() {
        Some(k) => k,
        None => {
            uniform_weight_factor(tag, &spec, d)?;
            tag.unit_weight() * d as i64
        }
    };
    let n_out = d + 1 + slack;
    let f = pr.expand(ell as usize * n_out)?;
    let image = crate::hecke::hecke_t(&f, &spec.with_weight(k))?;
    to_poly(&image, tag, d, slack)
}

/// Matrix of `T_ell` or `T'_ell` on the basis powers `0..=size`; column `j` is the image of
/// `b^j`, stored with its exact degree.
#[derive(Debug, Clone)]
pub struct HeckeMatrix {
    pub tag: BasisTag,
    pub ell: u64,
    pub modified: bool,
    pub slack: usize,
    cols: Vec<Vec<u8>>,
}

const LADDER_BLOCK: usize = 128;

impl HeckeMatrix {
    pub fn build(tag: BasisTag, ell: u64, modified: bool, size: usize, slack: usize) -> Result<Self> {
        if tag.kind == BasisKind::D2Span {
            return Err(Error::UnsupportedForm(
                "the D2 span is handled through the F basis".into(),
            ));
        }
        let spec = HeckeSpec { modified, ..HeckeSpec::new(ell, tag.p) };
        spec.validate()?;
        let factor = uniform_weight_factor(tag, &spec, size)?;
        let table = basis_table(tag, size, size + 1 + slack)?;
        let ring = tag.ring();
        let gen = tag.generator();
        let s = gen.q_order()?;
        let ell_u = ell as usize;
        let p = tag.p;
        let minus_two = if spec.subtracts_two() { p - 2 % p } else { 0 };

        let starts: Vec<usize> = (0..=size).step_by(LADDER_BLOCK).collect();
        let blocks: Vec<Result<Vec<Vec<u8>>>> = starts
            .par_iter()
            .map(|&j0| {
                let j1 = (j0 + LADDER_BLOCK).min(size + 1);
                // Coefficients of b^j needed: indices below ell * (j1 + slack).
                let top = ell_u * (j1 + slack);
                let core_len = top.saturating_sub(s * j0);
                let mut core = gen.pow(j0 as u64).expand_core(&ring, core_len);
                let mut out = Vec::with_capacity(j1 - j0);
                for j in j0..j1 {
                    let off = s * j;
                    let c = |m: usize| -> u32 {
                        if m < off {
                            0
                        } else {
                            core.get(m - off).copied().unwrap_or(0)
                        }
                    };
                    let n_out = j + 1 + slack;
                    let mut img = vec![0u32; n_out];
                    for (n, v) in img.iter_mut().enumerate() {
                        let mut x = c(ell_u * n);
                        if n % ell_u == 0 {
                            x += factor * c(n / ell_u);
                        }
                        if minus_two != 0 {
                            x += minus_two * c(n);
                        }
                        *v = x % p;
                    }
                    let col = solve_in(&table, &img, j, slack)?;
                    out.push(col.coeffs.iter().map(|&x| x as u8).collect());
                    if j + 1 < j1 {
                        gen.apply_core(&ring, &mut core);
                    }
                }
                Ok(out)
            })
            .collect();
        let mut cols = Vec::with_capacity(size + 1);
        for b in blocks {
            cols.extend(b?);
        }
        Ok(HeckeMatrix { tag, ell, modified, slack, cols })
    }

    /// Largest basis degree covered.
    pub fn size(&self) -> usize {
        self.cols.len() - 1
    }

    pub fn column(&self, j: usize) -> PolyRep {
        PolyRep::new(self.tag, self.cols[j].iter().map(|&x| x as u32).collect())
    }

    pub fn column_degree(&self, j: usize) -> Degree {
        match self.cols[j].len() {
            0 => Degree::NegInf,
            n => Degree::Finite(n as i64 - 1),
        }
    }

    pub fn apply(&self, v: &PolyRep) -> Result<PolyRep> {
        if v.basis != self.tag {
            return Err(Error::UnsupportedForm("basis mismatch".into()));
        }
        if v.coeffs.len() > self.cols.len() {
            return Err(Error::TooLarge(format!(
                "degree {} beyond matrix size {}",
                v.coeffs.len() - 1,
                self.size()
            )));
        }
        Ok(PolyRep::new(self.tag, apply_cols(&self.cols, &v.coeffs, self.tag.p)))
    }

    /// Matrices of `T^{2^i}` for `i < levels`.
    pub fn doubling_ladder(&self, levels: usize) -> Vec<Vec<Vec<u8>>> {
        let p = self.tag.p;
        let mut out = vec![self.cols.clone()];
        while out.len() < levels {
            let prev = out.last().expect("nonempty");
            let next: Vec<Vec<u8>> = prev
                .par_iter()
                .map(|col| {
                    let v: Vec<u32> = col.iter().map(|&x| x as u32).collect();
                    apply_cols(prev, &v, p).into_iter().map(|x| x as u8).collect()
                })
                .collect();
            let all_zero = next.iter().all(|c| c.is_empty());
            out.push(next);
            if all_zero {
                break;
            }
        }
        out
    }
}

/// `sum v_j col_j` mod `p`, trimmed.
fn apply_cols(cols: &[Vec<u8>], v: &[u32], p: u32) -> Vec<u32> {
    let len = v
        .iter()
        .enumerate()
        .filter(|(_, &x)| x % p != 0)
        .map(|(j, _)| cols[j].len())
        .max()
        .unwrap_or(0);
    let mut acc = vec![0u32; len];
    let mut pending = 0u32;
    for (j, &x) in v.iter().enumerate() {
        let x = x % p;
        if x == 0 {
            continue;
        }
        let col = &cols[j];
        for (s, &c) in acc.iter_mut().zip(col) {
            *s += x * c as u32;
        }
        pending += 1;
        if pending == 1 << 20 {
            acc.iter_mut().for_each(|s| *s %= p);
            pending = 0;
        }
    }
    let mut out: Vec<u32> = acc.into_iter().map(|s| s % p).collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Shared matrices keyed by `(tag, ell, modified, slack)`, grown on demand.
pub fn shared_matrix(
    tag: BasisTag,
    ell: u64,
    modified: bool,
    size: usize,
    slack: usize,
) -> Result<Arc<HeckeMatrix>> {
    type Key = (BasisTag, u64, bool, usize);
    static CACHE: OnceLock<RwLock<HashMap<Key, Arc<HeckeMatrix>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (tag, ell, modified, slack);
    if let Some(m) = cache.read().expect("cache lock").get(&key) {
        if m.size() >= size {
            return Ok(m.clone());
        }
    }
    let mut w = cache.write().expect("cache lock");
    if let Some(m) = w.get(&key) {
        if m.size() >= size {
            return Ok(m.clone());
        }
    }
    let old = w.get(&key).map_or(0, |m| m.size());
    let size = size.max(old + old / 4).div_ceil(64) * 64;
    let m = Arc::new(HeckeMatrix::build(tag, ell, modified, size, slack)?);
    w.insert(key, m.clone());
    Ok(m)
}

/// `f_{5i+j} = Delta^{5i} f_j` in `F_5[Delta]`.
pub fn f_basis_element(i: usize, j: usize) -> Result<PolyRep> {
    let tag = BasisTag::delta(5)?;
    let base: &[i64] = match j {
        0 => &[1],
        1 => &[0, 1, 4],
        2 => &[0, 0, 1],
        3 => &[0, 0, 0, 1, 2, 3],
        4 => &[0, 0, 0, 0, 1, 1],
        _ => return Err(Error::Hypothesis(format!("f-basis index j = {j} not in 0..5"))),
    };
    Ok(PolyRep::from_i64(tag, base).shift(5 * i))
}

/// Coordinates of `P` in the basis `{f_m}`; the lowest Delta-degree of `f_m` is `m`, so the
/// expansion peels lowest terms and is then checked by re-expansion.
pub fn to_f_basis(pr: &PolyRep) -> Result<Vec<u32>> {
    if pr.basis.kind != BasisKind::Delta || pr.basis.p != 5 {
        return Err(Error::UnsupportedForm("the f-basis lives in F_5[Delta]".into()));
    }
    let mut rest = pr.clone();
    let mut out = Vec::new();
    let cap = pr.coeffs.len() + 6;
    while let Some(m) = rest.low_degree() {
        if m >= cap {
            return Err(Error::OperatorPhase("f-basis expansion did not terminate".into()));
        }
        let a = rest.coeff(m);
        if out.len() <= m {
            out.resize(m + 1, 0);
        }
        out[m] = a;
        rest = rest.combine(&f_basis_element(m / 5, m % 5)?, 5 - a);
    }
    let mut check = PolyRep::zero(pr.basis);
    for (m, &a) in out.iter().enumerate() {
        if a != 0 {
            check = check.combine(&f_basis_element(m / 5, m % 5)?, a);
        }
    }
    if check != *pr {
        return Err(Error::OperatorPhase("f-basis expansion failed verification".into()));
    }
    Ok(out)
}

/// Keep the coefficients with `n = i mod 6`.
pub fn rho_projection<R: CoeffRing>(f: &Series<R>, i: usize) -> Series<R> {
    let ring = f.ring().clone();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| if n % 6 == i % 6 { c.clone() } else { ring.zero() })
        .collect();
    let mut s = Series::new(ring, coeffs);
    if let Some(w) = f.weight() {
        s = s.with_weight(w);
    }
    s
}

/// `D_2^i = F^i (1 - F^2)^i` in the F basis.
pub fn d2_power_in_f(i: usize) -> PolyRep {
    let tag = BasisTag::f_basis();
    PolyRep::from_i64(tag, &[0, 1, 0, -1]).pow(i as u64)
}

/// Convert an F-polynomial into `D_2` coordinates: the top F-degree of `D_2^i` is `3i`, its
/// lowest is `i`, so peeling lowest terms either terminates at zero or overshoots.
pub fn f_to_d2(pr: &PolyRep) -> Result<PolyRep> {
    if pr.basis != BasisTag::f_basis() {
        return Err(Error::UnsupportedForm("expected an F-basis representative".into()));
    }
    let Degree::Finite(d) = pr.degree() else {
        return Ok(PolyRep::zero(BasisTag::d2_span()));
    };
    let d = d as usize;
    let tag = BasisTag::d2_span();
    if d % 3 != 0 {
        return Err(Error::ResidualNonzero { basis: tag, degree_bound: d / 3, index: d });
    }
    let top = d / 3;
    let mut rest = pr.clone();
    let mut out = vec![0u32; top + 1];
    while let Some(m) = rest.low_degree() {
        if m > top {
            return Err(Error::ResidualNonzero { basis: tag, degree_bound: top, index: m });
        }
        let a = rest.coeff(m);
        out[m] = a;
        rest = rest.combine(&d2_power_in_f(m), 3 - a);
    }
    Ok(PolyRep::new(tag, out))
}

pub fn d2_to_f(pr: &PolyRep) -> PolyRep {
    let mut acc = PolyRep::zero(BasisTag::f_basis());
    for (i, &a) in pr.coeffs.iter().enumerate() {
        if a != 0 {
            acc = acc.combine(&d2_power_in_f(i), a);
        }
    }
    acc
}

/// Echelon form over `F_p` of a family of coordinate vectors, reduced by leading index.
#[derive(Debug, Clone)]
pub struct Echelon {
    p: u32,
    rows: Vec<(usize, Vec<u32>)>,
}

impl Echelon {
    pub fn new(p: u32) -> Self {
        Echelon { p, rows: Vec::new() }
    }

    fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut v: Vec<u32> = v.iter().map(|x| x % p).collect();
        for (lead, row) in &self.rows {
            let a = v.get(*lead).copied().unwrap_or(0);
            if a == 0 {
                continue;
            }
            let inv = arith::inv_mod(row[*lead] as u64, p as u64) as u32;
            let s = (p - a) * inv % p;
            if v.len() < row.len() {
                v.resize(row.len(), 0);
            }
            for (x, &r) in v.iter_mut().zip(row) {
                *x = (*x + s * r) % p;
            }
        }
        v
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let r = self.reduce(v);
        match r.iter().position(|&x| x != 0) {
            Some(lead) => {
                self.rows.push((lead, r));
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Which of the two level-4 spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WSpan {
    W1,
    W5,
}

/// Echelon basis, in F coordinates, of `W_1` or `W_5` up to F-degree `max_f_degree`.
pub fn w_span(which: WSpan, max_f_degree: usize) -> Echelon {
    let (rk, ri) = match which {
        WSpan::W1 => (1, 4),
        WSpan::W5 => (5, 2),
    };
    let f3 = PolyRep::monomial(BasisTag::f_basis(), 3);
    let mut e = Echelon::new(3);
    let mut k = rk;
    while 3 * k <= max_f_degree {
        e.insert(d2_power_in_f(k).coeffs());
        k += 6;
    }
    let mut i = ri;
    while 3 * i + 3 <= max_f_degree {
        e.insert(d2_power_in_f(i).mul(&f3).coeffs());
        i += 6;
    }
    e
}

/// The forms on `Gamma_0(2)` and `Gamma_0(4)` used in the level-four argument, mod 3.
#[derive(Debug, Clone)]
pub struct Level2Apparatus {
    pub precision: usize,
    pub a: QSeries,
    pub g: QSeries,
    pub delta: QSeries,
    pub f: QSeries,
    pub d2: QSeries,
    /// `g_i = A^i (A - A^2)`, `0 <= i <= d`.
    pub g_i: Vec<QSeries>,
}

impl Level2Apparatus {
    pub fn build(d: usize, n: usize) -> Result<Self> {
        let a = named_form(NamedForm::AForm, 3, n)?;
        let a2 = a.mul(&a)?;
        let g0 = a.sub(&a2)?;
        let mut g_i = Vec::with_capacity(d + 1);
        let mut cur = g0;
        for _ in 0..=d {
            let next = cur.mul(&a)?;
            g_i.push(cur);
            cur = next;
        }
        Ok(Level2Apparatus {
            precision: n,
            g: named_form(NamedForm::GForm, 3, n)?,
            delta: named_form(NamedForm::Delta, 3, n)?,
            f: named_form(NamedForm::FForm, 3, n)?,
            d2: named_form(NamedForm::DDelta(2), 3, n)?,
            a,
            g_i,
        })
    }

    /// `Delta^3 - G Delta + G^3` (identically zero mod 3).
    pub fn h_of_delta(&self) -> Result<QSeries> {
        let d = &self.delta;
        let g = &self.g;
        d.pow(3).sub(&g.mul(d)?)?.add(&g.pow(3))
    }

    /// Indices `i <= d`, `i != 2 mod 3`, whose `g_i` is not killed by `U_3`.
    pub fn kernel_failures(&self) -> Result<Vec<usize>> {
        let mut bad = Vec::new();
        for (i, g) in self.g_i.iter().enumerate() {
            if i % 3 != 2 && !crate::hecke::u_op(g, 3)?.is_zero() {
                bad.push(i);
            }
        }
        Ok(bad)
    }
}

pub fn level2_apparatus(d: usize, n: usize) -> Result<Level2Apparatus> {
    Level2Apparatus::build(d, n)
}
