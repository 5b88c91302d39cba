//! Coefficient rings for truncated q-series.
//!
//! A ring is a context value: the prime field carries its modulus at runtime, while
//! the exact integer rings are zero-sized wrappers around a `num-traits` integer type.
//! Series and operators are written once against [`CoeffRing`]; the hot sparse
//! kernels have a lazily reduced override for [`Fp`].

use std::fmt::Debug;
use std::marker::PhantomData;

use num_traits::{FromPrimitive, Signed};

use crate::error::{Error, Result};

pub trait CoeffRing: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// `Some(p)` for a prime field, `None` for characteristic zero.
    fn characteristic(&self) -> Option<u32>;

    /// Binary integers are exact here; only the prime field may shortcut the exponent.
    fn pow(&self, base: &Self::Elem, mut exp: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut b = base.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            exp >>= 1;
            if exp > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    /// `ell^e` for a small positive integer `ell`.
    fn int_pow(&self, ell: u64, e: u64) -> Self::Elem {
        self.pow(&self.from_i64(ell as i64), e)
    }

    fn check_same(&self, other: &Self) -> Result<()>;

    /// `src * h` truncated to `len`, where `h` is sparse with sorted `(index, coeff)` terms.
    fn mul_sparse(&self, src: &[Self::Elem], terms: &[(usize, i64)], len: usize) -> Vec<Self::Elem> {
        let mut out = vec![self.zero(); len];
        for &(m, c) in terms {
            if m >= len {
                break;
            }
            let c = self.from_i64(c);
            for (n, s) in src.iter().enumerate().take(len - m) {
                out[n + m] = self.add(&out[n + m], &self.mul(&c, s));
            }
        }
        out
    }

    /// Truncated product of two dense series.
    fn mul_dense(&self, a: &[Self::Elem], b: &[Self::Elem], len: usize) -> Vec<Self::Elem> {
        let mut out = vec![self.zero(); len];
        for (i, x) in a.iter().enumerate().take(len) {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(len - i) {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        out
    }

    /// In-place division by a sparse series with constant term 1.
    fn div_sparse(&self, data: &mut [Self::Elem], terms: &[(usize, i64)]) {
        debug_assert!(terms.first() == Some(&(0, 1)));
        let terms: Vec<(usize, Self::Elem)> =
            terms[1..].iter().map(|&(m, c)| (m, self.from_i64(c))).collect();
        for n in 0..data.len() {
            let mut acc = data[n].clone();
            for (m, c) in &terms {
                if *m > n {
                    break;
                }
                acc = self.sub(&acc, &self.mul(c, &data[n - m]));
            }
            data[n] = acc;
        }
    }
}

/// The prime field `F_p` with residues stored as `u32` in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub fn new(p: u32) -> Result<Self> {
        if !crate::arith::is_prime(p as u64) || p > 1 << 15 {
            return Err(Error::UnsupportedForm(format!("modulus {p} is not a small prime")));
        }
        Ok(Fp { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
}

impl CoeffRing for Fp {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn from_i64(&self, v: i64) -> u32 {
        self.reduce(v)
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        a * b % self.p
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn characteristic(&self) -> Option<u32> {
        Some(self.p)
    }

    fn pow(&self, base: &u32, exp: u64) -> u32 {
        if *base == 0 {
            return if exp == 0 { 1 } else { 0 };
        }
        // Fermat: the multiplicative group has order p - 1.
        crate::arith::pow_mod(*base as u64, exp % (self.p as u64 - 1), self.p as u64) as u32
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::ModulusMismatch { left: self.p, right: other.p })
        }
    }

    fn mul_sparse(&self, src: &[u32], terms: &[(usize, i64)], len: usize) -> Vec<u32> {
        let mut acc = vec![0u32; len];
        for &(m, c) in terms {
            if m >= len {
                break;
            }
            let c = self.reduce(c);
            if c == 0 {
                continue;
            }
            let n = (len - m).min(src.len());
            for (a, s) in acc[m..m + n].iter_mut().zip(&src[..n]) {
                *a += c * s;
            }
            // Keep the u32 accumulators far from overflow for long sparse factors.
            if self.p > 64 {
                for a in acc.iter_mut() {
                    *a %= self.p;
                }
            }
        }
        for a in acc.iter_mut() {
            *a %= self.p;
        }
        acc
    }

    fn mul_dense(&self, a: &[u32], b: &[u32], len: usize) -> Vec<u32> {
        // Scatter from the sparser operand into u64 accumulators; reduce once at the end.
        let (a, b) = if a.iter().filter(|&&x| x != 0).count() <= b.iter().filter(|&&x| x != 0).count() {
            (a, b)
        } else {
            (b, a)
        };
        let mut acc = vec![0u64; len];
        for (i, &x) in a.iter().enumerate().take(len) {
            if x == 0 {
                continue;
            }
            let x = x as u64;
            let n = (len - i).min(b.len());
            for (s, &y) in acc[i..i + n].iter_mut().zip(&b[..n]) {
                *s += x * y as u64;
            }
        }
        acc.into_iter().map(|s| (s % self.p as u64) as u32).collect()
    }

    fn div_sparse(&self, data: &mut [u32], terms: &[(usize, i64)]) {
        debug_assert!(terms.first() == Some(&(0, 1)));
        let p = self.p;
        // g_n = f_n - sum c_m g_{n-m}  ==  f_n + sum (p - c_m) g_{n-m}
        let negated: Vec<(usize, u32)> = terms[1..]
            .iter()
            .map(|&(m, c)| (m, (p - self.reduce(c)) % p))
            .filter(|&(_, c)| c != 0)
            .collect();
        let mut active = 0;
        for n in 0..data.len() {
            while active < negated.len() && negated[active].0 <= n {
                active += 1;
            }
            let mut acc = data[n];
            for &(m, c) in &negated[..active] {
                acc += c * data[n - m];
            }
            data[n] = acc % p;
        }
    }
}

/// Exact integers of type `T`, e.g. `i128` or `num_bigint::BigInt`.
#[derive(Debug, PartialEq, Eq, Default)]
pub struct Integers<T>(PhantomData<T>);

impl<T> Clone for Integers<T> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<T> Copy for Integers<T> {}

impl<T> Integers<T> {
    pub fn new() -> Self {
        Integers(PhantomData)
    }
}

impl<T> CoeffRing for Integers<T>
where
    T: Clone + Debug + PartialEq + Send + Sync + Signed + FromPrimitive,
{
    type Elem = T;

    fn zero(&self) -> T {
        T::zero()
    }
    fn one(&self) -> T {
        T::one()
    }
    fn from_i64(&self, v: i64) -> T {
        T::from_i64(v).expect("i64 fits every supported integer type")
    }
    fn add(&self, a: &T, b: &T) -> T {
        a.clone() + b.clone()
    }
    fn sub(&self, a: &T, b: &T) -> T {
        a.clone() - b.clone()
    }
    fn mul(&self, a: &T, b: &T) -> T {
        a.clone() * b.clone()
    }
    fn neg(&self, a: &T) -> T {
        -a.clone()
    }
    fn is_zero(&self, a: &T) -> bool {
        a.is_zero()
    }
    fn characteristic(&self) -> Option<u32> {
        None
    }
    fn check_same(&self, _other: &Self) -> Result<()> {
        Ok(())
    }
}

/// Reduce an exact integer into `F_p`.
pub fn reduce_int<T>(v: &T, fp: &Fp) -> u32
where
    T: Clone + Signed + num_traits::ToPrimitive + FromPrimitive,
{
    let p = T::from_u32(fp.modulus()).expect("modulus fits");
    let r = v.clone() % p.clone();
    let r = if r.is_negative() { r + p } else { r };
    r.to_u32().expect("residue fits u32")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn fp_arithmetic() {
        let f = Fp::new(7).unwrap();
        assert_eq!(f.add(&5, &4), 2);
        assert_eq!(f.sub(&2, &5), 4);
        assert_eq!(f.mul(&3, &5), 1);
        assert_eq!(f.neg(&3), 4);
        assert_eq!(f.from_i64(-24), 4);
        assert_eq!(f.pow(&3, 6), 1);
        assert_eq!(f.pow(&0, 0), 1);
        assert!(Fp::new(9).is_err());
    }

    #[test]
    fn fp_sparse_kernels_match_generic_defaults() {
        // The generic default bodies are exercised through the integer ring and reduced.
        let f = Fp::new(5).unwrap();
        let z = Integers::<i64>::new();
        let src: Vec<i64> = (0..40).map(|i| (i * 7 + 3) % 11 - 5).collect();
        let terms = vec![(0usize, 1i64), (1, -1), (2, -1), (5, 1), (7, 1), (12, -1)];
        let exact = z.mul_sparse(&src, &terms, 40);
        let srcp: Vec<u32> = src.iter().map(|&v| f.reduce(v)).collect();
        let fast = f.mul_sparse(&srcp, &terms, 40);
        assert_eq!(fast, exact.iter().map(|&v| f.reduce(v)).collect::<Vec<_>>());

        let mut exact_div = src.clone();
        z.div_sparse(&mut exact_div, &terms);
        let mut fast_div = srcp.clone();
        f.div_sparse(&mut fast_div, &terms);
        assert_eq!(fast_div, exact_div.iter().map(|&v| f.reduce(v)).collect::<Vec<_>>());
    }

    #[test]
    fn reduce_big() {
        let f = Fp::new(5).unwrap();
        assert_eq!(reduce_int(&BigInt::from(-24), &f), 1);
        assert_eq!(reduce_int(&(-24i128), &f), 1);
    }
}
