//! Small integer helpers: modular powers, valuations, primality, Kronecker symbols.

/// `base^exp mod m` on machine words.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut b = (base % m) as u128;
    let mut acc = 1u128;
    let m = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo a prime `p`; `a` must be a unit.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Largest `v` with `ell^v | n`. `n` must be nonzero.
pub fn valuation(mut n: u64, ell: u64) -> u32 {
    debug_assert!(n != 0 && ell > 1);
    let mut v = 0;
    while n % ell == 0 {
        n /= ell;
        v += 1;
    }
    v
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Residue of `n` in `[0, p)` for a possibly negative `n`.
pub fn residue(n: i64, p: u32) -> u32 {
    n.rem_euclid(p as i64) as u32
}

/// Kronecker symbol `(d / n)`.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    n >>= twos;
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // n is now odd and positive: Jacobi symbol (d mod n / n).
    let mut a = d.rem_euclid(n) as u64;
    let mut m = n as u64;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// Base-`b` digits of `n`, least significant first.
pub fn digits(mut n: u64, b: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 0 {
        out.push(n % b);
        n /= b;
    }
    out
}

/// Smallest prime `>= from` satisfying `pred`.
pub fn first_prime_with(from: u64, mut pred: impl FnMut(u64) -> bool) -> u64 {
    let mut q = from.max(2);
    loop {
        if is_prime(q) && pred(q) {
            return q;
        }
        q += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_euler(a: i64, p: i64) -> i32 {
        let r = pow_mod(a.rem_euclid(p) as u64, ((p - 1) / 2) as u64, p as u64);
        match r {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(12, 5), -1);
        assert_eq!(kronecker(-8, 5), -1);
        assert_eq!(kronecker(-2, 5), -1);
        assert_eq!(kronecker(-11, 2), -1);
        assert_eq!(kronecker(12, 1), 1);
        assert_eq!(kronecker(-4, -1), -1);
    }

    #[test]
    fn kronecker_matches_euler_criterion_at_odd_primes() {
        for p in [3i64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43] {
            for d in -60i64..=60 {
                assert_eq!(kronecker(d, p), legendre_euler(d, p), "({d}/{p})");
            }
        }
    }

    #[test]
    fn kronecker_is_multiplicative_in_the_bottom() {
        for d in [-23i64, -11, -8, -7, -4, -3, 5, 12] {
            for a in 1i64..30 {
                for b in 1i64..30 {
                    assert_eq!(kronecker(d, a * b), kronecker(d, a) * kronecker(d, b));
                }
            }
        }
    }

    #[test]
    fn valuation_and_digits() {
        assert_eq!(valuation(250, 5), 3);
        assert_eq!(valuation(7, 5), 0);
        assert_eq!(digits(26, 5), vec![1, 0, 1]);
        assert!(digits(0, 7).is_empty());
    }

    #[test]
    fn pow_mod_reduces() {
        assert_eq!(pow_mod(19, 11, 5), 4);
        assert_eq!(pow_mod(2, 0, 7), 1);
        assert_eq!(inv_mod(3, 7), 5);
    }
}
