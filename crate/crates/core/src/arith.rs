//! Small exact-arithmetic helpers on big integers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Prime factorization of `|n|` by trial division. `n` must be nonzero.
pub fn factorize(n: &BigInt) -> BTreeMap<BigInt, u32> {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut n = n.abs();
    let mut out = BTreeMap::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        while (&n % &p).is_zero() {
            n /= &p;
            *out.entry(p.clone()).or_insert(0) += 1;
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if n > BigInt::one() {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

/// Positive divisors of `|n|`, ascending.
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut divs = vec![BigInt::one()];
    for (p, e) in factorize(n) {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

pub fn divides(d: &BigInt, n: &BigInt) -> bool {
    !d.is_zero() && (n % d).is_zero()
}

/// `m >= 1` and every prime factor of `m` divides `n`: membership in the
/// monoid generated by the factors of `n`, positive part.
pub fn in_positive_monoid(m: &BigInt, n: &BigInt) -> bool {
    if !m.is_positive() {
        return false;
    }
    let mut rest = m.clone();
    loop {
        let g = rest.gcd(n);
        if g.is_one() {
            return rest.is_one();
        }
        rest /= g;
    }
}

/// If `m = |n|^k` for some `k >= 0`, returns `k`.
pub fn exact_log(m: &BigInt, n: &BigInt) -> Option<u32> {
    let base = n.abs();
    if base <= BigInt::one() || !m.is_positive() {
        return None;
    }
    let mut k = 0;
    let mut x = m.clone();
    while (&x % &base).is_zero() {
        x /= &base;
        k += 1;
    }
    x.is_one().then_some(k)
}

pub fn pow(base: &BigInt, exp: u32) -> BigInt {
    num_traits::pow(base.clone(), exp as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn factorization() {
        let f = factorize(&b(-360));
        assert_eq!(f, BTreeMap::from([(b(2), 3), (b(3), 2), (b(5), 1)]));
        assert!(factorize(&b(1)).is_empty());
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(&b(12)), vec![b(1), b(2), b(3), b(4), b(6), b(12)]);
        assert_eq!(divisors(&b(-4)), vec![b(1), b(2), b(4)]);
    }

    #[test]
    fn monoid_membership() {
        assert!(in_positive_monoid(&b(4), &b(6)));
        assert!(in_positive_monoid(&b(1), &b(6)));
        assert!(!in_positive_monoid(&b(5), &b(6)));
        assert!(in_positive_monoid(&b(8), &b(-2)));
        assert!(!in_positive_monoid(&b(-2), &b(2)));
    }

    #[test]
    fn logs() {
        assert_eq!(exact_log(&b(8), &b(2)), Some(3));
        assert_eq!(exact_log(&b(36), &b(-6)), Some(2));
        assert_eq!(exact_log(&b(4), &b(6)), None);
        assert_eq!(exact_log(&b(1), &b(6)), Some(0));
    }
}
