use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::word::GroupWord;

/// `BS(p, q) = ⟨x, t | t x^p t⁻¹ = x^q⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BsGroup {
    pub p: BigInt,
    pub q: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PinchOrder {
    Leftmost,
    Rightmost,
}

impl BsGroup {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        let (p, q) = (p.into(), q.into());
        assert!(!p.is_zero() && !q.is_zero(), "BS(p, q) needs nonzero p and q");
        BsGroup { p, q }
    }

    /// The value of the pinch `t^e x^a t^-e`, if it is one.
    fn pinch(&self, e: i8, a: &BigInt) -> Option<BigInt> {
        let (from, to) = if e > 0 { (&self.p, &self.q) } else { (&self.q, &self.p) };
        a.is_multiple_of(from).then(|| a / from * to)
    }

    /// Britton reduction with a stack: each incoming `t`-letter is checked
    /// against the top of the output for a pinch.
    pub fn reduce(&self, w: &GroupWord) -> GroupWord {
        let mut xs: Vec<BigInt> = vec![w.xs()[0].clone()];
        let mut ts: Vec<i8> = Vec::new();
        for (&e, a) in w.ts().iter().zip(&w.xs()[1..]) {
            let pinched = match ts.last() {
                Some(&prev) if prev == -e => self.pinch(prev, xs.last().expect("nonempty")),
                _ => None,
            };
            match pinched {
                Some(value) => {
                    xs.pop();
                    ts.pop();
                    *xs.last_mut().expect("nonempty") += value;
                }
                None => {
                    ts.push(e);
                    xs.push(BigInt::zero());
                }
            }
            *xs.last_mut().expect("nonempty") += a;
        }
        GroupWord::from_parts(xs, ts)
    }

    /// Reference reduction that rescans the whole word after every pinch.
    pub fn reduce_naive(&self, w: &GroupWord, order: PinchOrder) -> GroupWord {
        let mut xs = w.xs().to_vec();
        let mut ts = w.ts().to_vec();
        loop {
            let mut sites = (0..ts.len().saturating_sub(1))
                .filter(|&i| ts[i] == -ts[i + 1] && self.pinch(ts[i], &xs[i + 1]).is_some());
            let site = match order {
                PinchOrder::Leftmost => sites.next(),
                PinchOrder::Rightmost => sites.next_back(),
            };
            let Some(i) = site else { break };
            let value = self.pinch(ts[i], &xs[i + 1]).expect("pinch");
            let right = xs.remove(i + 2);
            xs.remove(i + 1);
            xs[i] += value + right;
            ts.drain(i..i + 2);
        }
        GroupWord::from_parts(xs, ts)
    }

    pub fn mul(&self, a: &GroupWord, b: &GroupWord) -> GroupWord {
        self.reduce(&a.concat(b))
    }

    pub fn is_identity(&self, w: &GroupWord) -> bool {
        self.reduce(w).is_empty()
    }

    pub fn words_equal(&self, a: &GroupWord, b: &GroupWord) -> bool {
        self.is_identity(&a.concat(&b.inverse()))
    }

    /// `w^e` by repeated squaring, reducing along the way.
    pub fn power(&self, w: &GroupWord, e: &BigInt) -> GroupWord {
        let w = if e.is_negative() { w.inverse() } else { w.clone() };
        let e = e.abs();
        if let Some(a) = w.x_exponent() {
            return GroupWord::x_pow(a * e);
        }
        let mut result = GroupWord::identity();
        let mut base = self.reduce(&w);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = self.mul(&result, &base);
            }
            if i + 1 < bits {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    pub fn relator(&self) -> GroupWord {
        let mut w = GroupWord::t();
        w = w.concat(&GroupWord::x_pow(self.p.clone()));
        w = w.concat(&GroupWord::t_pow(-1));
        w.concat(&GroupWord::x_pow(-&self.q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    #[test]
    fn pinches() {
        let g = BsGroup::new(2, 4);
        assert!(g.reduce(&w("t x^2 T x^-4")).is_empty());
        assert_eq!(g.reduce(&w("t x T")), w("t x T"));
        assert_eq!(g.reduce(&w("T x^4 t")), w("x^2"));
        assert!(g.is_identity(&w("1")));
        assert!(!g.words_equal(&w("x"), &w("t x T")));
        assert!(g.is_identity(&g.relator()));
    }

    #[test]
    fn nested_pinches() {
        let g = BsGroup::new(2, 4);
        // t (t x^2 T) T = t x^4 T = x^8
        assert_eq!(g.reduce(&w("t t x^2 T T")), w("x^8"));
        assert_eq!(g.reduce_naive(&w("t t x^2 T T"), PinchOrder::Leftmost), w("x^8"));
        assert_eq!(g.reduce_naive(&w("t t x^2 T T"), PinchOrder::Rightmost), w("x^8"));
    }

    #[test]
    fn powers() {
        let g = BsGroup::new(2, 4);
        let c = w("t x T");
        let c5 = g.power(&c, &BigInt::from(5));
        let mut slow = GroupWord::identity();
        for _ in 0..5 {
            slow = g.mul(&slow, &c);
        }
        assert!(g.words_equal(&c5, &slow));
        assert!(g.is_identity(&g.mul(&g.power(&c, &BigInt::from(-7)), &g.power(&c, &BigInt::from(7)))));
        assert_eq!(g.power(&w("x^3"), &BigInt::from(-2)), w("x^-6"));
    }
}
