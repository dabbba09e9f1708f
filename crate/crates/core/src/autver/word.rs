use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// `x^{a₀} t^{ε₁} x^{a₁} ⋯ t^{ε_r} x^{a_r}`, kept freely reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupWord {
    xs: Vec<BigInt>,
    ts: Vec<i8>,
}

impl Default for GroupWord {
    fn default() -> Self {
        GroupWord::identity()
    }
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord { xs: vec![BigInt::zero()], ts: Vec::new() }
    }

    pub fn x_pow(a: impl Into<BigInt>) -> Self {
        GroupWord { xs: vec![a.into()], ts: Vec::new() }
    }

    pub fn x() -> Self {
        Self::x_pow(1)
    }

    pub fn t() -> Self {
        Self::t_pow(1)
    }

    pub fn t_pow(e: i64) -> Self {
        let mut w = Self::identity();
        let sign = if e < 0 { -1 } else { 1 };
        for _ in 0..e.unsigned_abs() {
            w.push_t(sign);
        }
        w
    }

    /// Build from segments; `ts` entries must be ±1 and `xs.len() == ts.len() + 1`.
    pub fn from_parts(xs: Vec<BigInt>, ts: Vec<i8>) -> Self {
        assert_eq!(xs.len(), ts.len() + 1, "segment count mismatch");
        assert!(ts.iter().all(|&e| e == 1 || e == -1), "t exponents must be ±1");
        let mut w = Self::x_pow(xs[0].clone());
        for (e, a) in ts.into_iter().zip(xs.into_iter().skip(1)) {
            w.push_t(e);
            w.push_x(a);
        }
        w
    }

    pub fn xs(&self) -> &[BigInt] {
        &self.xs
    }

    pub fn ts(&self) -> &[i8] {
        &self.ts
    }

    pub fn t_length(&self) -> usize {
        self.ts.len()
    }

    pub fn is_t_free(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty() && self.xs[0].is_zero()
    }

    /// The exponent of a `t`-free word.
    pub fn x_exponent(&self) -> Option<&BigInt> {
        self.is_t_free().then(|| &self.xs[0])
    }

    pub fn max_exponent_bits(&self) -> u64 {
        self.xs.iter().map(|a| a.bits()).max().unwrap_or(0)
    }

    pub(crate) fn push_x(&mut self, a: BigInt) {
        *self.xs.last_mut().expect("nonempty") += a;
    }

    pub(crate) fn push_t(&mut self, e: i8) {
        if self.ts.last() == Some(&-e) && self.xs.last().is_some_and(Zero::is_zero) {
            self.xs.pop();
            self.ts.pop();
        } else {
            self.ts.push(e);
            self.xs.push(BigInt::zero());
        }
    }

    /// Free product; no relator is applied.
    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut out = self.clone();
        out.push_x(other.xs[0].clone());
        for (e, a) in other.ts.iter().zip(&other.xs[1..]) {
            out.push_t(*e);
            out.push_x(a.clone());
        }
        out
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord { xs: self.xs.iter().rev().map(|a| -a).collect(), ts: self.ts.iter().rev().map(|e| -e).collect() }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        let mut parts = Vec::new();
        let x_part = |a: &BigInt, parts: &mut Vec<String>| {
            if a.is_one() {
                parts.push("x".to_string());
            } else if !a.is_zero() {
                parts.push(format!("x^{a}"));
            }
        };
        x_part(&self.xs[0], &mut parts);
        for (e, a) in self.ts.iter().zip(&self.xs[1..]) {
            parts.push(if *e > 0 { "t" } else { "T" }.to_string());
            x_part(a, &mut parts);
        }
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordParseError {
    #[error("unexpected character {0:?} at {1}")]
    UnexpectedChar(char, usize),
    #[error("bad exponent at {0}")]
    BadExponent(usize),
}

impl FromStr for GroupWord {
    type Err = WordParseError;

    /// Letters `x`, `X` (inverse of `x`), `t`, `T` (inverse of `t`), each
    /// optionally followed by `^` and an integer; `1` is the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        let mut w = GroupWord::identity();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '*' || c == '.' || c == '1' {
                i += 1;
                continue;
            }
            if !matches!(c, 'x' | 'X' | 't' | 'T') {
                return Err(WordParseError::UnexpectedChar(c, i));
            }
            i += 1;
            let mut exp = BigInt::one();
            if chars.get(i) == Some(&'^') {
                let start = i + 1;
                let mut end = start;
                if matches!(chars.get(end), Some('-') | Some('+')) {
                    end += 1;
                }
                while chars.get(end).is_some_and(|d| d.is_ascii_digit()) {
                    end += 1;
                }
                let text: String = chars[start..end].iter().collect();
                exp = text.parse().map_err(|_| WordParseError::BadExponent(start))?;
                i = end;
            }
            if c.is_uppercase() {
                exp = -exp;
            }
            if c.eq_ignore_ascii_case(&'x') {
                w.push_x(exp);
            } else {
                let e: i64 = (&exp).try_into().map_err(|_| WordParseError::BadExponent(i))?;
                let sign = if e < 0 { -1 } else { 1 };
                for _ in 0..e.unsigned_abs() {
                    w.push_t(sign);
                }
            }
        }
        Ok(w)
    }
}
