use num_bigint::BigInt;
use serde::Serialize;

use super::britton::BsGroup;
use super::word::GroupWord;

/// An endomorphism given by the images of `x` and `t`, together with the
/// images of its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AutomorphismSpec {
    pub name: String,
    pub x: GroupWord,
    pub t: GroupWord,
    pub inv_x: GroupWord,
    pub inv_t: GroupWord,
}

impl AutomorphismSpec {
    pub fn new(name: impl Into<String>, x: GroupWord, t: GroupWord, inv_x: GroupWord, inv_t: GroupWord) -> Self {
        AutomorphismSpec { name: name.into(), x, t, inv_x, inv_t }
    }

    pub fn identity() -> Self {
        Self::new("id", GroupWord::x(), GroupWord::t(), GroupWord::x(), GroupWord::t())
    }

    /// `ψ: x ↦ x, t ↦ x t`.
    pub fn psi() -> Self {
        let x = GroupWord::x();
        Self::new("psi", x.clone(), x.concat(&GroupWord::t()), x.clone(), x.inverse().concat(&GroupWord::t()))
    }

    /// `ι: x ↦ x⁻¹, t ↦ t`, an involution.
    pub fn iota() -> Self {
        let xi = GroupWord::x_pow(-1);
        Self::new("iota", xi.clone(), GroupWord::t(), xi, GroupWord::t())
    }

    /// `φ_k: x ↦ x, t ↦ b_k t` with `b_k = t^-k x^p t^k`.
    pub fn phi(k: u32, group: &BsGroup) -> Self {
        let b = Self::b_k(k, group);
        let t = GroupWord::t();
        Self::new(format!("phi_{k}"), GroupWord::x(), b.concat(&t), GroupWord::x(), b.inverse().concat(&t))
    }

    pub fn b_k(k: u32, group: &BsGroup) -> GroupWord {
        let tk = GroupWord::t_pow(k as i64);
        tk.inverse().concat(&GroupWord::x_pow(group.p.clone())).concat(&tk)
    }

    /// Conjugation `c_g: w ↦ g w g⁻¹`.
    pub fn inner(g: &GroupWord) -> Self {
        let gi = g.inverse();
        let conj = |a: &GroupWord, b: &GroupWord, w: GroupWord| a.concat(&w).concat(b);
        Self::new(
            format!("c[{g}]"),
            conj(g, &gi, GroupWord::x()),
            conj(g, &gi, GroupWord::t()),
            conj(&gi, g, GroupWord::x()),
            conj(&gi, g, GroupWord::t()),
        )
    }

    pub fn c_x() -> Self {
        let mut a = Self::inner(&GroupWord::x());
        a.name = "c_x".into();
        a
    }

    pub fn c_t() -> Self {
        let mut a = Self::inner(&GroupWord::t());
        a.name = "c_t".into();
        a
    }

    pub fn inverse(&self) -> Self {
        Self::new(format!("{}^-1", self.name), self.inv_x.clone(), self.inv_t.clone(), self.x.clone(), self.t.clone())
    }

    fn substitute(group: &BsGroup, ix: &GroupWord, it: &GroupWord, w: &GroupWord) -> GroupWord {
        let it_inv = it.inverse();
        let mut out = group.power(ix, &w.xs()[0]);
        for (&e, a) in w.ts().iter().zip(&w.xs()[1..]) {
            out = group.mul(&out, if e > 0 { it } else { &it_inv });
            out = group.mul(&out, &group.power(ix, a));
        }
        out
    }

    /// The reduced image of `w`.
    pub fn apply(&self, group: &BsGroup, w: &GroupWord) -> GroupWord {
        Self::substitute(group, &self.x, &self.t, w)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self, group: &BsGroup) -> Self {
        let inv = self.inverse();
        Self::new(
            format!("{} {}", self.name, other.name),
            self.apply(group, &other.x),
            self.apply(group, &other.t),
            Self::substitute(group, &other.inv_x, &other.inv_t, &inv.x),
            Self::substitute(group, &other.inv_x, &other.inv_t, &inv.t),
        )
    }

    pub fn power(&self, e: &BigInt, group: &BsGroup) -> Self {
        let base = if e < &BigInt::from(0) { self.inverse() } else { self.clone() };
        let mut n: BigInt = if e < &BigInt::from(0) { -e } else { e.clone() };
        let mut result = Self::identity();
        let mut square = base;
        let zero = BigInt::from(0);
        while n > zero {
            if n.bit(0) {
                result = result.compose(&square, group);
            }
            n >>= 1;
            if n > zero {
                square = square.compose(&square, group);
            }
        }
        result.name = format!("({})^{e}", self.name);
        result
    }

    /// The defining relator maps to the identity.
    pub fn well_defined(&self, group: &BsGroup) -> bool {
        group.is_identity(&self.apply(group, &group.relator()))
    }

    pub fn equals(&self, other: &Self, group: &BsGroup) -> bool {
        group.words_equal(&self.x, &other.x) && group.words_equal(&self.t, &other.t)
    }

    pub fn max_exponent_bits(&self) -> u64 {
        [&self.x, &self.t, &self.inv_x, &self.inv_t].iter().map(|w| w.max_exponent_bits()).max().unwrap_or(0)
    }
}
