use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::auto::AutomorphismSpec;
use super::britton::BsGroup;
use super::word::GroupWord;

/// The element `g` with `a = c_g`, if one exists. Requires `|p|, |q| > 1`,
/// so that `g x g⁻¹` is reduced whenever `g` is and the center is trivial.
///
/// If `g = x^{a₀} t^{ε₁} x^{a₁} ⋯ t^{ε_r} x^{a_r}` then the reduced form of
/// `a(x)` has `t`-length `2r`. Each `t`-letter of `g` is peeled off by
/// conjugating with the leading letters of `a(x)`, which must shorten it by
/// two. The last exponent is then fixed by the linear condition coming from
/// `a(t)`.
pub fn solve_inner(a: &AutomorphismSpec, group: &BsGroup) -> Option<GroupWord> {
    let mut g = GroupWord::identity();
    let mut ax = group.reduce(&a.x);
    while !ax.is_t_free() {
        let len = ax.t_length();
        if len % 2 == 1 {
            return None;
        }
        let step = GroupWord::from_parts(vec![ax.xs()[0].clone(), BigInt::zero()], vec![ax.ts()[0]]);
        let next = group.reduce(&step.inverse().concat(&ax).concat(&step));
        if next.t_length() + 2 != len {
            return None;
        }
        g = g.concat(&step);
        ax = next;
    }
    if ax.x_exponent() != Some(&BigInt::one()) {
        return None;
    }
    // g⁻¹ a(t) g = x^m t x^-m must be x^c t x^d
    let w = group.reduce(&g.inverse().concat(&a.t).concat(&g));
    if w.ts() != [1] {
        return None;
    }
    let (c, d) = (&w.xs()[0], &w.xs()[1]);
    let denom = &group.p - &group.q;
    let num = c + d;
    if denom.is_zero() || !num.is_multiple_of(&denom) {
        return None;
    }
    let m = c + &group.q * (num / denom);
    let g = group.reduce(&g.concat(&GroupWord::x_pow(m)));
    AutomorphismSpec::inner(&g).equals(a, group).then_some(g)
}

/// A conjugator of `t`-length at most `t_len_bound` with every exponent of
/// its reduced form at most `exp_bound` in absolute value, if one exists.
pub fn bounded_inner_search(
    a: &AutomorphismSpec,
    group: &BsGroup,
    t_len_bound: usize,
    exp_bound: &BigInt,
) -> Option<GroupWord> {
    let g = solve_inner(a, group)?;
    (g.t_length() <= t_len_bound && g.xs().iter().all(|e| &e.abs() <= exp_bound)).then_some(g)
}

/// Exhaustive scan of `x^m`, `|m| <= bound`, in the order `0, 1, -1, 2, …`.
pub fn scan_power_of_x_conjugators(a: &AutomorphismSpec, group: &BsGroup, bound: i64) -> Option<GroupWord> {
    (0..=bound)
        .flat_map(|m| if m == 0 { vec![0] } else { vec![m, -m] })
        .map(GroupWord::x_pow)
        .find(|g| AutomorphismSpec::inner(g).equals(a, group))
}
