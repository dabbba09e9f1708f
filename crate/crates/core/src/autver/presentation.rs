use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::auto::AutomorphismSpec;
use super::britton::BsGroup;
use super::word::GroupWord;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub passed: bool,
    pub max_exponent_bits: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresentationReport {
    pub p: BigInt,
    pub q: BigInt,
    pub k_max: u32,
    pub checks: Vec<RelationCheck>,
    pub all_passed: bool,
    pub max_exponent_bits: u64,
}

type Thunk = Box<dyn Fn(&BsGroup) -> (bool, u64) + Send + Sync>;

fn auto_eq(
    lhs: impl Fn(&BsGroup) -> AutomorphismSpec + Send + Sync + 'static,
    rhs: impl Fn(&BsGroup) -> AutomorphismSpec + Send + Sync + 'static,
) -> Thunk {
    Box::new(move |g| {
        let (a, b) = (lhs(g), rhs(g));
        (a.equals(&b, g), a.max_exponent_bits().max(b.max_exponent_bits()))
    })
}

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Check every relation of the automorphism group presentation, with `k`
/// running over `1..=k_max`, plus well-definedness and inverses of the
/// generators and an iterated defining relation reaching large exponents.
pub fn verify_presentation(group: &BsGroup, k_max: u32) -> PresentationReport {
    assert!(&group.q % &group.p == BigInt::from(0), "p must divide q");
    let n = &group.q / &group.p;
    let p = group.p.clone();
    let mut rel: Vec<(String, Thunk)> = Vec::new();

    type A = AutomorphismSpec;
    let (pp, qq) = (p.clone(), group.q.clone());
    rel.push((
        "c_t c_x^p c_t^-1 = c_x^q".into(),
        auto_eq(
            move |g| A::c_t().compose(&A::c_x().power(&pp, g), g).compose(&A::c_t().inverse(), g),
            move |g| A::c_x().power(&qq, g),
        ),
    ));
    rel.push(("iota^-1 = iota".into(), auto_eq(|_| A::iota().inverse(), |_| A::iota())));
    rel.push(("iota^2 = 1".into(), auto_eq(|g| A::iota().compose(&A::iota(), g), |_| A::identity())));
    rel.push((
        "iota c_x iota = c_x^-1".into(),
        auto_eq(|g| A::iota().compose(&A::c_x(), g).compose(&A::iota(), g), |_| A::c_x().inverse()),
    ));
    rel.push((
        "iota c_t iota = c_t".into(),
        auto_eq(|g| A::iota().compose(&A::c_t(), g).compose(&A::iota(), g), |_| A::c_t()),
    ));
    rel.push((
        "iota psi iota = psi^-1".into(),
        auto_eq(|g| A::iota().compose(&A::psi(), g).compose(&A::iota(), g), |_| A::psi().inverse()),
    ));
    let (pp, nn) = (p.clone(), n.clone());
    rel.push(("psi^p = phi_1^n".into(), auto_eq(move |g| A::psi().power(&pp, g), move |g| A::phi(1, g).power(&nn, g))));
    let (e, pp) = (&p * (&n - int(1)), p.clone());
    rel.push((
        "psi^(p(n-1)) = c_x^-p".into(),
        auto_eq(move |g| A::psi().power(&e, g), move |g| A::c_x().power(&-&pp, g)),
    ));
    rel.push((
        "psi c_x psi^-1 = c_x".into(),
        auto_eq(|g| A::psi().compose(&A::c_x(), g).compose(&A::psi().inverse(), g), |_| A::c_x()),
    ));
    rel.push((
        "psi c_t psi^-1 = c_x c_t".into(),
        auto_eq(|g| A::psi().compose(&A::c_t(), g).compose(&A::psi().inverse(), g), |g| A::c_x().compose(&A::c_t(), g)),
    ));
    for k in 1..=k_max {
        rel.push((
            format!("iota phi_{k} iota = phi_{k}^-1"),
            auto_eq(
                move |g| A::iota().compose(&A::phi(k, g), g).compose(&A::iota(), g),
                move |g| A::phi(k, g).inverse(),
            ),
        ));
        rel.push((
            format!("phi_{k} c_x phi_{k}^-1 = c_x"),
            auto_eq(move |g| A::phi(k, g).compose(&A::c_x(), g).compose(&A::phi(k, g).inverse(), g), |_| A::c_x()),
        ));
        let pp = p.clone();
        rel.push((
            format!("phi_{k} c_t phi_{k}^-1 = c_t^-{k} c_x^p c_t^{}", k + 1),
            auto_eq(
                move |g| A::phi(k, g).compose(&A::c_t(), g).compose(&A::phi(k, g).inverse(), g),
                move |g| {
                    A::c_t()
                        .power(&-int(k as i64), g)
                        .compose(&A::c_x().power(&pp, g), g)
                        .compose(&A::c_t().power(&int(k as i64 + 1), g), g)
                },
            ),
        ));
        let nn = n.clone();
        rel.push((
            format!("phi_{}^n = phi_{k}", k + 1),
            auto_eq(move |g| A::phi(k + 1, g).power(&nn, g), move |g| A::phi(k, g)),
        ));
    }

    let mut generators: Vec<fn(&BsGroup) -> AutomorphismSpec> =
        vec![|_| A::psi(), |_| A::iota(), |_| A::c_x(), |_| A::c_t()];
    generators.push(|g| A::phi(1, g));
    for make in generators {
        rel.push((
            format!("{} well defined", make(group).name),
            Box::new(move |g| {
                let a = make(g);
                (a.well_defined(g) && a.inverse().well_defined(g), a.max_exponent_bits())
            }),
        ));
        rel.push((
            format!("{0} {0}^-1 = 1", make(group).name),
            auto_eq(move |g| make(g).compose(&make(g).inverse(), g), |_| A::identity()),
        ));
    }
    for k in 2..=k_max + 1 {
        rel.push((
            format!("phi_{k} well defined"),
            Box::new(move |g| {
                let a = A::phi(k, g);
                (a.well_defined(g) && a.compose(&a.inverse(), g).equals(&A::identity(), g), a.max_exponent_bits())
            }),
        ));
    }

    let depth = 8 * k_max as usize;
    rel.push((
        format!("t^{depth} x^(p^{depth}) t^-{depth} = x^(q^{depth})"),
        Box::new(move |g| {
            let tk = GroupWord::t_pow(depth as i64);
            let lhs = tk.concat(&GroupWord::x_pow(num_traits::pow(g.p.clone(), depth))).concat(&tk.inverse());
            let rhs = GroupWord::x_pow(num_traits::pow(g.q.clone(), depth));
            let reduced = g.reduce(&lhs);
            (reduced == rhs, reduced.max_exponent_bits().max(lhs.max_exponent_bits()))
        }),
    ));

    let checks: Vec<RelationCheck> = rel
        .par_iter()
        .map(|(name, check)| {
            let (passed, bits) = check(group);
            RelationCheck { name: name.clone(), passed, max_exponent_bits: bits }
        })
        .collect();
    let all_passed = checks.iter().all(|c| c.passed);
    let max_exponent_bits = checks.iter().map(|c| c.max_exponent_bits).max().unwrap_or(0);
    PresentationReport { p: group.p.clone(), q: group.q.clone(), k_max, checks, all_passed, max_exponent_bits }
}
