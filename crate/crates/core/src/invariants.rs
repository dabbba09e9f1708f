//! Deformation-space invariants of a labeled graph: Betti number, Euler
//! characteristic, and the image of the modular homomorphism.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::factorize;
use crate::canon::canonical_form;
use crate::graph::{LabeledGraph, VertexId};

pub fn betti(g: &LabeledGraph) -> usize {
    g.edge_count() + 1 - g.vertex_count()
}

/// `|V| - |E|`, cross-checked against the valence count.
pub fn euler(g: &LabeledGraph) -> i64 {
    let direct = g.vertex_count() as i64 - g.edge_count() as i64;
    let by_valence = euler_by_valence(g);
    assert_eq!(direct, by_valence, "Euler characteristic disagrees with valence formula");
    direct
}

/// `½ Σ_s (2 − s)·V_s` where `V_s` counts vertices of valence `s`, i.e.
/// `½(V₁ − V₃ − 2V₄ − 3V₅ − …)` plus the (degenerate) isolated-vertex term.
pub fn euler_by_valence(g: &LabeledGraph) -> i64 {
    let mut by_valence: BTreeMap<usize, i64> = BTreeMap::new();
    for v in g.vertices() {
        *by_valence.entry(g.valence(v)).or_insert(0) += 1;
    }
    let twice: i64 = by_valence.iter().map(|(&s, &count)| (2 - s as i64) * count).sum();
    debug_assert!(twice % 2 == 0);
    twice / 2
}

/// Generators of the modulus subgroup, one per fundamental cycle of a
/// spanning tree chosen in canonical edge order. Each generator is the
/// product of `|label at start| / |label at end|` along the cycle, with the
/// cycle oriented so that the value is at least 1.
pub fn modulus(g: &LabeledGraph) -> Vec<BigRational> {
    let (_, rep) = canonical_form(g);
    let index: HashMap<&VertexId, usize> = rep.vertices().iter().enumerate().map(|(i, v)| (v, i)).collect();
    let n = rep.vertex_count();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }

    let mut tree_adj: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); n];
    let mut cotree = Vec::new();
    for e in rep.edges() {
        let (a, b) = (index[&e.from], index[&e.to]);
        let q = BigRational::new(e.label_from.abs(), e.label_to.abs());
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            tree_adj[a].push((b, q.clone()));
            tree_adj[b].push((a, q.recip()));
        } else {
            cotree.push((a, b, q));
        }
    }

    // potential[x] = product of q along the tree path from vertex 0 to x
    let mut potential: Vec<Option<BigRational>> = vec![None; n];
    potential[0] = Some(BigRational::one());
    let mut stack = vec![0usize];
    while let Some(x) = stack.pop() {
        let px = potential[x].clone().expect("visited");
        for (y, q) in &tree_adj[x] {
            if potential[*y].is_none() {
                potential[*y] = Some(&px * q);
                stack.push(*y);
            }
        }
    }

    cotree
        .into_iter()
        .map(|(a, b, q)| {
            let pa = potential[a].as_ref().expect("connected");
            let pb = potential[b].as_ref().expect("connected");
            let value = q * pa / pb;
            if value < BigRational::one() {
                value.recip()
            } else {
                value
            }
        })
        .collect()
}

/// A finitely generated subgroup of the positive rationals, stored as a
/// lattice of prime-exponent vectors in Hermite normal form, so equality of
/// subgroups is equality of values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModulusGroup {
    primes: Vec<BigInt>,
    basis: Vec<Vec<i64>>,
}

impl ModulusGroup {
    pub fn generated_by(gens: &[BigRational]) -> Self {
        let mut vectors: Vec<BTreeMap<BigInt, i64>> = Vec::new();
        let mut primes = BTreeSet::new();
        for q in gens {
            let mut v: BTreeMap<BigInt, i64> = BTreeMap::new();
            for (p, e) in factorize(q.numer()) {
                *v.entry(p).or_insert(0) += e as i64;
            }
            for (p, e) in factorize(q.denom()) {
                *v.entry(p).or_insert(0) -= e as i64;
            }
            v.retain(|_, e| *e != 0);
            primes.extend(v.keys().cloned());
            vectors.push(v);
        }
        let primes: Vec<BigInt> = primes.into_iter().collect();
        let rows: Vec<Vec<i64>> =
            vectors.iter().map(|v| primes.iter().map(|p| v.get(p).copied().unwrap_or(0)).collect()).collect();
        ModulusGroup { basis: hermite_normal_form(rows, primes.len()), primes }
    }

    pub fn of_graph(g: &LabeledGraph) -> Self {
        Self::generated_by(&modulus(g))
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// Whether the subgroup contains an integer other than 1, i.e. a nonzero
    /// lattice vector with all coordinates nonnegative. Decided exactly by
    /// Fourier–Motzkin elimination over the rationals (a rational solution
    /// scales to an integral one).
    pub fn contains_nontrivial_integer(&self) -> bool {
        if self.basis.is_empty() {
            return false;
        }
        let r = self.basis.len();
        let cols = self.primes.len();
        // variables c_0..c_{r-1}; constraints (coeffs, rhs) meaning coeffs·c >= rhs
        let mut system: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        for j in 0..cols {
            let coeffs = (0..r).map(|i| BigRational::from(BigInt::from(self.basis[i][j]))).collect();
            system.push((coeffs, BigRational::zero()));
        }
        let total = (0..r).map(|i| BigRational::from(BigInt::from(self.basis[i].iter().sum::<i64>()))).collect();
        system.push((total, BigRational::one()));
        fourier_motzkin_feasible(system, r)
    }
}

impl fmt::Display for ModulusGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.basis.is_empty() {
            return f.write_str("<1>");
        }
        let gens: Vec<String> = self
            .basis
            .iter()
            .map(|row| {
                let mut num = BigInt::one();
                let mut den = BigInt::one();
                for (p, &e) in self.primes.iter().zip(row) {
                    let pk = num_traits::pow(p.clone(), e.unsigned_abs() as usize);
                    if e > 0 {
                        num *= pk;
                    } else if e < 0 {
                        den *= pk;
                    }
                }
                if den.is_one() {
                    num.to_string()
                } else {
                    format!("{num}/{den}")
                }
            })
            .collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

fn hermite_normal_form(mut rows: Vec<Vec<i64>>, cols: usize) -> Vec<Vec<i64>> {
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row >= rows.len() {
            break;
        }
        // Euclid down the column until a single nonzero entry remains.
        loop {
            let nonzero: Vec<usize> = (pivot_row..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nonzero.is_empty() {
                break;
            }
            let min = *nonzero.iter().min_by_key(|&&i| rows[i][col].abs()).expect("nonempty");
            rows.swap(pivot_row, min);
            if rows[pivot_row][col] < 0 {
                rows[pivot_row].iter_mut().for_each(|x| *x = -*x);
            }
            let mut done = true;
            for i in pivot_row + 1..rows.len() {
                let factor = rows[i][col].div_euclid(rows[pivot_row][col]);
                if factor != 0 {
                    let pivot = rows[pivot_row].clone();
                    rows[i].iter_mut().zip(&pivot).for_each(|(x, y)| *x -= factor * y);
                }
                if rows[i][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[pivot_row][col] != 0 {
            let pivot = rows[pivot_row].clone();
            for row in rows.iter_mut().take(pivot_row) {
                let factor = row[col].div_euclid(pivot[col]);
                if factor != 0 {
                    row.iter_mut().zip(&pivot).for_each(|(x, y)| *x -= factor * y);
                }
            }
            pivot_row += 1;
        }
    }
    rows.truncate(pivot_row);
    rows.retain(|r| r.iter().any(|&x| x != 0));
    rows
}

fn fourier_motzkin_feasible(mut system: Vec<(Vec<BigRational>, BigRational)>, vars: usize) -> bool {
    for var in 0..vars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for (a, b) in system {
            if a[var].is_positive() {
                pos.push((a, b));
            } else if a[var].is_negative() {
                neg.push((a, b));
            } else {
                rest.push((a, b));
            }
        }
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                // scale so the coefficients of `var` are +1 and -1, then add
                let sp = ap[var].recip();
                let sn = -an[var].recip();
                let a: Vec<BigRational> = ap.iter().zip(an).map(|(x, y)| x * &sp + y * &sn).collect();
                let b = bp * &sp + bn * &sn;
                rest.push((a, b));
            }
        }
        system = rest;
    }
    system.iter().all(|(_, b)| !b.is_positive())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FiniteDimCertificate {
    /// No integer other than 1 in the modulus image, so no ascending loop.
    NonAscending,
    /// Quotient data is always locally finite; here the first Betti number is at most 1.
    LocallyFiniteB1AtMost1,
    Unknown,
}

pub fn finite_dim_certificate(g: &LabeledGraph) -> FiniteDimCertificate {
    if !ModulusGroup::of_graph(g).contains_nontrivial_integer() {
        FiniteDimCertificate::NonAscending
    } else if betti(g) <= 1 {
        FiniteDimCertificate::LocallyFiniteB1AtMost1
    } else {
        FiniteDimCertificate::Unknown
    }
}

/// Everything the elementary moves must leave unchanged.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantSummary {
    pub betti: usize,
    pub euler: i64,
    pub modulus: ModulusGroup,
}

impl InvariantSummary {
    pub fn of(g: &LabeledGraph) -> Self {
        InvariantSummary { betti: betti(g), euler: euler(g), modulus: ModulusGroup::of_graph(g) }
    }
}
