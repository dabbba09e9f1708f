//! `BS(p, q)` with `q = pn` and `p, |n| > 1`: classification of reduced and
//! retract graphs, levels, the projection onto level graphs, and the tree
//! of level graphs as an abstract ball.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{exact_log, in_positive_monoid, pow};
use crate::canon::{canonical, is_isomorphic};
use crate::graph::{loop_with_pendant, single_loop, LabeledGraph};
use crate::moves::{is_reduced, reduced_neighbors};
use crate::retract::{in_W, shelters, ShelterType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BspqError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("graph is not in the family: {0}")]
    NotInFamily(String),
    #[error("{0} is not in the positive monoid generated by the factors of n")]
    NotInMonoid(BigInt),
    #[error("node {0} is not in the ball")]
    NotInBall(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BspqParams {
    pub p: BigInt,
    pub q: BigInt,
    pub n: BigInt,
}

impl BspqParams {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self, BspqError> {
        let (p, q) = (p.into(), q.into());
        if p <= BigInt::one() {
            return Err(BspqError::InvalidParams(format!("p = {p} must exceed 1")));
        }
        if !q.is_multiple_of(&p) {
            return Err(BspqError::InvalidParams(format!("{p} does not divide {q}")));
        }
        let n = &q / &p;
        if n.abs() <= BigInt::one() {
            return Err(BspqError::InvalidParams(format!("|q/p| = {} must exceed 1", n.abs())));
        }
        Ok(BspqParams { p, q, n })
    }

    pub fn abs_n(&self) -> BigInt {
        self.n.abs()
    }

    /// The level-`k` graph: `loop(p, q)` for `k = 0`, otherwise the ascending
    /// loop `(1, n)` with a pendant labeled `|n^k|` at the loop and `p` at the leaf.
    pub fn level_graph(&self, k: u32) -> LabeledGraph {
        if k == 0 {
            single_loop(self.p.clone(), self.q.clone())
        } else {
            self.type2_graph(&pow(&self.abs_n(), k))
        }
    }

    fn type2_graph(&self, m: &BigInt) -> LabeledGraph {
        loop_with_pendant(1, self.n.clone(), m.clone(), self.p.clone())
    }

    fn abs_n_u64(&self) -> u64 {
        self.abs_n().try_into().unwrap_or(u64::MAX)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ReducedType {
    Type1,
    Type2 { m: BigInt },
}

pub fn classify_reduced(g: &LabeledGraph, params: &BspqParams) -> Result<ReducedType, BspqError> {
    let not_in = |msg: &str| Err(BspqError::NotInFamily(msg.to_string()));
    if !is_reduced(g) {
        return not_in("graph is not reduced");
    }
    if is_isomorphic(g, &params.level_graph(0)) {
        return Ok(ReducedType::Type1);
    }
    if g.vertex_count() != 2 || g.edge_count() != 2 {
        return not_in("expected one loop and one pendant edge");
    }
    let (Some(lp), Some(f)) = (g.edges().iter().find(|e| e.is_loop()), g.edges().iter().find(|e| !e.is_loop())) else {
        return not_in("expected one loop and one pendant edge");
    };
    let at_loop = if f.from == lp.from { &f.label_from } else { &f.label_to };
    let m = at_loop.abs();
    if m.is_one() || !in_positive_monoid(&m, &params.n) {
        return not_in(&format!("pendant label {m} is not a nontrivial element of the monoid"));
    }
    if !is_isomorphic(g, &params.type2_graph(&m)) {
        return not_in("labels do not match loop(1, n) with a pendant");
    }
    Ok(ReducedType::Type2 { m })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum WType {
    Type1,
    /// An S3 circuit with absolute terminus labels `circuit` (starting at the
    /// vertex carrying the pendant), and a pendant with label `pendant` on
    /// the circuit and `far` at the leaf.
    Circuit {
        circuit: Vec<BigInt>,
        pendant: BigInt,
        far: BigInt,
    },
}

#[allow(non_snake_case)]
pub fn classify_W(g: &LabeledGraph, params: &BspqParams) -> Result<WType, BspqError> {
    let not_in = |msg: String| Err(BspqError::NotInFamily(msg));
    if !in_W(g) {
        return not_in("graph is not a union of shelters".into());
    }
    if is_isomorphic(g, &params.level_graph(0)) {
        return Ok(WType::Type1);
    }
    if g.edge_count() != g.vertex_count() {
        return not_in("expected exactly one circuit".into());
    }
    let leaves: Vec<_> = g.vertices().iter().filter(|v| g.valence(v) == 1).collect();
    let [leaf] = leaves.as_slice() else {
        return not_in(format!("expected one leaf, found {}", leaves.len()));
    };
    let f_end = g.ends_at(leaf).pop().expect("leaf has an end");
    let far = g.label(&f_end).expect("end").abs();
    if far != params.p {
        return not_in(format!("leaf label {far} differs from p"));
    }
    let attach_end = f_end.reversed();
    let attach = g.vertex_at(&attach_end).expect("end").clone();
    let pendant = g.label(&attach_end).expect("end").abs();
    if !in_positive_monoid(&pendant, &params.n) {
        return not_in(format!("pendant label {pendant} is not in the monoid"));
    }
    let rest: BTreeSet<_> = g.edges().iter().map(|e| e.id.clone()).filter(|id| id != &f_end.edge).collect();
    let decomposition = shelters(g);
    let Some(s3) = decomposition.shelters.iter().find(|s| s.kind == ShelterType::S3 && s.edges() == rest) else {
        return not_in("remaining edges do not form an S3 circuit".into());
    };
    let start = s3
        .path
        .iter()
        .position(|e| g.vertex_at(e) == Some(&attach))
        .ok_or_else(|| BspqError::NotInFamily("pendant is not attached to the circuit".into()))?;
    let len = s3.path.len();
    let path: Vec<_> = (0..len).map(|i| s3.path[(start + i) % len].clone()).collect();
    let mut product = BigInt::one();
    let mut circuit = Vec::with_capacity(len);
    for (i, e) in path.iter().enumerate() {
        let origin = g.label(e).expect("end");
        let terminus = g.label(&e.reversed()).expect("end");
        product *= origin * terminus;
        // a unit terminus away from the pendant vertex is a subdivision vertex
        if terminus.abs().is_one() && i + 1 != len {
            return not_in("circuit has a subdivision vertex".into());
        }
        circuit.push(terminus.abs());
    }
    if product != params.n {
        return not_in(format!("circuit labels multiply to {product}, not n"));
    }
    Ok(WType::Circuit { circuit, pendant, far })
}

/// `Some(k)` for the level-`k` graph, `None` for reduced graphs outside the
/// level family.
pub fn level(g: &LabeledGraph, params: &BspqParams) -> Result<Option<u32>, BspqError> {
    Ok(match classify_reduced(g, params)? {
        ReducedType::Type1 => Some(0),
        ReducedType::Type2 { m } => exact_log(&m, &params.n).filter(|&k| k >= 1),
    })
}

#[allow(non_snake_case)]
pub fn is_in_X(g: &LabeledGraph, params: &BspqParams) -> Result<bool, BspqError> {
    Ok(level(g, params)?.is_some())
}

/// Minimal `k` with `m | |n|^k`, and `λ = |n|^k / m`.
pub fn x_projection(m: &BigInt, params: &BspqParams) -> Result<(u32, BigInt), BspqError> {
    if !in_positive_monoid(m, &params.n) {
        return Err(BspqError::NotInMonoid(m.clone()));
    }
    let n = params.abs_n();
    let mut k = 0;
    let mut nk = BigInt::one();
    while !nk.is_multiple_of(m) {
        nk *= &n;
        k += 1;
    }
    Ok((k, nk / m))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum XMove {
    /// Increasing induction multiplying the pendant label by a divisor of `n`.
    Induction(BigInt),
    SlideUp,
    SlideDown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum XVerdict {
    SameLevel,
    AdjacentLevels,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XCommuteReport {
    pub before: (u32, BigInt),
    pub after: (u32, BigInt),
    pub verdict: XVerdict,
}

pub fn x_commute_check(m: &BigInt, mv: &XMove, params: &BspqParams) -> Result<XCommuteReport, BspqError> {
    let n = params.abs_n();
    let moved = match mv {
        XMove::Induction(l) => {
            if !l.is_positive() || !n.is_multiple_of(l) {
                return Err(BspqError::InvalidParams(format!("{l} does not divide {n}")));
            }
            m * l
        }
        XMove::SlideUp => m * &n,
        XMove::SlideDown => {
            if !m.is_multiple_of(&n) {
                return Err(BspqError::InvalidParams(format!("{n} does not divide {m}")));
            }
            m / &n
        }
    };
    let before = x_projection(m, params)?;
    let after = x_projection(&moved, params)?;
    let verdict = match before.0.abs_diff(after.0) {
        0 => XVerdict::SameLevel,
        1 => XVerdict::AdjacentLevels,
        _ => XVerdict::Violation,
    };
    Ok(XCommuteReport { before, after, verdict })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XNode {
    pub level: u32,
    pub parent: Option<usize>,
    pub depth: usize,
}

/// A ball in the tree of level graphs, grown from a root by the degree
/// rules: a level-0 node has `p` neighbors (all at level 1), a node at level
/// `k >= 1` has `|n|` neighbors at level `k - 1` and one at level `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XBall {
    pub nodes: Vec<XNode>,
    pub radius: usize,
    pub pruned: bool,
}

impl XBall {
    pub fn root(&self) -> usize {
        0
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes.iter().enumerate().filter_map(|(i, n)| n.parent.map(|p| (p, i)))
    }

    pub fn degree(&self, i: usize) -> usize {
        usize::from(self.nodes[i].parent.is_some()) + self.nodes.iter().filter(|n| n.parent == Some(i)).count()
    }

    /// Node count per (distance, level).
    pub fn profile(&self) -> BTreeMap<(usize, u32), usize> {
        let mut out = BTreeMap::new();
        for n in &self.nodes {
            *out.entry((n.depth, n.level)).or_insert(0) += 1;
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph XBall {\n");
        let mut by_level: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            by_level.entry(n.level).or_default().push(i);
        }
        for (level, ids) in by_level {
            let names: Vec<String> = ids.iter().map(|i| format!("n{i}")).collect();
            let _ = writeln!(s, "  {{ rank=same; {} }}  // level {level}", names.join("; "));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", n.level);
        }
        for (a, b) in self.edges() {
            let _ = writeln!(s, "  n{a} -- n{b};");
        }
        s.push_str("}\n");
        s
    }
}

fn neighbor_levels(level: u32, params: &BspqParams) -> Vec<(u32, u64)> {
    let p: u64 = (&params.p).try_into().unwrap_or(u64::MAX);
    if level == 0 {
        vec![(1, p)]
    } else {
        vec![(level - 1, params.abs_n_u64()), (level + 1, 1)]
    }
}

/// The ball of the given radius around a node at `root_level`. With
/// `max_children = Some(c)` each node keeps at most `c` children per
/// neighbor level, which yields a subtree.
pub fn x_ball(params: &BspqParams, root_level: u32, radius: usize, max_children: Option<u64>) -> XBall {
    let mut nodes = vec![XNode { level: root_level, parent: None, depth: 0 }];
    let mut frontier = vec![0usize];
    for depth in 1..=radius {
        let mut next = Vec::new();
        for &i in &frontier {
            let level = nodes[i].level;
            let parent_level = nodes[i].parent.map(|p| nodes[p].level);
            for (nl, mut count) in neighbor_levels(level, params) {
                if parent_level == Some(nl) {
                    count -= 1;
                }
                if let Some(cap) = max_children {
                    count = count.min(cap);
                }
                for _ in 0..count {
                    nodes.push(XNode { level: nl, parent: Some(i), depth });
                    next.push(nodes.len() - 1);
                }
            }
        }
        frontier = next;
    }
    XBall { nodes, radius, pruned: max_children.is_some() }
}

/// The unique path between two nodes of the ball.
pub fn geodesic(ball: &XBall, u: usize, v: usize) -> Result<Vec<usize>, BspqError> {
    for x in [u, v] {
        if x >= ball.nodes.len() {
            return Err(BspqError::NotInBall(x));
        }
    }
    let (mut a, mut b) = (u, v);
    let (mut up, mut down) = (vec![a], vec![b]);
    while a != b {
        if ball.nodes[a].depth >= ball.nodes[b].depth {
            a = ball.nodes[a].parent.expect("non-root has a parent");
            up.push(a);
        } else {
            b = ball.nodes[b].parent.expect("non-root has a parent");
            down.push(b);
        }
    }
    down.pop();
    up.extend(down.into_iter().rev());
    Ok(up)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonFgWitness {
    pub u: usize,
    pub v: usize,
    pub path: Vec<usize>,
    pub levels: Vec<u32>,
    pub max_level: u32,
}

/// Two level-0 nodes whose geodesic climbs to level exactly `k + 1`.
pub fn nonfg_witness(params: &BspqParams, k: u32) -> Result<NonFgWitness, BspqError> {
    let radius = 2 * (k as usize + 1);
    let ball = x_ball(params, 0, radius, Some(1));
    let u = ball.root();
    let candidates = (0..ball.nodes.len()).filter(|&i| ball.nodes[i].level == 0 && ball.nodes[i].depth == radius);
    for v in candidates {
        let path = geodesic(&ball, u, v)?;
        let levels: Vec<u32> = path.iter().map(|&i| ball.nodes[i].level).collect();
        let max_level = *levels.iter().max().expect("nonempty path");
        if max_level == k + 1 {
            return Ok(NonFgWitness { u, v, path, levels, max_level });
        }
    }
    Err(BspqError::NotInFamily(format!("no level-0 pair climbing to level {}", k + 1)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    /// Distinct unmarked labeled graphs per level.
    pub classes_per_level: BTreeMap<u32, usize>,
    pub adjacent_levels_only: bool,
    /// Every ball edge joins graphs related by one reduced move.
    pub moves_agree: bool,
    pub ok: bool,
}

pub fn quotient_ray_check(ball: &XBall, params: &BspqParams) -> QuotientReport {
    let mut classes: BTreeMap<u32, BTreeSet<_>> = BTreeMap::new();
    for n in &ball.nodes {
        classes.entry(n.level).or_default().insert(canonical(&params.level_graph(n.level)));
    }
    let classes_per_level: BTreeMap<u32, usize> = classes.iter().map(|(&l, s)| (l, s.len())).collect();
    let adjacent_levels_only = ball.edges().all(|(a, b)| ball.nodes[a].level.abs_diff(ball.nodes[b].level) == 1);
    let level_pairs: BTreeSet<(u32, u32)> =
        ball.edges().map(|(a, b)| (ball.nodes[a].level, ball.nodes[b].level)).collect();
    let moves_agree = level_pairs.iter().all(|&(a, b)| {
        let target = canonical(&params.level_graph(b));
        reduced_neighbors(&params.level_graph(a))
            .map(|ns| ns.iter().any(|(_, h)| canonical(h) == target))
            .unwrap_or(false)
    });
    let ok = classes_per_level.values().all(|&c| c == 1) && adjacent_levels_only && moves_agree;
    QuotientReport { classes_per_level, adjacent_levels_only, moves_agree, ok }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizerOrder {
    pub order: BigInt,
    /// Stabilizers are dihedral of order `2 * rotation`.
    pub rotation: BigInt,
}

pub fn stabilizer_order(params: &BspqParams, k: u32) -> StabilizerOrder {
    let n_minus_1 = (&params.n - BigInt::one()).abs();
    let rotation = if k == 0 { &params.p * n_minus_1 } else { (pow(&params.n, k) * n_minus_1).abs() };
    StabilizerOrder { order: &rotation * 2, rotation }
}
