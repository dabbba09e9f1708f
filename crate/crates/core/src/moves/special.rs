use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::elementary::collapse;
use super::MoveError;
use crate::graph::{Edge, EdgeEnd, EdgeId, LabeledGraph, Side};

/// Move the end `moved` across the edge of `across` to its far endpoint.
pub fn slide(g: &LabeledGraph, moved: &EdgeEnd, across: &EdgeEnd) -> Result<LabeledGraph, MoveError> {
    let f = g.edge(&moved.edge).ok_or_else(|| MoveError::UnknownEdge(moved.edge.clone()))?;
    let e = g.edge(&across.edge).ok_or_else(|| MoveError::UnknownEdge(across.edge.clone()))?;
    let not_slidable = || MoveError::NotSlidable { moved: moved.clone(), across: across.clone() };
    if f.id == e.id || f.vertex(moved.side) != e.vertex(across.side) {
        return Err(not_slidable());
    }
    let (lf, le) = (f.label(moved.side), e.label(across.side));
    if !lf.is_multiple_of(le) {
        return Err(not_slidable());
    }
    let target = e.vertex(across.side.opposite()).clone();
    let new_label = e.label(across.side.opposite()) * (lf / le);
    let mut out = g.clone();
    let f = out.edge_mut(&moved.edge).expect("edge exists");
    *f.vertex_mut(moved.side) = target;
    *f.label_mut(moved.side) = new_label;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// For an ascending loop, the signed label of its non-unit end.
pub fn ascending_modulus(edge: &Edge) -> Option<BigInt> {
    if !edge.is_loop() {
        return None;
    }
    let (a, b) = (&edge.label_from, &edge.label_to);
    let n = if a.abs().is_one() {
        b * a
    } else if b.abs().is_one() {
        a * b
    } else {
        return None;
    };
    (n.abs() > BigInt::one()).then_some(n)
}

pub fn induction(
    g: &LabeledGraph,
    loop_id: &EdgeId,
    factor: u64,
    direction: Direction,
) -> Result<LabeledGraph, MoveError> {
    let edge = g.edge(loop_id).ok_or_else(|| MoveError::UnknownEdge(loop_id.clone()))?;
    let n = ascending_modulus(edge).ok_or_else(|| MoveError::NotAscendingLoop(loop_id.clone()))?;
    let a = BigInt::from(factor);
    if factor < 2 || !n.is_multiple_of(&a) {
        return Err(MoveError::FactorNotDividing { factor, modulus: n });
    }
    let v = edge.from.clone();
    let mut out = g.clone();
    for e in out.edges_mut() {
        if &e.id == loop_id {
            continue;
        }
        for side in [Side::From, Side::To] {
            if e.vertex(side) != &v {
                continue;
            }
            let label = e.label_mut(side);
            match direction {
                Direction::Increasing => *label *= &a,
                Direction::Decreasing => {
                    if !(&*label % &a).is_zero() {
                        return Err(MoveError::FactorNotDividing { factor, modulus: label.clone() });
                    }
                    *label /= &a;
                }
            }
        }
    }
    Ok(out)
}

/// Orientation of a non-ascending loop `(p, pn)` with `|p| > 1`, `|n| > 1`:
/// the side carrying `p`, and `n`.
fn non_ascending_split(edge: &Edge) -> Option<(Side, BigInt)> {
    if !edge.is_loop() || edge.label_from.abs().is_one() || edge.label_to.abs().is_one() {
        return None;
    }
    for side in [Side::From, Side::To] {
        let (p, q) = (edge.label(side), edge.label(side.opposite()));
        if q.is_multiple_of(p) {
            let n = q / p;
            if n.abs() > BigInt::one() {
                return Some((side, n));
            }
        }
    }
    None
}

/// Replace the loop `(p, pn)` at `w` by an ascending loop `(1, n)` at a new
/// vertex joined to `w` by an edge labeled `n` at the new vertex and `p` at `w`.
pub fn a_move(g: &LabeledGraph, loop_id: &EdgeId) -> Result<LabeledGraph, MoveError> {
    let edge = g.edge(loop_id).ok_or_else(|| MoveError::UnknownEdge(loop_id.clone()))?;
    let (small, n) = non_ascending_split(edge)
        .ok_or_else(|| MoveError::NotApplicable(format!("{loop_id} is not a loop (p, pn) with |p|, |n| > 1")))?;
    let p = edge.label(small).clone();
    let w = edge.from.clone();
    let x = g.fresh_vertex_id("a");
    let f = g.fresh_edge_id("f");
    let mut out = g.clone();
    let l = out.edge_mut(loop_id).expect("edge exists");
    l.from = x.clone();
    l.to = x.clone();
    *l.label_mut(small) = BigInt::one();
    *l.label_mut(small.opposite()) = n.clone();
    out.push_vertex(x.clone());
    out.push_edge(Edge::new(f, x, w, n, p));
    Ok(out)
}

/// Decreasing induction turning the label at `end` into a unit, then the
/// collapse of that end. `end` must sit at a vertex carrying only an
/// ascending loop `(1, n)` and `end` itself, with its label dividing `n`.
pub fn a_inverse(g: &LabeledGraph, end: &EdgeEnd) -> Result<LabeledGraph, MoveError> {
    let edge = g.edge(&end.edge).ok_or_else(|| MoveError::UnknownEdge(end.edge.clone()))?;
    let na = |msg: String| MoveError::NotApplicable(msg);
    if edge.is_loop() {
        return Err(na(format!("{} is a loop", end.edge)));
    }
    let v = edge.vertex(end.side);
    let others: Vec<EdgeEnd> = g.ends_at(v).into_iter().filter(|e| e != end).collect();
    if others.len() != 2 || others[0].edge != others[1].edge {
        return Err(na(format!("{v} does not carry exactly one loop besides {end}")));
    }
    let lp = g.edge(&others[0].edge).expect("edge exists");
    let n = ascending_modulus(lp).ok_or_else(|| na(format!("{} is not an ascending loop", lp.id)))?;
    let m = edge.label(end.side).abs();
    if m <= BigInt::one() || !n.is_multiple_of(&m) {
        return Err(na(format!("label {m} at {end} does not properly divide {n}")));
    }
    let factor: u64 = (&m).try_into().map_err(|_| na(format!("label {m} too large")))?;
    let reduced = induction(g, &lp.id, factor, Direction::Decreasing)?;
    collapse(&reduced, end)
}
