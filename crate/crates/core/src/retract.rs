//! Shelters, surviving edges, and the retraction onto trees whose quotient
//! is a union of shelters.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeEnd, EdgeId, LabeledGraph, VertexId};
use crate::moves::{collapse, collapsible_edges};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ShelterType {
    S1,
    S2,
    S3,
}

/// A path of oriented edges; each step is recorded by its origin end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Shelter {
    pub path: Vec<EdgeEnd>,
    pub kind: ShelterType,
}

impl Shelter {
    pub fn edges(&self) -> BTreeSet<EdgeId> {
        self.path.iter().map(|e| e.edge.clone()).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ShelterDecomposition {
    pub shelters: Vec<Shelter>,
    pub covered: BTreeSet<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RetractError {
    #[error("non-surviving edge {0} cannot be collapsed")]
    NonCollapsibleNonSurvivor(EdgeId),
}

fn unit(g: &LabeledGraph, end: &EdgeEnd) -> bool {
    g.label(end).expect("end exists").abs().is_one()
}

/// Junction `s` joins step `s` to step `s + 1` (cyclically for circuits).
fn junction_ok(g: &LabeledGraph, path: &[EdgeEnd], s: usize) -> bool {
    let next = &path[(s + 1) % path.len()];
    unit(g, &path[s].reversed()) && unit(g, next)
}

fn classify_path(g: &LabeledGraph, path: &[EdgeEnd]) -> Option<Shelter> {
    let n = path.len();
    let outer = !unit(g, &path[0]) && !unit(g, &path[n - 1].reversed());
    (outer && (0..n - 1).all(|s| junction_ok(g, path, s)))
        .then(|| Shelter { path: path.to_vec(), kind: ShelterType::S1 })
}

fn classify_circuit(g: &LabeledGraph, path: &[EdgeEnd]) -> Vec<Shelter> {
    let n = path.len();
    let mut out = Vec::new();
    let failing: Vec<usize> = (0..n).filter(|&s| !junction_ok(g, path, s)).collect();
    if failing.len() <= 1 {
        // rotate so the failing junction, if any, closes the circuit
        let start = failing.first().map_or(0, |&s| (s + 1) % n);
        let rotated: Vec<EdgeEnd> = (0..n).map(|i| path[(start + i) % n].clone()).collect();
        out.push(Shelter { path: rotated, kind: ShelterType::S2 });
    }
    if path.iter().all(|e| unit(g, e)) {
        out.push(Shelter { path: path.to_vec(), kind: ShelterType::S3 });
    } else {
        let reversed: Vec<EdgeEnd> = path.iter().rev().map(EdgeEnd::reversed).collect();
        if reversed.iter().all(|e| unit(g, e)) {
            out.push(Shelter { path: reversed, kind: ShelterType::S3 });
        }
    }
    out
}

/// Every shelter in `g`, one per (type, edge set).
pub fn shelters(g: &LabeledGraph) -> ShelterDecomposition {
    let mut found: Vec<Shelter> = Vec::new();
    let mut keys = BTreeSet::new();
    let mut record = |sh: Shelter| {
        if keys.insert((sh.kind, sh.edges())) {
            found.push(sh);
        }
    };
    for start in g.vertices() {
        let mut path = Vec::new();
        let mut visited = BTreeSet::from([start.clone()]);
        walk(g, start, start, &mut path, &mut visited, &mut record);
    }
    found.sort_by_key(|s| (s.kind, s.edges()));
    let covered = found.iter().flat_map(Shelter::edges).collect();
    ShelterDecomposition { shelters: found, covered }
}

fn walk(
    g: &LabeledGraph,
    start: &VertexId,
    at: &VertexId,
    path: &mut Vec<EdgeEnd>,
    visited: &mut BTreeSet<VertexId>,
    record: &mut impl FnMut(Shelter),
) {
    for end in g.ends_at(at) {
        if path.iter().any(|p| p.edge == end.edge) {
            continue;
        }
        let next = g.vertex_at(&end.reversed()).expect("end exists").clone();
        path.push(end);
        if &next == start {
            for sh in classify_circuit(g, path) {
                record(sh);
            }
        } else if !visited.contains(&next) {
            if let Some(sh) = classify_path(g, path) {
                record(sh);
            }
            visited.insert(next.clone());
            walk(g, start, &next, path, visited, record);
            visited.remove(&next);
        }
        path.pop();
    }
}

/// Edges lying in at least one shelter.
pub fn surviving_edges(g: &LabeledGraph) -> BTreeSet<EdgeId> {
    shelters(g).covered
}

/// Edges retained by at least one maximal sequence of collapses.
pub fn surviving_edges_oracle(g: &LabeledGraph) -> BTreeSet<EdgeId> {
    let mut memo: HashMap<BTreeSet<EdgeId>, BTreeSet<EdgeId>> = HashMap::new();
    oracle_rec(g, &mut memo)
}

fn oracle_rec(g: &LabeledGraph, memo: &mut HashMap<BTreeSet<EdgeId>, BTreeSet<EdgeId>>) -> BTreeSet<EdgeId> {
    let key: BTreeSet<EdgeId> = g.edges().iter().map(|e| e.id.clone()).collect();
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let ends = collapsible_edges(g);
    let result = if ends.is_empty() {
        key.clone()
    } else {
        let mut seen_edges = BTreeSet::new();
        let mut acc = BTreeSet::new();
        for end in ends {
            if seen_edges.insert(end.edge.clone()) {
                let h = collapse(g, &end).expect("collapsible");
                acc.extend(oracle_rec(&h, memo));
            }
        }
        acc
    };
    memo.insert(key, result.clone());
    result
}

/// Collapse every non-surviving edge.
pub fn retract_h(g: &LabeledGraph) -> Result<LabeledGraph, RetractError> {
    let survivors = surviving_edges(g);
    let mut current = g.clone();
    loop {
        let doomed: Vec<EdgeId> =
            current.edges().iter().map(|e| e.id.clone()).filter(|id| !survivors.contains(id)).collect();
        let Some(first) = doomed.first() else { return Ok(current) };
        let end = collapsible_edges(&current)
            .into_iter()
            .find(|e| !survivors.contains(&e.edge))
            .ok_or_else(|| RetractError::NonCollapsibleNonSurvivor(first.clone()))?;
        current = collapse(&current, &end).expect("collapsible");
    }
}

#[allow(non_snake_case)]
pub fn in_W(g: &LabeledGraph) -> bool {
    surviving_edges(g).len() == g.edge_count()
}
