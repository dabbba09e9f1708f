#![allow(dead_code)]

use std::collections::BTreeMap;

use gbs_core::graph::single_loop;
use gbs_core::moves::{self, collapsible_edges, enumerate_expansions, MoveDescriptor};
use gbs_core::{canonical_form, CanonicalCertificate, LabeledGraph};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

pub const FAMILIES: [(i64, i64); 5] = [(2, 4), (2, 6), (2, -4), (3, 6), (4, 8)];

pub fn seeds() -> Vec<LabeledGraph> {
    FAMILIES.iter().map(|&(p, q)| single_loop(p, q)).collect()
}

/// Every move we know how to enumerate at `g`: collapses, expansions with
/// index at most `max_d`, slides, and the reduced moves when `g` is reduced.
pub fn candidate_moves(g: &LabeledGraph, max_d: u64) -> Vec<MoveDescriptor> {
    let mut out: Vec<MoveDescriptor> =
        collapsible_edges(g).into_iter().map(|end| MoveDescriptor::Collapse { end }).collect();
    for v in g.vertices() {
        out.extend(enumerate_expansions(g, v, max_d).into_iter().map(MoveDescriptor::Expansion));
        let ends = g.ends_at(v);
        for f in &ends {
            for e in &ends {
                let (lf, le) = (g.label(f).unwrap(), g.label(e).unwrap());
                if f.edge != e.edge && (lf % le) == BigInt::from(0) {
                    out.push(MoveDescriptor::Slide { moved: f.clone(), across: e.clone() });
                }
            }
        }
    }
    if moves::is_reduced(g) {
        out.extend(moves::reduced_neighbors(g).unwrap().into_iter().map(|(mv, _)| mv));
    }
    out.sort();
    out.dedup();
    out
}

/// Canonical representatives of all graphs within `depth` moves of the seeds,
/// keeping only graphs with at most `max_edges` edges.
pub fn corpus(
    seeds: &[LabeledGraph],
    depth: usize,
    max_d: u64,
    max_edges: usize,
) -> BTreeMap<CanonicalCertificate, LabeledGraph> {
    let mut seen = BTreeMap::new();
    let mut frontier: Vec<LabeledGraph> = Vec::new();
    for s in seeds {
        let (c, g) = canonical_form(s);
        if seen.insert(c, g.clone()).is_none() {
            frontier.push(g);
        }
    }
    for _ in 0..depth {
        let mut next = Vec::new();
        for g in &frontier {
            for mv in candidate_moves(g, max_d) {
                let Ok(h) = mv.apply_raw(g) else { continue };
                if h.edge_count() > max_edges {
                    continue;
                }
                let (c, h) = canonical_form(&h);
                if let std::collections::btree_map::Entry::Vacant(slot) = seen.entry(c) {
                    slot.insert(h.clone());
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    seen
}

pub fn random_move<R: Rng>(g: &LabeledGraph, max_d: u64, rng: &mut R) -> Option<MoveDescriptor> {
    candidate_moves(g, max_d).choose(rng).cloned()
}
