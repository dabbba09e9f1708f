//! Canonical certificates for labeled graphs up to renaming and admissible
//! sign changes.
//!
//! Vertex orders are searched by individualization and refinement; every leaf
//! of the search is a total order, and the certificate is the minimum encoding
//! over all leaves. Within a fixed order the signs are normalized along a BFS
//! spanning tree so that every tree edge has positive label product. Only the
//! label magnitudes and the per-edge sign product survive normalization, and
//! the sign products are fixed up to a vertex coboundary, so this
//! representative is unique.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::graph::{Edge, EdgeId, LabeledGraph, VertexId};

/// Total encoding of a labeled graph, equal for two graphs iff they are
/// isomorphic up to admissible sign changes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalCertificate(String);

impl CanonicalCertificate {
    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `(tail position, head position, |tail label|, |head label|, negative product)`
type EdgeCode = (usize, usize, BigInt, BigInt, bool);

struct Indexed {
    n: usize,
    // (a, b, |la|, |lb|, sign of la*lb is negative)
    edges: Vec<(usize, usize, BigInt, BigInt, bool)>,
}

impl Indexed {
    fn new(g: &LabeledGraph) -> Self {
        let index: HashMap<&VertexId, usize> = g.vertices().iter().enumerate().map(|(i, v)| (v, i)).collect();
        let edges = g
            .edges()
            .iter()
            .map(|e| {
                let neg = e.label_from.is_negative() != e.label_to.is_negative();
                (index[&e.from], index[&e.to], e.label_from.abs(), e.label_to.abs(), neg)
            })
            .collect();
        Indexed { n: g.vertex_count(), edges }
    }

    fn refine(&self, colors: &mut Vec<usize>) {
        type Signature = (usize, Vec<(BigInt, BigInt, usize)>);
        let mut classes = count_classes(colors);
        loop {
            let mut sigs: Vec<Signature> = colors.iter().map(|&c| (c, Vec::new())).collect();
            for (a, b, la, lb, _) in &self.edges {
                sigs[*a].1.push((la.clone(), lb.clone(), colors[*b]));
                sigs[*b].1.push((lb.clone(), la.clone(), colors[*a]));
            }
            for s in sigs.iter_mut() {
                s.1.sort();
            }
            let mut distinct: Vec<&Signature> = sigs.iter().collect();
            distinct.sort();
            distinct.dedup();
            let rank: BTreeMap<&Signature, usize> = distinct.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
            let next: Vec<usize> = sigs.iter().map(|s| rank[s]).collect();
            let next_classes = count_classes(&next);
            *colors = next;
            if next_classes == classes {
                break;
            }
            classes = next_classes;
        }
    }

    fn leaves(&self, colors: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let mut colors = colors;
        self.refine(&mut colors);
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            cells.entry(c).or_default().push(v);
        }
        let target =
            cells.iter().filter(|(_, vs)| vs.len() > 1).min_by_key(|(c, vs)| (vs.len(), **c)).map(|(_, vs)| vs.clone());
        match target {
            None => out.push(colors),
            Some(cell) => {
                for v in cell {
                    let individualized: Vec<usize> =
                        colors.iter().enumerate().map(|(x, &c)| if x == v { 2 * c } else { 2 * c + 1 }).collect();
                    self.leaves(individualized, out);
                }
            }
        }
    }

    /// Encoding for one total order (`pos[v]` is the position of vertex `v`).
    fn encode(&self, pos: &[usize]) -> Vec<EdgeCode> {
        let mut codes: Vec<(EdgeCode, usize)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, (a, b, la, lb, neg))| {
                let fwd = (pos[*a], pos[*b], la.clone(), lb.clone(), *neg);
                let rev = (pos[*b], pos[*a], lb.clone(), la.clone(), *neg);
                (fwd.min(rev), i)
            })
            .collect();
        codes.sort();

        // BFS tree in position order; the first (smallest-code) edge reaching a
        // vertex becomes its tree edge.
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.n];
        for (k, ((pa, pb, ..), _)) in codes.iter().enumerate() {
            if pa != pb {
                adjacency[*pa].push((*pb, k));
                adjacency[*pb].push((*pa, k));
            }
        }
        let mut flip = vec![false; self.n];
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(p) = queue.pop_front() {
            let mut nbrs = adjacency[p].clone();
            nbrs.sort_by_key(|&(q, k)| (q, k));
            for (q, k) in nbrs {
                if !seen[q] {
                    seen[q] = true;
                    flip[q] = flip[p] ^ codes[k].0 .4;
                    queue.push_back(q);
                }
            }
        }
        let mut out: Vec<EdgeCode> = codes
            .into_iter()
            .map(|((pa, pb, la, lb, neg), _)| {
                let neg = neg ^ flip[pa] ^ flip[pb];
                (pa, pb, la, lb, neg)
            })
            .collect();
        out.sort();
        out
    }
}

fn count_classes(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn best_encoding(g: &LabeledGraph) -> Vec<EdgeCode> {
    let idx = Indexed::new(g);
    let mut leaves = Vec::new();
    idx.leaves(vec![0; idx.n], &mut leaves);
    leaves.iter().map(|pos| idx.encode(pos)).min().expect("a valid graph has at least one vertex order")
}

fn render(n: usize, codes: &[EdgeCode]) -> CanonicalCertificate {
    let mut s = format!("{n}");
    for (pa, pb, la, lb, neg) in codes {
        s.push_str(&format!(";{pa},{pb},{la},{}{lb}", if *neg { "-" } else { "" }));
    }
    CanonicalCertificate(s)
}

pub fn canonical(g: &LabeledGraph) -> CanonicalCertificate {
    render(g.vertex_count(), &best_encoding(g))
}

/// The certificate together with a representative graph whose vertices are
/// `c0, c1, ...` and edges `k0, k1, ...` in canonical order.
pub fn canonical_form(g: &LabeledGraph) -> (CanonicalCertificate, LabeledGraph) {
    let codes = best_encoding(g);
    let n = g.vertex_count();
    let vertices = (0..n).map(|i| VertexId(format!("c{i}"))).collect();
    let edges = codes
        .iter()
        .enumerate()
        .map(|(k, (pa, pb, la, lb, neg))| Edge {
            id: EdgeId(format!("k{k}")),
            from: VertexId(format!("c{pa}")),
            to: VertexId(format!("c{pb}")),
            label_from: la.clone(),
            label_to: if *neg { -lb.clone() } else { lb.clone() },
        })
        .collect();
    (render(n, &codes), LabeledGraph::new_unchecked(vertices, edges))
}

pub fn is_isomorphic(g1: &LabeledGraph, g2: &LabeledGraph) -> bool {
    g1.vertex_count() == g2.vertex_count() && g1.edge_count() == g2.edge_count() && canonical(g1) == canonical(g2)
}
