//! Bounded exploration of the collapse poset around a tree: stars in the
//! spine and in its deformation retract, and high-dimensional simplices.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::canon::{canonical_form, CanonicalCertificate};
use crate::graph::{escape, Edge, LabeledGraph, Side, VertexId};
use crate::moves::{collapse, collapsible_edges, enumerate_expansions, expand, slide};
use crate::retract::{in_W, retract_h, shelters, ShelterType};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PosetVertex {
    pub certificate: CanonicalCertificate,
    pub graph: LabeledGraph,
    /// Number of marked trees with this quotient graph.
    pub multiplicity: u64,
    /// Number of edges added to the root.
    pub layer: usize,
}

/// `upper` collapses onto `lower`. For the spine star, `marked` is the
/// number of expansion classes at `lower` producing `upper`; in the retract
/// it is the number of related marked pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PosetRelation {
    pub upper: usize,
    pub lower: usize,
    pub marked: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PosetComplex {
    pub vertices: Vec<PosetVertex>,
    pub relations: Vec<PosetRelation>,
}

impl PosetComplex {
    pub fn index_of(&self, cert: &CanonicalCertificate) -> Option<usize> {
        self.vertices.iter().position(|v| &v.certificate == cert)
    }

    pub fn layer(&self, k: usize) -> Vec<&PosetVertex> {
        self.vertices.iter().filter(|v| v.layer == k).collect()
    }

    /// Total count of marked vertices.
    pub fn marked_vertex_count(&self) -> u64 {
        self.vertices.iter().map(|v| v.multiplicity).sum()
    }

    fn uppers(&self, i: usize) -> impl Iterator<Item = &PosetRelation> {
        self.relations.iter().filter(move |r| r.lower == i)
    }

    /// For each vertex, the number of marked chains from the root (vertex 0)
    /// ending at one of its marked copies.
    pub fn chains_from_root(&self) -> Vec<u64> {
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by_key(|&i| self.vertices[i].layer);
        let mut count = vec![0u64; self.vertices.len()];
        if let Some(&root) = order.first() {
            count[root] = 1;
        }
        for &i in &order {
            for r in self.uppers(i) {
                count[r.upper] += count[i] * r.marked;
            }
        }
        count
    }

    /// Marked maximal chains starting at the root.
    pub fn maximal_chain_count(&self) -> u64 {
        let counts = self.chains_from_root();
        (0..self.vertices.len()).filter(|&i| self.uppers(i).next().is_none()).map(|i| counts[i]).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("poset serializes")
    }

    /// Hasse diagram, edges pointing down the collapse order.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph Poset {\n  rankdir=BT;\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(
                s,
                "  n{i} [label=\"{}\\nx{} (layer {})\"];",
                escape(v.certificate.as_str()),
                v.multiplicity,
                v.layer
            );
        }
        for r in &self.relations {
            let _ = writeln!(s, "  n{} -> n{} [label=\"{}\"];", r.upper, r.lower, r.marked);
        }
        s.push_str("}\n");
        s
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Iterated expansions of `g` up to `depth` new edges with subgroup index at
/// most `max_d`, with the collapse relations between consecutive layers.
#[allow(non_snake_case)]
pub fn star_in_K(g: &LabeledGraph, depth: usize, max_d: u64) -> PosetComplex {
    let (root_cert, root) = canonical_form(g);
    let mut complex = PosetComplex {
        vertices: vec![PosetVertex { certificate: root_cert, graph: root, multiplicity: 1, layer: 0 }],
        relations: Vec::new(),
    };
    for k in 1..=depth {
        let prev: Vec<usize> = (0..complex.vertices.len()).filter(|&i| complex.vertices[i].layer == k - 1).collect();
        let produced: Vec<(usize, Vec<(CanonicalCertificate, LabeledGraph)>)> = prev
            .par_iter()
            .map(|&i| {
                let h = &complex.vertices[i].graph;
                let outs = h
                    .vertices()
                    .iter()
                    .flat_map(|w| enumerate_expansions(h, w, max_d).into_iter().map(move |d| (w, d)))
                    .map(|(_, d)| canonical_form(&expand(h, &d).expect("enumerated descriptor is valid")))
                    .collect();
                (i, outs)
            })
            .collect();

        let mut tally: BTreeMap<CanonicalCertificate, (LabeledGraph, BTreeMap<usize, u64>)> = BTreeMap::new();
        for (i, outs) in produced {
            for (cert, graph) in outs {
                let entry = tally.entry(cert).or_insert_with(|| (graph, BTreeMap::new()));
                *entry.1.entry(i).or_insert(0) += 1;
            }
        }
        let first_new = complex.vertices.len();
        for (cert, (graph, sources)) in tally {
            let weighted: u64 = sources.iter().map(|(&i, &c)| complex.vertices[i].multiplicity * c).sum();
            assert_eq!(weighted % k as u64, 0, "marked multiplicity of {cert} is not integral");
            complex.vertices.push(PosetVertex {
                certificate: cert,
                graph,
                multiplicity: weighted / k as u64,
                layer: k,
            });
            let upper = complex.vertices.len() - 1;
            for (i, c) in sources {
                complex.relations.push(PosetRelation { upper, lower: i, marked: c });
            }
        }
        // collapse relations not realized within the index bound
        let lower_index: HashMap<CanonicalCertificate, usize> =
            prev.iter().map(|&i| (complex.vertices[i].certificate.clone(), i)).collect();
        for upper in first_new..complex.vertices.len() {
            let g_up = &complex.vertices[upper].graph;
            for end in collapsible_edges(g_up) {
                let cert = canonical_form(&collapse(g_up, &end).expect("collapsible")).0;
                if let Some(&lower) = lower_index.get(&cert) {
                    if !complex.relations.iter().any(|r| r.upper == upper && r.lower == lower) {
                        complex.relations.push(PosetRelation { upper, lower, marked: 0 });
                    }
                }
            }
        }
    }
    complex
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WStar {
    pub complex: PosetComplex,
    /// Certificates of excluded vertices paired with their images under the retraction.
    pub excluded: Vec<(CanonicalCertificate, CanonicalCertificate)>,
}

/// The part of [`star_in_K`] lying in the retract, with the order relation
/// restricted from the full star, and the retraction image of every other vertex.
#[allow(non_snake_case)]
pub fn star_in_W(g: &LabeledGraph, depth: usize, max_d: u64) -> WStar {
    let star = star_in_K(g, depth, max_d);
    let n = star.vertices.len();
    // seq[a][b]: expansion-class sequences from a up to b
    let mut seq = vec![vec![0u64; n]; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| star.vertices[i].layer);
    for (a, row) in seq.iter_mut().enumerate() {
        row[a] = 1;
        for &i in &order {
            if row[i] == 0 {
                continue;
            }
            for r in star.relations.iter().filter(|r| r.lower == i) {
                row[r.upper] += row[i] * r.marked;
            }
        }
    }

    let keep: Vec<usize> = (0..n).filter(|&i| in_W(&star.vertices[i].graph)).collect();
    let mut complex = PosetComplex::default();
    for &i in &keep {
        complex.vertices.push(star.vertices[i].clone());
    }
    for (ui, &u) in keep.iter().enumerate() {
        for (li, &l) in keep.iter().enumerate() {
            let (lu, ll) = (star.vertices[u].layer, star.vertices[l].layer);
            if lu <= ll || seq[l][u] == 0 {
                continue;
            }
            let marked = star.vertices[l].multiplicity * seq[l][u] / factorial(lu - ll);
            complex.relations.push(PosetRelation { upper: ui, lower: li, marked });
        }
    }
    let excluded = (0..n)
        .filter(|i| !keep.contains(i))
        .map(|i| {
            let v = &star.vertices[i];
            let image = retract_h(&v.graph).expect("retraction exists");
            (v.certificate.clone(), canonical_form(&image).0)
        })
        .collect();
    WStar { complex, excluded }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplorerError {
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
}

fn two_loops() -> LabeledGraph {
    LabeledGraph::from_parts(&["v"], &[("f", "v", "v", 1, 2), ("e", "v", "v", 1, 2)]).expect("valid")
}

/// `T_k^ℓ`: the loop `f = (1, 2)` at `v` and a circuit through `v` and
/// `x1, …, xℓ` whose first `ℓ` edges carry `(1, 2)` and whose last edge
/// carries `1` at its origin and `2^(k−ℓ)` at `v`.
pub fn t_k_l(k: u32, l: u32) -> LabeledGraph {
    let mut vertices = vec![VertexId::from("v")];
    vertices.extend((1..=l).map(|i| VertexId(format!("x{i}"))));
    let mut edges = vec![Edge::new("f", "v", "v", 1, 2)];
    for i in 0..l as usize {
        edges.push(Edge::new(format!("e{i}"), vertices[i].clone(), vertices[i + 1].clone(), 1, 2));
    }
    let last = BigInt::from(2).pow(k - l);
    edges.push(Edge::new(format!("e{l}"), vertices[l as usize].clone(), "v", 1, last));
    LabeledGraph::new(vertices, edges).expect("valid")
}

/// The chain `T_k^0 < T_k^1 < … < T_k^k` of graphs in the retract, each
/// collapsing onto the previous one.
pub fn infinite_dim_witness(k: u32) -> Result<Vec<LabeledGraph>, ExplorerError> {
    let fail = |msg: String| Err(ExplorerError::ConstructionFailed(msg));
    if k == 0 {
        return fail("k must be at least 1".into());
    }
    let mut slid = two_loops();
    for _ in 1..k {
        let end = crate::graph::EdgeEnd::new("e", Side::To);
        let across = crate::graph::EdgeEnd::new("f", Side::From);
        slid = slide(&slid, &end, &across).map_err(|e| ExplorerError::ConstructionFailed(e.to_string()))?;
    }
    let chain: Vec<LabeledGraph> = (0..=k).map(|l| t_k_l(k, l)).collect();
    if canonical_form(&slid).0 != canonical_form(&chain[0]).0 {
        return fail(format!("T_{k} from slides differs from T_{k}^0"));
    }
    for (l, g) in chain.iter().enumerate() {
        let cover = shelters(g);
        let s3_covered: std::collections::BTreeSet<_> =
            cover.shelters.iter().filter(|s| s.kind == ShelterType::S3).flat_map(|s| s.edges()).collect();
        if s3_covered.len() != g.edge_count() {
            return fail(format!("T_{k}^{l} is not covered by S3 shelters"));
        }
        if l > 0 {
            let target = canonical_form(&chain[l - 1]).0;
            let hit = collapsible_edges(g)
                .iter()
                .any(|end| canonical_form(&collapse(g, end).expect("collapsible")).0 == target);
            if !hit {
                return fail(format!("T_{k}^{l} does not collapse onto T_{k}^{}", l - 1));
            }
        }
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical;
    use crate::graph::{loop_with_pendant, single_loop};

    #[test]
    fn one_edge_star_of_bs24() {
        let star = star_in_K(&single_loop(2, 4), 1, 4);
        assert_eq!(star.vertices.len(), 4);
        let mut mults: Vec<u64> = star.layer(1).iter().map(|v| v.multiplicity).collect();
        mults.sort();
        assert_eq!(mults, vec![1, 1, 2]);
        let j = star.index_of(&canonical(&loop_with_pendant(1, 2, 1, 2))).unwrap();
        assert_eq!(star.vertices[j].multiplicity, 2);
    }

    #[test]
    fn two_edge_star_of_bs24() {
        let star = star_in_K(&single_loop(2, 4), 2, 4);
        assert_eq!(star.vertices.len(), 6);
        assert_eq!(star.marked_vertex_count(), 8);
        let mut top: Vec<u64> = star.layer(2).iter().map(|v| v.multiplicity).collect();
        top.sort();
        assert_eq!(top, vec![1, 2]);
        assert_eq!(star.maximal_chain_count(), 6);
        assert_eq!(star.relations.len(), 7);
    }

    #[test]
    fn w_star_of_bs24() {
        let w = star_in_W(&single_loop(2, 4), 2, 4);
        assert_eq!(w.complex.vertices.len(), 2);
        assert_eq!(w.complex.marked_vertex_count(), 3);
        assert_eq!(w.complex.relations.len(), 1);
        assert_eq!(w.complex.relations[0].marked, 2);
        let root = canonical(&single_loop(2, 4));
        assert_eq!(w.excluded.len(), 4);
        assert!(w.excluded.iter().all(|(_, image)| image == &root));
    }

    #[test]
    fn no_expansions_gives_singleton() {
        let star = star_in_K(&single_loop(1, 1), 2, 1);
        assert_eq!(star.vertices.len(), 1);
    }

    #[test]
    fn witness_chains() {
        for k in 1..=10 {
            let chain = infinite_dim_witness(k).unwrap();
            assert_eq!(chain.len(), k as usize + 1);
            assert!(chain.iter().all(in_W));
        }
        assert!(infinite_dim_witness(0).is_err());
    }

    #[test]
    fn dot_export_mentions_every_vertex() {
        let star = star_in_K(&single_loop(2, 4), 1, 2);
        let dot = star.to_dot();
        assert!(dot.starts_with("digraph Poset {"));
        assert_eq!(dot.matches("[label=\"").count(), star.vertices.len() + star.relations.len());
    }
}
