use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::MoveError;
use crate::graph::{Edge, EdgeEnd, LabeledGraph, Side, VertexId};

fn is_unit(x: &BigInt) -> bool {
    x.abs().is_one()
}

/// Ends with label ±1 on non-loop edges.
pub fn collapsible_edges(g: &LabeledGraph) -> Vec<EdgeEnd> {
    g.edges()
        .iter()
        .filter(|e| !e.is_loop())
        .flat_map(|e| {
            [Side::From, Side::To].into_iter().filter(|&s| is_unit(e.label(s))).map(|s| EdgeEnd::new(e.id.clone(), s))
        })
        .collect()
}

pub fn is_reduced(g: &LabeledGraph) -> bool {
    collapsible_edges(g).is_empty()
}

/// Contract the edge of `end`, merging the vertex at `end` into the other
/// endpoint. Ends that were at the merged vertex are rescaled so that their
/// stabilizers are expressed in the surviving vertex group.
pub fn collapse(g: &LabeledGraph, end: &EdgeEnd) -> Result<LabeledGraph, MoveError> {
    let edge = g.edge(&end.edge).ok_or_else(|| MoveError::UnknownEdge(end.edge.clone()))?;
    if edge.is_loop() || !is_unit(edge.label(end.side)) {
        return Err(MoveError::NotCollapsible(end.clone()));
    }
    let v = edge.vertex(end.side).clone();
    let w = edge.vertex(end.side.opposite()).clone();
    let factor = edge.label(end.side.opposite()) * edge.label(end.side);

    let mut out = g.clone();
    out.remove_edge(&end.edge);
    for e in out.edges_mut() {
        for side in [Side::From, Side::To] {
            if e.vertex(side) == &v {
                *e.vertex_mut(side) = w.clone();
                *e.label_mut(side) *= &factor;
            }
        }
    }
    out.remove_vertex(&v);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SelectedEnd {
    pub end: EdgeEnd,
    pub residues: Vec<u64>,
}

/// Data of an expansion at `vertex`: the index `index` of the new vertex
/// group inside the old one, and which sub-orbits of each end move to the
/// new vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExpansionDescriptor {
    pub vertex: VertexId,
    pub index: u64,
    pub selection: Vec<SelectedEnd>,
}

impl ExpansionDescriptor {
    fn selected(&self) -> impl Iterator<Item = &SelectedEnd> {
        self.selection.iter().filter(|s| !s.residues.is_empty())
    }

    /// Representative of the class under the diagonal shift: the first
    /// selected end (in the graph's end order) gets residue 0, and at
    /// index 1 the selected set is the one not containing the first end.
    pub fn normalized(&self, g: &LabeledGraph) -> ExpansionDescriptor {
        let order = g.ends_at(&self.vertex);
        let mut sel: Vec<SelectedEnd> = self.selected().cloned().collect();
        sel.sort_by_key(|s| order.iter().position(|e| e == &s.end));
        if self.index == 1 {
            if sel.first().map(|s| &s.end) == order.first() {
                let chosen: BTreeSet<&EdgeEnd> = sel.iter().map(|s| &s.end).collect();
                sel = order
                    .iter()
                    .filter(|e| !chosen.contains(e))
                    .map(|e| SelectedEnd { end: e.clone(), residues: vec![0] })
                    .collect();
            }
        } else if let Some(shift) = sel.first().map(|s| s.residues[0]) {
            for s in &mut sel {
                s.residues = s.residues.iter().map(|r| (r + self.index - shift) % self.index).collect();
            }
        }
        ExpansionDescriptor { vertex: self.vertex.clone(), index: self.index, selection: sel }
    }

    fn check(&self, g: &LabeledGraph) -> Result<(), MoveError> {
        let invalid = |msg: String| Err(MoveError::InvalidDescriptor(msg));
        if !g.has_vertex(&self.vertex) {
            return Err(MoveError::UnknownVertex(self.vertex.clone()));
        }
        if self.index == 0 {
            return invalid("index must be at least 1".into());
        }
        let ends = g.ends_at(&self.vertex);
        let mut seen = BTreeSet::new();
        for s in self.selected() {
            if !ends.contains(&s.end) {
                return invalid(format!("{} is not an end at {}", s.end, self.vertex));
            }
            if !seen.insert(&s.end) {
                return invalid(format!("{} selected twice", s.end));
            }
            // translates of the selected set by nontrivial cosets must be disjoint from it
            if s.residues.len() > 1 {
                return invalid(format!("{} has more than one residue", s.end));
            }
            if s.residues[0] >= self.index {
                return invalid(format!("residue {} out of range", s.residues[0]));
            }
            let label = g.label(&s.end).expect("end exists");
            if self.index > 1 && !(label % BigInt::from(self.index)).is_zero() {
                return invalid(format!("index {} does not divide the label of {}", self.index, s.end));
            }
        }
        if seen.is_empty() {
            return invalid("nothing selected".into());
        }
        Ok(())
    }
}

/// Build the expanded graph without the minimality checks; used for
/// composite moves whose intermediate graph may carry a subdivision vertex.
pub(crate) fn expand_unchecked(
    g: &LabeledGraph,
    desc: &ExpansionDescriptor,
) -> Result<(LabeledGraph, EdgeEnd), MoveError> {
    desc.check(g)?;
    let d = BigInt::from(desc.index);
    let u = g.fresh_vertex_id("u");
    let new_edge = g.fresh_edge_id("i");
    let mut out = g.clone();
    for s in desc.selected() {
        let e = out.edge_mut(&s.end.edge).expect("end exists");
        *e.vertex_mut(s.end.side) = u.clone();
        let label = e.label(s.end.side).clone();
        *e.label_mut(s.end.side) = label / &d;
    }
    out.push_vertex(u.clone());
    out.push_edge(Edge::new(new_edge.clone(), desc.vertex.clone(), u, d, 1));
    Ok((out, EdgeEnd::new(new_edge, Side::To)))
}

fn is_subdivision_or_leaf(g: &LabeledGraph, v: &VertexId) -> bool {
    let ends = g.ends_at(v);
    let units = ends.iter().all(|e| is_unit(g.label(e).expect("end exists")));
    ends.len() <= 2 && units
}

/// The expanded graph. The returned graph has one more vertex and one more
/// edge; collapsing the new edge at the new vertex returns `g`.
pub fn expand(g: &LabeledGraph, desc: &ExpansionDescriptor) -> Result<LabeledGraph, MoveError> {
    let (out, new_end) = expand_unchecked(g, desc)?;
    let u = out.vertex_at(&new_end).expect("new edge").clone();
    if is_subdivision_or_leaf(&out, &u) || is_subdivision_or_leaf(&out, &desc.vertex) {
        return Err(MoveError::InvalidDescriptor("expansion is not minimal".into()));
    }
    Ok(out)
}

/// The new edge's end at the new vertex, for graphs produced by [`expand`].
pub fn expansion_edge(g: &LabeledGraph, expanded: &LabeledGraph) -> Option<EdgeEnd> {
    expanded.edges().iter().find(|e| g.edge(&e.id).is_none()).map(|e| EdgeEnd::new(e.id.clone(), Side::To))
}

/// All descriptor classes at `w` with index at most `max_d` that yield a
/// minimal expansion.
pub fn enumerate_expansions(g: &LabeledGraph, w: &VertexId, max_d: u64) -> Vec<ExpansionDescriptor> {
    let ends = g.ends_at(w);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for d in 1..=max_d {
        let eligible: Vec<&EdgeEnd> =
            ends.iter().filter(|e| d == 1 || (g.label(e).expect("end exists") % BigInt::from(d)).is_zero()).collect();
        let k = eligible.len();
        if k == 0 || k > 20 {
            continue;
        }
        for mask in 1u32..(1 << k) {
            let chosen: Vec<&EdgeEnd> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| eligible[i]).collect();
            let free = chosen.len() - 1;
            let combos = (d as u128).pow(free as u32);
            if combos > 1 << 20 {
                continue;
            }
            for code in 0..combos {
                let mut c = code;
                let selection = chosen
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let r = if i == 0 {
                            0
                        } else {
                            let r = (c % d as u128) as u64;
                            c /= d as u128;
                            r
                        };
                        SelectedEnd { end: (*e).clone(), residues: vec![r] }
                    })
                    .collect();
                let desc = ExpansionDescriptor { vertex: w.clone(), index: d, selection }.normalized(g);
                if seen.contains(&desc) || expand(g, &desc).is_err() {
                    continue;
                }
                seen.insert(desc.clone());
                out.push(desc);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;
    use crate::graph::single_loop;

    fn sel(edge: &str, side: Side, r: u64) -> SelectedEnd {
        SelectedEnd { end: EdgeEnd::new(edge, side), residues: vec![r] }
    }

    #[test]
    fn collapse_rescales_merged_ends() {
        let g = LabeledGraph::from_parts(&["v", "w"], &[("e", "v", "w", 1, 5), ("l", "v", "v", 2, 3)]).unwrap();
        assert_eq!(collapsible_edges(&g), vec![EdgeEnd::new("e", Side::From)]);
        let c = collapse(&g, &EdgeEnd::new("e", Side::From)).unwrap();
        assert!(is_isomorphic(&c, &single_loop(10, 15)));
        assert!(matches!(collapse(&g, &EdgeEnd::new("l", Side::From)), Err(MoveError::NotCollapsible(_))));
        assert!(matches!(collapse(&g, &EdgeEnd::new("e", Side::To)), Err(MoveError::NotCollapsible(_))));
    }

    #[test]
    fn collapse_negative_unit() {
        let g = LabeledGraph::from_parts(&["v", "w"], &[("e", "v", "w", -1, 5), ("l", "v", "v", 2, 3)]).unwrap();
        let c = collapse(&g, &EdgeEnd::new("e", Side::From)).unwrap();
        assert!(is_isomorphic(&c, &single_loop(10, 15)));
    }

    #[test]
    fn reducedness() {
        assert!(is_reduced(&single_loop(2, 4)));
        assert!(is_reduced(&single_loop(1, 2)));
        let level1 = crate::graph::loop_with_pendant(1, 2, 2, 2);
        assert!(is_reduced(&level1));
    }

    #[test]
    fn bs24_expansion_classes() {
        let g = single_loop(2, 4);
        let v = VertexId::from("v");
        for max_d in [2, 4, 6] {
            let classes = enumerate_expansions(&g, &v, max_d);
            assert_eq!(classes.len(), 4, "max_d = {max_d}: {classes:?}");
        }
        let classes = enumerate_expansions(&g, &v, 2);
        let find = |index: u64, picks: &[SelectedEnd]| {
            let d = ExpansionDescriptor { vertex: v.clone(), index, selection: picks.to_vec() }.normalized(&g);
            assert!(classes.contains(&d), "missing {d:?}");
        };
        find(2, &[sel("e", Side::From, 0), sel("e", Side::To, 0)]);
        find(2, &[sel("e", Side::From, 0), sel("e", Side::To, 1)]);
        find(2, &[sel("e", Side::To, 1)]);
        find(1, &[sel("e", Side::From, 0)]);
        find(1, &[sel("e", Side::To, 0)]);
        assert!(enumerate_expansions(&g, &v, 3).iter().all(|d| d.index != 3));
    }

    #[test]
    fn shift_and_complement_identification() {
        let g = single_loop(2, 4);
        let v = VertexId::from("v");
        let a = ExpansionDescriptor {
            vertex: v.clone(),
            index: 2,
            selection: vec![sel("e", Side::From, 1), sel("e", Side::To, 1)],
        };
        let b = ExpansionDescriptor {
            vertex: v.clone(),
            index: 2,
            selection: vec![sel("e", Side::From, 0), sel("e", Side::To, 0)],
        };
        assert_eq!(a.normalized(&g), b.normalized(&g));
        let c = ExpansionDescriptor { vertex: v.clone(), index: 1, selection: vec![sel("e", Side::From, 0)] };
        let d = ExpansionDescriptor { vertex: v, index: 1, selection: vec![sel("e", Side::To, 0)] };
        assert_eq!(c.normalized(&g), d.normalized(&g));
    }

    #[test]
    fn expansion_i_graph() {
        let g = single_loop(2, 4);
        let desc = ExpansionDescriptor { vertex: "v".into(), index: 2, selection: vec![sel("e", Side::To, 0)] };
        let t = expand(&g, &desc).unwrap();
        let expected = LabeledGraph::from_parts(&["w", "u"], &[("i", "w", "u", 2, 1), ("e", "w", "u", 2, 2)]).unwrap();
        assert!(is_isomorphic(&t, &expected));
    }

    #[test]
    fn j0_j1_same_quotient() {
        let g = single_loop(2, 4);
        let j0 = ExpansionDescriptor {
            vertex: "v".into(),
            index: 2,
            selection: vec![sel("e", Side::From, 0), sel("e", Side::To, 0)],
        };
        let j1 = ExpansionDescriptor {
            vertex: "v".into(),
            index: 2,
            selection: vec![sel("e", Side::From, 0), sel("e", Side::To, 1)],
        };
        let (a, b) = (expand(&g, &j0).unwrap(), expand(&g, &j1).unwrap());
        assert!(is_isomorphic(&a, &b));
        assert!(is_isomorphic(&a, &crate::graph::loop_with_pendant(1, 2, 1, 2)));
    }

    #[test]
    fn invalid_descriptors() {
        let g = single_loop(2, 4);
        let all_d1 = ExpansionDescriptor {
            vertex: "v".into(),
            index: 1,
            selection: vec![sel("e", Side::From, 0), sel("e", Side::To, 0)],
        };
        assert!(expand(&g, &all_d1).is_err());
        let bad_div = ExpansionDescriptor { vertex: "v".into(), index: 3, selection: vec![sel("e", Side::To, 0)] };
        assert!(expand(&g, &bad_div).is_err());
        let two = ExpansionDescriptor {
            vertex: "v".into(),
            index: 2,
            selection: vec![SelectedEnd { end: EdgeEnd::new("e", Side::To), residues: vec![0, 1] }],
        };
        assert!(expand(&g, &two).is_err());
    }

    #[test]
    fn collapse_inverts_expand() {
        let samples = [
            single_loop(2, 4),
            single_loop(6, 12),
            crate::graph::loop_with_pendant(1, 2, 4, 3),
            LabeledGraph::from_parts(
                &["a", "b"],
                &[("x", "a", "b", 6, 2), ("y", "a", "b", 4, 3), ("z", "a", "a", 2, 2)],
            )
            .unwrap(),
        ];
        for g in &samples {
            for v in g.vertices() {
                for desc in enumerate_expansions(g, v, 6) {
                    let t = expand(g, &desc).unwrap();
                    let end = expansion_edge(g, &t).unwrap();
                    let back = collapse(&t, &end).unwrap();
                    assert!(is_isomorphic(&back, g), "{desc:?}");
                }
            }
        }
    }
}
