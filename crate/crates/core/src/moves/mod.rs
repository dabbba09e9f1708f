//! Elementary deformations (collapse, expansion) and the derived moves
//! (slide, induction, 𝒜±¹) acting on labeled graphs.

mod elementary;
mod special;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use elementary::{
    collapse, collapsible_edges, enumerate_expansions, expand, expansion_edge, is_reduced, ExpansionDescriptor,
    SelectedEnd,
};
pub use special::{a_inverse, a_move, ascending_modulus, induction, slide, Direction};

use crate::arith::divisors;
use crate::canon::{canonical_form, CanonicalCertificate};
use crate::graph::{EdgeEnd, EdgeId, LabeledGraph, Side, VertexId};
use crate::invariants::InvariantSummary;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("end {0} is not collapsible")]
    NotCollapsible(EdgeEnd),
    #[error("invalid expansion: {0}")]
    InvalidDescriptor(String),
    #[error("cannot slide {moved} across {across}")]
    NotSlidable { moved: EdgeEnd, across: EdgeEnd },
    #[error("edge {0} is not an ascending loop")]
    NotAscendingLoop(EdgeId),
    #[error("factor {factor} does not divide {modulus}")]
    FactorNotDividing { factor: u64, modulus: BigInt },
    #[error("move not applicable: {0}")]
    NotApplicable(String),
    #[error("graph is not reduced")]
    NotReduced,
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("move changed the deformation invariants")]
    InvariantViolation,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum MoveDescriptor {
    Collapse { end: EdgeEnd },
    Expansion(ExpansionDescriptor),
    Slide { moved: EdgeEnd, across: EdgeEnd },
    Induction { edge: EdgeId, factor: u64, direction: Direction },
    AMove { edge: EdgeId },
    AInverse { end: EdgeEnd },
}

impl MoveDescriptor {
    /// Apply without re-checking invariants.
    pub fn apply_raw(&self, g: &LabeledGraph) -> Result<LabeledGraph, MoveError> {
        match self {
            MoveDescriptor::Collapse { end } => collapse(g, end),
            MoveDescriptor::Expansion(desc) => expand(g, desc),
            MoveDescriptor::Slide { moved, across } => slide(g, moved, across),
            MoveDescriptor::Induction { edge, factor, direction } => induction(g, edge, *factor, *direction),
            MoveDescriptor::AMove { edge } => a_move(g, edge),
            MoveDescriptor::AInverse { end } => a_inverse(g, end),
        }
    }
}

/// Apply a move, verifying that Betti number, Euler characteristic and the
/// modulus subgroup are unchanged.
pub fn apply(g: &LabeledGraph, mv: &MoveDescriptor) -> Result<LabeledGraph, MoveError> {
    let out = mv.apply_raw(g)?;
    if InvariantSummary::of(g) != InvariantSummary::of(&out) {
        return Err(MoveError::InvariantViolation);
    }
    Ok(out)
}

fn candidate_moves(g: &LabeledGraph) -> Vec<MoveDescriptor> {
    let mut moves = Vec::new();
    for v in g.vertices() {
        let ends = g.ends_at(v);
        for f in &ends {
            for e in &ends {
                if f.edge == e.edge {
                    continue;
                }
                let (lf, le) = (g.label(f).expect("end"), g.label(e).expect("end"));
                if (lf % le.abs()) == BigInt::from(0) {
                    moves.push(MoveDescriptor::Slide { moved: f.clone(), across: e.clone() });
                }
            }
        }
    }
    for edge in g.edges() {
        if let Some(n) = ascending_modulus(edge) {
            for a in divisors(&n).into_iter().skip(1) {
                let Ok(factor) = u64::try_from(&a) else { continue };
                for direction in [Direction::Increasing, Direction::Decreasing] {
                    moves.push(MoveDescriptor::Induction { edge: edge.id.clone(), factor, direction });
                }
            }
        }
        if edge.is_loop() {
            moves.push(MoveDescriptor::AMove { edge: edge.id.clone() });
        } else {
            for side in [Side::From, Side::To] {
                moves.push(MoveDescriptor::AInverse { end: EdgeEnd::new(edge.id.clone(), side) });
            }
        }
    }
    moves
}

/// Every slide, induction and 𝒜±¹-move applicable at a reduced graph whose
/// result is again reduced, with results in canonical form, sorted by
/// certificate then descriptor.
pub fn reduced_neighbors(g: &LabeledGraph) -> Result<Vec<(MoveDescriptor, LabeledGraph)>, MoveError> {
    if !is_reduced(g) {
        return Err(MoveError::NotReduced);
    }
    let mut out: Vec<(CanonicalCertificate, MoveDescriptor, LabeledGraph)> = candidate_moves(g)
        .into_iter()
        .filter_map(|mv| {
            let h = mv.apply_raw(g).ok()?;
            is_reduced(&h).then(|| {
                let (cert, rep) = canonical_form(&h);
                (cert, mv, rep)
            })
        })
        .collect();
    out.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    Ok(out.into_iter().map(|(_, mv, h)| (mv, h)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical;
    use crate::graph::{loop_with_pendant, single_loop};
    use std::collections::BTreeSet;

    fn neighbor_certs(g: &LabeledGraph) -> BTreeSet<CanonicalCertificate> {
        reduced_neighbors(g).unwrap().iter().map(|(_, h)| canonical(h)).collect()
    }

    #[test]
    fn neighbors_of_bs24_level_graphs() {
        let level = |k: u32| loop_with_pendant(1, 2, 2i64.pow(k), 2);
        assert_eq!(neighbor_certs(&single_loop(2, 4)), BTreeSet::from([canonical(&level(1))]));
        assert_eq!(neighbor_certs(&level(1)), BTreeSet::from([canonical(&single_loop(2, 4)), canonical(&level(2))]));
        assert!(reduced_neighbors(&single_loop(2, 3)).unwrap().is_empty());
    }

    #[test]
    fn not_reduced_rejected() {
        let g = LabeledGraph::from_parts(&["v", "w"], &[("e", "v", "w", 1, 5), ("l", "v", "v", 2, 3)]).unwrap();
        assert_eq!(reduced_neighbors(&g), Err(MoveError::NotReduced));
    }

    #[test]
    fn apply_checks_invariants() {
        let g = single_loop(2, 4);
        let h = apply(&g, &MoveDescriptor::AMove { edge: "e".into() }).unwrap();
        assert_eq!(InvariantSummary::of(&g), InvariantSummary::of(&h));
    }

    #[test]
    fn descriptor_json_round_trip() {
        let moves = [
            MoveDescriptor::Collapse { end: EdgeEnd::new("e", Side::From) },
            MoveDescriptor::Induction { edge: "e".into(), factor: 3, direction: Direction::Decreasing },
            MoveDescriptor::Expansion(ExpansionDescriptor {
                vertex: "v".into(),
                index: 2,
                selection: vec![SelectedEnd { end: EdgeEnd::new("e", Side::To), residues: vec![0] }],
            }),
        ];
        for mv in moves {
            let json = serde_json::to_string(&mv).unwrap();
            assert_eq!(serde_json::from_str::<MoveDescriptor>(&json).unwrap(), mv);
        }
        let parsed: MoveDescriptor = serde_json::from_str(r#"{"move":"a_move","edge":"e"}"#).unwrap();
        assert_eq!(parsed, MoveDescriptor::AMove { edge: "e".into() });
    }
}
