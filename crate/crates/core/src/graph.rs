//! Labeled graphs: the quotient data of a GBS tree.
//!
//! Every edge carries a nonzero integer at each of its two ends. The label at
//! an end records the index of the edge group inside the adjacent vertex group
//! (up to sign, which depends on the choice of generators).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub String);

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_string())
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_string())
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    From,
    To,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::From => Side::To,
            Side::To => Side::From,
        }
    }
}

/// One end of an edge. Reversal is an involution.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub edge: EdgeId,
    pub side: Side,
}

impl EdgeEnd {
    pub fn new(edge: impl Into<EdgeId>, side: Side) -> Self {
        EdgeEnd { edge: edge.into(), side }
    }

    pub fn reversed(&self) -> EdgeEnd {
        EdgeEnd { edge: self.edge.clone(), side: self.side.opposite() }
    }
}

impl From<String> for EdgeId {
    fn from(s: String) -> Self {
        EdgeId(s)
    }
}

impl fmt::Display for EdgeEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::From => "from",
            Side::To => "to",
        };
        write!(f, "{}.{}", self.edge, side)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    #[serde(with = "label_serde")]
    pub label_from: BigInt,
    #[serde(with = "label_serde")]
    pub label_to: BigInt,
}

impl Edge {
    pub fn new(
        id: impl Into<EdgeId>,
        from: impl Into<VertexId>,
        to: impl Into<VertexId>,
        label_from: impl Into<BigInt>,
        label_to: impl Into<BigInt>,
    ) -> Self {
        Edge {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            label_from: label_from.into(),
            label_to: label_to.into(),
        }
    }

    pub fn vertex(&self, side: Side) -> &VertexId {
        match side {
            Side::From => &self.from,
            Side::To => &self.to,
        }
    }

    pub fn label(&self, side: Side) -> &BigInt {
        match side {
            Side::From => &self.label_from,
            Side::To => &self.label_to,
        }
    }

    pub(crate) fn label_mut(&mut self, side: Side) -> &mut BigInt {
        match side {
            Side::From => &mut self.label_from,
            Side::To => &mut self.label_to,
        }
    }

    pub(crate) fn vertex_mut(&mut self, side: Side) -> &mut VertexId {
        match side {
            Side::From => &mut self.from,
            Side::To => &mut self.to,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0} has a zero label")]
    ZeroLabel(EdgeId),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("edge {edge} refers to unknown vertex {vertex}")]
    UnknownVertex { edge: EdgeId, vertex: VertexId },
}

#[derive(Debug, Error)]
pub enum GraphIoError {
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] GraphError),
}

/// A finite connected graph with a nonzero integer at every edge end.
///
/// Loops and parallel edges are allowed. Vertex and edge order is kept as
/// given; it matters only for deterministic iteration, never for identity
/// (see [`crate::canon`]).
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabeledGraph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
}

impl LabeledGraph {
    /// Builds a graph without validating it.
    pub fn new_unchecked(vertices: Vec<VertexId>, edges: Vec<Edge>) -> Self {
        LabeledGraph { vertices, edges }
    }

    pub fn new(vertices: Vec<VertexId>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let g = LabeledGraph { vertices, edges };
        g.validate()?;
        Ok(g)
    }

    /// Shorthand used heavily in tests: `(id, from, to, label_from, label_to)`.
    pub fn from_parts(vertices: &[&str], edges: &[(&str, &str, &str, i64, i64)]) -> Result<Self, GraphError> {
        let vs = vertices.iter().map(|v| VertexId::from(*v)).collect();
        let es = edges.iter().map(|&(id, a, b, la, lb)| Edge::new(id, a, b, la, lb)).collect();
        LabeledGraph::new(vs, es)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| &e.id == id)
    }

    pub(crate) fn edges_mut(&mut self) -> &mut [Edge] {
        &mut self.edges
    }

    pub(crate) fn edge_mut(&mut self, id: &EdgeId) -> Option<&mut Edge> {
        self.edges.iter_mut().find(|e| &e.id == id)
    }

    pub fn label(&self, end: &EdgeEnd) -> Option<&BigInt> {
        self.edge(&end.edge).map(|e| e.label(end.side))
    }

    pub fn vertex_at(&self, end: &EdgeEnd) -> Option<&VertexId> {
        self.edge(&end.edge).map(|e| e.vertex(end.side))
    }

    /// All ends incident to `v`, in edge order (`from` before `to` for loops).
    pub fn ends_at(&self, v: &VertexId) -> Vec<EdgeEnd> {
        let mut out = Vec::new();
        for e in &self.edges {
            if &e.from == v {
                out.push(EdgeEnd::new(e.id.clone(), Side::From));
            }
            if &e.to == v {
                out.push(EdgeEnd::new(e.id.clone(), Side::To));
            }
        }
        out
    }

    pub fn valence(&self, v: &VertexId) -> usize {
        self.edges.iter().map(|e| usize::from(&e.from == v) + usize::from(&e.to == v)).sum()
    }

    pub fn all_ends(&self) -> Vec<EdgeEnd> {
        self.edges
            .iter()
            .flat_map(|e| [EdgeEnd::new(e.id.clone(), Side::From), EdgeEnd::new(e.id.clone(), Side::To)])
            .collect()
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut seen_e = BTreeSet::new();
        for e in &self.edges {
            if !seen_e.insert(&e.id) {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
            for v in [&e.from, &e.to] {
                if !seen.contains(v) {
                    return Err(GraphError::UnknownVertex { edge: e.id.clone(), vertex: v.clone() });
                }
            }
            if e.label_from.is_zero() || e.label_to.is_zero() {
                return Err(GraphError::ZeroLabel(e.id.clone()));
            }
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let index: HashMap<&VertexId, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            let (a, b) = (index[&e.from], index[&e.to]);
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn fresh_vertex_id(&self, prefix: &str) -> VertexId {
        (0..)
            .map(|i| VertexId(format!("{prefix}{i}")))
            .find(|v| !self.vertices.contains(v))
            .expect("unbounded id supply")
    }

    pub fn fresh_edge_id(&self, prefix: &str) -> EdgeId {
        (0..).map(|i| EdgeId(format!("{prefix}{i}"))).find(|id| self.edge(id).is_none()).expect("unbounded id supply")
    }

    pub(crate) fn push_vertex(&mut self, v: VertexId) {
        self.vertices.push(v);
    }

    pub(crate) fn push_edge(&mut self, e: Edge) {
        self.edges.push(e);
    }

    pub(crate) fn remove_edge(&mut self, id: &EdgeId) -> Option<Edge> {
        let pos = self.edges.iter().position(|e| &e.id == id)?;
        Some(self.edges.remove(pos))
    }

    pub(crate) fn remove_vertex(&mut self, v: &VertexId) {
        self.vertices.retain(|x| x != v);
    }

    /// Largest absolute label, useful for sizing searches.
    pub fn max_abs_label(&self) -> BigInt {
        self.edges.iter().flat_map(|e| [e.label_from.abs(), e.label_to.abs()]).max().unwrap_or_default()
    }

    pub fn from_json_str(s: &str) -> Result<Self, GraphIoError> {
        let g: LabeledGraph = serde_json::from_str(s)?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("graph serialization is infallible")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialization is infallible")
    }

    /// Graphviz rendering: one node per vertex, one directed edge per edge
    /// record with the end labels as tail/head labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for v in &self.vertices {
            out.push_str(&format!("  \"{}\";\n", escape(&v.0)));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\", taillabel=\"{}\", headlabel=\"{}\"];\n",
                escape(&e.from.0),
                escape(&e.to.0),
                escape(&e.id.0),
                e.label_from,
                e.label_to
            ));
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The one-vertex graph with a single loop labelled `(a, b)`.
pub fn single_loop(a: impl Into<BigInt>, b: impl Into<BigInt>) -> LabeledGraph {
    LabeledGraph::new_unchecked(vec![VertexId::from("v")], vec![Edge::new("e", "v", "v", a, b)])
}

/// A loop `(a, b)` at `v` plus a pendant edge with label `m` at `v` and `far`
/// at a leaf.
pub fn loop_with_pendant(
    a: impl Into<BigInt>,
    b: impl Into<BigInt>,
    m: impl Into<BigInt>,
    far: impl Into<BigInt>,
) -> LabeledGraph {
    LabeledGraph::new_unchecked(
        vec![VertexId::from("v"), VertexId::from("w")],
        vec![Edge::new("e", "v", "v", a, b), Edge::new("f", "v", "w", m, far)],
    )
}

mod label_serde {
    use num_bigint::BigInt;
    use num_traits::{Signed, ToPrimitive};
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    const SAFE: i64 = 1 << 53;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match x.to_i64() {
            Some(v) if x.abs() < BigInt::from(SAFE) => s.serialize_i64(v),
            _ => s.serialize_str(&x.to_string()),
        }
    }

    struct LabelVisitor;

    impl Visitor<'_> for LabelVisitor {
        type Value = BigInt;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("an integer or a decimal integer string")
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
            Ok(BigInt::from(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
            Ok(BigInt::from(v))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
            v.trim().parse().map_err(|_| E::custom(format!("invalid integer label {v:?}")))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        d.deserialize_any(LabelVisitor)
    }
}
