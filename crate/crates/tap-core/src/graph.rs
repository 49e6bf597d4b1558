//! Sentences, role-labeled spans, and typed analogy graphs.
//!
//! An analogy graph links token spans of one sentence with three edge types:
//! FACT edges attach a VALUE span to the arguments of its fact, EQUIVALENCE
//! edges join coreferent or synonymous same-role spans, and ANALOGY edges
//! join same-role spans that are compared across facts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::Violation;
use crate::util::UnionFind;

/// Errors from graph construction, parsing and frame conversion.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge ({a}, {b}) references a missing vertex id")]
    EdgeEndpointMissing { a: VertexId, b: VertexId },
    #[error("edge connects vertex {0} to itself")]
    SelfLoop(VertexId),
    #[error("span ({start}, {end}) out of bounds for sentence of length {len}")]
    SpanOutOfBounds { start: usize, end: usize, len: usize },
    #[error("role {0} is not in the inventory")]
    UnknownRole(String),
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("inconsistent frame: {0}")]
    InconsistentFrame(String),
    #[error("graph failed validation with {} violation(s), first: {}", .0.len(), .0[0])]
    InvalidGraph(Vec<Violation>),
}

/// A tokenized sentence with optional per-token metadata tracks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub id: String,
    pub tokens: Vec<String>,
    /// Named per-token annotation tracks (NER tags, dependency heads and the
    /// like), kept as opaque strings. Each track has one entry per token.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<BTreeMap<String, Vec<String>>>,
}

impl Sentence {
    pub fn new(id: impl Into<String>, tokens: Vec<String>) -> Result<Self, GraphError> {
        let s = Sentence {
            id: id.into(),
            tokens,
            meta: None,
        };
        s.check()?;
        Ok(s)
    }

    pub(crate) fn check(&self) -> Result<(), GraphError> {
        if self.tokens.is_empty() {
            return Err(GraphError::MalformedInput(format!(
                "sentence {:?} has no tokens",
                self.id
            )));
        }
        if let Some(t) = self.tokens.iter().find(|t| t.is_empty()) {
            let _ = t;
            return Err(GraphError::MalformedInput(format!(
                "sentence {:?} contains an empty token",
                self.id
            )));
        }
        if let Some(meta) = &self.meta {
            for (name, track) in meta {
                if track.len() != self.tokens.len() {
                    return Err(GraphError::MalformedInput(format!(
                        "metadata track {:?} has {} entries for {} tokens",
                        name,
                        track.len(),
                        self.tokens.len()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Surface text of a half-open token range, joined with single spaces.
    pub fn span_text(&self, start: usize, end: usize) -> String {
        self.tokens[start..end].join(" ")
    }
}

/// A semantic role name. Stored upper-case; comparison is exact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String")]
#[serde(into = "String")]
pub struct RoleLabel(String);

impl RoleLabel {
    pub fn new(name: &str) -> Self {
        RoleLabel(name.trim().to_ascii_uppercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<String> for RoleLabel {
    fn from(s: String) -> Self {
        RoleLabel::new(&s)
    }
}

impl From<RoleLabel> for String {
    fn from(r: RoleLabel) -> Self {
        r.0
    }
}

impl fmt::Display for RoleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The ordered set of roles a graph may use, with one designated value role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInventory")]
pub struct RoleInventory {
    roles: Vec<RoleLabel>,
    value_role: RoleLabel,
}

#[derive(Deserialize)]
struct RawInventory {
    roles: Vec<String>,
    value_role: String,
}

impl TryFrom<RawInventory> for RoleInventory {
    type Error = String;

    fn try_from(raw: RawInventory) -> Result<Self, String> {
        RoleInventory::new(
            raw.roles.iter().map(|r| r.as_str()),
            &raw.value_role,
        )
        .map_err(|e| e.to_string())
    }
}

impl RoleInventory {
    pub fn new<'a>(
        roles: impl IntoIterator<Item = &'a str>,
        value_role: &str,
    ) -> Result<Self, GraphError> {
        let roles: Vec<RoleLabel> = roles.into_iter().map(RoleLabel::new).collect();
        if roles.is_empty() {
            return Err(GraphError::MalformedInput("empty role inventory".into()));
        }
        let mut seen = BTreeSet::new();
        for r in &roles {
            if !seen.insert(r.clone()) {
                return Err(GraphError::MalformedInput(format!(
                    "duplicate role {} in inventory",
                    r
                )));
            }
        }
        let value_role = RoleLabel::new(value_role);
        if !roles.contains(&value_role) {
            return Err(GraphError::UnknownRole(value_role.0));
        }
        Ok(RoleInventory { roles, value_role })
    }

    /// The eight roles used throughout this crate's fixtures. Callers with a
    /// richer QSRL-style schema supply their own inventory.
    pub fn default_roles() -> Self {
        RoleInventory::new(
            [
                "VALUE", "QUANTITY", "WHOLE", "AGENT", "THEME", "SOURCE", "CAUSE", "TIME",
            ],
            "VALUE",
        )
        .unwrap()
    }

    pub fn roles(&self) -> &[RoleLabel] {
        &self.roles
    }

    pub fn value_role(&self) -> &RoleLabel {
        &self.value_role
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    /// Position of a role in inventory order; used for deterministic
    /// tie-breaking throughout the crate.
    pub fn index_of(&self, role: &RoleLabel) -> Option<usize> {
        self.roles.iter().position(|r| r == role)
    }

    pub fn contains(&self, role: &RoleLabel) -> bool {
        self.index_of(role).is_some()
    }

    pub fn is_value(&self, role: &RoleLabel) -> bool {
        *role == self.value_role
    }
}

/// Identifier of a vertex within one graph.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A role-labeled token span. `start` is inclusive, `end` exclusive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub start: usize,
    pub end: usize,
    pub role: RoleLabel,
}

impl Vertex {
    pub fn new(start: usize, end: usize, role: RoleLabel) -> Self {
        Vertex { start, end, role }
    }

    pub fn overlaps(&self, other: &Vertex) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn overlap_tokens(&self, other: &Vertex) -> usize {
        self.end.min(other.end).saturating_sub(self.start.max(other.start))
    }
}

/// Semantic relation between two spans.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum EdgeLabel {
    #[serde(rename = "FACT")]
    Fact,
    #[serde(rename = "EQUIVALENCE")]
    Equivalence,
    #[serde(rename = "ANALOGY")]
    Analogy,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 3] = [EdgeLabel::Fact, EdgeLabel::Equivalence, EdgeLabel::Analogy];

    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeLabel::Fact => "FACT",
            EdgeLabel::Equivalence => "EQUIVALENCE",
            EdgeLabel::Analogy => "ANALOGY",
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A typed edge. FACT edges are stored directed with `a` at the VALUE
/// endpoint; EQUIVALENCE and ANALOGY edges are undirected and stored with
/// `a < b`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub label: EdgeLabel,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId, label: EdgeLabel) -> Self {
        Edge { a, b, label }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.label, self.a, self.b)
    }
}

/// An analogy graph over one sentence. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyGraph {
    sentence: Sentence,
    inventory: RoleInventory,
    vertices: BTreeMap<VertexId, Vertex>,
    edges: BTreeSet<Edge>,
}

impl AnalogyGraph {
    pub fn sentence(&self) -> &Sentence {
        &self.sentence
    }

    pub fn inventory(&self) -> &RoleInventory {
        &self.inventory
    }

    pub fn vertices(&self) -> &BTreeMap<VertexId, Vertex> {
        &self.vertices
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.get(&id)
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Ids of all vertices carrying the inventory's value role, in id order.
    pub fn value_vertices(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .filter(|(_, v)| self.inventory.is_value(&v.role))
            .map(|(id, _)| *id)
            .collect()
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId, label: EdgeLabel) -> bool {
        self.edges.contains(&canonical_edge(Edge::new(a, b, label), |id| {
            self.inventory.is_value(&self.vertices[&id].role)
        }))
    }

    /// Surface text of a vertex span.
    pub fn vertex_text(&self, id: VertexId) -> String {
        let v = &self.vertices[&id];
        self.sentence.span_text(v.start, v.end)
    }

    /// Renumber vertices 0..n in (start, end, role) order and sort edges.
    /// Two graphs encode the same structure iff their canonical forms are
    /// equal, regardless of the ids chosen by the producer.
    pub fn canonical(&self) -> AnalogyGraph {
        let mut order: Vec<(&Vertex, VertexId)> =
            self.vertices.iter().map(|(id, v)| (v, *id)).collect();
        order.sort_by(|(va, ia), (vb, ib)| va.cmp(vb).then(ia.cmp(ib)));
        let remap: BTreeMap<VertexId, VertexId> = order
            .iter()
            .enumerate()
            .map(|(new, (_, old))| (*old, VertexId(new as u32)))
            .collect();
        let vertices = order
            .iter()
            .enumerate()
            .map(|(new, (v, _))| (VertexId(new as u32), (*v).clone()))
            .collect();
        let is_value = |id: VertexId| {
            let (v, _) = order[id.0 as usize];
            self.inventory.is_value(&v.role)
        };
        let edges = self
            .edges
            .iter()
            .map(|e| canonical_edge(Edge::new(remap[&e.a], remap[&e.b], e.label), is_value))
            .collect();
        AnalogyGraph {
            sentence: self.sentence.clone(),
            inventory: self.inventory.clone(),
            vertices,
            edges,
        }
    }

    /// Structural equality, ignoring vertex id choices.
    pub fn same_structure(&self, other: &AnalogyGraph) -> bool {
        self.canonical() == other.canonical()
    }
}

fn canonical_edge(e: Edge, is_value: impl Fn(VertexId) -> bool) -> Edge {
    match e.label {
        EdgeLabel::Fact => {
            // Keep the VALUE endpoint first when there is exactly one; an
            // ill-typed FACT edge is stored with a < b and left for the
            // validator to report.
            if is_value(e.b) && !is_value(e.a) {
                Edge::new(e.b, e.a, e.label)
            } else if !is_value(e.a) && !is_value(e.b) && e.b < e.a {
                Edge::new(e.b, e.a, e.label)
            } else if is_value(e.a) && is_value(e.b) && e.b < e.a {
                Edge::new(e.b, e.a, e.label)
            } else {
                e
            }
        }
        EdgeLabel::Equivalence | EdgeLabel::Analogy => {
            if e.b < e.a {
                Edge::new(e.b, e.a, e.label)
            } else {
                e
            }
        }
    }
}

/// Build a graph from parts, canonicalizing edges and collapsing duplicates.
///
/// Vertices sharing (start, end, role) are merged onto the smallest id and
/// edges re-pointed; an edge whose endpoints merge into one vertex is
/// dropped. Overlapping spans and other structural breaches are validation
/// concerns, not build errors.
pub fn build_graph(
    sentence: Sentence,
    vertices: Vec<(VertexId, Vertex)>,
    edges: Vec<Edge>,
    inventory: RoleInventory,
) -> Result<AnalogyGraph, GraphError> {
    sentence.check()?;
    let len = sentence.len();
    let mut by_id: BTreeMap<VertexId, Vertex> = BTreeMap::new();
    for (id, v) in vertices {
        if !(v.start < v.end && v.end <= len) {
            return Err(GraphError::SpanOutOfBounds {
                start: v.start,
                end: v.end,
                len,
            });
        }
        if !inventory.contains(&v.role) {
            return Err(GraphError::UnknownRole(v.role.0.clone()));
        }
        if let Some(prev) = by_id.insert(id, v.clone()) {
            if prev != v {
                return Err(GraphError::MalformedInput(format!(
                    "vertex id {} defined twice with different spans",
                    id
                )));
            }
        }
    }
    // Collapse duplicate (start, end, role) triples onto the smallest id.
    let mut canon: BTreeMap<&Vertex, VertexId> = BTreeMap::new();
    for (id, v) in &by_id {
        canon.entry(v).or_insert(*id);
    }
    let remap: BTreeMap<VertexId, VertexId> =
        by_id.iter().map(|(id, v)| (*id, canon[v])).collect();
    let vertices: BTreeMap<VertexId, Vertex> = by_id
        .iter()
        .filter(|(id, _)| remap[id] == **id)
        .map(|(id, v)| (*id, v.clone()))
        .collect();

    let mut out = BTreeSet::new();
    let mut pair_label: BTreeMap<(VertexId, VertexId), EdgeLabel> = BTreeMap::new();
    for e in edges {
        if e.a == e.b {
            return Err(GraphError::SelfLoop(e.a));
        }
        let a = *remap
            .get(&e.a)
            .ok_or(GraphError::EdgeEndpointMissing { a: e.a, b: e.b })?;
        let b = *remap
            .get(&e.b)
            .ok_or(GraphError::EdgeEndpointMissing { a: e.a, b: e.b })?;
        if a == b {
            // Edge between collapsed duplicates.
            continue;
        }
        // One label per span pair: parallel contradictory edges have no
        // reading as a TAP structure.
        let key = (a.min(b), a.max(b));
        if let Some(prev) = pair_label.insert(key, e.label) {
            if prev != e.label {
                return Err(GraphError::MalformedInput(format!(
                    "pair ({}, {}) carries both {} and {}",
                    key.0, key.1, prev, e.label
                )));
            }
        }
        let is_value = |id: VertexId| inventory.is_value(&vertices[&id].role);
        out.insert(canonical_edge(Edge::new(a, b, e.label), is_value));
    }
    Ok(AnalogyGraph {
        sentence,
        inventory,
        vertices,
        edges: out,
    })
}

/// Close EQUIVALENCE over all vertices and ANALOGY over VALUE vertices.
///
/// ANALOGY chains through non-VALUE vertices are left as given. The result
/// never has fewer edges than the input and the operation is idempotent.
pub fn transitive_closure(g: &AnalogyGraph) -> AnalogyGraph {
    let ids: Vec<VertexId> = g.vertices.keys().copied().collect();
    let pos: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut equiv = UnionFind::new(ids.len());
    let mut analogy = UnionFind::new(ids.len());
    for e in &g.edges {
        match e.label {
            EdgeLabel::Equivalence => equiv.union(pos[&e.a], pos[&e.b]),
            EdgeLabel::Analogy => {
                if g.inventory.is_value(&g.vertices[&e.a].role)
                    && g.inventory.is_value(&g.vertices[&e.b].role)
                {
                    analogy.union(pos[&e.a], pos[&e.b]);
                }
            }
            EdgeLabel::Fact => {}
        }
    }
    let mut edges = g.edges.clone();
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            if equiv.connected(i, j) {
                edges.insert(Edge::new(ids[i], ids[j], EdgeLabel::Equivalence));
            }
            if analogy.connected(i, j) {
                edges.insert(Edge::new(ids[i], ids[j], EdgeLabel::Analogy));
            }
        }
    }
    AnalogyGraph {
        sentence: g.sentence.clone(),
        inventory: g.inventory.clone(),
        vertices: g.vertices.clone(),
        edges,
    }
}

#[derive(Serialize, Deserialize)]
struct FileVertex {
    id: VertexId,
    start: usize,
    end: usize,
    role: RoleLabel,
}

#[derive(Serialize, Deserialize)]
struct FileEdge {
    a: VertexId,
    b: VertexId,
    label: EdgeLabel,
}

#[derive(Serialize, Deserialize)]
struct FileGraph {
    sentence: Sentence,
    inventory: RoleInventory,
    vertices: Vec<FileVertex>,
    edges: Vec<FileEdge>,
}

/// Parse one graph from its JSON encoding.
pub fn parse_graph(bytes: &[u8]) -> Result<AnalogyGraph, GraphError> {
    let file: FileGraph = serde_json::from_slice(bytes)
        .map_err(|e| GraphError::MalformedInput(e.to_string()))?;
    build_graph(
        file.sentence,
        file.vertices
            .into_iter()
            .map(|v| (v.id, Vertex::new(v.start, v.end, v.role)))
            .collect(),
        file.edges
            .into_iter()
            .map(|e| Edge::new(e.a, e.b, e.label))
            .collect(),
        file.inventory,
    )
}

/// Emit one graph as a single JSON line with sorted keys, vertices ordered
/// by (start, end, role) and renumbered from zero. Emission is a canonical
/// form: emit(parse(x)) == x for any emitted x.
pub fn emit_graph(g: &AnalogyGraph) -> Vec<u8> {
    let c = g.canonical();
    let file = FileGraph {
        sentence: c.sentence.clone(),
        inventory: c.inventory.clone(),
        vertices: c
            .vertices
            .iter()
            .map(|(id, v)| FileVertex {
                id: *id,
                start: v.start,
                end: v.end,
                role: v.role.clone(),
            })
            .collect(),
        edges: c
            .edges
            .iter()
            .map(|e| FileEdge {
                a: e.a,
                b: e.b,
                label: e.label,
            })
            .collect(),
    };
    let value = serde_json::to_value(&file).expect("graph serialization cannot fail");
    let mut bytes = serde_json::to_vec(&value).expect("value serialization cannot fail");
    bytes.push(b'\n');
    bytes
}
