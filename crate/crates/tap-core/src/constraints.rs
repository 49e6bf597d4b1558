//! Structural constraints on analogy graphs.
//!
//! [`validate`] reports every breach of the graph well-formedness rules as a
//! [`Violation`]; [`feasible`] is the equivalent predicate over (possibly
//! partial) span-role / pair-label assignments, reused by the decoders for
//! search-tree pruning.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::decode::{Assignment, LabelVar, RoleVar};
use crate::graph::{AnalogyGraph, Edge, EdgeLabel, RoleInventory, VertexId};

/// One structural rule. Overlap and connectivity split the well-formedness
/// rule; the two transitivity ids split the transitivity rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConstraintId {
    WellFormedOverlap,
    WellFormedConnected,
    TypingFact,
    TypingEquivAnalogy,
    UniqueFacts,
    TransitivityEquiv,
    TransitivityAnalogy,
    AnalogyValuePair,
    AnalogyQuadrangle,
}

impl ConstraintId {
    pub const ALL: [ConstraintId; 9] = [
        ConstraintId::WellFormedOverlap,
        ConstraintId::WellFormedConnected,
        ConstraintId::TypingFact,
        ConstraintId::TypingEquivAnalogy,
        ConstraintId::UniqueFacts,
        ConstraintId::TransitivityEquiv,
        ConstraintId::TransitivityAnalogy,
        ConstraintId::AnalogyValuePair,
        ConstraintId::AnalogyQuadrangle,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ConstraintId::WellFormedOverlap => "WELL_FORMED_OVERLAP",
            ConstraintId::WellFormedConnected => "WELL_FORMED_CONNECTED",
            ConstraintId::TypingFact => "TYPING_FACT",
            ConstraintId::TypingEquivAnalogy => "TYPING_EQUIV_ANALOGY",
            ConstraintId::UniqueFacts => "UNIQUE_FACTS",
            ConstraintId::TransitivityEquiv => "TRANSITIVITY_EQUIV",
            ConstraintId::TransitivityAnalogy => "TRANSITIVITY_ANALOGY",
            ConstraintId::AnalogyValuePair => "ANALOGY_VALUE_PAIR",
            ConstraintId::AnalogyQuadrangle => "ANALOGY_QUADRANGLE",
        }
    }
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A report of one constraint breach with its minimal witnessing elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub constraint: ConstraintId,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<Edge>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.constraint, self.message)
    }
}

fn violation(
    constraint: ConstraintId,
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    message: String,
) -> Violation {
    Violation {
        constraint,
        vertices,
        edges,
        message,
    }
}

struct Indexed<'a> {
    g: &'a AnalogyGraph,
    ids: Vec<VertexId>,
    /// Direct FACT children (argument endpoints) per vertex, VALUE side only.
    fact_children: BTreeMap<VertexId, Vec<VertexId>>,
    fact_degree: BTreeMap<VertexId, usize>,
    equiv: BTreeSet<(VertexId, VertexId)>,
    analogy: BTreeSet<(VertexId, VertexId)>,
}

fn norm(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl<'a> Indexed<'a> {
    fn new(g: &'a AnalogyGraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().keys().copied().collect();
        let mut fact_children: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        let mut fact_degree: BTreeMap<VertexId, usize> =
            ids.iter().map(|id| (*id, 0)).collect();
        let mut equiv = BTreeSet::new();
        let mut analogy = BTreeSet::new();
        for e in g.edges() {
            match e.label {
                EdgeLabel::Fact => {
                    fact_children.entry(e.a).or_default().push(e.b);
                    *fact_degree.get_mut(&e.a).unwrap() += 1;
                    *fact_degree.get_mut(&e.b).unwrap() += 1;
                }
                EdgeLabel::Equivalence => {
                    equiv.insert(norm(e.a, e.b));
                }
                EdgeLabel::Analogy => {
                    analogy.insert(norm(e.a, e.b));
                }
            }
        }
        Indexed {
            g,
            ids,
            fact_children,
            fact_degree,
            equiv,
            analogy,
        }
    }

    fn is_value(&self, id: VertexId) -> bool {
        self.g.inventory().is_value(&self.g.vertices()[&id].role)
    }

    fn role(&self, id: VertexId) -> &crate::graph::RoleLabel {
        &self.g.vertices()[&id].role
    }

    fn has_fact(&self, value: VertexId, arg: VertexId) -> bool {
        self.fact_children
            .get(&value)
            .map_or(false, |c| c.contains(&arg))
    }
}

fn check_overlap(ix: &Indexed) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, &a) in ix.ids.iter().enumerate() {
        for &b in &ix.ids[i + 1..] {
            let va = &ix.g.vertices()[&a];
            let vb = &ix.g.vertices()[&b];
            if va.overlaps(vb) {
                out.push(violation(
                    ConstraintId::WellFormedOverlap,
                    vec![a, b],
                    vec![],
                    format!(
                        "spans ({}, {}) and ({}, {}) overlap",
                        va.start, va.end, vb.start, vb.end
                    ),
                ));
            }
        }
    }
    out
}

fn check_connected(ix: &Indexed) -> Vec<Violation> {
    ix.ids
        .iter()
        .filter(|id| ix.fact_degree[id] == 0)
        .map(|id| {
            violation(
                ConstraintId::WellFormedConnected,
                vec![*id],
                vec![],
                format!("vertex {} participates in no FACT edge", id),
            )
        })
        .collect()
}

fn check_typing_fact(ix: &Indexed) -> Vec<Violation> {
    ix.g.edges()
        .iter()
        .filter(|e| e.label == EdgeLabel::Fact)
        .filter(|e| !(ix.is_value(e.a) && !ix.is_value(e.b)))
        .map(|e| {
            violation(
                ConstraintId::TypingFact,
                vec![e.a, e.b],
                vec![*e],
                format!(
                    "FACT edge must join a VALUE to a non-VALUE, got {} and {}",
                    ix.role(e.a),
                    ix.role(e.b)
                ),
            )
        })
        .collect()
}

fn check_typing_equiv_analogy(ix: &Indexed) -> Vec<Violation> {
    ix.g.edges()
        .iter()
        .filter(|e| e.label != EdgeLabel::Fact)
        .filter(|e| ix.role(e.a) != ix.role(e.b))
        .map(|e| {
            violation(
                ConstraintId::TypingEquivAnalogy,
                vec![e.a, e.b],
                vec![*e],
                format!(
                    "{} edge joins roles {} and {}",
                    e.label,
                    ix.role(e.a),
                    ix.role(e.b)
                ),
            )
        })
        .collect()
}

fn check_unique_facts(ix: &Indexed) -> Vec<Violation> {
    let mut out = Vec::new();
    for (&v, children) in &ix.fact_children {
        if !ix.is_value(v) {
            continue;
        }
        for (i, &w) in children.iter().enumerate() {
            for &w2 in &children[i + 1..] {
                if ix.role(w) == ix.role(w2) && !ix.equiv.contains(&norm(w, w2)) {
                    let (w, w2) = norm(w, w2);
                    out.push(violation(
                        ConstraintId::UniqueFacts,
                        vec![v, w, w2],
                        vec![
                            Edge::new(v, w, EdgeLabel::Fact),
                            Edge::new(v, w2, EdgeLabel::Fact),
                        ],
                        format!(
                            "VALUE {} has two {} arguments ({}, {}) without EQUIVALENCE",
                            v,
                            ix.role(w),
                            w,
                            w2
                        ),
                    ));
                }
            }
        }
    }
    out
}

fn check_transitivity(ix: &Indexed, label: EdgeLabel) -> Vec<Violation> {
    let (set, id) = match label {
        EdgeLabel::Equivalence => (&ix.equiv, ConstraintId::TransitivityEquiv),
        EdgeLabel::Analogy => (&ix.analogy, ConstraintId::TransitivityAnalogy),
        EdgeLabel::Fact => unreachable!(),
    };
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &(a, b) in set.iter() {
        if label == EdgeLabel::Analogy && !(ix.is_value(a) && ix.is_value(b)) {
            continue;
        }
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    // One violation per missing closing pair; the shared middle vertex is
    // reported once.
    let mut missing: BTreeMap<(VertexId, VertexId), VertexId> = BTreeMap::new();
    for (&mid, neighbors) in &adj {
        for (i, &a) in neighbors.iter().enumerate() {
            for &b in &neighbors[i + 1..] {
                let key = norm(a, b);
                if !set.contains(&key) {
                    missing.entry(key).or_insert(mid);
                }
            }
        }
    }
    missing
        .into_iter()
        .map(|((a, b), mid)| {
            violation(
                id,
                vec![a, mid, b],
                vec![
                    Edge::new(norm(a, mid).0, norm(a, mid).1, label),
                    Edge::new(norm(mid, b).0, norm(mid, b).1, label),
                ],
                format!(
                    "{} chain {} - {} - {} is not closed by {}({}, {})",
                    label, a, mid, b, label, a, b
                ),
            )
        })
        .collect()
}

fn check_analogy_value_pair(ix: &Indexed) -> Vec<Violation> {
    if ix.ids.is_empty() {
        return vec![];
    }
    let has_pair = ix
        .analogy
        .iter()
        .any(|&(a, b)| ix.is_value(a) && ix.is_value(b));
    if has_pair {
        return vec![];
    }
    let values: Vec<VertexId> = ix.ids.iter().copied().filter(|&v| ix.is_value(v)).collect();
    let witnesses = if values.is_empty() { ix.ids.clone() } else { values };
    vec![violation(
        ConstraintId::AnalogyValuePair,
        witnesses,
        vec![],
        "graph contains no ANALOGY edge between two VALUE vertices".into(),
    )]
}

fn check_analogy_quadrangle(ix: &Indexed) -> Vec<Violation> {
    let mut out = Vec::new();
    for &(a, b) in ix.analogy.iter() {
        let edge = Edge::new(a, b, EdgeLabel::Analogy);
        if ix.is_value(a) && ix.is_value(b) {
            // An analogous VALUE pair needs an analogous argument pair.
            let supported = ix.analogy.iter().any(|&(w, w2)| {
                if ix.is_value(w) || ix.is_value(w2) {
                    return false;
                }
                (ix.has_fact(a, w) && ix.has_fact(b, w2))
                    || (ix.has_fact(a, w2) && ix.has_fact(b, w))
            });
            if !supported {
                out.push(violation(
                    ConstraintId::AnalogyQuadrangle,
                    vec![a, b],
                    vec![edge],
                    format!(
                        "analogous VALUE pair ({}, {}) lacks an analogous argument pair",
                        a, b
                    ),
                ));
            }
        } else if !ix.is_value(a) && !ix.is_value(b) {
            // An analogous argument pair needs analogous VALUE parents.
            let supported = ix.analogy.iter().any(|&(v, v2)| {
                if !(ix.is_value(v) && ix.is_value(v2)) {
                    return false;
                }
                (ix.has_fact(v, a) && ix.has_fact(v2, b))
                    || (ix.has_fact(v, b) && ix.has_fact(v2, a))
            });
            if !supported {
                out.push(violation(
                    ConstraintId::AnalogyQuadrangle,
                    vec![a, b],
                    vec![edge],
                    format!(
                        "analogous pair ({}, {}) is not supported by analogous VALUE parents",
                        a, b
                    ),
                ));
            }
        }
        // Mixed VALUE / non-VALUE analogy edges are typing violations and
        // reported there.
    }
    out
}

/// Check one constraint; violations are data, not errors.
pub fn check(g: &AnalogyGraph, id: ConstraintId) -> Vec<Violation> {
    let ix = Indexed::new(g);
    let mut out = match id {
        ConstraintId::WellFormedOverlap => check_overlap(&ix),
        ConstraintId::WellFormedConnected => check_connected(&ix),
        ConstraintId::TypingFact => check_typing_fact(&ix),
        ConstraintId::TypingEquivAnalogy => check_typing_equiv_analogy(&ix),
        ConstraintId::UniqueFacts => check_unique_facts(&ix),
        ConstraintId::TransitivityEquiv => check_transitivity(&ix, EdgeLabel::Equivalence),
        ConstraintId::TransitivityAnalogy => check_transitivity(&ix, EdgeLabel::Analogy),
        ConstraintId::AnalogyValuePair => check_analogy_value_pair(&ix),
        ConstraintId::AnalogyQuadrangle => check_analogy_quadrangle(&ix),
    };
    out.sort_by(|a, b| {
        (a.constraint, &a.vertices, &a.edges).cmp(&(b.constraint, &b.vertices, &b.edges))
    });
    out.dedup();
    out
}

/// Check all constraints. An empty result means the graph encodes valid TAP
/// frames; the empty graph is vacuously valid.
pub fn validate(g: &AnalogyGraph) -> Vec<Violation> {
    let mut out: Vec<Violation> = ConstraintId::ALL
        .iter()
        .flat_map(|id| check(g, *id))
        .collect();
    out.sort_by(|a, b| {
        (a.constraint, &a.vertices, &a.edges).cmp(&(b.constraint, &b.vertices, &b.edges))
    });
    out
}

/// Static context for feasibility checks over one candidate span list.
pub struct FeasibilityContext {
    spans: Vec<(usize, usize)>,
    value_role: usize,
    n_roles: usize,
    /// Span index pairs whose token ranges overlap (empty for score sets
    /// without the raw flag).
    overlapping: Vec<(usize, usize)>,
    /// When set, the all-NONE assignment (empty graph) is admissible even
    /// though it contains no analogous VALUE pair.
    pub allow_empty: bool,
}

impl FeasibilityContext {
    pub fn new(spans: Vec<(usize, usize)>, inventory: &RoleInventory, allow_empty: bool) -> Self {
        let value_role = inventory
            .index_of(inventory.value_role())
            .expect("value role is in its inventory");
        let mut overlapping = Vec::new();
        for i in 0..spans.len() {
            for j in (i + 1)..spans.len() {
                let (s1, e1) = spans[i];
                let (s2, e2) = spans[j];
                if s1 < e2 && s2 < e1 {
                    overlapping.push((i, j));
                }
            }
        }
        FeasibilityContext {
            spans,
            value_role,
            n_roles: inventory.len(),
            overlapping,
            allow_empty,
        }
    }

    pub fn n_spans(&self) -> usize {
        self.spans.len()
    }

    pub fn n_roles(&self) -> usize {
        self.n_roles
    }

    pub fn value_role(&self) -> usize {
        self.value_role
    }

}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Maybe {
    Yes,
    No,
    Unknown,
}

fn decided_role(a: &Assignment, i: usize) -> Option<Option<usize>> {
    match a.role(i) {
        RoleVar::Undecided => None,
        RoleVar::None => Some(None),
        RoleVar::Role(r) => Some(Some(r as usize)),
    }
}

/// Whether span i can still be active (carry a role) in some completion.
fn maybe_active(a: &Assignment, i: usize) -> bool {
    a.role(i) != RoleVar::None
}

fn maybe_value(a: &Assignment, i: usize, ctx: &FeasibilityContext) -> bool {
    match a.role(i) {
        RoleVar::Undecided => true,
        RoleVar::None => false,
        RoleVar::Role(r) => r as usize == ctx.value_role,
    }
}

fn maybe_nonvalue_role(a: &Assignment, i: usize, ctx: &FeasibilityContext) -> bool {
    match a.role(i) {
        RoleVar::Undecided => true,
        RoleVar::None => false,
        RoleVar::Role(r) => r as usize != ctx.value_role,
    }
}

/// Whether the pair (i, j) can still carry `label` in some completion.
fn maybe_label(
    a: &Assignment,
    ctx: &FeasibilityContext,
    i: usize,
    j: usize,
    label: EdgeLabel,
) -> Maybe {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    match a.label(i, j) {
        LabelVar::Label(l) if l == label => Maybe::Yes,
        LabelVar::Label(_) | LabelVar::None => Maybe::No,
        LabelVar::Undecided => {
            if !maybe_active(a, i) || !maybe_active(a, j) {
                return Maybe::No;
            }
            let ok = match label {
                EdgeLabel::Fact => {
                    (maybe_value(a, i, ctx) && maybe_nonvalue_role(a, j, ctx))
                        || (maybe_value(a, j, ctx) && maybe_nonvalue_role(a, i, ctx))
                }
                EdgeLabel::Equivalence | EdgeLabel::Analogy => {
                    match (decided_role(a, i), decided_role(a, j)) {
                        (Some(Some(r1)), Some(Some(r2))) => r1 == r2,
                        (Some(None), _) | (_, Some(None)) => false,
                        _ => true,
                    }
                }
            };
            if ok {
                Maybe::Unknown
            } else {
                Maybe::No
            }
        }
    }
}

/// Feasibility of an assignment under the structural constraints.
///
/// With `allow_undecided` false the assignment must be total and the result
/// mirrors [`validate`] on the induced graph. With `allow_undecided` true the
/// check is conservative: it returns false only when some decided subset
/// already rules out every completion, so it never prunes a completable
/// assignment.
pub fn feasible(a: &Assignment, ctx: &FeasibilityContext, allow_undecided: bool) -> bool {
    let n = ctx.n_spans();
    debug_assert_eq!(a.n_spans(), n);

    if !allow_undecided && !a.is_total() {
        return false;
    }

    // Overlap among decided-active spans.
    for &(i, j) in &ctx.overlapping {
        if matches!(a.role(i), RoleVar::Role(_)) && matches!(a.role(j), RoleVar::Role(_)) {
            return false;
        }
    }

    // Decided pair labels: active endpoints and typing.
    for i in 0..n {
        for j in (i + 1)..n {
            let label = match a.label(i, j) {
                LabelVar::Label(l) => l,
                _ => continue,
            };
            if a.role(i) == RoleVar::None || a.role(j) == RoleVar::None {
                return false;
            }
            let (ri, rj) = match (decided_role(a, i), decided_role(a, j)) {
                (Some(Some(ri)), Some(Some(rj))) => (ri, rj),
                _ => continue, // endpoint roles open; typing not refutable yet
            };
            match label {
                EdgeLabel::Fact => {
                    if (ri == ctx.value_role) == (rj == ctx.value_role) {
                        return false;
                    }
                }
                EdgeLabel::Equivalence | EdgeLabel::Analogy => {
                    if ri != rj {
                        return false;
                    }
                }
            }
        }
    }

    // Adjacency of decided EQUIVALENCE, decided VALUE-VALUE ANALOGY and
    // decided FACT edges, gathered in one pair sweep so the chain checks
    // below touch only what is actually decided.
    let is_decided_value =
        |i: usize| matches!(decided_role(a, i), Some(Some(r)) if r == ctx.value_role);
    let mut equiv_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut value_analogy_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut fact_children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            match a.label(i, j) {
                LabelVar::Label(EdgeLabel::Equivalence) => {
                    equiv_adj[i].push(j);
                    equiv_adj[j].push(i);
                }
                LabelVar::Label(EdgeLabel::Analogy) => {
                    if is_decided_value(i) && is_decided_value(j) {
                        value_analogy_adj[i].push(j);
                        value_analogy_adj[j].push(i);
                    }
                }
                LabelVar::Label(EdgeLabel::Fact) => {
                    if is_decided_value(i) {
                        fact_children[i].push(j);
                    } else if is_decided_value(j) {
                        fact_children[j].push(i);
                    }
                }
                _ => {}
            }
        }
    }

    // Transitivity: a decided two-edge chain whose closing pair is decided
    // to something else is dead.
    for mid in 0..n {
        let neighbors = &equiv_adj[mid];
        for (xi, &x) in neighbors.iter().enumerate() {
            for &y in &neighbors[xi + 1..] {
                let xy = a.label(x.min(y), x.max(y));
                if !matches!(xy, LabelVar::Undecided | LabelVar::Label(EdgeLabel::Equivalence)) {
                    return false;
                }
            }
        }
        let neighbors = &value_analogy_adj[mid];
        for (xi, &x) in neighbors.iter().enumerate() {
            for &y in &neighbors[xi + 1..] {
                let xy = a.label(x.min(y), x.max(y));
                if !matches!(xy, LabelVar::Undecided | LabelVar::Label(EdgeLabel::Analogy)) {
                    return false;
                }
            }
        }
    }

    // Unique facts: two same-role FACT arguments of one VALUE must be able
    // to become EQUIVALENT.
    for children in &fact_children {
        for (wi, &w) in children.iter().enumerate() {
            for &w2 in &children[wi + 1..] {
                let same_role = match (decided_role(a, w), decided_role(a, w2)) {
                    (Some(Some(r1)), Some(Some(r2))) => r1 == r2,
                    _ => continue,
                };
                if !same_role {
                    continue;
                }
                match maybe_label(a, ctx, w, w2, EdgeLabel::Equivalence) {
                    Maybe::Yes => {}
                    Maybe::Unknown if allow_undecided => {}
                    _ => return false,
                }
            }
        }
    }

    // Connectivity: every active span must still be able to reach a FACT
    // edge.
    for i in 0..n {
        if !matches!(a.role(i), RoleVar::Role(_)) {
            continue;
        }
        let mut possible = false;
        for j in 0..n {
            if j == i {
                continue;
            }
            match maybe_label(a, ctx, i, j, EdgeLabel::Fact) {
                Maybe::Yes => {
                    possible = true;
                    break;
                }
                Maybe::Unknown if allow_undecided => {
                    possible = true;
                    break;
                }
                _ => {}
            }
        }
        if !possible {
            return false;
        }
    }

    // At least one analogous VALUE pair, unless the whole assignment can
    // still be (or is) the admissible empty graph.
    let any_active = (0..n).any(|i| matches!(a.role(i), RoleVar::Role(_)));
    let may_be_empty = ctx.allow_empty && (0..n).all(|i| !matches!(a.role(i), RoleVar::Role(_)));
    if !may_be_empty {
        let mut possible = false;
        'outer: for i in 0..n {
            if !maybe_value(a, i, ctx) {
                continue;
            }
            for j in (i + 1)..n {
                if !maybe_value(a, j, ctx) {
                    continue;
                }
                match maybe_label(a, ctx, i, j, EdgeLabel::Analogy) {
                    Maybe::Yes => {
                        possible = true;
                        break 'outer;
                    }
                    Maybe::Unknown if allow_undecided => {
                        possible = true;
                        break 'outer;
                    }
                    _ => {}
                }
            }
        }
        // With empty output allowed, only assignments that are already
        // non-empty must contain the pair; without it every assignment must.
        if !possible && (any_active || !ctx.allow_empty) {
            return false;
        }
    }

    // Quadrangle support for decided ANALOGY edges.
    for i in 0..n {
        for j in (i + 1)..n {
            if a.label(i, j) != LabelVar::Label(EdgeLabel::Analogy) {
                continue;
            }
            let (ri, rj) = match (decided_role(a, i), decided_role(a, j)) {
                (Some(Some(ri)), Some(Some(rj))) => (ri, rj),
                _ => continue,
            };
            let both_value = ri == ctx.value_role && rj == ctx.value_role;
            let both_nonvalue = ri != ctx.value_role && rj != ctx.value_role;
            let mut supported = false;
            if both_value {
                'support: for w in 0..n {
                    if w == i || w == j || !maybe_nonvalue_role(a, w, ctx) {
                        continue;
                    }
                    for w2 in 0..n {
                        if w2 == w || w2 == i || w2 == j || !maybe_nonvalue_role(a, w2, ctx) {
                            continue;
                        }
                        if can_hold(a, ctx, i, w, EdgeLabel::Fact, allow_undecided)
                            && can_hold(a, ctx, j, w2, EdgeLabel::Fact, allow_undecided)
                            && can_hold(a, ctx, w, w2, EdgeLabel::Analogy, allow_undecided)
                        {
                            supported = true;
                            break 'support;
                        }
                    }
                }
            } else if both_nonvalue {
                'support2: for v in 0..n {
                    if v == i || v == j || !maybe_value(a, v, ctx) {
                        continue;
                    }
                    for v2 in 0..n {
                        if v2 == v || v2 == i || v2 == j || !maybe_value(a, v2, ctx) {
                            continue;
                        }
                        if can_hold(a, ctx, v, i, EdgeLabel::Fact, allow_undecided)
                            && can_hold(a, ctx, v2, j, EdgeLabel::Fact, allow_undecided)
                            && can_hold(a, ctx, v, v2, EdgeLabel::Analogy, allow_undecided)
                        {
                            supported = true;
                            break 'support2;
                        }
                    }
                }
            } else {
                // Mixed pairs already failed typing above.
                continue;
            }
            if !supported {
                return false;
            }
        }
    }

    true
}

fn can_hold(
    a: &Assignment,
    ctx: &FeasibilityContext,
    i: usize,
    j: usize,
    label: EdgeLabel,
    allow_undecided: bool,
) -> bool {
    match maybe_label(a, ctx, i, j, label) {
        Maybe::Yes => true,
        Maybe::Unknown => allow_undecided,
        Maybe::No => false,
    }
}

/// The total assignment induced by a graph over its own vertex spans,
/// paired with the matching context. Vertex order follows (start, end, role).
pub fn induced_assignment(
    g: &AnalogyGraph,
    allow_empty: bool,
) -> (Assignment, FeasibilityContext) {
    let c = g.canonical();
    let n = c.vertices().len();
    let spans: Vec<(usize, usize)> = c.vertices().values().map(|v| (v.start, v.end)).collect();
    let inventory = c.inventory().clone();
    let mut a = Assignment::new(n);
    for (id, v) in c.vertices() {
        let role = inventory.index_of(&v.role).expect("vertex role in inventory");
        a.set_role(id.0 as usize, RoleVar::Role(role as u16));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            a.set_label(i, j, LabelVar::None);
        }
    }
    for e in c.edges() {
        let (i, j) = (e.a.0 as usize, e.b.0 as usize);
        a.set_label(i.min(j), i.max(j), LabelVar::Label(e.label));
    }
    (a, FeasibilityContext::new(spans, &inventory, allow_empty))
}
