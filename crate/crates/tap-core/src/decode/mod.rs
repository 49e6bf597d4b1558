//! Decoders: turn a score set into a constraint-satisfying analogy graph.
//!
//! [`greedy_decode`] follows the argmax-then-repair procedure; [`exact_decode`]
//! maximizes the decoding objective by depth-first branch-and-bound over
//! span-role and pair-label variables; [`brute_force_decode`] is the
//! exhaustive oracle for small instances.

mod brute;
mod exact;
mod greedy;

pub use brute::brute_force_decode;
pub use exact::exact_decode;
pub use greedy::greedy_decode;

use thiserror::Error;

use crate::graph::{AnalogyGraph, Edge, EdgeLabel, GraphError, Vertex, VertexId};
use crate::scores::{ScoreSet, PROB_FLOOR};
use crate::util::{pair_count, pair_index};

/// Role decision for one candidate span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoleVar {
    Undecided,
    /// The span is dropped from the solution.
    None,
    /// Index into the inventory's role list.
    Role(u16),
}

/// Label decision for one unordered span pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelVar {
    Undecided,
    /// No edge between the two spans.
    None,
    Label(EdgeLabel),
}

/// A (possibly partial) decision vector over a fixed candidate span list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    n: usize,
    roles: Vec<RoleVar>,
    labels: Vec<LabelVar>,
}

impl Assignment {
    pub fn new(n_spans: usize) -> Self {
        Assignment {
            n: n_spans,
            roles: vec![RoleVar::Undecided; n_spans],
            labels: vec![LabelVar::Undecided; pair_count(n_spans)],
        }
    }

    pub fn n_spans(&self) -> usize {
        self.n
    }

    pub fn role(&self, i: usize) -> RoleVar {
        self.roles[i]
    }

    pub fn set_role(&mut self, i: usize, r: RoleVar) {
        self.roles[i] = r;
    }

    /// Label of the pair (i, j); requires i < j.
    pub fn label(&self, i: usize, j: usize) -> LabelVar {
        self.labels[pair_index(self.n, i, j)]
    }

    pub fn set_label(&mut self, i: usize, j: usize, l: LabelVar) {
        self.labels[pair_index(self.n, i, j)] = l;
    }

    pub fn is_total(&self) -> bool {
        self.roles.iter().all(|r| *r != RoleVar::Undecided)
            && self.labels.iter().all(|l| *l != LabelVar::Undecided)
    }
}

/// Search limits for the exact decoder.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_millis: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 10_000_000,
            max_millis: 30_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecodeOptions {
    /// When set, the empty graph is not an admissible output and decoding
    /// fails if no non-empty feasible solution is found.
    pub require_analogy: bool,
    pub budget: Budget,
    /// Hard cap on candidate spans accepted by the exact decoder.
    pub max_spans: usize,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions {
            require_analogy: false,
            budget: Budget::default(),
            max_spans: 64,
        }
    }
}

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("search budget exhausted with no feasible incumbent")]
    BudgetExhaustedWithNoIncumbent,
    #[error("instance too large for exhaustive decoding: {0}")]
    InstanceTooLarge(String),
    #[error("{0} candidate spans exceed the configured maximum of {1}")]
    TooManySpans(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A decoded graph with search diagnostics.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub graph: AnalogyGraph,
    /// Total log-probability of the chosen assignment.
    pub objective: f64,
    /// True iff the producing search proved optimality within budget.
    pub optimal: bool,
    pub nodes_explored: u64,
}

/// Log-probabilities for every decision option, with zero probabilities
/// clamped at [`PROB_FLOOR`].
pub(crate) struct LogTables {
    /// Per span: roles in inventory order, then NONE.
    pub role: Vec<Vec<f64>>,
    /// Per dense pair: FACT, EQUIVALENCE, ANALOGY, NONE.
    pub label: Vec<[f64; 4]>,
}

impl LogTables {
    pub fn new(s: &ScoreSet) -> Self {
        let clamp = |p: f64| p.max(PROB_FLOOR).ln();
        let n = s.n_spans();
        let role = (0..n)
            .map(|i| s.span_probs(i).iter().map(|&p| clamp(p)).collect())
            .collect();
        let label = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .map(|(a, b)| s.edge_probs(a, b).map(clamp))
            .collect();
        LogTables { role, label }
    }
}

/// Total log-probability of a total assignment: the sum of the chosen
/// option's log-probability over every span and every pair, NONE included.
pub fn objective(a: &Assignment, s: &ScoreSet) -> f64 {
    let tables = LogTables::new(s);
    objective_with(a, &tables)
}

pub(crate) fn objective_with(a: &Assignment, tables: &LogTables) -> f64 {
    debug_assert!(a.is_total());
    let n = a.n_spans();
    let mut total = 0.0;
    for i in 0..n {
        let k = match a.role(i) {
            RoleVar::Role(r) => r as usize,
            RoleVar::None => tables.role[i].len() - 1,
            RoleVar::Undecided => unreachable!("objective over partial assignment"),
        };
        total += tables.role[i][k];
    }
    for (p, lv) in a.labels.iter().enumerate() {
        let k = match lv {
            LabelVar::Label(l) => crate::scores::edge_label_index(*l),
            LabelVar::None => 3,
            LabelVar::Undecided => unreachable!("objective over partial assignment"),
        };
        total += tables.label[p][k];
    }
    total
}

/// Materialize a total assignment as a graph. Vertex ids are the candidate
/// span indices of the active spans.
pub(crate) fn assignment_to_graph(
    a: &Assignment,
    s: &ScoreSet,
) -> Result<AnalogyGraph, GraphError> {
    debug_assert!(a.is_total());
    let inventory = s.inventory().clone();
    let mut vertices = Vec::new();
    for (i, &(start, end)) in s.spans().iter().enumerate() {
        if let RoleVar::Role(r) = a.role(i) {
            let role = inventory.roles()[r as usize].clone();
            vertices.push((VertexId(i as u32), Vertex::new(start, end, role)));
        }
    }
    let mut edges = Vec::new();
    for i in 0..a.n_spans() {
        for j in (i + 1)..a.n_spans() {
            if let LabelVar::Label(l) = a.label(i, j) {
                edges.push(Edge::new(VertexId(i as u32), VertexId(j as u32), l));
            }
        }
    }
    crate::graph::build_graph(s.sentence().clone(), vertices, edges, inventory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{RoleInventory, Sentence};
    use crate::scores::ScoreSet;

    fn uniform_scores(n_spans: usize) -> ScoreSet {
        // Three roles plus NONE gives four options per span, matching the
        // four options per pair.
        let inv = RoleInventory::new(["VALUE", "WHOLE", "TIME"], "VALUE").unwrap();
        let sentence =
            Sentence::new("u", (0..n_spans).map(|i| format!("t{}", i)).collect()).unwrap();
        let spans = (0..n_spans).map(|i| (i, i + 1)).collect();
        let span_probs = vec![vec![0.25; 4]; n_spans];
        let edge_probs = vec![[0.25; 4]; pair_count(n_spans)];
        ScoreSet::new(sentence, inv, None, spans, span_probs, edge_probs, false).unwrap()
    }

    #[test]
    fn objective_of_all_none_uniform_has_closed_form() {
        let s = uniform_scores(3);
        let mut a = Assignment::new(3);
        for i in 0..3 {
            a.set_role(i, RoleVar::None);
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                a.set_label(i, j, LabelVar::None);
            }
        }
        let got = objective(&a, &s);
        let expect = (3 + 3) as f64 * (0.25f64).ln();
        assert!((got - expect).abs() < 1e-9);
    }

    #[test]
    fn objective_matches_naive_recomputation() {
        let s = uniform_scores(4);
        let mut a = Assignment::new(4);
        a.set_role(0, RoleVar::Role(0));
        a.set_role(1, RoleVar::Role(1));
        a.set_role(2, RoleVar::None);
        a.set_role(3, RoleVar::Role(2));
        for i in 0..4 {
            for j in (i + 1)..4 {
                a.set_label(i, j, LabelVar::None);
            }
        }
        a.set_label(0, 1, LabelVar::Label(EdgeLabel::Fact));
        // Naive loop over the stored probabilities.
        let mut expect = 0.0;
        for i in 0..4 {
            let k = match a.role(i) {
                RoleVar::Role(r) => r as usize,
                _ => 3,
            };
            expect += s.span_probs(i)[k].max(PROB_FLOOR).ln();
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                let k = match a.label(i, j) {
                    LabelVar::Label(l) => crate::scores::edge_label_index(l),
                    _ => 3,
                };
                expect += s.edge_probs(i, j)[k].max(PROB_FLOOR).ln();
            }
        }
        assert!((objective(&a, &s) - expect).abs() < 1e-12);
    }
}
