//! Shared fixtures for integration tests.

use tap_core::{
    build_graph, AnalogyGraph, Edge, EdgeLabel, RoleInventory, RoleLabel, ScoreSet, Sentence,
    Vertex, VertexId,
};

/// The running two-fact example: two poverty-rate percentages compared
/// across demographic groups, with a shared source, quantity and time.
pub fn example_graph() -> AnalogyGraph {
    let tokens: Vec<String> = [
        "According", "to", "the", "U.S.", "Census", ",", "whereas", "only", "10%", "of", "White",
        "Americans", "live", "at", "or", "below", "the", "poverty", "line", "today", ",", "28%",
        "of", "African", "Americans", "do", ".",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let sentence = Sentence::new("e1", tokens).unwrap();
    let r = RoleLabel::new;
    let vertices = vec![
        (VertexId(0), Vertex::new(8, 9, r("VALUE"))),
        (VertexId(1), Vertex::new(21, 22, r("VALUE"))),
        (VertexId(2), Vertex::new(10, 12, r("WHOLE"))),
        (VertexId(3), Vertex::new(23, 25, r("WHOLE"))),
        (VertexId(4), Vertex::new(3, 5, r("SOURCE"))),
        (VertexId(5), Vertex::new(12, 19, r("QUANTITY"))),
        (VertexId(6), Vertex::new(19, 20, r("TIME"))),
    ];
    let e = Edge::new;
    let edges = vec![
        e(VertexId(0), VertexId(2), EdgeLabel::Fact),
        e(VertexId(1), VertexId(3), EdgeLabel::Fact),
        e(VertexId(0), VertexId(4), EdgeLabel::Fact),
        e(VertexId(1), VertexId(4), EdgeLabel::Fact),
        e(VertexId(0), VertexId(5), EdgeLabel::Fact),
        e(VertexId(1), VertexId(5), EdgeLabel::Fact),
        e(VertexId(0), VertexId(6), EdgeLabel::Fact),
        e(VertexId(1), VertexId(6), EdgeLabel::Fact),
        e(VertexId(0), VertexId(1), EdgeLabel::Analogy),
        e(VertexId(2), VertexId(3), EdgeLabel::Analogy),
    ];
    build_graph(sentence, vertices, edges, RoleInventory::default_roles()).unwrap()
}

/// A distribution peaked at one option, remaining mass spread evenly.
pub fn peaked(width: usize, idx: usize, p: f64) -> Vec<f64> {
    let rest = (1.0 - p) / (width - 1) as f64;
    (0..width).map(|k| if k == idx { p } else { rest }).collect()
}

/// Option index of an edge label in score rows.
pub fn lab(label: EdgeLabel) -> usize {
    match label {
        EdgeLabel::Fact => 0,
        EdgeLabel::Equivalence => 1,
        EdgeLabel::Analogy => 2,
    }
}

/// Hand-built score set: every span and pair gets a peaked distribution.
/// `span_peaks` maps each span to (option index, probability); pairs default
/// to NONE at `default_none` unless overridden.
pub fn build_scores(
    inventory: &RoleInventory,
    spans: &[(usize, usize)],
    span_peaks: &[(usize, f64)],
    edge_peaks: &[((usize, usize), usize, f64)],
    default_none: f64,
) -> ScoreSet {
    let n_tokens = spans.iter().map(|&(_, e)| e).max().unwrap_or(0).max(1);
    let sentence = Sentence::new(
        "handmade",
        (0..n_tokens).map(|i| format!("t{}", i)).collect::<Vec<_>>(),
    )
    .unwrap();
    let width = inventory.len() + 1;
    let span_probs: Vec<Vec<f64>> = span_peaks
        .iter()
        .map(|&(idx, p)| peaked(width, idx, p))
        .collect();
    let mut edge_probs = Vec::new();
    for a in 0..spans.len() {
        for b in (a + 1)..spans.len() {
            let row = match edge_peaks.iter().find(|(pair, _, _)| *pair == (a, b)) {
                Some(&(_, idx, p)) => peaked(4, idx, p),
                None => peaked(4, 3, default_none),
            };
            edge_probs.push([row[0], row[1], row[2], row[3]]);
        }
    }
    ScoreSet::new(
        sentence,
        inventory.clone(),
        None,
        spans.to_vec(),
        span_probs,
        edge_probs,
        false,
    )
    .unwrap()
}
