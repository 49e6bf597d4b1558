//! Evaluation: frame, span and edge PRF against gold graphs, plus
//! Krippendorff's alpha for annotator agreement.
//!
//! All metrics first align predicted and gold spans with a maximum-overlap
//! one-to-one matching, so boundary disagreements cost overlap rather than
//! everything; role and label correctness are scored after alignment.

mod hungarian;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{transitive_closure, AnalogyGraph, EdgeLabel, Vertex, VertexId};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("agreement needs at least two annotators, got {0}")]
    TooFewAnnotators(usize),
    #[error("annotator {index} labeled {got} items, expected {expected}")]
    LengthMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("agreement over zero items is undefined")]
    NoItems,
}

/// Precision, recall and F1 with their underlying counts. 0/0 is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Prf {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
        }
    }
}

/// One-to-one span matching with positive token overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanMatching {
    /// (gold index, predicted index, overlap in tokens), sorted by gold
    /// index.
    pub pairs: Vec<(usize, usize, usize)>,
}

impl SpanMatching {
    pub fn total_overlap(&self) -> usize {
        self.pairs.iter().map(|(_, _, w)| w).sum()
    }

    pub fn pred_for_gold(&self, gold: usize) -> Option<usize> {
        self.pairs
            .iter()
            .find(|(g, _, _)| *g == gold)
            .map(|(_, p, _)| *p)
    }

    pub fn gold_for_pred(&self, pred: usize) -> Option<usize> {
        self.pairs
            .iter()
            .find(|(_, p, _)| *p == pred)
            .map(|(g, _, _)| *g)
    }
}

/// One-to-one matching of gold and predicted spans maximizing total token
/// overlap. Roles do not gate the matching; zero-overlap pairs are excluded.
pub fn match_spans(gold: &[Vertex], pred: &[Vertex]) -> SpanMatching {
    let n = gold.len().max(pred.len());
    if n == 0 {
        return SpanMatching { pairs: Vec::new() };
    }
    // Maximize overlap == minimize negated overlap on a zero-padded square.
    let costs: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i < gold.len() && j < pred.len() {
                        -(gold[i].overlap_tokens(&pred[j]) as i64)
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let assignment = hungarian::solve(&costs);
    let mut pairs: Vec<(usize, usize, usize)> = assignment
        .iter()
        .enumerate()
        .filter(|&(i, &j)| i < gold.len() && j < pred.len())
        .map(|(i, &j)| (i, j, gold[i].overlap_tokens(&pred[j])))
        .filter(|&(_, _, w)| w > 0)
        .collect();
    pairs.sort_unstable();
    SpanMatching { pairs }
}

type Triple = (VertexId, EdgeLabel, VertexId);

fn triple_set(g: &AnalogyGraph) -> BTreeSet<Triple> {
    g.edges()
        .iter()
        .map(|e| match e.label {
            EdgeLabel::Fact => (e.a, e.label, e.b),
            EdgeLabel::Equivalence | EdgeLabel::Analogy => {
                (e.a.min(e.b), e.label, e.a.max(e.b))
            }
        })
        .collect()
}

struct Aligned {
    /// Predicted id -> (gold id, roles agree).
    map: BTreeMap<VertexId, (VertexId, bool)>,
}

fn align(gold: &AnalogyGraph, pred: &AnalogyGraph) -> Aligned {
    let gold_ids: Vec<VertexId> = gold.vertices().keys().copied().collect();
    let pred_ids: Vec<VertexId> = pred.vertices().keys().copied().collect();
    let gold_vs: Vec<Vertex> = gold_ids.iter().map(|id| gold.vertices()[id].clone()).collect();
    let pred_vs: Vec<Vertex> = pred_ids.iter().map(|id| pred.vertices()[id].clone()).collect();
    let matching = match_spans(&gold_vs, &pred_vs);
    let map = matching
        .pairs
        .iter()
        .map(|&(gi, pi, _)| {
            let roles_agree = gold_vs[gi].role == pred_vs[pi].role;
            (pred_ids[pi], (gold_ids[gi], roles_agree))
        })
        .collect();
    Aligned { map }
}

/// Labeled vertex-edge-vertex triple PRF on transitively-closed graphs.
///
/// A predicted triple counts as correct when both endpoints match gold
/// spans, the matched endpoints carry the same roles, and gold has the same
/// labeled edge between them.
pub fn frame_prf(gold: &AnalogyGraph, pred: &AnalogyGraph) -> Prf {
    let gold = transitive_closure(gold);
    let pred = transitive_closure(pred);
    let aligned = align(&gold, &pred);
    let gold_triples = triple_set(&gold);
    let pred_triples = triple_set(&pred);
    let tp = pred_triples
        .iter()
        .filter(|(a, label, b)| {
            let (Some(&(ga, ra)), Some(&(gb, rb))) = (aligned.map.get(a), aligned.map.get(b))
            else {
                return false;
            };
            if !(ra && rb) {
                return false;
            }
            let mapped = match label {
                EdgeLabel::Fact => (ga, *label, gb),
                _ => (ga.min(gb), *label, ga.max(gb)),
            };
            gold_triples.contains(&mapped)
        })
        .count();
    Prf::from_counts(tp, pred_triples.len() - tp, gold_triples.len() - tp)
}

/// Labeled span PRF over non-VALUE vertices. VALUE spans are excluded from
/// both sides; a matched pair is correct when the roles agree.
pub fn span_prf(gold: &AnalogyGraph, pred: &AnalogyGraph) -> Prf {
    let filter = |g: &AnalogyGraph| -> Vec<Vertex> {
        g.vertices()
            .values()
            .filter(|v| !g.inventory().is_value(&v.role))
            .cloned()
            .collect()
    };
    let gold_vs = filter(gold);
    let pred_vs = filter(pred);
    let matching = match_spans(&gold_vs, &pred_vs);
    let tp = matching
        .pairs
        .iter()
        .filter(|&&(gi, pi, _)| gold_vs[gi].role == pred_vs[pi].role)
        .count();
    Prf::from_counts(tp, pred_vs.len() - tp, gold_vs.len() - tp)
}

/// Labeled edge PRF on the graphs as given. Endpoint roles are not gated
/// here; role errors are span errors.
pub fn edge_prf(gold: &AnalogyGraph, pred: &AnalogyGraph) -> Prf {
    edge_prf_with(gold, pred, false)
}

/// Labeled edge PRF, optionally on transitively-closed graphs.
pub fn edge_prf_with(gold: &AnalogyGraph, pred: &AnalogyGraph, close: bool) -> Prf {
    let (gold, pred) = if close {
        (transitive_closure(gold), transitive_closure(pred))
    } else {
        (gold.clone(), pred.clone())
    };
    let aligned = align(&gold, &pred);
    let gold_triples = triple_set(&gold);
    let pred_triples = triple_set(&pred);
    let tp = pred_triples
        .iter()
        .filter(|(a, label, b)| {
            let (Some(&(ga, _)), Some(&(gb, _))) = (aligned.map.get(a), aligned.map.get(b))
            else {
                return false;
            };
            let mapped = match label {
                EdgeLabel::Fact => (ga, *label, gb),
                _ => (ga.min(gb), *label, ga.max(gb)),
            };
            gold_triples.contains(&mapped)
        })
        .count();
    Prf::from_counts(tp, pred_triples.len() - tp, gold_triples.len() - tp)
}

/// Krippendorff's alpha result. When every annotator assigns the same single
/// label to every item, expected disagreement is zero and alpha is reported
/// as 1.0 with the degenerate flag set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Alpha {
    pub value: f64,
    pub degenerate: bool,
    pub items: usize,
}

/// Nominal-metric Krippendorff's alpha over aligned label sequences, one
/// sequence per annotator.
pub fn krippendorff_alpha<S: AsRef<str>>(annotations: &[Vec<S>]) -> Result<Alpha, EvalError> {
    if annotations.len() < 2 {
        return Err(EvalError::TooFewAnnotators(annotations.len()));
    }
    let items = annotations[0].len();
    if items == 0 {
        return Err(EvalError::NoItems);
    }
    for (index, seq) in annotations.iter().enumerate() {
        if seq.len() != items {
            return Err(EvalError::LengthMismatch {
                index,
                got: seq.len(),
                expected: items,
            });
        }
    }

    // Coincidence matrix over label categories.
    let mut categories: BTreeMap<&str, usize> = BTreeMap::new();
    for seq in annotations {
        for label in seq {
            let next = categories.len();
            categories.entry(label.as_ref()).or_insert(next);
        }
    }
    let k = categories.len();
    let m = annotations.len() as f64;
    let mut coincidence = vec![vec![0.0f64; k]; k];
    let mut counts = vec![0usize; k];
    for u in 0..items {
        for c in counts.iter_mut() {
            *c = 0;
        }
        for seq in annotations {
            counts[categories[seq[u].as_ref()]] += 1;
        }
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            for c2 in 0..k {
                if counts[c2] == 0 {
                    continue;
                }
                let pairs = if c == c2 {
                    counts[c] * (counts[c] - 1)
                } else {
                    counts[c] * counts[c2]
                };
                coincidence[c][c2] += pairs as f64 / (m - 1.0);
            }
        }
    }
    let n: f64 = coincidence.iter().flatten().sum();
    let marginals: Vec<f64> = (0..k).map(|c| coincidence[c].iter().sum()).collect();
    let observed_agreement: f64 = (0..k).map(|c| coincidence[c][c]).sum::<f64>() / n;
    let expected_agreement: f64 =
        marginals.iter().map(|nc| nc * (nc - 1.0)).sum::<f64>() / (n * (n - 1.0));
    if (1.0 - expected_agreement).abs() < f64::EPSILON {
        return Ok(Alpha {
            value: 1.0,
            degenerate: true,
            items,
        });
    }
    Ok(Alpha {
        value: (observed_agreement - expected_agreement) / (1.0 - expected_agreement),
        degenerate: false,
        items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Edge, RoleLabel};

    fn v(start: usize, end: usize, role: &str) -> Vertex {
        Vertex::new(start, end, RoleLabel::new(role))
    }

    #[test]
    fn identity_matching() {
        let spans = vec![v(0, 2, "WHOLE"), v(3, 5, "TIME")];
        let m = match_spans(&spans, &spans);
        assert_eq!(m.pairs, vec![(0, 0, 2), (1, 1, 2)]);
    }

    #[test]
    fn split_prediction_matches_higher_overlap() {
        let gold = vec![v(0, 4, "WHOLE")];
        let pred = vec![v(0, 1, "WHOLE"), v(1, 4, "WHOLE")];
        let m = match_spans(&gold, &pred);
        assert_eq!(m.pairs, vec![(0, 1, 3)]);
    }

    #[test]
    fn matching_equals_exhaustive_permutation_maximum() {
        // Deterministic 6x6 instance checked against all 720 permutations.
        let gold: Vec<Vertex> = (0..6).map(|i| v(i * 3, i * 3 + 3, "TIME")).collect();
        let pred: Vec<Vertex> = (0..6)
            .map(|i| v((5 - i) * 3 + i % 2, (5 - i) * 3 + 3, "TIME"))
            .collect();
        let m = match_spans(&gold, &pred);
        let mut best = 0usize;
        let mut perm: Vec<usize> = (0..6).collect();
        permute(&mut perm, 0, &mut |p| {
            let w: usize = p
                .iter()
                .enumerate()
                .map(|(i, &j)| gold[i].overlap_tokens(&pred[j]))
                .sum();
            best = best.max(w);
        });
        assert_eq!(m.total_overlap(), best);
    }

    fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == p.len() {
            f(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, f);
            p.swap(k, i);
        }
    }

    #[test]
    fn prf_self_comparison_is_perfect() {
        let g = crate::frames::tests::example_graph();
        for prf in [frame_prf(&g, &g), span_prf(&g, &g), edge_prf(&g, &g)] {
            assert_eq!((prf.precision, prf.recall, prf.f1), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn dropping_one_unclosable_edge_costs_recall_only() {
        let g = transitive_closure(&crate::frames::tests::example_graph());
        let total = triple_set(&g).len();
        // Remove the WHOLE-WHOLE analogy edge; closure cannot restore a
        // two-vertex analogy.
        let edges: Vec<Edge> = g
            .edges()
            .iter()
            .copied()
            .filter(|e| {
                !(e.label == EdgeLabel::Analogy
                    && !g.inventory().is_value(&g.vertices()[&e.a].role))
            })
            .collect();
        let pred = build_graph(
            g.sentence().clone(),
            g.vertices().iter().map(|(id, v)| (*id, v.clone())).collect(),
            edges,
            g.inventory().clone(),
        )
        .unwrap();
        let prf = frame_prf(&g, &pred);
        assert_eq!(prf.precision, 1.0);
        assert!((prf.recall - (total - 1) as f64 / total as f64).abs() < 1e-12);
    }

    #[test]
    fn span_prf_excludes_values_and_counts_role_flips() {
        let g = crate::frames::tests::example_graph();
        // Flip one WHOLE to AGENT among the five non-VALUE spans.
        let vertices: Vec<(VertexId, Vertex)> = g
            .vertices()
            .iter()
            .map(|(id, vert)| {
                let mut vert = vert.clone();
                if *id == VertexId(2) {
                    vert.role = RoleLabel::new("AGENT");
                }
                (*id, vert)
            })
            .collect();
        let pred = build_graph(
            g.sentence().clone(),
            vertices,
            g.edges().iter().copied().collect(),
            g.inventory().clone(),
        )
        .unwrap();
        let prf = span_prf(&g, &pred);
        assert_eq!((prf.tp, prf.fp, prf.fn_), (4, 1, 1));
        assert!((prf.precision - 0.8).abs() < 1e-12);
    }

    #[test]
    fn edge_prf_penalizes_extra_edge() {
        let g = crate::frames::tests::example_graph();
        let e = g.edges().len();
        let mut edges: Vec<Edge> = g.edges().iter().copied().collect();
        edges.push(Edge::new(VertexId(6), VertexId(4), EdgeLabel::Analogy));
        let pred = build_graph(
            g.sentence().clone(),
            g.vertices().iter().map(|(id, v)| (*id, v.clone())).collect(),
            edges,
            g.inventory().clone(),
        )
        .unwrap();
        let prf = edge_prf(&g, &pred);
        assert!((prf.precision - e as f64 / (e + 1) as f64).abs() < 1e-12);
        assert_eq!(prf.recall, 1.0);
    }

    #[test]
    fn alpha_identical_annotations() {
        let a = vec!["A", "B", "A", "B"];
        let out = krippendorff_alpha(&[a.clone(), a]).unwrap();
        assert_eq!(out.value, 1.0);
        assert!(!out.degenerate);
    }

    #[test]
    fn alpha_hand_computed_fixture() {
        // Two annotators, four items: (A,A), (A,B), (B,B), (B,B).
        // Coincidences: o_AA = 2, o_AB = o_BA = 1, o_BB = 4; n = 8,
        // n_A = 3, n_B = 5. Observed agreement 6/8; expected
        // (3*2 + 5*4) / (8*7) = 26/56. Alpha = (42-26)/(56-26) = 16/30.
        let a = vec!["A", "A", "B", "B"];
        let b = vec!["A", "B", "B", "B"];
        let out = krippendorff_alpha(&[a, b]).unwrap();
        assert!((out.value - 16.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_degenerate_single_label() {
        let a = vec!["X", "X", "X"];
        let out = krippendorff_alpha(&[a.clone(), a]).unwrap();
        assert_eq!(out.value, 1.0);
        assert!(out.degenerate);
    }

    #[test]
    fn alpha_rejects_bad_shapes() {
        assert!(matches!(
            krippendorff_alpha(&[vec!["A"]]),
            Err(EvalError::TooFewAnnotators(1))
        ));
        assert!(matches!(
            krippendorff_alpha(&[vec!["A"], vec!["A", "B"]]),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn metrics_ignore_vertex_id_relabeling() {
        let g = crate::frames::tests::example_graph();
        // Shift every id by 10.
        let vertices: Vec<(VertexId, Vertex)> = g
            .vertices()
            .iter()
            .map(|(id, v)| (VertexId(id.0 + 10), v.clone()))
            .collect();
        let edges: Vec<Edge> = g
            .edges()
            .iter()
            .map(|e| Edge::new(VertexId(e.a.0 + 10), VertexId(e.b.0 + 10), e.label))
            .collect();
        let relabeled = build_graph(
            g.sentence().clone(),
            vertices,
            edges,
            g.inventory().clone(),
        )
        .unwrap();
        let prf = frame_prf(&g, &relabeled);
        assert_eq!((prf.precision, prf.recall, prf.f1), (1.0, 1.0, 1.0));
    }
}
