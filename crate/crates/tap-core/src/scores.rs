//! Score files: the contract between upstream span/edge scorers and the
//! decoders.
//!
//! A score set carries, for one sentence, optional per-token role
//! distributions, a candidate span list with per-span role distributions,
//! and one edge-label distribution per unordered span pair. Probabilities
//! are stored at nine significant digits so emitted files re-parse to
//! bit-identical values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeLabel, RoleInventory, RoleLabel, Sentence};
use crate::util::{pair_count, pair_index, quantize_prob};

/// Probability floor used when converting to log space; zero probabilities
/// clamp here instead of producing negative infinity.
pub const PROB_FLOOR: f64 = 1e-12;

/// Sum tolerance for stored distributions.
pub const SUM_TOLERANCE: f64 = 1e-6;

/// Edge-label options in storage order; NONE occupies the final slot.
pub const EDGE_OPTIONS: usize = 4;

pub fn edge_label_index(label: EdgeLabel) -> usize {
    match label {
        EdgeLabel::Fact => 0,
        EdgeLabel::Equivalence => 1,
        EdgeLabel::Analogy => 2,
    }
}

pub fn edge_label_from_index(idx: usize) -> Option<EdgeLabel> {
    match idx {
        0 => Some(EdgeLabel::Fact),
        1 => Some(EdgeLabel::Equivalence),
        2 => Some(EdgeLabel::Analogy),
        _ => None,
    }
}

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("{kind} distribution {index} sums to {sum}, expected 1")]
    DistributionNotNormalized {
        kind: &'static str,
        index: usize,
        sum: f64,
    },
}

fn check_distribution(kind: &'static str, index: usize, probs: &[f64]) -> Result<(), ScoreError> {
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(ScoreError::MalformedInput(format!(
            "{} distribution {} contains a negative or non-finite entry",
            kind, index
        )));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(ScoreError::DistributionNotNormalized { kind, index, sum });
    }
    Ok(())
}

/// Per-token distributions over roles plus an outside option (last slot).
#[derive(Debug, Clone, PartialEq)]
pub struct TokenScores {
    probs: Vec<Vec<f64>>,
}

impl TokenScores {
    pub fn new(probs: Vec<Vec<f64>>, n_roles: usize) -> Result<Self, ScoreError> {
        for (i, row) in probs.iter().enumerate() {
            if row.len() != n_roles + 1 {
                return Err(ScoreError::MalformedInput(format!(
                    "token distribution {} has {} entries, expected {} roles plus outside",
                    i,
                    row.len(),
                    n_roles
                )));
            }
            check_distribution("token", i, row)?;
        }
        let probs = probs
            .into_iter()
            .map(|row| row.into_iter().map(quantize_prob).collect())
            .collect();
        Ok(TokenScores { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }
}

/// Merge contiguous argmax role labels into spans. Outside tokens produce
/// nothing; argmax ties go to the lower option index, so a role always wins
/// a tie against the outside option.
pub fn extract_spans(
    ts: &TokenScores,
    inventory: &RoleInventory,
) -> Vec<(usize, usize, RoleLabel)> {
    let n_roles = inventory.len();
    let argmax: Vec<usize> = ts
        .probs
        .iter()
        .map(|row| {
            let mut best = 0;
            for (k, p) in row.iter().enumerate() {
                if *p > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < argmax.len() {
        let label = argmax[i];
        if label == n_roles {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < argmax.len() && argmax[j] == label {
            j += 1;
        }
        out.push((i, j, inventory.roles()[label].clone()));
        i = j;
    }
    out
}

/// Sum the token distributions of a span and renormalize. Outside mass maps
/// to the NONE slot, so the result is a span-level role distribution.
pub fn span_distribution_from_tokens(ts: &TokenScores, span: (usize, usize)) -> Vec<f64> {
    let (start, end) = span;
    assert!(start < end && end <= ts.len(), "span out of bounds");
    let width = ts.probs[0].len();
    let mut sum = vec![0.0; width];
    for row in &ts.probs[start..end] {
        for (acc, p) in sum.iter_mut().zip(row) {
            *acc += p;
        }
    }
    let total: f64 = sum.iter().sum();
    for p in sum.iter_mut() {
        *p /= total;
    }
    sum
}

/// Scores for one sentence: the interface consumed by the decoders.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    sentence: Sentence,
    inventory: RoleInventory,
    token_scores: Option<TokenScores>,
    spans: Vec<(usize, usize)>,
    /// Per span: distribution over roles in inventory order plus NONE last.
    span_probs: Vec<Vec<f64>>,
    /// Per unordered span pair in dense order: [FACT, EQUIVALENCE, ANALOGY,
    /// NONE].
    edge_probs: Vec<[f64; 4]>,
    raw: bool,
}

impl ScoreSet {
    /// Build and validate a score set. `edge_probs` is indexed like the
    /// dense pair layout of the span list.
    pub fn new(
        sentence: Sentence,
        inventory: RoleInventory,
        token_scores: Option<TokenScores>,
        spans: Vec<(usize, usize)>,
        span_probs: Vec<Vec<f64>>,
        edge_probs: Vec<[f64; 4]>,
        raw: bool,
    ) -> Result<Self, ScoreError> {
        sentence
            .check()
            .map_err(|e| ScoreError::MalformedInput(e.to_string()))?;
        let n_roles = inventory.len();
        if let Some(ts) = &token_scores {
            if ts.len() != sentence.len() {
                return Err(ScoreError::MalformedInput(format!(
                    "{} token distributions for {} tokens",
                    ts.len(),
                    sentence.len()
                )));
            }
        }
        for (i, &(start, end)) in spans.iter().enumerate() {
            if !(start < end && end <= sentence.len()) {
                return Err(ScoreError::MalformedInput(format!(
                    "candidate span {} ({}, {}) out of bounds",
                    i, start, end
                )));
            }
        }
        if !raw {
            for i in 0..spans.len() {
                for j in (i + 1)..spans.len() {
                    let (s1, e1) = spans[i];
                    let (s2, e2) = spans[j];
                    if s1 < e2 && s2 < e1 {
                        return Err(ScoreError::MalformedInput(format!(
                            "candidate spans {} and {} overlap; overlapping candidates \
                             require the raw flag",
                            i, j
                        )));
                    }
                }
            }
        }
        if span_probs.len() != spans.len() {
            return Err(ScoreError::MalformedInput(format!(
                "{} span distributions for {} spans",
                span_probs.len(),
                spans.len()
            )));
        }
        for (i, row) in span_probs.iter().enumerate() {
            if row.len() != n_roles + 1 {
                return Err(ScoreError::MalformedInput(format!(
                    "span distribution {} has {} entries, expected {} roles plus NONE",
                    i,
                    row.len(),
                    n_roles
                )));
            }
            check_distribution("span", i, row)?;
        }
        if edge_probs.len() != pair_count(spans.len()) {
            return Err(ScoreError::MalformedInput(format!(
                "{} edge distributions for {} span pairs",
                edge_probs.len(),
                pair_count(spans.len())
            )));
        }
        for (i, row) in edge_probs.iter().enumerate() {
            check_distribution("edge", i, row)?;
        }
        let span_probs = span_probs
            .into_iter()
            .map(|row| row.into_iter().map(quantize_prob).collect())
            .collect();
        let edge_probs = edge_probs
            .into_iter()
            .map(|row| row.map(quantize_prob))
            .collect();
        Ok(ScoreSet {
            sentence,
            inventory,
            token_scores,
            spans,
            span_probs,
            edge_probs,
            raw,
        })
    }

    pub fn sentence(&self) -> &Sentence {
        &self.sentence
    }

    pub fn inventory(&self) -> &RoleInventory {
        &self.inventory
    }

    pub fn token_scores(&self) -> Option<&TokenScores> {
        self.token_scores.as_ref()
    }

    pub fn spans(&self) -> &[(usize, usize)] {
        &self.spans
    }

    pub fn n_spans(&self) -> usize {
        self.spans.len()
    }

    pub fn raw(&self) -> bool {
        self.raw
    }

    /// Role distribution of span `i`: roles in inventory order, NONE last.
    pub fn span_probs(&self, i: usize) -> &[f64] {
        &self.span_probs[i]
    }

    /// Edge-label distribution of the pair (i, j), i < j.
    pub fn edge_probs(&self, i: usize, j: usize) -> &[f64; 4] {
        &self.edge_probs[pair_index(self.spans.len(), i, j)]
    }
}

#[derive(Serialize, Deserialize)]
struct FileSpan {
    start: usize,
    end: usize,
    scores: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
struct FileEdge {
    a: usize,
    b: usize,
    scores: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
struct FileScores {
    sentence: Sentence,
    inventory: RoleInventory,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    token_scores: Option<Vec<Vec<f64>>>,
    spans: Vec<FileSpan>,
    edges: Vec<FileEdge>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    raw: bool,
}

fn distribution_from_map(
    map: &BTreeMap<String, f64>,
    options: &[String],
    what: &str,
    index: usize,
) -> Result<Vec<f64>, ScoreError> {
    if map.len() != options.len() {
        return Err(ScoreError::MalformedInput(format!(
            "{} {} lists {} options, expected {}",
            what,
            index,
            map.len(),
            options.len()
        )));
    }
    options
        .iter()
        .map(|name| {
            map.get(name).copied().ok_or_else(|| {
                ScoreError::MalformedInput(format!("{} {} is missing option {}", what, index, name))
            })
        })
        .collect()
}

/// Parse a score file. Probabilities are quantized to nine significant
/// digits, matching the emission precision.
pub fn parse_scores(bytes: &[u8]) -> Result<ScoreSet, ScoreError> {
    let file: FileScores =
        serde_json::from_slice(bytes).map_err(|e| ScoreError::MalformedInput(e.to_string()))?;
    let n_roles = file.inventory.len();
    let n_spans = file.spans.len();

    let role_options: Vec<String> = file
        .inventory
        .roles()
        .iter()
        .map(|r| r.as_str().to_string())
        .chain(std::iter::once("NONE".to_string()))
        .collect();
    let edge_options: Vec<String> = ["FACT", "EQUIVALENCE", "ANALOGY", "NONE"]
        .iter()
        .map(|s| s.to_string())
        .collect();

    let mut spans = Vec::with_capacity(n_spans);
    let mut span_probs = Vec::with_capacity(n_spans);
    for (i, s) in file.spans.iter().enumerate() {
        spans.push((s.start, s.end));
        span_probs.push(distribution_from_map(&s.scores, &role_options, "span", i)?);
    }

    let mut edge_probs: Vec<Option<[f64; 4]>> = vec![None; pair_count(n_spans)];
    for (i, e) in file.edges.iter().enumerate() {
        if e.a >= e.b || e.b >= n_spans {
            return Err(ScoreError::MalformedInput(format!(
                "edge {} references pair ({}, {}); indices must satisfy a < b < {}",
                i, e.a, e.b, n_spans
            )));
        }
        let dist = distribution_from_map(&e.scores, &edge_options, "edge", i)?;
        let slot = &mut edge_probs[pair_index(n_spans, e.a, e.b)];
        if slot.is_some() {
            return Err(ScoreError::MalformedInput(format!(
                "pair ({}, {}) appears more than once",
                e.a, e.b
            )));
        }
        *slot = Some([dist[0], dist[1], dist[2], dist[3]]);
    }
    let edge_probs: Vec<[f64; 4]> = edge_probs
        .into_iter()
        .enumerate()
        .map(|(k, slot)| {
            slot.ok_or_else(|| {
                ScoreError::MalformedInput(format!("pair at dense index {} is missing", k))
            })
        })
        .collect::<Result<_, _>>()?;

    let token_scores = file
        .token_scores
        .map(|probs| TokenScores::new(probs, n_roles))
        .transpose()?;

    ScoreSet::new(
        file.sentence,
        file.inventory,
        token_scores,
        spans,
        span_probs,
        edge_probs,
        file.raw,
    )
}

/// Emit a score set as a single JSON line with sorted keys. Emission and
/// parsing are mutually inverse on any score set built by this crate.
pub fn emit_scores(s: &ScoreSet) -> Vec<u8> {
    let role_names: Vec<String> = s
        .inventory
        .roles()
        .iter()
        .map(|r| r.as_str().to_string())
        .chain(std::iter::once("NONE".to_string()))
        .collect();
    let edge_names = ["FACT", "EQUIVALENCE", "ANALOGY", "NONE"];
    let file = FileScores {
        sentence: s.sentence.clone(),
        inventory: s.inventory.clone(),
        token_scores: s.token_scores.as_ref().map(|ts| ts.probs.clone()),
        spans: s
            .spans
            .iter()
            .zip(&s.span_probs)
            .map(|(&(start, end), probs)| FileSpan {
                start,
                end,
                scores: role_names.iter().cloned().zip(probs.iter().copied()).collect(),
            })
            .collect(),
        edges: (0..s.n_spans())
            .flat_map(|a| ((a + 1)..s.n_spans()).map(move |b| (a, b)))
            .map(|(a, b)| FileEdge {
                a,
                b,
                scores: edge_names
                    .iter()
                    .map(|n| n.to_string())
                    .zip(s.edge_probs(a, b).iter().copied())
                    .collect(),
            })
            .collect(),
        raw: s.raw,
    };
    let value = serde_json::to_value(&file).expect("score serialization cannot fail");
    let mut bytes = serde_json::to_vec(&value).expect("value serialization cannot fail");
    bytes.push(b'\n');
    bytes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv() -> RoleInventory {
        RoleInventory::new(["VALUE", "WHOLE", "TIME"], "VALUE").unwrap()
    }

    fn sent(n: usize) -> Sentence {
        Sentence::new("s", (0..n).map(|i| format!("t{}", i)).collect()).unwrap()
    }

    #[test]
    fn extract_spans_merges_runs() {
        // Argmax labels: O, VALUE, VALUE, O, WHOLE.
        let rows = vec![
            vec![0.1, 0.1, 0.1, 0.7],
            vec![0.7, 0.1, 0.1, 0.1],
            vec![0.7, 0.1, 0.1, 0.1],
            vec![0.1, 0.1, 0.1, 0.7],
            vec![0.1, 0.7, 0.1, 0.1],
        ];
        let ts = TokenScores::new(rows, 3).unwrap();
        let spans = extract_spans(&ts, &inv());
        assert_eq!(
            spans,
            vec![
                (1, 3, RoleLabel::new("VALUE")),
                (4, 5, RoleLabel::new("WHOLE")),
            ]
        );
    }

    #[test]
    fn extract_spans_all_outside() {
        let rows = vec![vec![0.0, 0.0, 0.0, 1.0]; 4];
        let ts = TokenScores::new(rows, 3).unwrap();
        assert!(extract_spans(&ts, &inv()).is_empty());
    }

    #[test]
    fn extract_spans_breaks_ties_by_inventory_order() {
        // VALUE and WHOLE tie; VALUE has the lower inventory index. A role
        // tying with outside also goes to the role.
        let rows = vec![vec![0.4, 0.4, 0.1, 0.1], vec![0.0, 0.0, 0.5, 0.5]];
        let ts = TokenScores::new(rows, 3).unwrap();
        let spans = extract_spans(&ts, &inv());
        assert_eq!(
            spans,
            vec![
                (0, 1, RoleLabel::new("VALUE")),
                (1, 2, RoleLabel::new("TIME")),
            ]
        );
    }

    #[test]
    fn span_distribution_sums_and_renormalizes() {
        let rows = vec![
            vec![0.5, 0.3, 0.1, 0.1],
            vec![0.1, 0.5, 0.2, 0.2],
            vec![0.2, 0.2, 0.3, 0.3],
        ];
        let ts = TokenScores::new(rows.clone(), 3).unwrap();
        // Recompute with a plain loop as the oracle.
        let mut expect = vec![0.0; 4];
        for row in &rows[0..2] {
            for (acc, p) in expect.iter_mut().zip(row) {
                *acc += quantize_prob(*p);
            }
        }
        let total: f64 = expect.iter().sum();
        for e in expect.iter_mut() {
            *e /= total;
        }
        let got = span_distribution_from_tokens(&ts, (0, 2));
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-12);
        }
        let sum: f64 = got.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_token_span_maps_outside_to_none() {
        let rows = vec![vec![0.25, 0.25, 0.25, 0.25]];
        let ts = TokenScores::new(rows, 3).unwrap();
        let dist = span_distribution_from_tokens(&ts, (0, 1));
        assert_eq!(dist, vec![0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn rejects_unnormalized_distribution() {
        let err = ScoreSet::new(
            sent(2),
            inv(),
            None,
            vec![(0, 1)],
            vec![vec![0.4, 0.2, 0.1, 0.1]],
            vec![],
            false,
        )
        .unwrap_err();
        match err {
            ScoreError::DistributionNotNormalized { index, sum, .. } => {
                assert_eq!(index, 0);
                assert!((sum - 0.8).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_pair() {
        let line = r#"{"sentence":{"id":"s","tokens":["a","b"]},
            "inventory":{"roles":["VALUE","TIME"],"value_role":"VALUE"},
            "spans":[{"start":0,"end":1,"scores":{"VALUE":1.0,"TIME":0.0,"NONE":0.0}},
                     {"start":1,"end":2,"scores":{"VALUE":0.0,"TIME":1.0,"NONE":0.0}}],
            "edges":[]}"#;
        let err = parse_scores(line.as_bytes()).unwrap_err();
        assert!(matches!(err, ScoreError::MalformedInput(_)));
    }

    #[test]
    fn rejects_overlap_without_raw_flag() {
        let err = ScoreSet::new(
            sent(3),
            inv(),
            None,
            vec![(0, 2), (1, 3)],
            vec![vec![1.0, 0.0, 0.0, 0.0]; 2],
            vec![[0.25, 0.25, 0.25, 0.25]],
            false,
        )
        .unwrap_err();
        assert!(matches!(err, ScoreError::MalformedInput(_)));

        let ok = ScoreSet::new(
            sent(3),
            inv(),
            None,
            vec![(0, 2), (1, 3)],
            vec![vec![1.0, 0.0, 0.0, 0.0]; 2],
            vec![[0.25, 0.25, 0.25, 0.25]],
            true,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn emit_parse_round_trip() {
        let s = ScoreSet::new(
            sent(4),
            inv(),
            Some(TokenScores::new(vec![vec![0.25, 0.25, 0.25, 0.25]; 4], 3).unwrap()),
            vec![(0, 1), (2, 3)],
            vec![
                vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0],
                vec![0.1, 0.2, 0.3, 0.4],
            ],
            vec![[0.7, 0.1, 0.1, 0.1]],
            false,
        )
        .unwrap();
        let bytes = emit_scores(&s);
        let parsed = parse_scores(&bytes).unwrap();
        assert_eq!(parsed, s);
        assert_eq!(emit_scores(&parsed), bytes);
    }
}
