//! Textual analogy parsing (TAP) toolkit.
//!
//! A TAP frame factors a set of analogous quantitative facts in a sentence
//! into *shared* content (roles common to all facts) and *compared* content
//! (roles along which the facts differ). This crate models the frame as a
//! typed graph over role-labeled token spans, and provides:
//!
//! * [`graph`] - sentences, spans, analogy graphs, canonical serialization;
//! * [`frames`] - conversion between graphs and two-tier TAP frames;
//! * [`constraints`] - structural validation and the feasibility predicate
//!   shared by the decoders;
//! * [`scores`] - the score-file contract for upstream span/edge scorers;
//! * [`decode`] - greedy and exact (branch-and-bound) decoders;
//! * [`eval`] - frame/span/edge PRF metrics and Krippendorff's alpha;
//! * [`chart`] - grouped-bar chart specs and SVG rendering from frames;
//! * [`gen`] - seeded synthetic graph and score generation for testing.

pub mod chart;
pub mod constraints;
pub mod decode;
pub mod eval;
pub mod frames;
pub mod gen;
pub mod graph;
pub mod scores;
mod util;

pub use chart::{
    emit_chart_json, emit_svg, frame_to_chart, merge_compatible, parse_value, ChartError,
    ChartSpec, QuantityValue, Series,
};
pub use constraints::{
    check, feasible, induced_assignment, validate, ConstraintId, FeasibilityContext, Violation,
};
pub use decode::{
    brute_force_decode, exact_decode, greedy_decode, objective, Assignment, Budget, DecodeError,
    DecodeOptions, DecodeResult, LabelVar, RoleVar,
};
pub use eval::{
    edge_prf, edge_prf_with, frame_prf, krippendorff_alpha, match_spans, span_prf, Alpha,
    EvalError, Prf, SpanMatching,
};
pub use frames::{
    frames_to_graph, graph_to_frames, ComparedEntry, Fact, FrameFile, SharedEntry, TapFrame,
};
pub use gen::{gen_adversarial, gen_graph, gen_scores, AdversarialInstance, GenParams};
pub use graph::{
    build_graph, emit_graph, parse_graph, transitive_closure, AnalogyGraph, Edge, EdgeLabel,
    GraphError, RoleInventory, RoleLabel, Sentence, Vertex, VertexId,
};
pub use scores::{
    emit_scores, extract_spans, parse_scores, span_distribution_from_tokens, ScoreError, ScoreSet,
    TokenScores,
};
