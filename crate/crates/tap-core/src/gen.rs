//! Seeded synthetic graphs and score sets.
//!
//! Generated sentences use placeholder tokens that encode their gold role
//! ("VAL_3", "WHO_5"), so decoded frames, titles and charts stay readable.
//! Every generated graph satisfies all structural constraints by
//! construction, and at noise zero every true decision carries probability
//! one, so decoders must recover the gold graph exactly.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::frames::{ComparedEntry, Fact, SharedEntry, TapFrame};
use crate::graph::{
    build_graph, AnalogyGraph, Edge, EdgeLabel, RoleInventory, RoleLabel, Sentence, Vertex,
    VertexId,
};
use crate::scores::{edge_label_index, ScoreSet, TokenScores};
use crate::util::{pair_count, pair_index, quantize_prob};

/// Knobs for synthetic instance generation.
#[derive(Debug, Clone)]
pub struct GenParams {
    pub seed: u64,
    pub n_frames: RangeInclusive<usize>,
    pub facts_per_frame: RangeInclusive<usize>,
    /// Non-VALUE roles per frame, drawn without replacement from the
    /// inventory.
    pub roles_per_fact: RangeInclusive<usize>,
    /// Probability that an extra role becomes shared content (scope or an
    /// equivalence cluster) instead of compared or fact-private content.
    pub shared_fraction: f64,
    pub noise: f64,
    pub distractor_count: usize,
    pub inventory: RoleInventory,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            n_frames: 1..=1,
            facts_per_frame: 2..=3,
            roles_per_fact: 1..=2,
            shared_fraction: 0.3,
            noise: 0.0,
            distractor_count: 2,
            inventory: RoleInventory::default_roles(),
        }
    }
}

fn sample(rng: &mut ChaCha8Rng, range: &RangeInclusive<usize>) -> usize {
    if range.start() == range.end() {
        *range.start()
    } else {
        rng.gen_range(range.clone())
    }
}

enum RolePlan {
    /// Compared content covering the given facts (the first plan always
    /// covers all of them).
    Compared(Vec<usize>),
    /// One vertex attached to every fact.
    Scope,
    /// An equivalence cluster with one member per covered fact.
    Equivalent(Vec<usize>),
    /// An argument of a single fact.
    Private(usize),
}

fn pick_subset(rng: &mut ChaCha8Rng, n_facts: usize) -> Vec<usize> {
    let size = rng.gen_range(2..=n_facts);
    let mut idx: Vec<usize> = (0..n_facts).collect();
    for i in 0..size {
        let j = rng.gen_range(i..n_facts);
        idx.swap(i, j);
    }
    let mut subset = idx[..size].to_vec();
    subset.sort_unstable();
    subset
}

struct Layout {
    tokens: Vec<String>,
    vertices: Vec<(VertexId, Vertex)>,
    next_vertex: u32,
}

impl Layout {
    fn push_vertex(&mut self, rng: &mut ChaCha8Rng, role: &RoleLabel, is_value: bool) -> VertexId {
        let id = VertexId(self.next_vertex);
        self.next_vertex += 1;
        let abbrev: String = role.as_str().chars().take(3).collect();
        let start = self.tokens.len();
        self.tokens.push(format!("{}_{}", abbrev, id.0));
        // VALUE spans stay single-token so their text parses as a number.
        if !is_value && rng.gen_bool(0.3) {
            self.tokens.push(format!("{}_{}b", abbrev, id.0));
        }
        let end = self.tokens.len();
        self.vertices
            .push((id, Vertex::new(start, end, role.clone())));
        if rng.gen_bool(0.4) {
            self.tokens.push(format!("PAD_{}", self.tokens.len()));
        }
        id
    }
}

/// Generate a valid graph and its ground-truth frames, deterministically
/// per seed.
pub fn gen_graph(p: &GenParams) -> (AnalogyGraph, Vec<TapFrame>) {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let inventory = p.inventory.clone();
    let value_role = inventory.value_role().clone();
    let nonvalue_roles: Vec<RoleLabel> = inventory
        .roles()
        .iter()
        .filter(|r| !inventory.is_value(r))
        .cloned()
        .collect();

    let mut layout = Layout {
        tokens: Vec::new(),
        vertices: Vec::new(),
        next_vertex: 0,
    };
    let mut edges: Vec<Edge> = Vec::new();
    let mut frames: Vec<TapFrame> = Vec::new();

    let n_frames = sample(&mut rng, &p.n_frames);
    for _ in 0..n_frames {
        let n_facts = sample(&mut rng, &p.facts_per_frame).max(2);
        let n_roles = sample(&mut rng, &p.roles_per_fact)
            .clamp(1, nonvalue_roles.len());

        // Distinct roles per frame sidestep unique-facts interactions.
        let mut role_pool: Vec<usize> = (0..nonvalue_roles.len()).collect();
        for i in 0..n_roles {
            let j = rng.gen_range(i..role_pool.len());
            role_pool.swap(i, j);
        }
        let roles: Vec<RoleLabel> = role_pool[..n_roles]
            .iter()
            .map(|&i| nonvalue_roles[i].clone())
            .collect();

        let mut plans: Vec<(RoleLabel, RolePlan)> = Vec::new();
        plans.push((roles[0].clone(), RolePlan::Compared((0..n_facts).collect())));
        for role in roles.iter().skip(1) {
            let u: f64 = rng.gen();
            let plan = if u < p.shared_fraction {
                if rng.gen_bool(0.5) {
                    RolePlan::Scope
                } else {
                    RolePlan::Equivalent(pick_subset(&mut rng, n_facts))
                }
            } else if rng.gen_bool(0.3) {
                RolePlan::Compared(pick_subset(&mut rng, n_facts))
            } else {
                RolePlan::Private(rng.gen_range(0..n_facts))
            };
            plans.push((role.clone(), plan));
        }

        // Scope vertices first, then per fact its value and arguments.
        let mut scope_ids: Vec<(RoleLabel, VertexId)> = Vec::new();
        for (role, plan) in &plans {
            if matches!(plan, RolePlan::Scope) {
                scope_ids.push((role.clone(), layout.push_vertex(&mut rng, role, false)));
            }
        }
        let mut value_ids: Vec<VertexId> = Vec::new();
        let mut members: BTreeMap<usize, Vec<(usize, VertexId)>> = BTreeMap::new();
        for fact in 0..n_facts {
            value_ids.push(layout.push_vertex(&mut rng, &value_role, true));
            for (pi, (role, plan)) in plans.iter().enumerate() {
                let covered = match plan {
                    RolePlan::Compared(facts) | RolePlan::Equivalent(facts) => {
                        facts.contains(&fact)
                    }
                    RolePlan::Private(f) => *f == fact,
                    RolePlan::Scope => false,
                };
                if covered {
                    let id = layout.push_vertex(&mut rng, role, false);
                    members.entry(pi).or_default().push((fact, id));
                }
            }
        }

        // Edges: FACT stars, the VALUE analogy clique, and per-plan links.
        for (fact, &v) in value_ids.iter().enumerate() {
            for (_, id) in scope_ids.iter() {
                edges.push(Edge::new(v, *id, EdgeLabel::Fact));
            }
            for list in members.values() {
                for &(f, id) in list {
                    if f == fact {
                        edges.push(Edge::new(v, id, EdgeLabel::Fact));
                    }
                }
            }
        }
        for i in 0..value_ids.len() {
            for j in (i + 1)..value_ids.len() {
                edges.push(Edge::new(value_ids[i], value_ids[j], EdgeLabel::Analogy));
            }
        }
        for (pi, (_, plan)) in plans.iter().enumerate() {
            let Some(list) = members.get(&pi) else { continue };
            let label = match plan {
                RolePlan::Compared(_) => EdgeLabel::Analogy,
                RolePlan::Equivalent(_) => EdgeLabel::Equivalence,
                _ => continue,
            };
            for i in 0..list.len() {
                for j in (i + 1)..list.len() {
                    edges.push(Edge::new(list[i].1, list[j].1, label));
                }
            }
        }

        // Ground-truth frame.
        let vertex_of: BTreeMap<VertexId, Vertex> = layout.vertices.iter().cloned().collect();
        let mut facts: Vec<Fact> = value_ids
            .iter()
            .map(|v| Fact {
                value: vertex_of[v].clone(),
                arguments: BTreeMap::new(),
            })
            .collect();
        for (fact_idx, fact) in facts.iter_mut().enumerate() {
            for (role, id) in &scope_ids {
                fact.arguments
                    .entry(role.clone())
                    .or_default()
                    .push(vertex_of[id].clone());
            }
            for (pi, list) in &members {
                let role = plans[*pi].0.clone();
                for &(f, id) in list {
                    if f == fact_idx {
                        fact.arguments
                            .entry(role.clone())
                            .or_default()
                            .push(vertex_of[&id].clone());
                    }
                }
            }
        }
        let mut shared: Vec<SharedEntry> = scope_ids
            .iter()
            .map(|(role, id)| SharedEntry {
                role: role.clone(),
                cluster: vec![vertex_of[id].clone()],
            })
            .collect();
        let mut compared: Vec<ComparedEntry> = vec![ComparedEntry {
            role: value_role.clone(),
            slots: value_ids.iter().map(|v| vec![vertex_of[v].clone()]).collect(),
        }];
        for (pi, (role, plan)) in plans.iter().enumerate() {
            let Some(list) = members.get(&pi) else { continue };
            match plan {
                RolePlan::Compared(_) => {
                    let mut slots: Vec<Vec<Vertex>> = vec![Vec::new(); n_facts];
                    for &(f, id) in list {
                        slots[f].push(vertex_of[&id].clone());
                    }
                    compared.push(ComparedEntry {
                        role: role.clone(),
                        slots,
                    });
                }
                RolePlan::Equivalent(_) => {
                    shared.push(SharedEntry {
                        role: role.clone(),
                        cluster: list.iter().map(|(_, id)| vertex_of[id].clone()).collect(),
                    });
                }
                _ => {}
            }
        }
        let mut frame = TapFrame {
            facts,
            shared,
            compared,
        };
        frame.normalize(&inventory);
        frames.push(frame);
    }

    if layout.tokens.is_empty() {
        layout.tokens.push("PAD_0".into());
    }
    let sentence = Sentence::new(format!("gen-{}", p.seed), layout.tokens.clone())
        .expect("generated sentences are well-formed");
    let graph = build_graph(sentence, layout.vertices, edges, inventory)
        .expect("generated graphs are well-formed");
    debug_assert!(crate::constraints::validate(&graph).is_empty());
    (graph, frames)
}

/// Redistribute `noise` probability mass from the true option onto wrong
/// options with seeded weights; the row is quantized for file round-trips.
fn noisy_row(rng: &mut ChaCha8Rng, width: usize, true_idx: usize, noise: f64) -> Vec<f64> {
    let mut row = vec![0.0; width];
    if noise <= 0.0 {
        row[true_idx] = 1.0;
        return row;
    }
    let weights: Vec<f64> = (0..width)
        .map(|k| if k == true_idx { 0.0 } else { rng.gen::<f64>() })
        .collect();
    let total: f64 = weights.iter().sum();
    row[true_idx] = quantize_prob(1.0 - noise);
    if total <= 0.0 {
        let share = noise / (width - 1) as f64;
        for (k, slot) in row.iter_mut().enumerate() {
            if k != true_idx {
                *slot = quantize_prob(share);
            }
        }
    } else {
        for k in 0..width {
            if k != true_idx {
                row[k] = quantize_prob(noise * weights[k] / total);
            }
        }
    }
    row
}

/// Derive a score set from a gold graph: candidates are the gold spans plus
/// non-overlapping distractors whose true role is NONE, with `noise`
/// probability mass moved to wrong options.
pub fn gen_scores(g: &AnalogyGraph, noise: f64, seed: u64, distractors: usize) -> ScoreSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inventory = g.inventory().clone();
    let n_roles = inventory.len();
    let sentence = g.sentence().clone();

    let mut covered = vec![false; sentence.len()];
    for v in g.vertices().values() {
        for c in covered.iter_mut().take(v.end).skip(v.start) {
            *c = true;
        }
    }
    let mut free: Vec<usize> = (0..sentence.len()).filter(|&i| !covered[i]).collect();
    for i in 0..free.len() {
        let j = rng.gen_range(i..free.len());
        free.swap(i, j);
    }
    free.truncate(distractors);
    free.sort_unstable();

    let mut spans: Vec<(usize, usize, Option<(usize, VertexId)>)> = g
        .vertices()
        .iter()
        .map(|(id, v)| {
            let role = inventory.index_of(&v.role).expect("gold roles in inventory");
            (v.start, v.end, Some((role, *id)))
        })
        .collect();
    spans.extend(free.iter().map(|&i| (i, i + 1, None)));
    spans.sort_by_key(|&(s, e, _)| (s, e));

    let id_at: BTreeMap<VertexId, usize> = spans
        .iter()
        .enumerate()
        .filter_map(|(i, (_, _, info))| info.map(|(_, id)| (id, i)))
        .collect();

    let n = spans.len();
    let span_probs: Vec<Vec<f64>> = spans
        .iter()
        .map(|(_, _, info)| {
            let true_idx = info.map(|(role, _)| role).unwrap_or(n_roles);
            noisy_row(&mut rng, n_roles + 1, true_idx, noise)
        })
        .collect();

    let mut true_labels = vec![3usize; pair_count(n)];
    for e in g.edges() {
        let (i, j) = (id_at[&e.a], id_at[&e.b]);
        true_labels[pair_index(n, i.min(j), i.max(j))] = edge_label_index(e.label);
    }
    let edge_probs: Vec<[f64; 4]> = true_labels
        .iter()
        .map(|&t| {
            let row = noisy_row(&mut rng, 4, t, noise);
            [row[0], row[1], row[2], row[3]]
        })
        .collect();

    let token_role: Vec<usize> = {
        let mut roles = vec![n_roles; sentence.len()];
        for v in g.vertices().values() {
            let role = inventory.index_of(&v.role).unwrap();
            for r in roles.iter_mut().take(v.end).skip(v.start) {
                *r = role;
            }
        }
        roles
    };
    let token_rows: Vec<Vec<f64>> = token_role
        .iter()
        .map(|&t| noisy_row(&mut rng, n_roles + 1, t, noise))
        .collect();
    let token_scores = TokenScores::new(token_rows, n_roles).expect("generated rows normalized");

    ScoreSet::new(
        sentence,
        inventory,
        Some(token_scores),
        spans.iter().map(|&(s, e, _)| (s, e)).collect(),
        span_probs,
        edge_probs,
        false,
    )
    .expect("generated scores are well-formed")
}

/// An adversarial instance: scores whose argmax graph breaks a structural
/// constraint, together with the intended feasible optimum.
#[derive(Debug, Clone)]
pub struct AdversarialInstance {
    pub scores: ScoreSet,
    pub intended: AnalogyGraph,
}

/// Build an instance whose argmax decoding needs repair.
///
/// Even seeds produce an equivalence trap: the argmax links two TIME spans
/// by EQUIVALENCE under one value, leaving the second value without a fact.
/// Odd seeds produce a quadrangle trap: two analogous values whose argmax
/// lacks the required analogous argument pair.
pub fn gen_adversarial(seed: u64) -> AdversarialInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = |rng: &mut ChaCha8Rng, base: f64| quantize_prob(base + rng.gen::<f64>() * 0.02);
    let inventory = RoleInventory::new(["VALUE", "WHOLE", "TIME"], "VALUE").unwrap();
    let value = RoleLabel::new("VALUE");

    // Role rows: [VALUE, WHOLE, TIME, NONE]; edge rows: [F, E, A, N].
    let row4 = |main: (usize, f64), second: (usize, f64)| -> Vec<f64> {
        let mut row = vec![0.0; 4];
        row[main.0] = main.1;
        row[second.0] = second.1;
        let rest: f64 = (1.0 - main.1 - second.1) / 2.0;
        for slot in row.iter_mut() {
            if *slot == 0.0 {
                *slot = quantize_prob(rest.max(0.0));
            }
        }
        row
    };

    if seed % 2 == 0 {
        // Equivalence trap over V1 T1 V2 T2.
        let tokens = vec!["VAL_0".into(), "TIM_1".into(), "VAL_2".into(), "TIM_3".into()];
        let sentence = Sentence::new(format!("adv-eq-{}", seed), tokens).unwrap();
        let time = RoleLabel::new("TIME");
        let vertices = vec![
            (VertexId(0), Vertex::new(0, 1, value.clone())),
            (VertexId(1), Vertex::new(1, 2, time.clone())),
            (VertexId(2), Vertex::new(2, 3, value.clone())),
            (VertexId(3), Vertex::new(3, 4, time.clone())),
        ];
        let edges = vec![
            Edge::new(VertexId(0), VertexId(1), EdgeLabel::Fact),
            Edge::new(VertexId(2), VertexId(3), EdgeLabel::Fact),
            Edge::new(VertexId(0), VertexId(2), EdgeLabel::Analogy),
            Edge::new(VertexId(1), VertexId(3), EdgeLabel::Analogy),
        ];
        let intended =
            build_graph(sentence.clone(), vertices, edges, inventory.clone()).unwrap();

        let hi = jitter(&mut rng, 0.88);
        let span_probs = vec![
            row4((0, hi), (3, 0.04)),                       // V1: VALUE
            row4((2, hi), (3, 0.04)),                       // T1: TIME
            row4((0, jitter(&mut rng, 0.55)), (3, 0.3)),    // V2: VALUE, tempting NONE
            row4((2, hi), (3, 0.04)),                       // T2: TIME
        ];
        // Pairs in dense order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
        let e = |main: (usize, f64), second: (usize, f64)| {
            let r = row4(main, second);
            [r[0], r[1], r[2], r[3]]
        };
        let edge_probs = vec![
            e((0, hi), (3, 0.06)),                               // V1-T1: FACT
            e((2, jitter(&mut rng, 0.8)), (3, 0.1)),             // V1-V2: ANALOGY
            e((0, jitter(&mut rng, 0.52)), (3, 0.42)),           // V1-T2: FACT trap
            e((3, hi), (0, 0.06)),                               // T1-V2: NONE
            e((1, jitter(&mut rng, 0.52)), (2, 0.42)),           // T1-T2: EQUIV trap
            e((3, jitter(&mut rng, 0.52)), (0, 0.42)),           // V2-T2: NONE trap
        ];
        let scores = ScoreSet::new(
            sentence,
            inventory,
            None,
            vec![(0, 1), (1, 2), (2, 3), (3, 4)],
            span_probs,
            edge_probs,
            false,
        )
        .unwrap();
        AdversarialInstance { scores, intended }
    } else {
        // Quadrangle trap over V1 W1 V2 W2, with W1 and W2 sharing text.
        let tokens = vec!["VAL_0".into(), "WHO_X".into(), "VAL_2".into(), "WHO_X".into()];
        let sentence = Sentence::new(format!("adv-quad-{}", seed), tokens).unwrap();
        let whole = RoleLabel::new("WHOLE");
        let vertices = vec![
            (VertexId(0), Vertex::new(0, 1, value.clone())),
            (VertexId(1), Vertex::new(1, 2, whole.clone())),
            (VertexId(2), Vertex::new(2, 3, value.clone())),
            (VertexId(3), Vertex::new(3, 4, whole.clone())),
        ];
        let edges = vec![
            Edge::new(VertexId(0), VertexId(1), EdgeLabel::Fact),
            Edge::new(VertexId(2), VertexId(3), EdgeLabel::Fact),
            Edge::new(VertexId(0), VertexId(2), EdgeLabel::Analogy),
            Edge::new(VertexId(1), VertexId(3), EdgeLabel::Analogy),
        ];
        let intended =
            build_graph(sentence.clone(), vertices, edges, inventory.clone()).unwrap();

        let hi = jitter(&mut rng, 0.88);
        let span_probs = vec![
            row4((0, hi), (3, 0.04)),
            row4((1, hi), (3, 0.04)),
            row4((0, hi), (3, 0.04)),
            row4((1, hi), (3, 0.04)),
        ];
        let e = |main: (usize, f64), second: (usize, f64)| {
            let r = row4(main, second);
            [r[0], r[1], r[2], r[3]]
        };
        let edge_probs = vec![
            e((0, hi), (3, 0.06)),                               // V1-W1: FACT
            e((2, jitter(&mut rng, 0.8)), (3, 0.1)),             // V1-V2: ANALOGY
            e((3, hi), (0, 0.06)),                               // V1-W2: NONE
            e((3, hi), (0, 0.06)),                               // W1-V2: NONE
            e((3, jitter(&mut rng, 0.55)), (2, 0.38)),           // W1-W2: NONE trap
            e((0, hi), (3, 0.06)),                               // V2-W2: FACT
        ];
        let scores = ScoreSet::new(
            sentence,
            inventory,
            None,
            vec![(0, 1), (1, 2), (2, 3), (3, 4)],
            span_probs,
            edge_probs,
            false,
        )
        .unwrap();
        AdversarialInstance { scores, intended }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::validate;
    use crate::frames::graph_to_frames;
    use crate::scores::{emit_scores, parse_scores};

    #[test]
    fn generated_graphs_validate_and_match_recorded_frames() {
        for seed in 0..200 {
            let params = GenParams {
                seed,
                n_frames: 1..=2,
                ..GenParams::default()
            };
            let (g, frames) = gen_graph(&params);
            assert!(validate(&g).is_empty(), "seed {} produced violations", seed);
            let derived = graph_to_frames(&g).unwrap();
            assert_eq!(derived, frames, "frame mismatch at seed {}", seed);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let p = GenParams {
            seed: 7,
            noise: 0.3,
            ..GenParams::default()
        };
        let (g1, f1) = gen_graph(&p);
        let (g2, f2) = gen_graph(&p);
        assert_eq!(g1, g2);
        assert_eq!(f1, f2);
        let s1 = gen_scores(&g1, 0.3, 7, 2);
        let s2 = gen_scores(&g2, 0.3, 7, 2);
        assert_eq!(emit_scores(&s1), emit_scores(&s2));
    }

    #[test]
    fn zero_shared_fraction_generates_no_equivalence_or_scope() {
        for seed in 0..50 {
            let p = GenParams {
                seed,
                shared_fraction: 0.0,
                roles_per_fact: 2..=3,
                ..GenParams::default()
            };
            let (g, _) = gen_graph(&p);
            assert!(g
                .edges()
                .iter()
                .all(|e| e.label != EdgeLabel::Equivalence));
            // No argument attaches to more than one value.
            let mut fact_degree: BTreeMap<VertexId, usize> = BTreeMap::new();
            for e in g.edges() {
                if e.label == EdgeLabel::Fact {
                    *fact_degree.entry(e.b).or_default() += 1;
                }
            }
            assert!(fact_degree.values().all(|&d| d == 1), "seed {}", seed);
        }
    }

    #[test]
    fn scores_round_trip_and_respect_noise_zero() {
        let (g, _) = gen_graph(&GenParams::default());
        let s = gen_scores(&g, 0.0, 1, 2);
        let parsed = parse_scores(&emit_scores(&s)).unwrap();
        assert_eq!(parsed, s);
        for i in 0..s.n_spans() {
            let row = s.span_probs(i);
            assert!(row.iter().any(|&p| p == 1.0));
        }
    }

    #[test]
    fn adversarial_instances_parse_and_intend_valid_graphs() {
        for seed in 0..10 {
            let adv = gen_adversarial(seed);
            assert!(validate(&adv.intended).is_empty());
            let parsed = parse_scores(&emit_scores(&adv.scores)).unwrap();
            assert_eq!(parsed, adv.scores);
        }
    }
}
