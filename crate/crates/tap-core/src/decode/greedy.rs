//! Greedy constraint-enforcing decoder.
//!
//! Steps, in order: argmax every decision; drop overlap/typing breaches;
//! close equivalence and VALUE-analogy clusters; resolve unique-facts
//! conflicts by FACT-edge score; verify the analogy requirement per VALUE
//! cluster and discard clusters that fail, together with argument spans
//! attached only to them.

use super::{assignment_to_graph, objective_with, Assignment, DecodeResult, LabelVar, LogTables, RoleVar};
use crate::graph::EdgeLabel;
use crate::scores::{edge_label_from_index, ScoreSet};
use crate::util::UnionFind;

pub fn greedy_decode(s: &ScoreSet) -> DecodeResult {
    let a = greedy_assignment(s);
    let tables = LogTables::new(s);
    let graph = assignment_to_graph(&a, s).expect("greedy output is structurally buildable");
    debug_assert!(
        crate::constraints::validate(&graph).is_empty(),
        "greedy output must validate cleanly"
    );
    DecodeResult {
        objective: objective_with(&a, &tables),
        graph,
        optimal: false,
        nodes_explored: 0,
    }
}

/// The repaired argmax assignment; shared with the exact decoder, which uses
/// it as the initial incumbent.
pub(super) fn greedy_assignment(s: &ScoreSet) -> Assignment {
    let n = s.n_spans();
    let n_roles = s.inventory().len();
    let value_role = s
        .inventory()
        .index_of(s.inventory().value_role())
        .expect("value role in inventory") as u16;

    // (i) Most likely role per span and label per pair; ties go to the
    // lower option index.
    let mut a = Assignment::new(n);
    let mut chosen_prob = vec![0.0f64; n];
    for i in 0..n {
        let probs = s.span_probs(i);
        let mut best = 0;
        for (k, p) in probs.iter().enumerate() {
            if *p > probs[best] {
                best = k;
            }
        }
        chosen_prob[i] = probs[best];
        a.set_role(
            i,
            if best == n_roles {
                RoleVar::None
            } else {
                RoleVar::Role(best as u16)
            },
        );
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let probs = s.edge_probs(i, j);
            let mut best = 0;
            for (k, p) in probs.iter().enumerate() {
                if *p > probs[best] {
                    best = k;
                }
            }
            a.set_label(
                i,
                j,
                match edge_label_from_index(best) {
                    Some(l) => LabelVar::Label(l),
                    None => LabelVar::None,
                },
            );
        }
    }

    let is_active = |a: &Assignment, i: usize| matches!(a.role(i), RoleVar::Role(_));
    let role_of = |a: &Assignment, i: usize| match a.role(i) {
        RoleVar::Role(r) => Some(r),
        _ => None,
    };

    // (ii) Well-formedness and typing. Overlaps keep the span with the
    // higher chosen-role probability, ties to the earlier start.
    let mut order: Vec<usize> = (0..n).filter(|&i| is_active(&a, i)).collect();
    order.sort_by(|&x, &y| {
        chosen_prob[y]
            .total_cmp(&chosen_prob[x])
            .then(s.spans()[x].0.cmp(&s.spans()[y].0))
            .then(x.cmp(&y))
    });
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        let (si, ei) = s.spans()[i];
        let clashes = kept.iter().any(|&j| {
            let (sj, ej) = s.spans()[j];
            si < ej && sj < ei
        });
        if clashes {
            a.set_role(i, RoleVar::None);
        } else {
            kept.push(i);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let label = match a.label(i, j) {
                LabelVar::Label(l) => l,
                _ => continue,
            };
            if !is_active(&a, i) || !is_active(&a, j) {
                a.set_label(i, j, LabelVar::None);
                continue;
            }
            let (ri, rj) = (role_of(&a, i).unwrap(), role_of(&a, j).unwrap());
            let ok = match label {
                EdgeLabel::Fact => (ri == value_role) != (rj == value_role),
                EdgeLabel::Equivalence | EdgeLabel::Analogy => ri == rj,
            };
            if !ok {
                a.set_label(i, j, LabelVar::None);
            }
        }
    }
    drop_disconnected(&mut a, n);

    // (iii) Closure. VALUE-analogy components first, then equivalence
    // classes; an equivalence merge that would put two values of one
    // analogy component into the same class is skipped, since closure
    // would then demand an impossible second label on that pair.
    let mut analogy = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if a.label(i, j) == LabelVar::Label(EdgeLabel::Analogy)
                && role_of(&a, i) == Some(value_role)
                && role_of(&a, j) == Some(value_role)
            {
                analogy.union(i, j);
            }
        }
    }
    let mut equiv = UnionFind::new(n);
    let mut comp_sets: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            if role_of(&a, i) == Some(value_role) {
                vec![analogy.find(i)]
            } else {
                vec![]
            }
        })
        .collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if a.label(i, j) != LabelVar::Label(EdgeLabel::Equivalence) {
                continue;
            }
            let (ri, rj) = (equiv.find(i), equiv.find(j));
            if ri == rj {
                continue;
            }
            let conflict = comp_sets[ri].iter().any(|c| comp_sets[rj].contains(c));
            if conflict {
                continue;
            }
            let mut merged = comp_sets[ri].clone();
            merged.extend(comp_sets[rj].iter().copied());
            equiv.union(i, j);
            let root = equiv.find(i);
            comp_sets[root] = merged;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !is_active(&a, i) || !is_active(&a, j) {
                continue;
            }
            let both_value =
                role_of(&a, i) == Some(value_role) && role_of(&a, j) == Some(value_role);
            if equiv.connected(i, j) {
                a.set_label(i, j, LabelVar::Label(EdgeLabel::Equivalence));
            } else if both_value && analogy.connected(i, j) {
                a.set_label(i, j, LabelVar::Label(EdgeLabel::Analogy));
            } else if a.label(i, j) == LabelVar::Label(EdgeLabel::Equivalence) {
                // A skipped conflicting merge; the direct edge cannot stand.
                a.set_label(i, j, LabelVar::None);
            }
        }
    }

    // (iv) Unique facts: a VALUE keeps, per role, only the equivalence
    // class of arguments containing its highest-probability FACT edge.
    for v in 0..n {
        if role_of(&a, v) != Some(value_role) {
            continue;
        }
        let children: Vec<usize> = (0..n)
            .filter(|&w| {
                w != v && a.label(v.min(w), v.max(w)) == LabelVar::Label(EdgeLabel::Fact)
            })
            .collect();
        let mut roles_seen: Vec<u16> = children.iter().filter_map(|&w| role_of(&a, w)).collect();
        roles_seen.sort_unstable();
        roles_seen.dedup();
        for role in roles_seen {
            let same: Vec<usize> = children
                .iter()
                .copied()
                .filter(|&w| role_of(&a, w) == Some(role))
                .collect();
            let mut groups: Vec<usize> = same.iter().map(|&w| equiv.find(w)).collect();
            groups.sort_unstable();
            groups.dedup();
            if groups.len() <= 1 {
                continue;
            }
            let fact_prob = |w: usize| s.edge_probs(v.min(w), v.max(w))[0];
            let best = same
                .iter()
                .copied()
                .max_by(|&x, &y| fact_prob(x).total_cmp(&fact_prob(y)).then(y.cmp(&x)))
                .unwrap();
            let keep_group = equiv.find(best);
            for &w in &same {
                if equiv.find(w) != keep_group {
                    a.set_label(v.min(w), v.max(w), LabelVar::None);
                }
            }
        }
    }
    drop_disconnected(&mut a, n);

    // (v) Per VALUE-analogy cluster, every analogous value pair needs an
    // analogous argument pair; otherwise the whole cluster goes, and
    // arguments attached only to it follow through the connectivity sweep.
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    {
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            if role_of(&a, i) == Some(value_role) && is_active(&a, i) {
                by_root.entry(analogy.find(i)).or_default().push(i);
            }
        }
        clusters.extend(by_root.into_values());
    }
    for cluster in &clusters {
        let ok = cluster.len() >= 2
            && cluster.iter().enumerate().all(|(x, &v)| {
                cluster[x + 1..].iter().all(|&v2| {
                    has_argument_support(&a, s, v, v2, value_role)
                })
            });
        if !ok {
            for &v in cluster {
                a.set_role(v, RoleVar::None);
                for w in 0..n {
                    if w != v {
                        a.set_label(v.min(w), v.max(w), LabelVar::None);
                    }
                }
            }
        }
    }
    drop_disconnected(&mut a, n);

    // Final sweep: an ANALOGY edge between arguments needs analogous VALUE
    // parents; edges that lost theirs are dropped.
    for i in 0..n {
        for j in (i + 1)..n {
            if a.label(i, j) != LabelVar::Label(EdgeLabel::Analogy) {
                continue;
            }
            if role_of(&a, i) == Some(value_role) || role_of(&a, j) == Some(value_role) {
                continue;
            }
            let supported = (0..n).any(|v| {
                role_of(&a, v) == Some(value_role)
                    && (0..n).any(|v2| {
                        v2 != v
                            && role_of(&a, v2) == Some(value_role)
                            && a.label(v.min(v2), v.max(v2))
                                == LabelVar::Label(EdgeLabel::Analogy)
                            && ((fact(&a, v, i) && fact(&a, v2, j))
                                || (fact(&a, v, j) && fact(&a, v2, i)))
                    })
            });
            if !supported {
                a.set_label(i, j, LabelVar::None);
            }
        }
    }

    a
}

fn fact(a: &Assignment, v: usize, w: usize) -> bool {
    v != w && a.label(v.min(w), v.max(w)) == LabelVar::Label(EdgeLabel::Fact)
}

/// Do two analogous values v, v2 have analogous same-role arguments?
fn has_argument_support(
    a: &Assignment,
    s: &ScoreSet,
    v: usize,
    v2: usize,
    value_role: u16,
) -> bool {
    let n = s.n_spans();
    (0..n).any(|w| {
        w != v
            && w != v2
            && !matches!(a.role(w), RoleVar::Role(r) if r == value_role)
            && fact(a, v, w)
            && (0..n).any(|w2| {
                w2 != w
                    && w2 != v
                    && w2 != v2
                    && !matches!(a.role(w2), RoleVar::Role(r) if r == value_role)
                    && fact(a, v2, w2)
                    && a.label(w.min(w2), w.max(w2)) == LabelVar::Label(EdgeLabel::Analogy)
            })
    })
}

/// Deactivate spans with no FACT edge until stable; their pairs become NONE.
fn drop_disconnected(a: &mut Assignment, n: usize) {
    loop {
        let mut changed = false;
        for i in 0..n {
            if !matches!(a.role(i), RoleVar::Role(_)) {
                continue;
            }
            let has_fact = (0..n)
                .any(|j| j != i && a.label(i.min(j), i.max(j)) == LabelVar::Label(EdgeLabel::Fact));
            if !has_fact {
                a.set_role(i, RoleVar::None);
                for j in 0..n {
                    if j != i {
                        a.set_label(i.min(j), i.max(j), LabelVar::None);
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Any undecided leftovers are inactive by construction here.
    for i in 0..n {
        if a.role(i) == RoleVar::Undecided {
            a.set_role(i, RoleVar::None);
        }
        for j in (i + 1)..n {
            if a.label(i, j) == LabelVar::Undecided {
                a.set_label(i, j, LabelVar::None);
            }
        }
    }
}
