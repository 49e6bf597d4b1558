//! Two-tier TAP frames and their conversion to and from analogy graphs.
//!
//! A frame groups the facts of one VALUE analogy component. Content shared
//! by the facts (scope vertices and cross-fact equivalence clusters) forms
//! the outer tier; content compared across facts (analogy-linked clusters,
//! always including the values themselves) forms the inner tier.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::constraints::validate;
use crate::graph::{
    build_graph, transitive_closure, AnalogyGraph, Edge, EdgeLabel, GraphError, RoleInventory,
    RoleLabel, Sentence, Vertex, VertexId,
};
use crate::util::UnionFind;

/// One quantitative fact: a VALUE vertex and its role-labeled arguments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub value: Vertex,
    pub arguments: BTreeMap<RoleLabel, Vec<Vertex>>,
}

/// A cluster shared by all facts of the frame, either by scope or by
/// equivalence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedEntry {
    pub role: RoleLabel,
    pub cluster: Vec<Vertex>,
}

/// Content compared across facts: one (possibly empty) cluster slot per
/// fact, in fact order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparedEntry {
    pub role: RoleLabel,
    pub slots: Vec<Vec<Vertex>>,
}

/// A TAP frame over one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TapFrame {
    pub facts: Vec<Fact>,
    pub shared: Vec<SharedEntry>,
    pub compared: Vec<ComparedEntry>,
}

impl TapFrame {
    /// Sort facts, entries, clusters and slots into the canonical order used
    /// by [`graph_to_frames`], so frames from different producers compare
    /// equal when they encode the same structure.
    pub fn normalize(&mut self, inventory: &RoleInventory) {
        // Facts sort by value span; compared slots follow the same
        // permutation so slot i keeps describing fact i.
        let mut order: Vec<usize> = (0..self.facts.len()).collect();
        order.sort_by_key(|&i| self.facts[i].value.clone());
        let facts = std::mem::take(&mut self.facts);
        let mut slots_by_old: Vec<Option<Fact>> = facts.into_iter().map(Some).collect();
        self.facts = order
            .iter()
            .map(|&i| slots_by_old[i].take().expect("permutation visits once"))
            .collect();
        for entry in &mut self.compared {
            if entry.slots.len() == order.len() {
                let old = std::mem::take(&mut entry.slots);
                let mut old: Vec<Option<Vec<Vertex>>> = old.into_iter().map(Some).collect();
                entry.slots = order
                    .iter()
                    .map(|&i| old[i].take().expect("permutation visits once"))
                    .collect();
            }
        }
        for fact in &mut self.facts {
            for args in fact.arguments.values_mut() {
                args.sort();
                args.dedup();
            }
        }
        for entry in &mut self.shared {
            entry.cluster.sort();
            entry.cluster.dedup();
        }
        let rank = |role: &RoleLabel| inventory.index_of(role).unwrap_or(usize::MAX);
        self.shared.sort_by(|a, b| {
            (rank(&a.role), a.cluster.first()).cmp(&(rank(&b.role), b.cluster.first()))
        });
        for entry in &mut self.compared {
            for slot in &mut entry.slots {
                slot.sort();
                slot.dedup();
            }
        }
        self.compared.sort_by(|a, b| {
            let fa = a.slots.iter().flatten().min();
            let fb = b.slots.iter().flatten().min();
            (rank(&a.role), fa).cmp(&(rank(&b.role), fb))
        });
    }

    /// All vertices mentioned anywhere in the frame.
    pub fn all_vertices(&self) -> BTreeSet<Vertex> {
        let mut out = BTreeSet::new();
        for f in &self.facts {
            out.insert(f.value.clone());
            for args in f.arguments.values() {
                out.extend(args.iter().cloned());
            }
        }
        for s in &self.shared {
            out.extend(s.cluster.iter().cloned());
        }
        for c in &self.compared {
            for slot in &c.slots {
                out.extend(slot.iter().cloned());
            }
        }
        out
    }
}

/// One sentence with its frames; the line format of frames files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameFile {
    pub sentence: Sentence,
    pub inventory: RoleInventory,
    pub frames: Vec<TapFrame>,
}

impl FrameFile {
    pub fn parse(bytes: &[u8]) -> Result<Self, GraphError> {
        serde_json::from_slice(bytes).map_err(|e| GraphError::MalformedInput(e.to_string()))
    }

    pub fn emit(&self) -> Vec<u8> {
        let value = serde_json::to_value(self).expect("frame serialization cannot fail");
        let mut bytes = serde_json::to_vec(&value).expect("value serialization cannot fail");
        bytes.push(b'\n');
        bytes
    }
}

/// Extract one frame per VALUE analogy component with at least two members.
///
/// The graph must validate cleanly. A VALUE vertex outside every analogy
/// pair anchors a plain fact, not an analogy, and yields no frame. A cluster
/// is shared when it reaches every value of the component through FACT edges
/// or is equivalence-linked across at least two facts; clusters linked by
/// ANALOGY across facts are compared content, which wins when both readings
/// apply.
pub fn graph_to_frames(g: &AnalogyGraph) -> Result<Vec<TapFrame>, GraphError> {
    let violations = validate(g);
    if !violations.is_empty() {
        return Err(GraphError::InvalidGraph(violations));
    }
    let closed = transitive_closure(g);
    let ids: Vec<VertexId> = closed.vertices().keys().copied().collect();
    let pos: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let is_value = |id: VertexId| closed.inventory().is_value(&closed.vertices()[&id].role);

    let mut fact_children: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut fact_parents: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut analogy_pairs: Vec<(VertexId, VertexId)> = Vec::new();
    let mut value_uf = UnionFind::new(ids.len());
    let mut equiv_uf = UnionFind::new(ids.len());
    for e in closed.edges() {
        match e.label {
            EdgeLabel::Fact => {
                fact_children.entry(e.a).or_default().push(e.b);
                fact_parents.entry(e.b).or_default().push(e.a);
            }
            EdgeLabel::Equivalence => equiv_uf.union(pos[&e.a], pos[&e.b]),
            EdgeLabel::Analogy => {
                if is_value(e.a) && is_value(e.b) {
                    value_uf.union(pos[&e.a], pos[&e.b]);
                } else {
                    analogy_pairs.push((e.a, e.b));
                }
            }
        }
    }

    // VALUE analogy components of size >= 2, ordered by earliest span.
    let mut components: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    for &id in &ids {
        if is_value(id) {
            components.entry(value_uf.find(pos[&id])).or_default().push(id);
        }
    }
    let mut components: Vec<Vec<VertexId>> = components
        .into_values()
        .filter(|c| c.len() >= 2)
        .collect();
    for c in &mut components {
        c.sort_by_key(|id| closed.vertices()[id].clone());
    }
    components.sort_by_key(|c| closed.vertices()[&c[0]].clone());

    let mut frames = Vec::new();
    for values in components {
        let vertex = |id: VertexId| closed.vertices()[&id].clone();
        let value_set: BTreeSet<VertexId> = values.iter().copied().collect();

        let mut facts = Vec::new();
        let mut args: BTreeSet<VertexId> = BTreeSet::new();
        for &v in &values {
            let mut arguments: BTreeMap<RoleLabel, Vec<Vertex>> = BTreeMap::new();
            for &w in fact_children.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                arguments
                    .entry(vertex(w).role.clone())
                    .or_default()
                    .push(vertex(w));
                args.insert(w);
            }
            for list in arguments.values_mut() {
                list.sort();
            }
            facts.push(Fact {
                value: vertex(v),
                arguments,
            });
        }

        // Equivalence clusters restricted to this component's arguments.
        let mut clusters: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for &w in &args {
            clusters.entry(equiv_uf.find(pos[&w])).or_default().push(w);
        }
        let cluster_list: Vec<Vec<VertexId>> = clusters.into_values().collect();
        let cluster_of: BTreeMap<VertexId, usize> = cluster_list
            .iter()
            .enumerate()
            .flat_map(|(ci, members)| members.iter().map(move |&w| (w, ci)))
            .collect();

        // Analogy groups over clusters, using argument-level ANALOGY edges.
        let mut group_uf = UnionFind::new(cluster_list.len());
        for &(x, y) in &analogy_pairs {
            if let (Some(&cx), Some(&cy)) = (cluster_of.get(&x), cluster_of.get(&y)) {
                group_uf.union(cx, cy);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for ci in 0..cluster_list.len() {
            groups.entry(group_uf.find(ci)).or_default().push(ci);
        }

        let attach = |members: &[VertexId]| -> BTreeSet<VertexId> {
            members
                .iter()
                .flat_map(|w| {
                    fact_parents
                        .get(w)
                        .map(Vec::as_slice)
                        .unwrap_or(&[])
                        .iter()
                        .copied()
                        .filter(|v| value_set.contains(v))
                })
                .collect()
        };

        let mut shared = Vec::new();
        let mut compared = Vec::new();
        for group in groups.values() {
            let role = vertex(cluster_list[group[0]][0]).role.clone();
            if group.len() >= 2 {
                // Compared content: one slot per fact with the members it
                // attaches to.
                let members: Vec<VertexId> = group
                    .iter()
                    .flat_map(|&ci| cluster_list[ci].iter().copied())
                    .collect();
                let mut slots: Vec<Vec<Vertex>> = vec![Vec::new(); values.len()];
                for &w in &members {
                    for (fi, &v) in values.iter().enumerate() {
                        if fact_parents
                            .get(&w)
                            .map_or(false, |parents| parents.contains(&v))
                        {
                            slots[fi].push(vertex(w));
                        }
                    }
                }
                for slot in &mut slots {
                    slot.sort();
                }
                compared.push(ComparedEntry { role, slots });
            } else {
                let members = &cluster_list[group[0]];
                let attached = attach(members);
                let scopal = attached.len() == value_set.len();
                let equivalence_shared = members.len() >= 2 && attached.len() >= 2;
                if scopal || equivalence_shared {
                    let mut cluster: Vec<Vertex> = members.iter().map(|&w| vertex(w)).collect();
                    cluster.sort();
                    shared.push(SharedEntry { role, cluster });
                }
                // Otherwise the cluster is private to one fact and lives
                // only in that fact's argument list.
            }
        }

        // Values are always compared content.
        compared.push(ComparedEntry {
            role: closed.inventory().value_role().clone(),
            slots: values.iter().map(|&v| vec![vertex(v)]).collect(),
        });

        let mut frame = TapFrame {
            facts,
            shared,
            compared,
        };
        frame.normalize(closed.inventory());
        frames.push(frame);
    }
    Ok(frames)
}

/// Rebuild the transitively-closed graph encoding the given frames.
///
/// The inverse of [`graph_to_frames`] up to ordering: shared clusters become
/// equivalence cliques, compared entries become cross-slot analogy cliques,
/// and every argument is attached to its fact's value by a FACT edge.
pub fn frames_to_graph(
    frames: &[TapFrame],
    sentence: &Sentence,
    inventory: &RoleInventory,
) -> Result<AnalogyGraph, GraphError> {
    let mut ids: BTreeMap<Vertex, VertexId> = BTreeMap::new();
    let mut vertices: Vec<(VertexId, Vertex)> = Vec::new();
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    let intern = |v: &Vertex,
                      ids: &mut BTreeMap<Vertex, VertexId>,
                      vertices: &mut Vec<(VertexId, Vertex)>| {
        if let Some(id) = ids.get(v) {
            *id
        } else {
            let id = VertexId(ids.len() as u32);
            ids.insert(v.clone(), id);
            vertices.push((id, v.clone()));
            id
        }
    };

    for frame in frames {
        if frame.facts.len() < 2 {
            return Err(GraphError::InconsistentFrame(format!(
                "frame has {} fact(s); an analogy needs at least two",
                frame.facts.len()
            )));
        }
        let value_ids: Vec<VertexId> = frame
            .facts
            .iter()
            .map(|f| {
                if !inventory.is_value(&f.value.role) {
                    return Err(GraphError::InconsistentFrame(format!(
                        "fact value carries role {}, expected {}",
                        f.value.role,
                        inventory.value_role()
                    )));
                }
                Ok(intern(&f.value, &mut ids, &mut vertices))
            })
            .collect::<Result<_, _>>()?;

        for (fi, fact) in frame.facts.iter().enumerate() {
            for (role, args) in &fact.arguments {
                if inventory.is_value(role) {
                    return Err(GraphError::InconsistentFrame(
                        "VALUE cannot be an argument role".into(),
                    ));
                }
                for arg in args {
                    if arg.role != *role {
                        return Err(GraphError::InconsistentFrame(format!(
                            "argument under key {} carries role {}",
                            role, arg.role
                        )));
                    }
                    let wid = intern(arg, &mut ids, &mut vertices);
                    edges.insert(Edge::new(value_ids[fi], wid, EdgeLabel::Fact));
                }
            }
        }

        let shared_set: BTreeSet<Vertex> = frame
            .shared
            .iter()
            .flat_map(|s| s.cluster.iter().cloned())
            .collect();
        let compared_set: BTreeSet<Vertex> = frame
            .compared
            .iter()
            .flat_map(|c| c.slots.iter().flatten().cloned())
            .collect();
        if let Some(both) = shared_set.intersection(&compared_set).next() {
            return Err(GraphError::InconsistentFrame(format!(
                "vertex ({}, {}, {}) appears in both shared and compared content",
                both.start, both.end, both.role
            )));
        }

        for entry in &frame.shared {
            let members: Vec<VertexId> = entry
                .cluster
                .iter()
                .map(|v| intern(v, &mut ids, &mut vertices))
                .collect();
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    edges.insert(Edge::new(a, b, EdgeLabel::Equivalence));
                }
            }
        }

        for entry in &frame.compared {
            if entry.slots.len() != frame.facts.len() {
                return Err(GraphError::InconsistentFrame(format!(
                    "compared entry for {} has {} slots for {} facts",
                    entry.role,
                    entry.slots.len(),
                    frame.facts.len()
                )));
            }
            let filled = entry.slots.iter().filter(|s| !s.is_empty()).count();
            if filled < 2 {
                return Err(GraphError::InconsistentFrame(format!(
                    "compared entry for {} covers {} fact(s); at least two required",
                    entry.role, filled
                )));
            }
            let slot_ids: Vec<Vec<VertexId>> = entry
                .slots
                .iter()
                .map(|slot| {
                    slot.iter()
                        .map(|v| intern(v, &mut ids, &mut vertices))
                        .collect()
                })
                .collect();
            for (i, slot_a) in slot_ids.iter().enumerate() {
                // Members sharing a slot belong to one fact and must be
                // equivalent; members of different slots are analogous.
                for (x, &a) in slot_a.iter().enumerate() {
                    for &b in &slot_a[x + 1..] {
                        edges.insert(Edge::new(a, b, EdgeLabel::Equivalence));
                    }
                }
                for slot_b in &slot_ids[i + 1..] {
                    for &a in slot_a {
                        for &b in slot_b {
                            if a != b {
                                edges.insert(Edge::new(a, b, EdgeLabel::Analogy));
                            }
                        }
                    }
                }
            }
        }

        let has_value_compared = frame
            .compared
            .iter()
            .any(|c| inventory.is_value(&c.role));
        if !has_value_compared {
            return Err(GraphError::InconsistentFrame(
                "compared content must include the VALUE role".into(),
            ));
        }
    }

    let g = build_graph(
        sentence.clone(),
        vertices,
        edges.into_iter().collect(),
        inventory.clone(),
    )?;
    Ok(transitive_closure(&g))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::RoleInventory;

    /// Graph and frame fixture following the running two-fact example: two
    /// percentages compared across demographic groups, with a shared source.
    pub(crate) fn example_graph() -> AnalogyGraph {
        let tokens: Vec<String> = [
            "According", "to", "the", "U.S.", "Census", ",", "whereas", "only", "10%", "of",
            "White", "Americans", "live", "at", "or", "below", "the", "poverty", "line", "today",
            ",", "28%", "of", "African", "Americans", "do", ".",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let sentence = Sentence::new("e1", tokens).unwrap();
        let inv = RoleInventory::default_roles();
        let r = RoleLabel::new;
        let vertices = vec![
            (VertexId(0), Vertex::new(8, 9, r("VALUE"))),    // 10%
            (VertexId(1), Vertex::new(21, 22, r("VALUE"))),  // 28%
            (VertexId(2), Vertex::new(10, 12, r("WHOLE"))),  // White Americans
            (VertexId(3), Vertex::new(23, 25, r("WHOLE"))),  // African Americans
            (VertexId(4), Vertex::new(3, 5, r("SOURCE"))),   // U.S. Census
            (VertexId(5), Vertex::new(12, 19, r("QUANTITY"))), // live at or below ...
            (VertexId(6), Vertex::new(19, 20, r("TIME"))),   // today
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
        build_graph(sentence, vertices, edges, inv).unwrap()
    }

    #[test]
    fn example_graph_yields_one_frame_with_expected_tiers() {
        let g = example_graph();
        assert!(validate(&g).is_empty());
        let frames = graph_to_frames(&g).unwrap();
        assert_eq!(frames.len(), 1);
        let f = &frames[0];
        assert_eq!(f.facts.len(), 2);

        let shared_roles: Vec<&str> = f.shared.iter().map(|s| s.role.as_str()).collect();
        assert_eq!(shared_roles, vec!["QUANTITY", "SOURCE", "TIME"]);
        let source = f.shared.iter().find(|s| s.role.as_str() == "SOURCE").unwrap();
        assert_eq!(
            g.sentence().span_text(source.cluster[0].start, source.cluster[0].end),
            "U.S. Census"
        );

        let compared_roles: Vec<&str> = f.compared.iter().map(|c| c.role.as_str()).collect();
        assert_eq!(compared_roles, vec!["VALUE", "WHOLE"]);
        let whole = &f.compared[1];
        let texts: Vec<String> = whole
            .slots
            .iter()
            .map(|slot| g.sentence().span_text(slot[0].start, slot[0].end))
            .collect();
        assert_eq!(texts, vec!["White Americans", "African Americans"]);
        let value = &f.compared[0];
        let texts: Vec<String> = value
            .slots
            .iter()
            .map(|slot| g.sentence().span_text(slot[0].start, slot[0].end))
            .collect();
        assert_eq!(texts, vec!["10%", "28%"]);
    }

    #[test]
    fn example_frame_round_trips_through_graph() {
        let g = example_graph();
        let frames = graph_to_frames(&g).unwrap();
        let rebuilt = frames_to_graph(&frames, g.sentence(), g.inventory()).unwrap();
        assert!(rebuilt.same_structure(&transitive_closure(&g)));
        let frames2 = graph_to_frames(&rebuilt).unwrap();
        assert_eq!(frames, frames2);
    }

    #[test]
    fn two_disjoint_components_yield_two_frames() {
        let sentence = Sentence::new(
            "two",
            (0..12).map(|i| format!("t{}", i)).collect::<Vec<_>>(),
        )
        .unwrap();
        let inv = RoleInventory::default_roles();
        let r = RoleLabel::new;
        let vertices = vec![
            (VertexId(0), Vertex::new(0, 1, r("VALUE"))),
            (VertexId(1), Vertex::new(1, 2, r("TIME"))),
            (VertexId(2), Vertex::new(2, 3, r("VALUE"))),
            (VertexId(3), Vertex::new(3, 4, r("TIME"))),
            (VertexId(4), Vertex::new(6, 7, r("VALUE"))),
            (VertexId(5), Vertex::new(7, 8, r("WHOLE"))),
            (VertexId(6), Vertex::new(8, 9, r("VALUE"))),
            (VertexId(7), Vertex::new(9, 10, r("WHOLE"))),
        ];
        let e = Edge::new;
        let edges = vec![
            e(VertexId(0), VertexId(1), EdgeLabel::Fact),
            e(VertexId(2), VertexId(3), EdgeLabel::Fact),
            e(VertexId(0), VertexId(2), EdgeLabel::Analogy),
            e(VertexId(1), VertexId(3), EdgeLabel::Analogy),
            e(VertexId(4), VertexId(5), EdgeLabel::Fact),
            e(VertexId(6), VertexId(7), EdgeLabel::Fact),
            e(VertexId(4), VertexId(6), EdgeLabel::Analogy),
            e(VertexId(5), VertexId(7), EdgeLabel::Analogy),
        ];
        let g = build_graph(sentence, vertices, edges, inv).unwrap();
        let frames = graph_to_frames(&g).unwrap();
        assert_eq!(frames.len(), 2);
    }

    #[test]
    fn empty_frame_list_gives_empty_graph() {
        let sentence = Sentence::new("s", vec!["a".into()]).unwrap();
        let g = frames_to_graph(&[], &sentence, &RoleInventory::default_roles()).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn invalid_graph_is_rejected() {
        let sentence = Sentence::new("s", vec!["a".into(), "b".into()]).unwrap();
        let inv = RoleInventory::default_roles();
        let g = build_graph(
            sentence,
            vec![(VertexId(0), Vertex::new(0, 1, RoleLabel::new("VALUE")))],
            vec![],
            inv,
        )
        .unwrap();
        // The lone vertex is disconnected, so conversion must refuse.
        let err = graph_to_frames(&g).unwrap_err();
        assert!(matches!(err, GraphError::InvalidGraph(_)));
    }

    #[test]
    fn singleton_value_component_yields_no_frame() {
        // A third fact outside the analogy contributes no frame of its own.
        let sentence = Sentence::new(
            "s",
            (0..10).map(|i| format!("t{}", i)).collect::<Vec<_>>(),
        )
        .unwrap();
        let inv = RoleInventory::default_roles();
        let r = RoleLabel::new;
        let vertices = vec![
            (VertexId(0), Vertex::new(0, 1, r("VALUE"))),
            (VertexId(1), Vertex::new(1, 2, r("TIME"))),
            (VertexId(2), Vertex::new(2, 3, r("VALUE"))),
            (VertexId(3), Vertex::new(3, 4, r("TIME"))),
            (VertexId(4), Vertex::new(4, 5, r("VALUE"))),
            (VertexId(5), Vertex::new(5, 6, r("WHOLE"))),
        ];
        let e = Edge::new;
        let edges = vec![
            e(VertexId(0), VertexId(1), EdgeLabel::Fact),
            e(VertexId(2), VertexId(3), EdgeLabel::Fact),
            e(VertexId(0), VertexId(2), EdgeLabel::Analogy),
            e(VertexId(1), VertexId(3), EdgeLabel::Analogy),
            e(VertexId(4), VertexId(5), EdgeLabel::Fact),
        ];
        let g = build_graph(sentence, vertices, edges, inv).unwrap();
        assert!(validate(&g).is_empty());
        let frames = graph_to_frames(&g).unwrap();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].facts.len(), 2);
    }

    #[test]
    fn frame_file_round_trips() {
        let g = example_graph();
        let file = FrameFile {
            sentence: g.sentence().clone(),
            inventory: g.inventory().clone(),
            frames: graph_to_frames(&g).unwrap(),
        };
        let bytes = file.emit();
        let parsed = FrameFile::parse(&bytes).unwrap();
        assert_eq!(parsed, file);
        assert_eq!(parsed.emit(), bytes);
    }
}
