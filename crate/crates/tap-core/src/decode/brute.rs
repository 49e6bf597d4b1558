//! Exhaustive oracle decoder for small instances.
//!
//! Enumerates every assignment over each span's top-k roles plus NONE and
//! all pair labels, in lexicographic order, keeping the first feasible
//! maximum. Branches are skipped only when the decided prefix is already
//! impossible for reasons no completion can repair (span overlap, edge
//! typing, unclosed label triangles, or too few spans of the kinds every
//! non-empty solution needs). No objective bounding is used, so this path
//! stays independent of the branch-and-bound machinery it checks.

use super::{
    assignment_to_graph, objective_with, Assignment, DecodeError, DecodeResult, LabelVar,
    LogTables, RoleVar,
};
use crate::constraints::{feasible, FeasibilityContext};
use crate::graph::EdgeLabel;
use crate::scores::{edge_label_from_index, ScoreSet};

const MAX_SPANS: usize = 5;
const MAX_TOP_K: usize = 3;

pub fn brute_force_decode(s: &ScoreSet, top_k_roles: usize) -> Result<DecodeResult, DecodeError> {
    let n = s.n_spans();
    if n > MAX_SPANS {
        return Err(DecodeError::InstanceTooLarge(format!(
            "{} candidate spans, at most {} supported",
            n, MAX_SPANS
        )));
    }
    if top_k_roles == 0 || top_k_roles > MAX_TOP_K {
        return Err(DecodeError::InstanceTooLarge(format!(
            "top_k_roles {} outside 1..={}",
            top_k_roles, MAX_TOP_K
        )));
    }
    let tables = LogTables::new(s);
    let ctx = FeasibilityContext::new(s.spans().to_vec(), s.inventory(), true);
    let n_roles = s.inventory().len();
    let value_role = s
        .inventory()
        .index_of(s.inventory().value_role())
        .expect("value role in inventory");

    // Top-k roles per span by probability, ties to the lower inventory
    // index; enumeration order is ascending role index with NONE last.
    let role_options: Vec<Vec<RoleVar>> = (0..n)
        .map(|i| {
            let probs = s.span_probs(i);
            let mut idx: Vec<usize> = (0..n_roles).collect();
            idx.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));
            idx.truncate(top_k_roles.min(n_roles));
            idx.sort_unstable();
            idx.into_iter()
                .map(|k| RoleVar::Role(k as u16))
                .chain(std::iter::once(RoleVar::None))
                .collect()
        })
        .collect();

    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();

    let mut state = Enumeration {
        s,
        tables: &tables,
        ctx: &ctx,
        value_role,
        pairs,
        best: None,
        leaves: 0,
    };
    let mut a = Assignment::new(n);
    state.roles(&mut a, 0, &role_options);

    let (objective, assignment) = state
        .best
        .expect("the all-NONE assignment is always admissible here");
    let graph = assignment_to_graph(&assignment, s)?;
    Ok(DecodeResult {
        graph,
        objective,
        optimal: true,
        nodes_explored: state.leaves,
    })
}

struct Enumeration<'a> {
    s: &'a ScoreSet,
    tables: &'a LogTables,
    ctx: &'a FeasibilityContext,
    value_role: usize,
    pairs: Vec<(usize, usize)>,
    best: Option<(f64, Assignment)>,
    leaves: u64,
}

impl Enumeration<'_> {
    fn roles(&mut self, a: &mut Assignment, i: usize, options: &[Vec<RoleVar>]) {
        let n = a.n_spans();
        if i == n {
            if self.role_vector_possible(a) {
                self.labels(a, 0);
            }
            return;
        }
        for &opt in &options[i] {
            if let RoleVar::Role(_) = opt {
                // An overlap among active spans dooms every completion.
                let (si, ei) = self.s.spans()[i];
                let clash = (0..i).any(|j| {
                    matches!(a.role(j), RoleVar::Role(_)) && {
                        let (sj, ej) = self.s.spans()[j];
                        si < ej && sj < ei
                    }
                });
                if clash {
                    continue;
                }
            }
            a.set_role(i, opt);
            self.roles(a, i + 1, options);
        }
        a.set_role(i, RoleVar::Undecided);
    }

    /// Every non-empty solution needs two analogous VALUE vertices and an
    /// analogous same-role argument pair; a role vector without the raw
    /// material for either admits no feasible completion besides none.
    fn role_vector_possible(&self, a: &Assignment) -> bool {
        let n = a.n_spans();
        let any_active = (0..n).any(|i| matches!(a.role(i), RoleVar::Role(_)));
        if !any_active {
            return true;
        }
        let values = (0..n)
            .filter(|&i| matches!(a.role(i), RoleVar::Role(r) if r as usize == self.value_role))
            .count();
        if values < 2 {
            return false;
        }
        let mut role_counts = vec![0usize; self.s.inventory().len()];
        for i in 0..n {
            if let RoleVar::Role(r) = a.role(i) {
                if r as usize != self.value_role {
                    role_counts[r as usize] += 1;
                }
            }
        }
        role_counts.iter().any(|&c| c >= 2)
    }

    fn labels(&mut self, a: &mut Assignment, p: usize) {
        if p == self.pairs.len() {
            self.leaves += 1;
            if feasible(a, self.ctx, false) {
                let obj = objective_with(a, self.tables);
                if self.best.as_ref().map_or(true, |(b, _)| obj > *b) {
                    self.best = Some((obj, a.clone()));
                }
            }
            return;
        }
        let (i, j) = self.pairs[p];
        for k in 0..4 {
            let lv = match edge_label_from_index(k) {
                Some(l) => LabelVar::Label(l),
                None => LabelVar::None,
            };
            if let LabelVar::Label(l) = lv {
                if !self.label_possible(a, i, j, l) {
                    continue;
                }
            }
            a.set_label(i, j, lv);
            if !self.prefix_triangles_ok(a, i, j) {
                continue;
            }
            self.labels(a, p + 1);
        }
        a.set_label(i, j, LabelVar::Undecided);
    }

    fn label_possible(&self, a: &Assignment, i: usize, j: usize, l: EdgeLabel) -> bool {
        let (ri, rj) = match (a.role(i), a.role(j)) {
            (RoleVar::Role(x), RoleVar::Role(y)) => (x as usize, y as usize),
            _ => return false, // inactive endpoints carry no edge
        };
        match l {
            EdgeLabel::Fact => (ri == self.value_role) != (rj == self.value_role),
            EdgeLabel::Equivalence | EdgeLabel::Analogy => ri == rj,
        }
    }

    /// Triangle and unique-facts conflicts among already-decided pairs can
    /// never be repaired by the remaining pairs.
    fn prefix_triangles_ok(&self, a: &Assignment, i: usize, j: usize) -> bool {
        let n = a.n_spans();
        let lab = |x: usize, y: usize| a.label(x.min(y), x.max(y));
        let is_value =
            |x: usize| matches!(a.role(x), RoleVar::Role(r) if r as usize == self.value_role);
        for m in 0..n {
            if m == i || m == j {
                continue;
            }
            let im = lab(i, m);
            let jm = lab(j, m);
            let ij = lab(i, j);
            // Two decided EQUIVALENCE legs force the third; likewise for
            // ANALOGY among three VALUE spans.
            let eq = LabelVar::Label(EdgeLabel::Equivalence);
            let an = LabelVar::Label(EdgeLabel::Analogy);
            for (x, y, z) in [(ij, im, jm), (im, ij, jm), (jm, ij, im)] {
                if x == LabelVar::Undecided {
                    continue;
                }
                if y == eq && z == eq && x != eq {
                    return false;
                }
                if is_value(i) && is_value(j) && is_value(m) && y == an && z == an && x != an {
                    return false;
                }
            }
            // Unique facts: same-role arguments of one VALUE must be
            // equivalent.
            let fact = LabelVar::Label(EdgeLabel::Fact);
            if im == fact && jm == fact && is_value(m) && !is_value(i) && !is_value(j) {
                if a.role(i) == a.role(j) && ij != LabelVar::Undecided && ij != eq {
                    return false;
                }
            }
            if ij == fact && jm == fact && is_value(j) && !is_value(i) && !is_value(m) {
                if a.role(i) == a.role(m) && im != LabelVar::Undecided && im != eq {
                    return false;
                }
            }
            if ij == fact && im == fact && is_value(i) && !is_value(j) && !is_value(m) {
                if a.role(j) == a.role(m) && jm != LabelVar::Undecided && jm != eq {
                    return false;
                }
            }
        }
        true
    }
}
