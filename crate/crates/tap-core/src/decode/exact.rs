//! Exact decoder: depth-first branch-and-bound over 0-1 decision variables.
//!
//! Span-role variables are branched first, then pair-label variables, each
//! group in descending score-margin order. The upper bound at a node is the
//! decided log-probability total plus the per-variable maxima of everything
//! undecided; subtrees are cut when the bound cannot beat the incumbent or
//! when the partial assignment is already infeasible. The greedy solution
//! seeds the incumbent, so a feasible result is available even when the
//! budget runs out.

use std::time::Instant;

use super::greedy::greedy_assignment;
use super::{
    assignment_to_graph, objective_with, Assignment, DecodeError, DecodeOptions, DecodeResult,
    LabelVar, LogTables, RoleVar,
};
use crate::constraints::{feasible, FeasibilityContext};
use crate::graph::EdgeLabel;
use crate::scores::{edge_label_from_index, ScoreSet};
use crate::util::pair_index;

/// Margin used when comparing bounds against the incumbent; differences
/// below it are treated as ties, which a completion cannot improve on.
const BOUND_EPS: f64 = 1e-12;

#[derive(Clone, Copy)]
enum Var {
    Span(usize),
    Pair(usize, usize),
}

struct Search<'a> {
    tables: &'a LogTables,
    ctx: &'a FeasibilityContext,
    order: Vec<Var>,
    /// suffix_max[d] = sum of per-variable maxima for variables at depth >= d.
    suffix_max: Vec<f64>,
    value_role: u16,
    incumbent: Option<(f64, Assignment)>,
    nodes: u64,
    max_nodes: u64,
    deadline: Instant,
    aborted: bool,
}

impl Search<'_> {
    fn best_objective(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::NEG_INFINITY, |(o, _)| *o)
    }

    fn dfs(&mut self, a: &mut Assignment, depth: usize, partial: f64) {
        if self.aborted {
            return;
        }
        if depth == self.order.len() {
            if feasible(a, self.ctx, false) {
                let obj = objective_with(a, self.tables);
                if obj > self.best_objective() {
                    self.incumbent = Some((obj, a.clone()));
                }
            }
            return;
        }
        let var = self.order[depth];
        let options = self.options(a, var);
        for (opt, logp) in options {
            self.nodes += 1;
            if self.nodes > self.max_nodes || Instant::now() >= self.deadline {
                self.aborted = true;
                return;
            }
            let bound = partial + logp + self.suffix_max[depth + 1];
            if bound <= self.best_objective() + BOUND_EPS {
                continue;
            }
            self.apply(a, var, opt);
            if feasible(a, self.ctx, true) {
                self.dfs(a, depth + 1, partial + logp);
            }
            self.undo(a, var);
            if self.aborted {
                return;
            }
        }
    }

    /// Candidate options for a variable, most probable first, restricted to
    /// choices that endpoint roles do not already rule out.
    fn options(&self, a: &Assignment, var: Var) -> Vec<(usize, f64)> {
        let mut opts: Vec<(usize, f64)> = match var {
            Var::Span(i) => self.tables.role[i]
                .iter()
                .enumerate()
                .map(|(k, &lp)| (k, lp))
                .collect(),
            Var::Pair(i, j) => {
                let row = &self.tables.label[pair_index(a.n_spans(), i, j)];
                let ri = a.role(i);
                let rj = a.role(j);
                if ri == RoleVar::None || rj == RoleVar::None {
                    // Edges need two active endpoints.
                    return vec![(3, row[3])];
                }
                let (ri, rj) = match (ri, rj) {
                    (RoleVar::Role(x), RoleVar::Role(y)) => (x, y),
                    _ => unreachable!("span variables are branched before pairs"),
                };
                (0..4)
                    .filter(|&k| match edge_label_from_index(k) {
                        None => true,
                        Some(EdgeLabel::Fact) => {
                            (ri == self.value_role) != (rj == self.value_role)
                        }
                        Some(EdgeLabel::Equivalence) | Some(EdgeLabel::Analogy) => ri == rj,
                    })
                    .map(|k| (k, row[k]))
                    .collect()
            }
        };
        opts.sort_by(|(ka, la), (kb, lb)| lb.total_cmp(la).then(ka.cmp(kb)));
        opts
    }

    fn apply(&self, a: &mut Assignment, var: Var, opt: usize) {
        match var {
            Var::Span(i) => {
                let n_roles = self.tables.role[i].len() - 1;
                a.set_role(
                    i,
                    if opt == n_roles {
                        RoleVar::None
                    } else {
                        RoleVar::Role(opt as u16)
                    },
                );
            }
            Var::Pair(i, j) => a.set_label(
                i,
                j,
                match edge_label_from_index(opt) {
                    Some(l) => LabelVar::Label(l),
                    None => LabelVar::None,
                },
            ),
        }
    }

    fn undo(&self, a: &mut Assignment, var: Var) {
        match var {
            Var::Span(i) => a.set_role(i, RoleVar::Undecided),
            Var::Pair(i, j) => a.set_label(i, j, LabelVar::Undecided),
        }
    }
}

fn margin(row: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for &x in row {
        if x > best {
            second = best;
            best = x;
        } else if x > second {
            second = x;
        }
    }
    best - second
}

/// Maximize the decoding objective subject to the structural constraints.
///
/// Returns the optimum when the search completes within budget, otherwise
/// the best incumbent found with `optimal` unset. Fails only when the
/// instance exceeds the span cap, or when analogy output is required and no
/// feasible solution was found.
pub fn exact_decode(s: &ScoreSet, opts: &DecodeOptions) -> Result<DecodeResult, DecodeError> {
    let n = s.n_spans();
    if n > opts.max_spans {
        return Err(DecodeError::TooManySpans(n, opts.max_spans));
    }
    let tables = LogTables::new(s);
    let ctx = FeasibilityContext::new(
        s.spans().to_vec(),
        s.inventory(),
        !opts.require_analogy,
    );
    let value_role = s
        .inventory()
        .index_of(s.inventory().value_role())
        .expect("value role in inventory") as u16;

    let mut span_vars: Vec<usize> = (0..n).collect();
    span_vars.sort_by(|&x, &y| {
        margin(&tables.role[y])
            .total_cmp(&margin(&tables.role[x]))
            .then(x.cmp(&y))
    });
    let mut pair_vars: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    pair_vars.sort_by(|&(xa, xb), &(ya, yb)| {
        let mx = margin(&tables.label[pair_index(n, xa, xb)]);
        let my = margin(&tables.label[pair_index(n, ya, yb)]);
        my.total_cmp(&mx).then((xa, xb).cmp(&(ya, yb)))
    });
    let order: Vec<Var> = span_vars
        .iter()
        .map(|&i| Var::Span(i))
        .chain(pair_vars.iter().map(|&(i, j)| Var::Pair(i, j)))
        .collect();

    let mut suffix_max = vec![0.0; order.len() + 1];
    for d in (0..order.len()).rev() {
        let row_max = match order[d] {
            Var::Span(i) => tables.role[i].iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Var::Pair(i, j) => tables.label[pair_index(n, i, j)]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max),
        };
        suffix_max[d] = suffix_max[d + 1] + row_max;
    }

    let mut search = Search {
        tables: &tables,
        ctx: &ctx,
        order,
        suffix_max,
        value_role,
        incumbent: None,
        nodes: 0,
        max_nodes: opts.budget.max_nodes,
        deadline: Instant::now()
            + std::time::Duration::from_millis(opts.budget.max_millis),
        aborted: false,
    };

    // Seed with the greedy solution so budget exhaustion still yields a
    // feasible graph and exact never scores below greedy.
    let seed = greedy_assignment(s);
    if feasible(&seed, &ctx, false) {
        search.incumbent = Some((objective_with(&seed, &tables), seed));
    }

    let mut working = Assignment::new(n);
    search.dfs(&mut working, 0, 0.0);

    let optimal = !search.aborted;
    let nodes_explored = search.nodes;
    match search.incumbent {
        Some((objective, assignment)) => {
            let graph = assignment_to_graph(&assignment, s)?;
            debug_assert!(
                graph.is_empty() || crate::constraints::validate(&graph).is_empty(),
                "exact output must validate cleanly"
            );
            Ok(DecodeResult {
                graph,
                objective,
                optimal,
                nodes_explored,
            })
        }
        None => Err(DecodeError::BudgetExhaustedWithNoIncumbent),
    }
}
