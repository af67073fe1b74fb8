//! Backtracking DSATUR branch-and-bound.

use super::{Clock, SearchBudget, UNCOLORED};
use crate::conflict::{greedy_clique, ConflictGraph};
use crate::error::{Error, Result};
use crate::instance::{verify_with_graph, Coloring};

const CLIQUE_RESTARTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub best: Coloring,
    /// The search tree was exhausted, so `best` is optimal.
    pub proven_optimal: bool,
    pub lower_bound: usize,
    pub nodes: u64,
}

struct Search<'g> {
    graph: &'g ConflictGraph,
    width: usize,
    colors: Vec<u32>,
    /// counts[v * width + c]: colored neighbors of v with color c.
    counts: Vec<u32>,
    saturation: Vec<u32>,
    remaining: usize,
}

impl Search<'_> {
    fn assign(&mut self, v: usize, c: u32) {
        self.colors[v] = c;
        self.remaining -= 1;
        for u in self.graph.neighbors(v) {
            let slot = &mut self.counts[u * self.width + c as usize];
            *slot += 1;
            if *slot == 1 {
                self.saturation[u] += 1;
            }
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colors[v];
        self.colors[v] = UNCOLORED;
        self.remaining += 1;
        for u in self.graph.neighbors(v) {
            let slot = &mut self.counts[u * self.width + c as usize];
            *slot -= 1;
            if *slot == 0 {
                self.saturation[u] -= 1;
            }
        }
    }

    /// Uncolored vertex of maximum saturation, then maximum degree, then
    /// lowest index.
    fn select(&self) -> usize {
        let mut best = usize::MAX;
        let mut key = (0u32, 0u32);
        for v in 0..self.colors.len() {
            if self.colors[v] != UNCOLORED {
                continue;
            }
            let k = (self.saturation[v], self.graph.degrees()[v]);
            if best == usize::MAX || k > key {
                best = v;
                key = k;
            }
        }
        best
    }

    #[inline]
    fn is_free(&self, v: usize, c: u32) -> bool {
        self.counts[v * self.width + c as usize] == 0
    }
}

struct Frame {
    vertex: usize,
    next_color: u32,
    used_before: u32,
    assigned: bool,
}

/// Exact coloring by DSATUR-ordered backtracking. A greedy clique is
/// precolored and provides the lower bound; branches that cannot beat the
/// incumbent are cut. `budget.max_iterations` limits search nodes.
pub fn exact_bnb_dsatur(
    graph: &ConflictGraph,
    initial_upper: &Coloring,
    budget: &SearchBudget,
) -> Result<ExactResult> {
    budget.validate()?;
    let report = verify_with_graph(graph, initial_upper, 1);
    if !report.valid {
        return Err(Error::InvalidColoring(
            "exact search needs a valid initial coloring".into(),
        ));
    }
    let n = graph.n();
    let mut best = Coloring::from_colors(initial_upper.colors.clone())
        .with_instance_id(initial_upper.instance_id.clone());
    let clique = greedy_clique(graph, CLIQUE_RESTARTS, budget.seed);
    let lower = clique.len();
    if n == 0 || lower >= best.num_colors {
        return Ok(ExactResult {
            lower_bound: best.num_colors,
            best,
            proven_optimal: true,
            nodes: 0,
        });
    }

    let width = best.num_colors;
    let mut s = Search {
        graph,
        width,
        colors: vec![UNCOLORED; n],
        counts: vec![0; n * width],
        saturation: vec![0; n],
        remaining: n,
    };
    for (c, &v) in clique.iter().enumerate() {
        s.assign(v, c as u32);
    }
    let mut used = lower as u32;
    let mut best_k = best.num_colors as u32;
    let clock = Clock::new(budget.max_seconds);
    let max_nodes = budget.iteration_cap();
    let mut nodes = 0u64;
    let mut completed = false;

    let mut stack = vec![Frame {
        vertex: s.select(),
        next_color: 0,
        used_before: used,
        assigned: false,
    }];
    loop {
        let Some(top) = stack.last_mut() else {
            completed = true;
            break;
        };
        if top.assigned {
            s.unassign(top.vertex);
            used = top.used_before;
            top.assigned = false;
        }
        // A color c keeps the count at max(used, c + 1), which must stay
        // below the incumbent.
        let limit = (used + 1).min(best_k - 1);
        let mut c = top.next_color;
        while c < limit && !s.is_free(top.vertex, c) {
            c += 1;
        }
        if c >= limit {
            stack.pop();
            continue;
        }
        top.next_color = c + 1;
        top.used_before = used;
        top.assigned = true;
        let v = top.vertex;
        s.assign(v, c);
        used = used.max(c + 1);
        nodes += 1;

        if s.remaining == 0 {
            best_k = used;
            best = Coloring::from_colors(s.colors.clone())
                .with_instance_id(initial_upper.instance_id.clone());
            if best_k as usize <= lower {
                completed = true;
                break;
            }
            continue;
        }
        if nodes >= max_nodes || (nodes % 1024 == 0 && clock.expired()) {
            break;
        }
        stack.push(Frame {
            vertex: s.select(),
            next_color: 0,
            used_before: used,
            assigned: false,
        });
    }

    Ok(ExactResult {
        lower_bound: if completed { best.num_colors } else { lower },
        best,
        proven_optimal: completed,
        nodes,
    })
}
