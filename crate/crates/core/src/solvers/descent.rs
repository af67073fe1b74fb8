//! Color-descent driver: construct, polish with iterated greedy, then
//! repeatedly try to drop one color with a fixed-k metaheuristic.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::evolution::{hybrid_ea_from, EAConfig};
use super::greedy::{dsatur, greedy_welsh_powell, iterated_greedy, rlf, IgStrategy};
use super::tabu::{run_partialcol, run_tabucol};
use super::{Clock, PartialColoring, SearchBudget, UNCOLORED};
use crate::conflict::{greedy_clique, ConflictGraph};
use crate::error::Result;
use crate::instance::{verify_with_graph, Coloring};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentAlgorithm {
    Tabucol,
    Partialcol,
    HybridEa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    pub ig_iterations: usize,
    pub ig_strategy: IgStrategy,
    pub clique_restarts: usize,
    /// Template for the hybrid EA; its seed is replaced by the budget seed.
    pub ea: EAConfig,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            ig_iterations: 500,
            ig_strategy: IgStrategy::Random,
            clique_restarts: 10,
            ea: EAConfig::default(),
        }
    }
}

/// One line of a solver trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub objective: u64,
    pub best_k: usize,
    pub elapsed_seconds: f64,
}

pub fn write_trace<W: Write>(rows: &[TraceRow], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Fewest colors among Welsh-Powell, DSATUR and RLF (first in that order
/// on ties).
pub fn best_construction(graph: &ConflictGraph) -> Coloring {
    [greedy_welsh_powell(graph), dsatur(graph), rlf(graph)]
        .into_iter()
        .reduce(|best, c| if c.num_colors < best.num_colors { c } else { best })
        .unwrap()
}

pub fn solve_descending(
    graph: &ConflictGraph,
    budget: &SearchBudget,
    algorithm: DescentAlgorithm,
) -> Result<Coloring> {
    solve_descending_with(graph, budget, algorithm, &DescentOptions::default(), None)
}

/// Descends from the best construction heuristic (after iterated greedy)
/// one color at a time. Each attempt at `k - 1` gets the full iteration
/// budget and whatever time remains; the first feasible coloring is adopted.
/// Stops at the clique bound, at `budget.target_k`, on the first failed
/// attempt, or when time runs out. The result is always a valid coloring.
pub fn solve_descending_with(
    graph: &ConflictGraph,
    budget: &SearchBudget,
    algorithm: DescentAlgorithm,
    options: &DescentOptions,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> Result<Coloring> {
    budget.validate()?;
    let clock = Clock::new(budget.max_seconds);
    let start = best_construction(graph);
    let mut current = iterated_greedy(
        graph,
        &start,
        options.ig_strategy,
        options.ig_iterations,
        budget.seed,
    )?;
    let lower = greedy_clique(graph, options.clique_restarts, budget.seed).len();
    let floor = lower.max(budget.target_k.unwrap_or(0));
    let mut iterations = 0u64;
    let record = |trace: &mut Option<&mut Vec<TraceRow>>, it: u64, obj: u64, k: usize| {
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceRow {
                iteration: it,
                objective: obj,
                best_k: k,
                elapsed_seconds: clock.elapsed_secs(),
            });
        }
    };
    record(&mut trace, 0, 0, current.num_colors);

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    while current.num_colors > floor && current.num_colors > 1 && !clock.expired() {
        let k = current.num_colors - 1;
        let (outcome, used) = match algorithm {
            DescentAlgorithm::Tabucol => {
                let warm = dissolve_min_conflict(graph, &current);
                run_tabucol(graph, k, warm, budget.iteration_cap(), &clock, &mut rng)
            }
            DescentAlgorithm::Partialcol => {
                let warm = dissolve_smallest(&current);
                run_partialcol(graph, k, warm, budget.iteration_cap(), &clock, &mut rng)
            }
            DescentAlgorithm::HybridEa => {
                let warm = dissolve_smallest(&current);
                let cfg = EAConfig {
                    seed: budget.seed.wrapping_add(k as u64),
                    ..options.ea
                };
                let remaining = budget
                    .max_seconds
                    .map(|s| (s - clock.elapsed_secs()).max(0.0));
                let sub = SearchBudget {
                    max_seconds: remaining,
                    ..*budget
                };
                hybrid_ea_from(graph, k, &cfg, &sub, Some(&warm))?
            }
        };
        iterations += used;
        let objective = outcome.conflict_count + outcome.uncolored_count as u64;
        match adopt(graph, &outcome) {
            Some(c) => {
                current = c.with_instance_id(current.instance_id.clone());
                record(&mut trace, iterations, 0, current.num_colors);
            }
            None => {
                record(&mut trace, iterations, objective, current.num_colors);
                break;
            }
        }
    }
    debug_assert!(verify_with_graph(graph, &current, 1).valid);
    Ok(current)
}

fn adopt(graph: &ConflictGraph, outcome: &PartialColoring) -> Option<Coloring> {
    let c = outcome.to_coloring()?;
    verify_with_graph(graph, &c, 1).valid.then_some(c)
}

/// Index of the smallest class (lowest label on ties).
fn smallest_class(coloring: &Coloring) -> usize {
    let mut sizes = vec![0usize; coloring.num_colors];
    for &c in &coloring.colors {
        sizes[c as usize] += 1;
    }
    (0..sizes.len()).min_by_key(|&c| (sizes[c], c)).unwrap()
}

/// Drops the smallest class, relabels the rest to `0..k-1` and leaves its
/// vertices uncolored.
fn dissolve_smallest(coloring: &Coloring) -> Vec<u32> {
    let gone = smallest_class(coloring) as u32;
    coloring
        .colors
        .iter()
        .map(|&c| match c.cmp(&gone) {
            std::cmp::Ordering::Less => c,
            std::cmp::Ordering::Equal => UNCOLORED,
            std::cmp::Ordering::Greater => c - 1,
        })
        .collect()
}

/// As [`dissolve_smallest`], then gives each freed vertex the color with the
/// fewest neighbors (lowest color on ties).
fn dissolve_min_conflict(graph: &ConflictGraph, coloring: &Coloring) -> Vec<u32> {
    let k = coloring.num_colors - 1;
    let mut colors = dissolve_smallest(coloring);
    let freed: Vec<usize> = (0..colors.len()).filter(|&v| colors[v] == UNCOLORED).collect();
    let mut count = vec![0usize; k];
    for v in freed {
        count.iter_mut().for_each(|c| *c = 0);
        for u in graph.neighbors(v) {
            if colors[u] != UNCOLORED {
                count[colors[u] as usize] += 1;
            }
        }
        let c = (0..k).min_by_key(|&c| (count[c], c)).unwrap();
        colors[v] = c as u32;
    }
    colors
}

/// Runs independent descents with seeds `budget.seed .. budget.seed +
/// attempts` in parallel and keeps the fewest colors (lowest seed on ties).
pub fn solve_portfolio(
    graph: &ConflictGraph,
    budget: &SearchBudget,
    algorithm: DescentAlgorithm,
    options: &DescentOptions,
    attempts: usize,
) -> Result<(Coloring, u64)> {
    let results: Vec<(Coloring, u64)> = (0..attempts.max(1) as u64)
        .into_par_iter()
        .map(|i| {
            let seed = budget.seed.wrapping_add(i);
            let b = SearchBudget { seed, ..*budget };
            solve_descending_with(graph, &b, algorithm, options, None).map(|c| (c, seed))
        })
        .collect::<Result<_>>()?;
    Ok(results
        .into_iter()
        .min_by_key(|(c, seed)| (c.num_colors, *seed))
        .unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> ConflictGraph {
        ConflictGraph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    fn cycle(n: usize) -> ConflictGraph {
        ConflictGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn stops_at_clique_bound() {
        let mut trace = Vec::new();
        let c = solve_descending_with(
            &complete(4),
            &SearchBudget::iterations(1000, 0),
            DescentAlgorithm::Tabucol,
            &DescentOptions::default(),
            Some(&mut trace),
        )
        .unwrap();
        assert_eq!(c.num_colors, 4);
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn odd_cycle_stays_at_three() {
        for algo in [
            DescentAlgorithm::Tabucol,
            DescentAlgorithm::Partialcol,
            DescentAlgorithm::HybridEa,
        ] {
            let c = solve_descending(&cycle(5), &SearchBudget::iterations(200, 1), algo).unwrap();
            assert_eq!(c.num_colors, 3);
        }
    }

    #[test]
    fn dissolve_helpers() {
        let c = Coloring::from_colors(vec![0, 1, 1, 2, 2, 0, 2]);
        // Classes 0 and 1 both have two members; 0 goes.
        assert_eq!(
            dissolve_smallest(&c),
            vec![UNCOLORED, 0, 0, 1, 1, UNCOLORED, 1]
        );
        let g = cycle(7);
        let w = dissolve_min_conflict(&g, &c);
        assert!(w.iter().all(|&x| x < 2));
    }

    #[test]
    fn trace_csv_header() {
        let rows = vec![TraceRow {
            iteration: 3,
            objective: 1,
            best_k: 4,
            elapsed_seconds: 0.5,
        }];
        let mut buf = Vec::new();
        write_trace(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "iteration,objective,best_k,elapsed_seconds\n3,1,4,0.5\n"
        );
    }
}
