//! TABUCOL (conflict minimization over complete k-assignments) and
//! PARTIALCOL (uncolored-count minimization over conflict-free partial
//! k-colorings).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{count_defects, tenure, Clock, PartialColoring, SearchBudget, UNCOLORED};
use crate::conflict::ConflictGraph;
use crate::error::{Error, Result};

const AUDIT_EVERY: u64 = 1 << 14;
const CLOCK_EVERY: u64 = 64;

/// Vertex set with O(1) insert, remove and membership.
struct IndexedSet {
    items: Vec<usize>,
    pos: Vec<usize>,
}

impl IndexedSet {
    fn new(n: usize) -> Self {
        IndexedSet {
            items: Vec::new(),
            pos: vec![usize::MAX; n],
        }
    }

    #[inline]
    fn insert(&mut self, v: usize) {
        if self.pos[v] == usize::MAX {
            self.pos[v] = self.items.len();
            self.items.push(v);
        }
    }

    #[inline]
    fn remove(&mut self, v: usize) {
        let p = self.pos[v];
        if p != usize::MAX {
            let last = self.items.pop().unwrap();
            if last != v {
                self.items[p] = last;
                self.pos[last] = p;
            }
            self.pos[v] = usize::MAX;
        }
    }

    fn len(&self) -> usize {
        self.items.len()
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    Ok(())
}

fn random_assignment(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..k) as u32).collect()
}

/// Moves are `(delta, vertex, color)` and compare lexicographically, so ties
/// go to the lowest vertex, then the lowest color. A tabu move is admissible
/// when it would beat the best objective seen; if every move is tabu, the
/// best tabu move is taken.
#[inline]
fn better(a: (i64, usize, usize), b: Option<(i64, usize, usize)>) -> bool {
    b.map_or(true, |b| a < b)
}

/// TABUCOL from a uniformly random k-assignment.
pub fn tabucol(graph: &ConflictGraph, k: usize, budget: &SearchBudget) -> Result<PartialColoring> {
    check_k(k)?;
    budget.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let start = random_assignment(graph.n(), k, &mut rng);
    let clock = Clock::new(budget.max_seconds);
    Ok(run_tabucol(graph, k, start, budget.iteration_cap(), &clock, &mut rng).0)
}

/// TABUCOL from a given complete k-assignment (conflicts allowed).
pub fn tabucol_from(
    graph: &ConflictGraph,
    k: usize,
    start: Vec<u32>,
    budget: &SearchBudget,
) -> Result<PartialColoring> {
    check_k(k)?;
    budget.validate()?;
    check_assignment(graph, &start, k, false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let clock = Clock::new(budget.max_seconds);
    Ok(run_tabucol(graph, k, start, budget.iteration_cap(), &clock, &mut rng).0)
}

fn check_assignment(graph: &ConflictGraph, colors: &[u32], k: usize, allow_uncolored: bool) -> Result<()> {
    if colors.len() != graph.n() {
        return Err(Error::InvalidColoring(format!(
            "assignment has {} entries for {} vertices",
            colors.len(),
            graph.n()
        )));
    }
    if let Some(v) = colors
        .iter()
        .position(|&c| !(allow_uncolored && c == UNCOLORED) && c as usize >= k)
    {
        return Err(Error::InvalidColoring(format!(
            "vertex {v} has color {} outside 0..{k}",
            colors[v]
        )));
    }
    Ok(())
}

/// Core TABUCOL loop. Returns the best assignment seen and the number of
/// iterations performed.
pub(crate) fn run_tabucol(
    graph: &ConflictGraph,
    k: usize,
    mut colors: Vec<u32>,
    max_iterations: u64,
    clock: &Clock,
    rng: &mut ChaCha8Rng,
) -> (PartialColoring, u64) {
    let n = graph.n();
    // gamma[v * k + c]: neighbors of v currently colored c.
    let mut gamma = vec![0u32; n * k];
    for v in 0..n {
        for u in graph.neighbors(v) {
            gamma[v * k + colors[u] as usize] += 1;
        }
    }
    let mut conflicted = IndexedSet::new(n);
    let mut objective: u64 = 0;
    for v in 0..n {
        let g = gamma[v * k + colors[v] as usize];
        if g > 0 {
            conflicted.insert(v);
            objective += g as u64;
        }
    }
    objective /= 2;

    let mut tabu_until = vec![0u64; n * k];
    let mut best_objective = objective;
    let mut best_colors = colors.clone();
    let mut iter: u64 = 0;

    while objective > 0 && iter < max_iterations {
        if iter % CLOCK_EVERY == 0 && clock.expired() {
            break;
        }
        iter += 1;

        let mut chosen: Option<(i64, usize, usize)> = None;
        let mut fallback: Option<(i64, usize, usize)> = None;
        for &v in &conflicted.items {
            let cv = colors[v] as usize;
            let base = gamma[v * k + cv] as i64;
            let row = &gamma[v * k..(v + 1) * k];
            for (c, &g) in row.iter().enumerate() {
                if c == cv {
                    continue;
                }
                let mv = (g as i64 - base, v, c);
                let tabu = tabu_until[v * k + c] > iter;
                let aspirates = (objective as i64 + mv.0) < best_objective as i64;
                if !tabu || aspirates {
                    if better(mv, chosen) {
                        chosen = Some(mv);
                    }
                } else if better(mv, fallback) {
                    fallback = Some(mv);
                }
            }
        }
        let Some((delta, v, new)) = chosen.or(fallback) else {
            // k == 1 leaves no alternative colors.
            break;
        };

        let old = colors[v] as usize;
        colors[v] = new as u32;
        for u in graph.neighbors(v) {
            gamma[u * k + old] -= 1;
            gamma[u * k + new] += 1;
            let cu = colors[u] as usize;
            if cu == old && gamma[u * k + old] == 0 {
                conflicted.remove(u);
            } else if cu == new && gamma[u * k + new] == 1 {
                conflicted.insert(u);
            }
        }
        if gamma[v * k + new] == 0 {
            conflicted.remove(v);
        } else {
            conflicted.insert(v);
        }
        objective = (objective as i64 + delta) as u64;
        tabu_until[v * k + old] = iter + tenure(objective, rng);

        if objective < best_objective {
            best_objective = objective;
            best_colors.copy_from_slice(&colors);
        }

        if cfg!(debug_assertions) && iter % AUDIT_EVERY == 0 {
            debug_assert_eq!(count_defects(graph, &colors), (objective, 0));
        }
    }

    (
        PartialColoring {
            colors: best_colors,
            k,
            conflict_count: best_objective,
            uncolored_count: 0,
        },
        iter,
    )
}

/// PARTIALCOL from a randomized greedy partial k-coloring.
pub fn partialcol(graph: &ConflictGraph, k: usize, budget: &SearchBudget) -> Result<PartialColoring> {
    check_k(k)?;
    budget.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let start = random_greedy_partial(graph, k, &mut rng);
    let clock = Clock::new(budget.max_seconds);
    Ok(run_partialcol(graph, k, start, budget.iteration_cap(), &clock, &mut rng).0)
}

/// PARTIALCOL from a given conflict-free partial k-coloring.
pub fn partialcol_from(
    graph: &ConflictGraph,
    k: usize,
    start: Vec<u32>,
    budget: &SearchBudget,
) -> Result<PartialColoring> {
    check_k(k)?;
    budget.validate()?;
    check_assignment(graph, &start, k, true)?;
    if count_defects(graph, &start).0 != 0 {
        return Err(Error::InvalidColoring(
            "partialcol needs a conflict-free start".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let clock = Clock::new(budget.max_seconds);
    Ok(run_partialcol(graph, k, start, budget.iteration_cap(), &clock, &mut rng).0)
}

/// Visits vertices in random order, giving each the lowest color in `0..k`
/// free in its neighborhood, or leaving it uncolored.
pub(crate) fn random_greedy_partial(graph: &ConflictGraph, k: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let n = graph.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut colors = vec![UNCOLORED; n];
    let mut used = vec![false; k];
    for &v in &order {
        used.iter_mut().for_each(|u| *u = false);
        for u in graph.neighbors(v) {
            let cu = colors[u];
            if cu != UNCOLORED {
                used[cu as usize] = true;
            }
        }
        if let Some(c) = used.iter().position(|&u| !u) {
            colors[v] = c as u32;
        }
    }
    colors
}

pub(crate) fn run_partialcol(
    graph: &ConflictGraph,
    k: usize,
    mut colors: Vec<u32>,
    max_iterations: u64,
    clock: &Clock,
    rng: &mut ChaCha8Rng,
) -> (PartialColoring, u64) {
    let n = graph.n();
    let mut gamma = vec![0u32; n * k];
    let mut uncolored = IndexedSet::new(n);
    for v in 0..n {
        if colors[v] == UNCOLORED {
            uncolored.insert(v);
        }
        for u in graph.neighbors(v) {
            if colors[u] != UNCOLORED {
                gamma[v * k + colors[u] as usize] += 1;
            }
        }
    }
    let mut tabu_until = vec![0u64; n * k];
    let mut best_objective = uncolored.len();
    let mut best_colors = colors.clone();
    let mut iter: u64 = 0;

    while uncolored.len() > 0 && iter < max_iterations {
        if iter % CLOCK_EVERY == 0 && clock.expired() {
            break;
        }
        iter += 1;
        let objective = uncolored.len() as i64;

        let mut chosen: Option<(i64, usize, usize)> = None;
        let mut fallback: Option<(i64, usize, usize)> = None;
        for &v in &uncolored.items {
            for (c, &g) in gamma[v * k..(v + 1) * k].iter().enumerate() {
                let mv = (g as i64 - 1, v, c);
                let tabu = tabu_until[v * k + c] > iter;
                let aspirates = objective + mv.0 < best_objective as i64;
                if !tabu || aspirates {
                    if better(mv, chosen) {
                        chosen = Some(mv);
                    }
                } else if better(mv, fallback) {
                    fallback = Some(mv);
                }
            }
        }
        let (_, v, c) = chosen.or(fallback).expect("k >= 1 yields at least one move");

        let ejected: Vec<usize> = graph.neighbors(v).filter(|&u| colors[u] == c as u32).collect();
        for &u in &ejected {
            colors[u] = UNCOLORED;
            uncolored.insert(u);
            for w in graph.neighbors(u) {
                gamma[w * k + c] -= 1;
            }
        }
        colors[v] = c as u32;
        uncolored.remove(v);
        for w in graph.neighbors(v) {
            gamma[w * k + c] += 1;
        }
        let t = tenure(uncolored.len() as u64, rng);
        for &u in &ejected {
            tabu_until[u * k + c] = iter + t;
        }

        if uncolored.len() < best_objective {
            best_objective = uncolored.len();
            best_colors.copy_from_slice(&colors);
        }

        if cfg!(debug_assertions) && iter % AUDIT_EVERY == 0 {
            debug_assert_eq!(count_defects(graph, &colors), (0, uncolored.len()));
        }
    }

    (
        PartialColoring {
            colors: best_colors,
            k,
            conflict_count: 0,
            uncolored_count: best_objective,
        },
        iter,
    )
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
    fn tabucol_small_graphs() {
        let b = SearchBudget::iterations(10_000, 7);
        let r = tabucol(&complete(3), 3, &b).unwrap();
        assert_eq!(r.conflict_count, 0);
        assert!(r.audit(&complete(3)));

        let r = tabucol(&complete(4), 3, &b).unwrap();
        assert!(r.conflict_count >= 1);
        assert!(r.audit(&complete(4)));

        let r = tabucol(&cycle(5), 3, &SearchBudget::iterations(1_000, 1)).unwrap();
        assert_eq!(r.conflict_count, 0);
        assert!(r.to_coloring().is_some());
    }

    #[test]
    fn tabucol_k1_terminates() {
        let r = tabucol(&cycle(4), 1, &SearchBudget::iterations(100, 0)).unwrap();
        assert_eq!(r.conflict_count, 4);
    }

    #[test]
    fn partialcol_small_graphs() {
        let b = SearchBudget::iterations(10_000, 3);
        let r = partialcol(&complete(3), 3, &b).unwrap();
        assert_eq!(r.uncolored_count, 0);
        let r = partialcol(&complete(4), 3, &b).unwrap();
        assert!(r.uncolored_count >= 1);
        assert_eq!(r.conflict_count, 0);
        assert!(r.audit(&complete(4)));
    }

    #[test]
    fn warm_start_validation() {
        let g = cycle(4);
        let b = SearchBudget::iterations(10, 0);
        assert!(tabucol_from(&g, 2, vec![0, 1, 0], &b).is_err());
        assert!(tabucol_from(&g, 2, vec![0, 1, 0, 2], &b).is_err());
        assert!(partialcol_from(&g, 2, vec![0, 0, UNCOLORED, UNCOLORED], &b).is_err());
        let r = partialcol_from(&g, 2, vec![0, UNCOLORED, UNCOLORED, UNCOLORED], &b).unwrap();
        assert_eq!(r.uncolored_count, 0);
        assert!(tabucol(&g, 0, &b).is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let g = cycle(9);
        let b = SearchBudget::iterations(500, 42);
        assert_eq!(tabucol(&g, 2, &b).unwrap(), tabucol(&g, 2, &b).unwrap());
        assert_eq!(partialcol(&g, 2, &b).unwrap(), partialcol(&g, 2, &b).unwrap());
    }
}
