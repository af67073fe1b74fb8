//! Greedy partition crossover and the hybrid evolutionary algorithm built on
//! it, with TABUCOL as the improvement operator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tabu::run_tabucol;
use super::{Clock, PartialColoring, SearchBudget, UNCOLORED};
use crate::conflict::ConflictGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossover {
    Gpx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replacement {
    /// The child replaces the member with the most conflicts if it has no
    /// more conflicts than that member.
    Worst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EAConfig {
    pub population_size: usize,
    pub tabu_iterations_per_child: u64,
    pub crossover: Crossover,
    pub replacement: Replacement,
    pub seed: u64,
}

impl Default for EAConfig {
    fn default() -> Self {
        EAConfig {
            population_size: 10,
            tabu_iterations_per_child: 10_000,
            crossover: Crossover::Gpx,
            replacement: Replacement::Worst,
            seed: 0,
        }
    }
}

impl EAConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "population size {} < 2",
                self.population_size
            )));
        }
        Ok(())
    }
}

/// Greedy partition crossover. For `k` rounds, alternating between parents
/// (first parent first), the class with the most still-uncovered vertices is
/// copied into the child under the round's color; ties go to the lower class
/// index. A vertex keeps the first color it receives. Vertices left over stay
/// [`UNCOLORED`].
pub fn gpx_crossover(
    graph: &ConflictGraph,
    parent1: &[u32],
    parent2: &[u32],
    k: usize,
) -> Result<PartialColoring> {
    let n = graph.n();
    if parent1.len() != n || parent2.len() != n {
        return Err(Error::InvalidColoring(format!(
            "parents have {} and {} entries for {n} vertices",
            parent1.len(),
            parent2.len()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if let Some(&c) = parent1.iter().chain(parent2).find(|&&c| c as usize >= k) {
        return Err(Error::InvalidColoring(format!(
            "parent color {c} outside 0..{k}"
        )));
    }
    let parents = [parent1, parent2];
    let mut members: [Vec<Vec<usize>>; 2] = [vec![Vec::new(); k], vec![Vec::new(); k]];
    let mut sizes = [vec![0usize; k], vec![0usize; k]];
    for v in 0..n {
        for p in 0..2 {
            let c = parents[p][v] as usize;
            members[p][c].push(v);
            sizes[p][c] += 1;
        }
    }
    let mut child = vec![UNCOLORED; n];
    for round in 0..k {
        let p = round % 2;
        let class = (0..k)
            .max_by(|&a, &b| sizes[p][a].cmp(&sizes[p][b]).then(b.cmp(&a)))
            .unwrap();
        if sizes[p][class] == 0 {
            break;
        }
        for &v in &members[p][class] {
            if child[v] == UNCOLORED {
                child[v] = round as u32;
                sizes[0][parent1[v] as usize] -= 1;
                sizes[1][parent2[v] as usize] -= 1;
            }
        }
    }
    Ok(PartialColoring::from_assignment(graph, child, k))
}

/// Hybrid evolutionary search for a conflict-free k-coloring.
///
/// Members are complete k-assignments improved by TABUCOL at birth. Each
/// generation crosses two distinct random parents with GPX, gives leftover
/// vertices random colors, improves the child with TABUCOL and lets it
/// replace the worst member when it is no worse. `budget.max_iterations`
/// counts generations; `budget.max_seconds` bounds the whole run. The RNG is
/// seeded from `config.seed`.
pub fn hybrid_ea(
    graph: &ConflictGraph,
    k: usize,
    config: &EAConfig,
    budget: &SearchBudget,
) -> Result<PartialColoring> {
    hybrid_ea_from(graph, k, config, budget, None).map(|(p, _)| p)
}

/// Variant seeding every initial member from `warm` (a k-assignment whose
/// uncolored entries are filled at random per member).
pub(crate) fn hybrid_ea_from(
    graph: &ConflictGraph,
    k: usize,
    config: &EAConfig,
    budget: &SearchBudget,
    warm: Option<&[u32]>,
) -> Result<(PartialColoring, u64)> {
    config.validate()?;
    budget.validate()?;
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let n = graph.n();
    if k >= n {
        let colors = (0..n as u32).collect();
        return Ok((PartialColoring::from_assignment(graph, colors, k), 0));
    }
    let clock = Clock::new(budget.max_seconds);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut iterations = 0u64;

    let mut population: Vec<PartialColoring> = Vec::with_capacity(config.population_size);
    for _ in 0..config.population_size {
        let start = match warm {
            Some(w) => w
                .iter()
                .map(|&c| {
                    if c == UNCOLORED {
                        rng.gen_range(0..k) as u32
                    } else {
                        c
                    }
                })
                .collect(),
            None => randomized_greedy_assignment(graph, k, &mut rng),
        };
        let (member, it) =
            run_tabucol(graph, k, start, config.tabu_iterations_per_child, &clock, &mut rng);
        iterations += it;
        let done = member.conflict_count == 0;
        population.push(member);
        if done || clock.expired() {
            return Ok((best_member(population), iterations));
        }
    }

    let max_generations = budget.iteration_cap();
    let mut generation = 0u64;
    while generation < max_generations && !clock.expired() {
        generation += 1;
        let i = rng.gen_range(0..population.len());
        let mut j = rng.gen_range(0..population.len() - 1);
        if j >= i {
            j += 1;
        }
        let mut child = gpx_crossover(graph, &population[i].colors, &population[j].colors, k)?.colors;
        for c in child.iter_mut().filter(|c| **c == UNCOLORED) {
            *c = rng.gen_range(0..k) as u32;
        }
        let (child, it) =
            run_tabucol(graph, k, child, config.tabu_iterations_per_child, &clock, &mut rng);
        iterations += it;

        let worst = (0..population.len())
            .max_by(|&a, &b| {
                population[a]
                    .conflict_count
                    .cmp(&population[b].conflict_count)
                    .then(a.cmp(&b))
            })
            .unwrap();
        let solved = child.conflict_count == 0;
        match config.replacement {
            Replacement::Worst => {
                if child.conflict_count <= population[worst].conflict_count {
                    population[worst] = child;
                }
            }
        }
        if solved {
            break;
        }
    }
    Ok((best_member(population), iterations))
}

fn best_member(population: Vec<PartialColoring>) -> PartialColoring {
    population
        .into_iter()
        .enumerate()
        .min_by(|(a, x), (b, y)| x.conflict_count.cmp(&y.conflict_count).then(a.cmp(b)))
        .map(|(_, p)| p)
        .unwrap()
}

/// Random-order greedy restricted to `k` colors; vertices with no free
/// color get a random one.
fn randomized_greedy_assignment(graph: &ConflictGraph, k: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let n = graph.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut colors = vec![UNCOLORED; n];
    let mut used = vec![false; k];
    for &v in &order {
        used.iter_mut().for_each(|u| *u = false);
        for u in graph.neighbors(v) {
            if colors[u] != UNCOLORED {
                used[colors[u] as usize] = true;
            }
        }
        colors[v] = match used.iter().position(|&u| !u) {
            Some(c) => c as u32,
            None => rng.gen_range(0..k) as u32,
        };
    }
    colors
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> ConflictGraph {
        ConflictGraph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn gpx_identical_parents() {
        let g = ConflictGraph::from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5), (0, 5)]).unwrap();
        let p = vec![0, 1, 2, 0, 1, 2];
        let child = gpx_crossover(&g, &p, &p, 3).unwrap();
        assert_eq!(child.uncolored_count, 0);
        assert_eq!(child.conflict_count, 0);
        // Same partition up to relabeling.
        for u in 0..6 {
            for v in 0..6 {
                assert_eq!(p[u] == p[v], child.colors[u] == child.colors[v]);
            }
        }
    }

    #[test]
    fn gpx_single_class() {
        let g = complete(3);
        let child = gpx_crossover(&g, &[0, 0, 0], &[0, 0, 0], 1).unwrap();
        assert_eq!(child.colors, vec![0, 0, 0]);
        assert_eq!(child.uncolored_count, 0);
    }

    #[test]
    fn gpx_rejects_mismatch() {
        let g = complete(3);
        assert!(gpx_crossover(&g, &[0, 1], &[0, 1, 0], 2).is_err());
        assert!(gpx_crossover(&g, &[0, 1, 2], &[0, 1, 0], 2).is_err());
    }

    #[test]
    fn ea_trivial_cases() {
        let budget = SearchBudget::iterations(10, 0);
        let cfg = EAConfig::default();
        let g = complete(4);
        let r = hybrid_ea(&g, 5, &cfg, &budget).unwrap();
        assert_eq!(r.colors, vec![0, 1, 2, 3]);
        let r = hybrid_ea(&g, 4, &cfg, &budget).unwrap();
        assert!(r.is_complete_proper());
        let bad = EAConfig {
            population_size: 1,
            ..cfg
        };
        assert!(hybrid_ea(&g, 4, &bad, &budget).is_err());
    }
}
