//! Construction heuristics and iterated greedy recoloring.

use std::cmp::Reverse;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::UNCOLORED;
use crate::bitset::{self, ones_and, words_for, BitSet};
use crate::conflict::ConflictGraph;
use crate::error::{Error, Result};
use crate::instance::{verify_with_graph, Coloring};

/// Colors vertices in the given order with the lowest color absent from the
/// already-colored neighborhood.
pub(crate) fn greedy_in_order(graph: &ConflictGraph, order: &[usize]) -> Vec<u32> {
    let n = graph.n();
    let mut colors = vec![UNCOLORED; n];
    let mut stamp = vec![usize::MAX; n + 1];
    for &v in order {
        for u in graph.neighbors(v) {
            let cu = colors[u];
            if cu != UNCOLORED {
                stamp[cu as usize] = v;
            }
        }
        colors[v] = (0..).find(|&c| stamp[c] != v).unwrap() as u32;
    }
    colors
}

/// Welsh-Powell: vertices by non-increasing degree, lowest feasible color.
pub fn greedy_welsh_powell(graph: &ConflictGraph) -> Coloring {
    let mut order: Vec<usize> = (0..graph.n()).collect();
    order.sort_by_key(|&v| (Reverse(graph.degree(v)), v));
    Coloring::from_colors(greedy_in_order(graph, &order))
}

/// DSATUR with the dense O(n²) selection loop. The next vertex has the most
/// distinct neighbor colors, then the highest degree among uncolored
/// vertices, then the lowest index.
pub fn dsatur(graph: &ConflictGraph) -> Coloring {
    let n = graph.n();
    let max_colors = graph.degrees().iter().copied().max().unwrap_or(0) as usize + 1;
    let cw = words_for(max_colors);
    let mut seen = vec![0u64; n * cw];
    let mut sat = vec![0u32; n];
    let mut udeg: Vec<u32> = graph.degrees().to_vec();
    let mut colors = vec![UNCOLORED; n];
    let mut pending: Vec<usize> = (0..n).collect();

    while !pending.is_empty() {
        let mut best_pos = 0;
        let mut best_key = (0u32, 0u32);
        for (pos, &v) in pending.iter().enumerate() {
            let key = (sat[v], udeg[v]);
            if pos == 0 || key > best_key {
                best_key = key;
                best_pos = pos;
            }
        }
        // `pending` stays sorted, so the first maximum is the lowest index.
        let v = pending.remove(best_pos);
        let row = &seen[v * cw..(v + 1) * cw];
        let c = row
            .iter()
            .enumerate()
            .find(|(_, &w)| w != !0)
            .map(|(i, &w)| i * 64 + (!w).trailing_zeros() as usize)
            .unwrap();
        colors[v] = c as u32;
        for u in graph.neighbors(v) {
            if colors[u] != UNCOLORED {
                continue;
            }
            udeg[u] -= 1;
            let row = &mut seen[u * cw..(u + 1) * cw];
            if !bitset::test_bit(row, c) {
                bitset::set_bit(row, c);
                sat[u] += 1;
            }
        }
    }
    Coloring::from_colors(colors)
}

/// Recursive Largest First: builds one maximal independent class at a time.
/// Each class starts from the uncolored vertex of highest residual degree and
/// grows by the candidate with the most neighbors among vertices already
/// excluded from the class (fewest candidate neighbors, then lowest index,
/// break ties).
pub fn rlf(graph: &ConflictGraph) -> Coloring {
    let n = graph.n();
    let mut colors = vec![UNCOLORED; n];
    let mut uncolored = BitSet::full(n);
    let mut udeg: Vec<u32> = graph.degrees().to_vec();
    let mut cnt_excluded = vec![0u32; n];
    let mut cnt_candidate = vec![0u32; n];
    let mut remaining = n;
    let mut color = 0u32;

    while remaining > 0 {
        let mut candidates = uncolored.clone();
        let mut seed = usize::MAX;
        for v in uncolored.iter() {
            cnt_excluded[v] = 0;
            cnt_candidate[v] = udeg[v];
            if seed == usize::MAX || udeg[v] > udeg[seed] {
                seed = v;
            }
        }
        let mut class = Vec::new();
        let mut pick = seed;
        loop {
            class.push(pick);
            colors[pick] = color;
            candidates.remove(pick);
            let moved: Vec<usize> = ones_and(graph.row(pick), candidates.words()).collect();
            for &y in &moved {
                candidates.remove(y);
            }
            for &y in &moved {
                for z in ones_and(graph.row(y), candidates.words()) {
                    cnt_excluded[z] += 1;
                    cnt_candidate[z] -= 1;
                }
            }
            let next = candidates
                .iter()
                .map(|u| (cnt_excluded[u], Reverse(cnt_candidate[u]), Reverse(u)))
                .max();
            match next {
                Some((_, _, Reverse(u))) => pick = u,
                None => break,
            }
        }
        for &x in &class {
            uncolored.remove(x);
        }
        for &x in &class {
            for y in ones_and(graph.row(x), uncolored.words()) {
                udeg[y] -= 1;
            }
        }
        remaining -= class.len();
        color += 1;
    }
    Coloring::from_colors(colors)
}

/// Class relabeling rule applied before each greedy pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IgStrategy {
    Reverse,
    Random,
    /// Largest classes first.
    DecreasingSize,
}

impl std::str::FromStr for IgStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reverse" => Ok(IgStrategy::Reverse),
            "random" => Ok(IgStrategy::Random),
            "decreasing_size" => Ok(IgStrategy::DecreasingSize),
            other => Err(Error::InvalidConfig(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Iterated greedy recoloring. Never increases the number of colors.
pub fn iterated_greedy(
    graph: &ConflictGraph,
    start: &Coloring,
    strategy: IgStrategy,
    iterations: usize,
    seed: u64,
) -> Result<Coloring> {
    iterated_greedy_with_history(graph, start, strategy, iterations, seed).map(|(c, _)| c)
}

/// As [`iterated_greedy`], also returning the color count after every
/// iteration.
pub fn iterated_greedy_with_history(
    graph: &ConflictGraph,
    start: &Coloring,
    strategy: IgStrategy,
    iterations: usize,
    seed: u64,
) -> Result<(Coloring, Vec<usize>)> {
    let report = verify_with_graph(graph, start, 1);
    if !report.valid {
        return Err(Error::InvalidColoring(format!(
            "iterated greedy needs a valid start coloring: {}",
            report
                .error
                .unwrap_or_else(|| format!("conflict {:?}", report.conflicts[0]))
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut classes = Coloring::from_colors(start.colors.clone()).classes();
    let mut history = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        match strategy {
            IgStrategy::Reverse => classes.reverse(),
            IgStrategy::Random => classes.shuffle(&mut rng),
            IgStrategy::DecreasingSize => classes.sort_by_key(|c| Reverse(c.len())),
        }
        let before = classes.len();
        classes = first_fit_by_classes(graph, &classes);
        debug_assert!(classes.len() <= before);
        history.push(classes.len());
    }
    let mut colors = vec![0u32; graph.n()];
    for (c, class) in classes.iter().enumerate() {
        for &v in class {
            colors[v] = c as u32;
        }
    }
    Ok((
        Coloring::from_colors(colors).with_instance_id(start.instance_id.clone()),
        history,
    ))
}

/// Greedy pass over vertices grouped by class order; each vertex joins the
/// first new class holding none of its neighbors. Probing class members
/// against the vertex's adjacency row stops at the first neighbor found,
/// which is cheap on dense graphs.
fn first_fit_by_classes(graph: &ConflictGraph, classes: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(classes.len());
    for class in classes {
        for &v in class {
            let row = graph.row(v);
            match out
                .iter_mut()
                .find(|members| !members.iter().any(|&u| bitset::test_bit(row, u)))
            {
                Some(members) => members.push(v),
                None => out.push(vec![v]),
            }
        }
    }
    out
}
