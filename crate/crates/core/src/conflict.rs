//! Dense conflict graphs over segments, kernel reductions with lift-back,
//! and a randomized greedy clique bound.

use std::collections::VecDeque;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bitset::{self, count_and, masked_subset, words_for, BitSet, Ones};
use crate::error::{Error, Result};
use crate::geometry::{conflict_unchecked, Segment};
use crate::instance::{Coloring, Instance};

/// Environment variable holding the adjacency allocation cap in MiB.
pub const MEM_CAP_ENV: &str = "PLANEPART_MEM_CAP_MB";

/// Default allocation cap for the adjacency matrix: 4 GiB.
pub const DEFAULT_MEM_CAP_BYTES: u64 = 4 << 30;

/// Undirected simple graph stored as a packed, symmetric bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
    degrees: Vec<u32>,
    m: u64,
}

/// Bytes needed by the adjacency matrix of an `n`-vertex graph.
pub fn adjacency_bytes(n: usize) -> u64 {
    n as u64 * words_for(n) as u64 * 8
}

/// Reads [`MEM_CAP_ENV`], falling back to [`DEFAULT_MEM_CAP_BYTES`].
pub fn mem_cap_from_env() -> u64 {
    std::env::var(MEM_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .map(|mb| mb << 20)
        .unwrap_or(DEFAULT_MEM_CAP_BYTES)
}

fn check_capacity(n: usize, cap_bytes: u64) -> Result<()> {
    let needed_bytes = adjacency_bytes(n);
    if needed_bytes > cap_bytes {
        return Err(Error::Capacity {
            n,
            needed_bytes,
            cap_bytes,
        });
    }
    Ok(())
}

impl ConflictGraph {
    pub fn empty(n: usize) -> Self {
        let stride = words_for(n);
        ConflictGraph {
            n,
            stride,
            bits: vec![0; n * stride],
            degrees: vec![0; n],
            m: 0,
        }
    }

    /// Builds a graph from an edge list; self-loops are rejected and repeated
    /// edges collapse.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = ConflictGraph::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidConfig(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidConfig(format!("self-loop at {u}")));
            }
            bitset::set_bit(g.row_mut(u), v);
            bitset::set_bit(g.row_mut(v), u);
        }
        g.finish();
        Ok(g)
    }

    fn row_mut(&mut self, v: usize) -> &mut [u64] {
        &mut self.bits[v * self.stride..(v + 1) * self.stride]
    }

    fn finish(&mut self) {
        let stride = self.stride;
        self.degrees = self
            .bits
            .chunks(stride.max(1))
            .take(self.n)
            .map(|r| r.iter().map(|w| w.count_ones()).sum())
            .collect();
        self.m = self.degrees.iter().map(|&d| d as u64).sum::<u64>() / 2;
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Words per adjacency row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.stride..(v + 1) * self.stride]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        bitset::test_bit(self.row(u), v)
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v] as usize
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> Ones<'_> {
        Ones::new(self.row(v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Edge density `m / C(n, 2)`.
    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m as f64 / (self.n as f64 * (self.n as f64 - 1.0) / 2.0)
    }

    /// Induced subgraph on `vertices` (in the given order).
    pub fn induced(&self, vertices: &[usize]) -> ConflictGraph {
        let mut g = ConflictGraph::empty(vertices.len());
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        for (i, &v) in vertices.iter().enumerate() {
            for u in self.neighbors(v) {
                if pos[u] != usize::MAX {
                    bitset::set_bit(g.row_mut(i), pos[u]);
                }
            }
        }
        g.finish();
        g
    }

    /// Connected components as vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = BitSet::new(self.n);
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen.contains(s) {
                continue;
            }
            seen.insert(s);
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for u in self.neighbors(v) {
                    if !seen.contains(u) {
                        seen.insert(u);
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Writes the graph in DIMACS edge format (1-based vertex ids).
    pub fn write_dimacs<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "p edge {} {}", self.n, self.m)?;
        for (u, v) in self.edges() {
            writeln!(sink, "e {} {}", u + 1, v + 1)?;
        }
        Ok(())
    }
}

/// Builds the conflict graph of `instance`, guarded by the allocation cap
/// from [`MEM_CAP_ENV`].
pub fn build_conflict_graph(instance: &Instance) -> Result<ConflictGraph> {
    build_conflict_graph_capped(instance, mem_cap_from_env())
}

/// Grid-filtered construction: segments are bucketed by the cells their
/// bounding boxes cover, and only pairs sharing a cell with overlapping boxes
/// reach the exact predicate. Rows are filled in parallel.
pub fn build_conflict_graph_capped(instance: &Instance, cap_bytes: u64) -> Result<ConflictGraph> {
    let n = instance.len();
    check_capacity(n, cap_bytes)?;
    let segments = instance.segments();
    let mut g = ConflictGraph::empty(n);
    if n < 2 {
        return Ok(g);
    }
    let grid = Grid::new(&segments);
    let stride = g.stride;
    g.bits
        .par_chunks_mut(stride)
        .enumerate()
        .for_each_init(
            || vec![u32::MAX; n],
            |stamp, (u, row)| {
                let su = &segments[u];
                let bu = su.bbox();
                grid.for_each_cell(&bu, |cell| {
                    for &v in cell {
                        let v = v as usize;
                        if v == u || stamp[v] == u as u32 {
                            continue;
                        }
                        stamp[v] = u as u32;
                        if boxes_overlap(&bu, &segments[v].bbox())
                            && conflict_unchecked(su, &segments[v])
                        {
                            bitset::set_bit(row, v);
                        }
                    }
                });
            },
        );
    g.finish();
    Ok(g)
}

/// All-pairs construction without spatial filtering.
pub fn build_conflict_graph_all_pairs(instance: &Instance, cap_bytes: u64) -> Result<ConflictGraph> {
    let n = instance.len();
    check_capacity(n, cap_bytes)?;
    let segments = instance.segments();
    let mut g = ConflictGraph::empty(n);
    let stride = g.stride;
    if n == 0 {
        return Ok(g);
    }
    g.bits.par_chunks_mut(stride).enumerate().for_each(|(u, row)| {
        for v in 0..n {
            if v != u && conflict_unchecked(&segments[u], &segments[v]) {
                bitset::set_bit(row, v);
            }
        }
    });
    g.finish();
    Ok(g)
}

#[inline]
fn boxes_overlap(a: &(i64, i64, i64, i64), b: &(i64, i64, i64, i64)) -> bool {
    a.0 <= b.2 && b.0 <= a.2 && a.1 <= b.3 && b.1 <= a.3
}

struct Grid {
    origin: (i64, i64),
    cell: i64,
    cols: i64,
    rows: i64,
    cells: Vec<Vec<u32>>,
}

impl Grid {
    fn new(segments: &[Segment]) -> Self {
        let boxes: Vec<_> = segments.iter().map(|s| s.bbox()).collect();
        let min_x = boxes.iter().map(|b| b.0).min().unwrap();
        let min_y = boxes.iter().map(|b| b.1).min().unwrap();
        let max_x = boxes.iter().map(|b| b.2).max().unwrap();
        let max_y = boxes.iter().map(|b| b.3).max().unwrap();

        let mut diags: Vec<i64> = boxes
            .iter()
            .map(|b| {
                let (w, h) = ((b.2 - b.0) as f64, (b.3 - b.1) as f64);
                (w * w + h * h).sqrt().ceil() as i64
            })
            .collect();
        let mid = diags.len() / 2;
        let median = *diags.select_nth_unstable(mid).1;

        let (width, height) = (max_x - min_x + 1, max_y - min_y + 1);
        let mut cell = median.max(1);
        // Bound both the cell count and the total number of cell entries;
        // long segments would otherwise be replicated across many cells.
        let n = segments.len() as i64;
        let coverage = |cell: i64| -> i64 {
            boxes
                .iter()
                .map(|b| ((b.2 - b.0) / cell + 2) * ((b.3 - b.1) / cell + 2))
                .sum()
        };
        while cell < width.max(height)
            && ((width / cell + 1) * (height / cell + 1) > 4 * n || coverage(cell) > 16 * n)
        {
            cell *= 2;
        }
        let cols = width / cell + 1;
        let rows = height / cell + 1;
        let mut cells = vec![Vec::new(); (cols * rows) as usize];
        let mut grid = Grid {
            origin: (min_x, min_y),
            cell,
            cols,
            rows,
            cells: Vec::new(),
        };
        for (i, b) in boxes.iter().enumerate() {
            let (c0, r0, c1, r1) = grid.cell_range(b);
            for r in r0..=r1 {
                for c in c0..=c1 {
                    cells[(r * cols + c) as usize].push(i as u32);
                }
            }
        }
        grid.cells = cells;
        grid
    }

    fn cell_range(&self, b: &(i64, i64, i64, i64)) -> (i64, i64, i64, i64) {
        let c0 = ((b.0 - self.origin.0) / self.cell).clamp(0, self.cols - 1);
        let r0 = ((b.1 - self.origin.1) / self.cell).clamp(0, self.rows - 1);
        let c1 = ((b.2 - self.origin.0) / self.cell).clamp(0, self.cols - 1);
        let r1 = ((b.3 - self.origin.1) / self.cell).clamp(0, self.rows - 1);
        (c0, r0, c1, r1)
    }

    fn for_each_cell(&self, b: &(i64, i64, i64, i64), mut f: impl FnMut(&[u32])) {
        let (c0, r0, c1, r1) = self.cell_range(b);
        for r in r0..=r1 {
            for c in c0..=c1 {
                f(&self.cells[(r * self.cols + c) as usize]);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EliminationReason {
    LowDegree,
    Dominated { witness: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub vertex: usize,
    pub reason: EliminationReason,
    /// Neighbors still present when the vertex was removed.
    pub neighbors: Vec<usize>,
}

/// Removal log of a kernelization. Vertex ids refer to the graph that was
/// reduced; `kept[i]` is the original id of kernel vertex `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EliminationStack {
    pub original_n: usize,
    pub kept: Vec<usize>,
    pub records: Vec<Elimination>,
}

impl EliminationStack {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }
}

/// Mutable view of a graph with a shrinking live-vertex set.
struct Reducer<'g> {
    graph: &'g ConflictGraph,
    alive: BitSet,
    degree: Vec<usize>,
    records: Vec<Elimination>,
}

impl<'g> Reducer<'g> {
    fn new(graph: &'g ConflictGraph) -> Self {
        Reducer {
            graph,
            alive: BitSet::full(graph.n()),
            degree: graph.degrees().iter().map(|&d| d as usize).collect(),
            records: Vec::new(),
        }
    }

    fn live_neighbors(&self, v: usize) -> Vec<usize> {
        bitset::ones_and(self.graph.row(v), self.alive.words()).collect()
    }

    fn remove(&mut self, v: usize, reason: EliminationReason) -> Vec<usize> {
        let neighbors = self.live_neighbors(v);
        self.alive.remove(v);
        for &u in &neighbors {
            self.degree[u] -= 1;
        }
        self.records.push(Elimination {
            vertex: v,
            reason,
            neighbors: neighbors.clone(),
        });
        neighbors
    }

    /// Strips vertices of live degree `< k` until none remain.
    fn low_degree(&mut self, k: usize) -> bool {
        let n = self.graph.n();
        let mut queue: VecDeque<usize> = (0..n)
            .filter(|&v| self.alive.contains(v) && self.degree[v] < k)
            .collect();
        let mut queued = BitSet::new(n);
        for &v in &queue {
            queued.insert(v);
        }
        let mut changed = false;
        while let Some(v) = queue.pop_front() {
            if !self.alive.contains(v) {
                continue;
            }
            changed = true;
            for u in self.remove(v, EliminationReason::LowDegree) {
                if self.degree[u] < k && !queued.contains(u) {
                    queued.insert(u);
                    queue.push_back(u);
                }
            }
        }
        changed
    }

    /// Removes dominated vertices until a full pass removes nothing.
    fn dominated(&mut self) -> bool {
        let mut changed = false;
        loop {
            let mut by_degree: Vec<usize> = self.alive.iter().collect();
            by_degree.sort_by_key(|&v| (std::cmp::Reverse(self.degree[v]), v));
            // Degrees only shrink during a pass, so the pass-start degree
            // bounds the current one from above.
            let start_degree = self.degree.clone();
            let mut removed_any = false;
            for &v in by_degree.iter().rev() {
                if !self.alive.contains(v) {
                    continue;
                }
                let dv = self.degree[v];
                let row_v = self.graph.row(v);
                // Only live w with degree >= deg(v) can dominate v.
                let witness = by_degree
                    .iter()
                    .take_while(|&&w| start_degree[w] >= dv)
                    .copied()
                    .find(|&w| {
                        w != v
                            && self.alive.contains(w)
                            && self.degree[w] >= dv
                            && !bitset::test_bit(row_v, w)
                            && masked_subset(row_v, self.alive.words(), self.graph.row(w))
                    });
                if let Some(w) = witness {
                    self.remove(v, EliminationReason::Dominated { witness: w });
                    removed_any = true;
                    changed = true;
                }
            }
            if !removed_any {
                return changed;
            }
        }
    }

    fn finish(self) -> (ConflictGraph, EliminationStack) {
        let kept: Vec<usize> = self.alive.iter().collect();
        let kernel = self.graph.induced(&kept);
        (
            kernel,
            EliminationStack {
                original_n: self.graph.n(),
                kept,
                records: self.records,
            },
        )
    }
}

/// Repeatedly discards vertices whose current degree is below `k`.
pub fn reduce_low_degree(graph: &ConflictGraph, k: usize) -> (ConflictGraph, EliminationStack) {
    let mut r = Reducer::new(graph);
    r.low_degree(k.max(1));
    r.finish()
}

/// Repeatedly discards a vertex `v` having a non-adjacent `w` with
/// `N(v) ⊆ N(w)`.
pub fn reduce_dominated(graph: &ConflictGraph) -> (ConflictGraph, EliminationStack) {
    let mut r = Reducer::new(graph);
    r.dominated();
    r.finish()
}

/// Alternates both reductions until neither applies.
pub fn kernelize(graph: &ConflictGraph, k: usize) -> (ConflictGraph, EliminationStack) {
    let mut r = Reducer::new(graph);
    loop {
        let a = r.low_degree(k.max(1));
        let b = r.dominated();
        if !a && !b {
            break;
        }
    }
    r.finish()
}

/// Extends a kernel coloring to the reduced graph by replaying the stack in
/// reverse: low-degree vertices take the smallest color missing from their
/// removal-time neighborhood, dominated vertices copy their witness.
pub fn lift_coloring(kernel_coloring: &Coloring, stack: &EliminationStack) -> Result<Coloring> {
    if kernel_coloring.colors.len() != stack.kept.len() {
        return Err(Error::InvalidColoring(format!(
            "kernel coloring has {} entries, kernel has {} vertices",
            kernel_coloring.colors.len(),
            stack.kept.len()
        )));
    }
    const NONE: u32 = u32::MAX;
    let mut colors = vec![NONE; stack.original_n];
    for (i, &v) in stack.kept.iter().enumerate() {
        colors[v] = kernel_coloring.colors[i];
    }
    let mut mark: Vec<u32> = Vec::new();
    for rec in stack.records.iter().rev() {
        let c = match rec.reason {
            EliminationReason::Dominated { witness } => {
                let c = colors[witness];
                if c == NONE {
                    return Err(Error::InvalidColoring(format!(
                        "witness {witness} of vertex {} is uncolored",
                        rec.vertex
                    )));
                }
                c
            }
            EliminationReason::LowDegree => {
                mark.clear();
                mark.resize(rec.neighbors.len() + 1, 0);
                for &u in &rec.neighbors {
                    let cu = colors[u];
                    if cu == NONE {
                        return Err(Error::InvalidColoring(format!(
                            "neighbor {u} of vertex {} is uncolored",
                            rec.vertex
                        )));
                    }
                    if (cu as usize) < mark.len() {
                        mark[cu as usize] = 1;
                    }
                }
                mark.iter().position(|&m| m == 0).unwrap() as u32
            }
        };
        colors[rec.vertex] = c;
    }
    if colors.iter().any(|&c| c == NONE) {
        return Err(Error::InvalidColoring("stack does not cover every vertex".into()));
    }
    Ok(Coloring::from_colors(colors).with_instance_id(kernel_coloring.instance_id.clone()))
}

/// Best of `restarts` randomized greedy cliques. Each run seeds with a
/// random vertex from the top degree decile, then repeatedly adds the
/// candidate with the most neighbors among the remaining candidates.
pub fn greedy_clique(graph: &ConflictGraph, restarts: usize, seed: u64) -> Vec<usize> {
    let n = graph.n();
    if n == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(graph.degree(v)), v));
    let decile = n.div_ceil(10);
    let mut best: Vec<usize> = Vec::new();
    for _ in 0..restarts.max(1) {
        let start = order[rng.gen_range(0..decile)];
        let mut clique = vec![start];
        let mut cand = BitSet::new(n);
        for u in graph.neighbors(start) {
            cand.insert(u);
        }
        while !cand.is_empty() {
            let pick = cand
                .iter()
                .map(|u| (count_and(graph.row(u), cand.words()), u))
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
                .unwrap()
                .1;
            clique.push(pick);
            cand.intersect_with(graph.row(pick));
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best.sort_unstable();
    best
}

/// Number of vertices per connected component size, largest first.
pub fn component_sizes(graph: &ConflictGraph) -> Vec<usize> {
    let mut sizes: Vec<usize> = graph.components().iter().map(|c| c.len()).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}
