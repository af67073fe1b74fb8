use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Family, GeneratorConfig, ReParams};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::instance::Instance;

const MAX_RESTARTS: usize = 1000;
const STALL_LIMIT: usize = 64;

/// Random `m`-regular simple graph on `ell` vertices by the pairing model:
/// stubs are matched one random pair at a time, skipping pairs that would
/// make a loop or a repeated edge, and the whole pairing restarts when no
/// admissible pair remains. Edges are returned as `(u, v)` with `u < v`.
pub fn random_regular_graph(ell: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(u32, u32)>> {
    if m >= ell || (ell * m) % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "no simple {m}-regular graph on {ell} vertices"
        )));
    }
    'restart: for _ in 0..MAX_RESTARTS {
        let mut stubs: Vec<u32> = (0..ell as u32).flat_map(|v| std::iter::repeat(v).take(m)).collect();
        let mut present: HashSet<(u32, u32)> = HashSet::with_capacity(ell * m / 2);
        let mut edges = Vec::with_capacity(ell * m / 2);
        let mut stalls = 0;
        while !stubs.is_empty() {
            let i = rng.gen_range(0..stubs.len());
            let j = rng.gen_range(0..stubs.len());
            let (u, v) = (stubs[i].min(stubs[j]), stubs[i].max(stubs[j]));
            if i != j && u != v && !present.contains(&(u, v)) {
                present.insert((u, v));
                edges.push((u, v));
                let (hi, lo) = (i.max(j), i.min(j));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                stalls = 0;
                continue;
            }
            stalls += 1;
            if stalls >= STALL_LIMIT {
                let admissible = (0..stubs.len()).any(|a| {
                    (a + 1..stubs.len()).any(|b| {
                        let (u, v) = (stubs[a].min(stubs[b]), stubs[a].max(stubs[b]));
                        u != v && !present.contains(&(u, v))
                    })
                });
                if !admissible {
                    continue 'restart;
                }
                stalls = 0;
            }
        }
        edges.sort_unstable();
        return Ok(edges);
    }
    Err(Error::Generation(format!(
        "pairing for a {m}-regular graph on {ell} vertices failed {MAX_RESTARTS} times"
    )))
}

fn adjacency(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v as usize);
        adj[v as usize].push(u as usize);
    }
    adj
}

/// All-pairs BFS distances, or `None` when the graph is disconnected.
fn distances(adj: &[Vec<usize>]) -> Option<Vec<Vec<u32>>> {
    let n = adj.len();
    let mut out = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for s in 0..n {
        let mut d = vec![u32::MAX; n];
        d[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if d[v] == u32::MAX {
                    d[v] = d[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if d.contains(&u32::MAX) {
            return None;
        }
        out.push(d);
    }
    Some(out)
}

fn stress(pos: &[[f64; 2]], dist: &[Vec<u32>]) -> f64 {
    let mut s = 0.0;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            let d = dist[i][j] as f64;
            let e = (pos[i][0] - pos[j][0]).hypot(pos[i][1] - pos[j][1]) - d;
            s += e * e / (d * d);
        }
    }
    s
}

/// Stress layout of a connected graph with BFS distances as targets and
/// weights `d^-2`. Starts from a circle with a tiny jitter drawn from
/// `seed`, then sweeps the per-vertex majorization update until `iterations`
/// sweeps or a relative stress improvement below `1e-6`.
pub fn stress_layout(
    n: usize,
    edges: &[(u32, u32)],
    iterations: usize,
    seed: u64,
) -> Result<Vec<[f64; 2]>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let adj = adjacency(n, edges);
    let dist = distances(&adj).ok_or(Error::Disconnected)?;
    if n == 1 {
        return Ok(vec![[0.0, 0.0]]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diameter = dist.iter().flatten().copied().max().unwrap_or(1).max(1) as f64;
    let radius = diameter / 2.0;
    let mut pos: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            let jx = rng.gen_range(-1e-3..1e-3);
            let jy = rng.gen_range(-1e-3..1e-3);
            [radius * t.cos() + jx, radius * t.sin() + jy]
        })
        .collect();

    let mut current = stress(&pos, &dist);
    for _ in 0..iterations {
        for i in 0..n {
            let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = dist[i][j] as f64;
                let w = 1.0 / (d * d);
                let dx = pos[i][0] - pos[j][0];
                let dy = pos[i][1] - pos[j][1];
                let len = dx.hypot(dy);
                let (ux, uy) = if len > 1e-12 { (dx / len, dy / len) } else { (0.0, 0.0) };
                sx += w * (pos[j][0] + d * ux);
                sy += w * (pos[j][1] + d * uy);
                sw += w;
            }
            pos[i] = [sx / sw, sy / sw];
        }
        let next = stress(&pos, &dist);
        let improvement = current - next;
        current = next;
        if current == 0.0 || improvement / current.max(f64::MIN_POSITIVE) < 1e-6 {
            break;
        }
    }
    Ok(pos)
}

/// The eight grid neighbors tried, in order, when a rounded point collides.
const NUDGES: [(i64, i64); 8] = [
    (1, 0),
    (0, 1),
    (-1, 0),
    (0, -1),
    (1, 1),
    (-1, 1),
    (-1, -1),
    (1, -1),
];

/// A random regular graph drawn with [`stress_layout`], scaled by
/// `grid_scale`, rounded and shifted to non-negative coordinates. Every
/// other vertex pair is then joined with probability `p_extra`.
/// Disconnected graphs are redrawn.
pub fn gen_re(params: &ReParams, seed: u64) -> Result<Instance> {
    GeneratorConfig::new(Family::Re(params.clone()), seed).validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.ell;
    let (edges, layout) = 'draw: {
        for _ in 0..MAX_RESTARTS {
            let edges = random_regular_graph(n, params.m, &mut rng)?;
            match stress_layout(n, &edges, params.layout_iterations, rng.gen()) {
                Ok(pos) => break 'draw (edges, pos),
                Err(Error::Disconnected) => continue,
                Err(e) => return Err(e),
            }
        }
        return Err(Error::Generation(format!(
            "no connected {}-regular graph on {n} vertices after {MAX_RESTARTS} draws",
            params.m
        )));
    };

    let rounded: Vec<(i64, i64)> = layout
        .iter()
        .map(|&[x, y]| {
            ((x * params.grid_scale).round() as i64, (y * params.grid_scale).round() as i64)
        })
        .collect();
    let min_x = rounded.iter().map(|p| p.0).min().unwrap_or(0);
    let min_y = rounded.iter().map(|p| p.1).min().unwrap_or(0);
    let mut taken = HashSet::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    for &(x, y) in &rounded {
        let base = (x - min_x + 1, y - min_y + 1);
        let spot = std::iter::once((0, 0))
            .chain(NUDGES)
            .map(|(dx, dy)| (base.0 + dx, base.1 + dy))
            .find(|q| !taken.contains(q))
            .ok_or_else(|| {
                Error::Generation("rounded layout has a point crowded on all sides".into())
            })?;
        taken.insert(spot);
        points.push(Point::new(spot.0, spot.1)?);
    }

    let present: HashSet<(u32, u32)> = edges.iter().copied().collect();
    let mut all = edges;
    if params.p_extra > 0.0 {
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                if !present.contains(&(u, v)) && rng.gen_bool(params.p_extra) {
                    all.push((u, v));
                }
            }
        }
    }
    Instance::new("re", points, all, None)
}
