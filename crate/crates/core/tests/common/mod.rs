//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use num::{BigInt, BigRational, Zero};
use planepart::conflict::ConflictGraph;
use planepart::geometry::{Point, Polygon, Segment};
use planepart::instance::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn pt(x: i64, y: i64) -> Point {
    Point::new(x, y).unwrap()
}

pub fn seg(a: (i64, i64), b: (i64, i64)) -> Segment {
    Segment::new(pt(a.0, a.1), pt(b.0, b.1)).unwrap()
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Conflict by exact rational parametrization: the closed segments share a
/// point that is not an endpoint of both.
pub fn oracle_conflict(s: (Point, Point), t: (Point, Point)) -> bool {
    let (p, p2) = s;
    let (r, r2) = t;
    let d1 = (q(p2.x - p.x), q(p2.y - p.y));
    let d2 = (q(r2.x - r.x), q(r2.y - r.y));
    let w = (q(r.x - p.x), q(r.y - p.y));
    let cross = |a: &(BigRational, BigRational), b: &(BigRational, BigRational)| {
        &a.0 * &b.1 - &a.1 * &b.0
    };
    let zero = BigRational::zero();
    let one = BigRational::from_integer(BigInt::from(1));
    let den = cross(&d1, &d2);
    if !den.is_zero() {
        // p + a*d1 = r + b*d2
        let a = cross(&w, &d2) / &den;
        let b = cross(&w, &d1) / &den;
        if a < zero || a > one || b < zero || b > one {
            return false;
        }
        let end_s = a == zero || a == one;
        let end_t = b == zero || b == one;
        return !(end_s && end_t);
    }
    if !cross(&w, &d1).is_zero() {
        return false;
    }
    // Collinear: place t's endpoints on s's parameter line.
    let len2 = &d1.0 * &d1.0 + &d1.1 * &d1.1;
    let param = |x: Point| (q(x.x - p.x) * &d1.0 + q(x.y - p.y) * &d1.1) / &len2;
    let (a, b) = (param(r), param(r2));
    let (lo_t, hi_t) = if a <= b { (a, b) } else { (b, a) };
    let lo = if lo_t > zero { lo_t.clone() } else { zero.clone() };
    let hi = if hi_t < one { hi_t.clone() } else { one.clone() };
    if lo > hi {
        return false;
    }
    if lo < hi {
        return true;
    }
    let on_s_end = lo == zero || lo == one;
    let on_t_end = lo == lo_t || lo == hi_t;
    !(on_s_end && on_t_end)
}

/// All-pairs adjacency from the rational oracle.
pub fn oracle_graph(instance: &Instance) -> Vec<Vec<bool>> {
    let segs: Vec<(Point, Point)> = instance
        .edges()
        .iter()
        .map(|&(i, j)| (instance.points()[i as usize], instance.points()[j as usize]))
        .collect();
    let n = segs.len();
    let mut adj = vec![vec![false; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let c = oracle_conflict(segs[u], segs[v]);
            adj[u][v] = c;
            adj[v][u] = c;
        }
    }
    adj
}

/// Chromatic number by dynamic programming over vertex subsets (n <= 16).
pub fn chromatic_number(n: usize, edges: &[(usize, usize)]) -> usize {
    assert!(n <= 16);
    if n == 0 {
        return 0;
    }
    let mut nbr = vec![0u32; n];
    for &(u, v) in edges {
        nbr[u] |= 1 << v;
        nbr[v] |= 1 << u;
    }
    let full = (1u32 << n) - 1;
    let mut independent = vec![false; 1 << n];
    independent[0] = true;
    for mask in 1..=full {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        independent[mask as usize] = independent[rest as usize] && nbr[v] & rest == 0;
    }
    let mut dp = vec![usize::MAX; 1 << n];
    dp[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // Enumerate independent sets containing the lowest vertex.
        let mut sub = rest;
        loop {
            let s = sub | low;
            if independent[s as usize] {
                let prev = dp[(mask ^ s) as usize];
                if prev != usize::MAX {
                    dp[mask as usize] = dp[mask as usize].min(prev + 1);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    dp[full as usize]
}

pub fn graph_edges(g: &ConflictGraph) -> Vec<(usize, usize)> {
    g.edges().collect()
}

pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> ConflictGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    ConflictGraph::from_edges(n, edges).unwrap()
}

/// Random graph whose vertices are split into `k` planted classes; edges
/// only join different classes, so it is k-colorable.
pub fn planted_graph(n: usize, k: usize, p: f64, rng: &mut ChaCha8Rng) -> ConflictGraph {
    let class: Vec<usize> = (0..n).map(|v| v % k).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if class[u] != class[v] && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    ConflictGraph::from_edges(n, edges).unwrap()
}

pub fn complete(n: usize) -> ConflictGraph {
    ConflictGraph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}

pub fn cycle(n: usize) -> ConflictGraph {
    ConflictGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

pub fn petersen() -> ConflictGraph {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((i, i + 5));
        e.push((5 + i, 5 + (i + 2) % 5));
    }
    ConflictGraph::from_edges(10, e).unwrap()
}

pub fn random_bipartite(a: usize, b: usize, p: f64, rng: &mut ChaCha8Rng) -> ConflictGraph {
    let mut e = Vec::new();
    for u in 0..a {
        for v in 0..b {
            if rng.gen_bool(p) {
                e.push((u, a + v));
            }
        }
    }
    ConflictGraph::from_edges(a + b, e).unwrap()
}

/// Independent properness check of a color vector.
pub fn is_proper(g: &ConflictGraph, colors: &[u32]) -> bool {
    colors.len() == g.n() && g.edges().all(|(u, v)| colors[u] != colors[v])
}

/// Random instance of `n` distinct segments with endpoints on a small grid,
/// so that shared endpoints and collinear overlaps are common.
pub fn random_instance(n: usize, grid: i64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut segs: Vec<Segment> = Vec::with_capacity(n);
    let mut seen = std::collections::HashSet::new();
    while segs.len() < n {
        let a = (rng.gen_range(0..grid), rng.gen_range(0..grid));
        let b = (rng.gen_range(0..grid), rng.gen_range(0..grid));
        if a == b {
            continue;
        }
        let s = seg(a, b);
        if seen.insert((s.a(), s.b())) {
            segs.push(s);
        }
    }
    Instance::from_segments(format!("rand{seed}"), &segs, None).unwrap()
}

/// Visibility by brute force: the segment pq lies in the closed polygon iff
/// it does not properly cross any edge, and the midpoint of every piece
/// between consecutive boundary points on pq is inside or on the polygon.
/// Uses exact rationals throughout.
pub fn oracle_visible(p: Point, qq: Point, poly: &Polygon) -> bool {
    let vs = poly.vertices();
    let n = vs.len();
    let zero = BigRational::zero();
    let one = BigRational::from_integer(BigInt::from(1));
    // Parameters along pq where it meets the boundary.
    let mut cuts = vec![zero.clone(), one.clone()];
    let d = (q(qq.x - p.x), q(qq.y - p.y));
    for i in 0..n {
        let (a, b) = (vs[i], vs[(i + 1) % n]);
        let e = (q(b.x - a.x), q(b.y - a.y));
        let w = (q(a.x - p.x), q(a.y - p.y));
        let den = &d.0 * &e.1 - &d.1 * &e.0;
        if !den.is_zero() {
            let t = (&w.0 * &e.1 - &w.1 * &e.0) / &den;
            let u = (&w.0 * &d.1 - &w.1 * &d.0) / &den;
            if t > zero && t < one && u > zero && u < one {
                return false;
            }
            if t >= zero && t <= one && u >= zero && u <= one {
                cuts.push(t);
            }
        } else if (&w.0 * &d.1 - &w.1 * &d.0).is_zero() {
            let len2 = &d.0 * &d.0 + &d.1 * &d.1;
            for x in [a, b] {
                let t = (q(x.x - p.x) * &d.0 + q(x.y - p.y) * &d.1) / &len2;
                if t >= zero && t <= one {
                    cuts.push(t);
                }
            }
        }
    }
    cuts.sort();
    cuts.dedup();
    let two = BigRational::from_integer(BigInt::from(2));
    for w in cuts.windows(2) {
        let mid = (&w[0] + &w[1]) / &two;
        let mx = q(p.x) + &mid * &d.0;
        let my = q(p.y) + &mid * &d.1;
        if !rational_in_closed_polygon(&mx, &my, vs) {
            return false;
        }
    }
    true
}

fn rational_in_closed_polygon(x: &BigRational, y: &BigRational, vs: &[Point]) -> bool {
    let n = vs.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (vs[i], vs[(i + 1) % n]);
        let (ax, ay, bx, by) = (q(a.x), q(a.y), q(b.x), q(b.y));
        let cr = (&bx - &ax) * (y - &ay) - (&by - &ay) * (x - &ax);
        let within = (*x >= ax.clone().min(bx.clone()) && *x <= ax.clone().max(bx.clone()))
            && (*y >= ay.clone().min(by.clone()) && *y <= ay.clone().max(by.clone()));
        if cr.is_zero() && within {
            return true;
        }
        if (ay > *y) != (by > *y) {
            let xi = &ax + (&bx - &ax) * (y - &ay) / (&by - &ay);
            if *x < xi {
                inside = !inside;
            }
        }
    }
    inside
}
