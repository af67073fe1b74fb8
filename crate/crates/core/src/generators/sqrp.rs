use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Family, GeneratorConfig, SqrpParams};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::instance::Instance;

/// Random points in `[0, a] x [0, b]` (duplicates redrawn). All point pairs
/// are ranked by squared length (ties by pair index); ranks in
/// `[floor(q_low * M / 100), floor(q_high * M / 100))` survive, each kept
/// with probability `p`.
pub fn gen_sqrp(params: &SqrpParams, seed: u64) -> Result<Instance> {
    GeneratorConfig::new(Family::Sqrp(params.clone()), seed).validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(params.npoints);
    let mut points = Vec::with_capacity(params.npoints);
    while points.len() < params.npoints {
        let p = Point::new(rng.gen_range(0..=params.a), rng.gen_range(0..=params.b))?;
        if seen.insert(p) {
            points.push(p);
        }
    }

    let n = points.len();
    let mut pairs: Vec<(i128, u32, u32)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (points[i].x - points[j].x) as i128;
            let dy = (points[i].y - points[j].y) as i128;
            pairs.push((dx * dx + dy * dy, i as u32, j as u32));
        }
    }
    pairs.sort_unstable();
    let total = pairs.len();
    let lo = (params.q_low * total as f64 / 100.0).floor() as usize;
    let hi = ((params.q_high * total as f64 / 100.0).floor() as usize).min(total);

    let mut edges = Vec::new();
    for &(_, i, j) in &pairs[lo.min(hi)..hi] {
        if params.p >= 1.0 || rng.gen_bool(params.p) {
            edges.push((i, j));
        }
    }
    if edges.is_empty() {
        return Err(Error::Generation("sqrp kept no edges".into()));
    }
    Instance::new("sqrp", points, edges, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::save_instance;

    fn params(npoints: usize, q_low: f64, q_high: f64, p: f64) -> SqrpParams {
        SqrpParams {
            a: 1000,
            b: 1000,
            npoints,
            q_low,
            q_high,
            p,
        }
    }

    #[test]
    fn full_window_is_complete() {
        let inst = gen_sqrp(&params(20, 0.0, 100.0, 1.0), 5).unwrap();
        assert_eq!(inst.len(), 190);
        assert_eq!(inst.points().len(), 20);
    }

    #[test]
    fn deterministic() {
        let p = params(50, 20.0, 80.0, 0.3);
        let mut a = Vec::new();
        let mut b = Vec::new();
        save_instance(&gen_sqrp(&p, 42).unwrap(), &mut a).unwrap();
        save_instance(&gen_sqrp(&p, 42).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let mut c = Vec::new();
        save_instance(&gen_sqrp(&p, 43).unwrap(), &mut c).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn window_respected() {
        let inst = gen_sqrp(&params(30, 40.0, 60.0, 1.0), 1).unwrap();
        let len = |e: &(u32, u32)| {
            let (a, b) = (inst.points()[e.0 as usize], inst.points()[e.1 as usize]);
            (a.x - b.x).pow(2) + (a.y - b.y).pow(2)
        };
        let mut all: Vec<i64> = Vec::new();
        let pts = inst.points();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                all.push((pts[i].x - pts[j].x).pow(2) + (pts[i].y - pts[j].y).pow(2));
            }
        }
        all.sort_unstable();
        let (lo, hi) = (all[174], all[260]);
        assert_eq!(inst.len(), 261 - 174);
        assert!(inst.edges().iter().all(|e| (lo..=hi).contains(&len(e))));
    }

    #[test]
    fn crowded_rectangle() {
        let p = SqrpParams {
            a: 1,
            b: 1,
            npoints: 4,
            q_low: 0.0,
            q_high: 100.0,
            p: 1.0,
        };
        assert_eq!(gen_sqrp(&p, 0).unwrap().len(), 6);
        let too_many = SqrpParams { npoints: 5, ..p };
        assert!(gen_sqrp(&too_many, 0).is_err());
    }
}
