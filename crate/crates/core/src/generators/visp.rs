use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{polygon_from_pairs, Family, GenerationReport, GeneratorConfig, VispParams};
use crate::error::{Error, Result};
use crate::geometry::{visible, Point, Polygon};
use crate::instance::Instance;

/// Sampling attempts per requested point before giving up.
const TRIES_PER_POINT: usize = 1000;

/// Random interior points of a polygon joined by every visible pair. An
/// attempt is accepted when its segment count lies in the configured window
/// and its conflict graph is well connected; otherwise a fresh point set is
/// drawn, at most `max_retries` times.
pub fn gen_visp(params: &VispParams, seed: u64) -> Result<(Instance, GenerationReport)> {
    GeneratorConfig::new(Family::Visp(params.clone()), seed).validate()?;
    let polygon = polygon_from_pairs(&params.polygon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::new();
    for attempt in 0..=params.max_retries {
        let points = interior_points(&polygon, params.m, &mut rng)?;
        let mut edges = Vec::new();
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if visible(points[i], points[j], &polygon) {
                    edges.push((i as u32, j as u32));
                }
            }
        }
        let count = edges.len();
        if count < params.min_segments || count > params.max_segments {
            last = format!(
                "{count} segments outside [{}, {}]",
                params.min_segments, params.max_segments
            );
            continue;
        }
        let instance = Instance::new("visp", points, edges, None)?;
        let report = GenerationReport::summarize(&instance, attempt)?;
        if !report.well_connected() {
            last = format!(
                "largest conflict component {} of {} conflicting segments",
                report.largest_component, report.non_isolated
            );
            continue;
        }
        return Ok((instance, report));
    }
    Err(Error::Generation(format!(
        "visp gave up after {} retries; last attempt: {last}",
        params.max_retries
    )))
}

/// `m` distinct integer points strictly inside the polygon, by rejection
/// sampling in its bounding box.
fn interior_points(polygon: &Polygon, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Point>> {
    let (x0, y0, x1, y1) = polygon.bbox();
    let mut seen = HashSet::with_capacity(m);
    let mut out = Vec::with_capacity(m);
    let mut tries = 0usize;
    while out.len() < m {
        tries += 1;
        if tries > TRIES_PER_POINT.saturating_mul(m) {
            return Err(Error::Generation(format!(
                "could not place {m} distinct interior points"
            )));
        }
        let p = Point::new(rng.gen_range(x0..=x1), rng.gen_range(y0..=y1))?;
        if polygon.contains_strictly(p) && seen.insert(p) {
            out.push(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(polygon: Vec<[i64; 2]>, m: usize) -> VispParams {
        VispParams {
            polygon,
            m,
            min_segments: 0,
            max_segments: usize::MAX,
            max_retries: 5,
        }
    }

    fn square() -> Vec<[i64; 2]> {
        vec![[0, 0], [100, 0], [100, 100], [0, 100]]
    }

    #[test]
    fn convex_polygon_gives_complete_graph() {
        let (inst, report) = gen_visp(&params(square(), 12), 3).unwrap();
        assert_eq!(inst.len(), 66);
        assert!(report.accepted);
        assert_eq!(report.retries, 0);
    }

    #[test]
    fn window_forces_retries_then_failure() {
        let mut p = params(square(), 5);
        p.min_segments = 11;
        p.max_segments = 20;
        let err = gen_visp(&p, 0).unwrap_err();
        assert!(matches!(err, Error::Generation(_)));
    }

    #[test]
    fn points_lie_strictly_inside() {
        let l = vec![[0, 0], [60, 0], [60, 20], [20, 20], [20, 60], [0, 60]];
        let (inst, _) = gen_visp(&params(l.clone(), 25), 11).unwrap();
        let poly = polygon_from_pairs(&l).unwrap();
        assert!(inst.points().iter().all(|&p| poly.contains_strictly(p)));
        for &(i, j) in inst.edges() {
            assert!(visible(
                inst.points()[i as usize],
                inst.points()[j as usize],
                &poly
            ));
        }
    }

    #[test]
    fn tiny_polygon_cannot_hold_points() {
        let tri = vec![[0, 0], [2, 0], [0, 2]];
        assert!(gen_visp(&params(tri, 3), 0).is_err());
    }
}
