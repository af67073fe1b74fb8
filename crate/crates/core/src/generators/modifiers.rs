use std::collections::{HashMap, HashSet};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Ratio;
use crate::error::{Error, Result};
use crate::geometry::{conflict_unchecked, Point, Segment, COORD_LIMIT};
use crate::instance::Instance;

/// Global scale applied to all coordinates before inflating segments.
pub const ECN_SCALE: i64 = 1 << 10;

/// `v * num / den` rounded to nearest, halves away from zero.
fn mul_round(v: i128, num: i128, den: i128) -> i128 {
    let p = v * num;
    let q = p.abs() / den;
    let r = p.abs() % den;
    let mag = if 2 * r >= den { q + 1 } else { q };
    if p < 0 {
        -mag
    } else {
        mag
    }
}

/// Scales all coordinates by [`ECN_SCALE`], then stretches every segment
/// about its midpoint by `1 + epsilon`, moving each endpoint outwards by
/// `epsilon / 2` of the segment vector (rounded to the grid). Segment order
/// is kept. Fails if a pair that shared an endpoint does not conflict
/// afterwards, or if coordinates leave the allowed range.
pub fn apply_ecn(instance: &Instance, epsilon: Ratio) -> Result<Instance> {
    let eps = Ratio::new(epsilon.num, epsilon.den)?;
    let (num, den) = (eps.num as i128, 2 * eps.den as i128);
    let limit = COORD_LIMIT as i128;
    let mut segments = Vec::with_capacity(instance.len());
    for e in 0..instance.len() {
        let s = instance.segment(e);
        let (a, b) = (s.a(), s.b());
        let scale = ECN_SCALE as i128;
        let (ax, ay) = (a.x as i128 * scale, a.y as i128 * scale);
        let (bx, by) = (b.x as i128 * scale, b.y as i128 * scale);
        let sx = mul_round(ax - bx, num, den);
        let sy = mul_round(ay - by, num, den);
        let coords = [ax + sx, ay + sy, bx - sx, by - sy];
        if coords.iter().any(|c| c.abs() >= limit) {
            return Err(Error::CoordinateOutOfRange {
                x: coords[0].max(coords[2]) as i64,
                y: coords[1].max(coords[3]) as i64,
            });
        }
        let p = Point::new(coords[0] as i64, coords[1] as i64)?;
        let q = Point::new(coords[2] as i64, coords[3] as i64)?;
        segments.push(Segment::new(p, q)?);
    }
    let mut out = Instance::from_segments(instance.id(), &segments, instance.meta().map(str::to_owned))?;
    out.set_id(instance.id());

    let mut incident: HashMap<u32, Vec<usize>> = HashMap::new();
    for (e, &(i, j)) in instance.edges().iter().enumerate() {
        incident.entry(i).or_default().push(e);
        incident.entry(j).or_default().push(e);
    }
    let mut points: Vec<u32> = incident.keys().copied().collect();
    points.sort_unstable();
    for p in points {
        let list = &incident[&p];
        for (x, &e) in list.iter().enumerate() {
            for &f in &list[x + 1..] {
                if !conflict_unchecked(&segments[e], &segments[f]) {
                    return Err(Error::Generation(format!(
                        "ecn left segments {e} and {f} non-conflicting; try a larger epsilon"
                    )));
                }
            }
        }
    }
    Ok(out)
}

/// Adds `count` new segments between uniformly chosen pairs of existing
/// points that are not yet joined.
pub fn apply_noise(instance: &Instance, count: usize, seed: u64) -> Result<Instance> {
    if count == 0 {
        return Ok(instance.clone());
    }
    let v = instance.points().len();
    if v < 2 {
        return Err(Error::Generation("noise needs at least two points".into()));
    }
    let pairs = v as u128 * (v as u128 - 1) / 2;
    let present: HashSet<(u32, u32)> = instance.edges().iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
    let free = pairs - present.len() as u128;
    if (count as u128) > free {
        return Err(Error::Generation(format!(
            "only {free} unjoined point pairs for {count} noise segments"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut added: Vec<(u32, u32)> = Vec::with_capacity(count);
    if free <= 4 * count as u128 {
        // Few candidates: enumerate them and sample without replacement.
        let mut candidates = Vec::with_capacity(free as usize);
        for i in 0..v as u32 {
            for j in i + 1..v as u32 {
                if !present.contains(&(i, j)) {
                    candidates.push((i, j));
                }
            }
        }
        let mut picks = sample(&mut rng, candidates.len(), count).into_vec();
        picks.sort_unstable();
        added.extend(picks.into_iter().map(|k| candidates[k]));
    } else {
        let mut taken = present;
        while added.len() < count {
            let i = rng.gen_range(0..v as u32);
            let j = rng.gen_range(0..v as u32);
            let key = (i.min(j), i.max(j));
            if i != j && taken.insert(key) {
                added.push(key);
            }
        }
    }
    let mut edges = instance.edges().to_vec();
    edges.extend(added);
    Instance::new(
        instance.id(),
        instance.points().to_vec(),
        edges,
        instance.meta().map(str::to_owned),
    )
}
