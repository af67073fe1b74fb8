//! Exact integer predicates on points and segments.
//!
//! All predicates run on 64-bit integer coordinates bounded by
//! [`COORD_LIMIT`]; intermediate cross products are evaluated in `i128`, so
//! no predicate ever touches floating point.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible absolute coordinate value.
pub const COORD_LIMIT: i64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    /// Creates a point, rejecting coordinates outside `[-2^30, 2^30]`.
    pub fn new(x: i64, y: i64) -> Result<Self> {
        if x.abs() > COORD_LIMIT || y.abs() > COORD_LIMIT {
            return Err(Error::CoordinateOutOfRange { x, y });
        }
        Ok(Point { x, y })
    }

    pub fn in_range(&self) -> bool {
        self.x.abs() <= COORD_LIMIT && self.y.abs() <= COORD_LIMIT
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A closed segment with distinct endpoints, stored with `a <= b`
/// lexicographically so that equality ignores endpoint order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    a: Point,
    b: Point,
}

impl Segment {
    pub fn new(p: Point, q: Point) -> Result<Self> {
        match p.cmp(&q) {
            Ordering::Less => Ok(Segment { a: p, b: q }),
            Ordering::Greater => Ok(Segment { a: q, b: p }),
            Ordering::Equal => Err(Error::DegenerateSegment),
        }
    }

    #[inline]
    pub fn a(&self) -> Point {
        self.a
    }

    #[inline]
    pub fn b(&self) -> Point {
        self.b
    }

    #[inline]
    pub fn has_endpoint(&self, p: Point) -> bool {
        self.a == p || self.b == p
    }

    /// Axis-aligned bounding box as `(min_x, min_y, max_x, max_y)`.
    pub fn bbox(&self) -> (i64, i64, i64, i64) {
        (
            self.a.x.min(self.b.x),
            self.a.y.min(self.b.y),
            self.a.x.max(self.b.x),
            self.a.y.max(self.b.y),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

#[inline]
fn cross(p: Point, q: Point, r: Point) -> i128 {
    let (ux, uy) = (q.x as i128 - p.x as i128, q.y as i128 - p.y as i128);
    let (vx, vy) = (r.x as i128 - p.x as i128, r.y as i128 - p.y as i128);
    ux * vy - uy * vx
}

/// Sign of `(q - p) x (r - p)`.
#[inline]
pub fn orientation(p: Point, q: Point, r: Point) -> Orientation {
    match cross(p, q, r).cmp(&0) {
        Ordering::Greater => Orientation::CounterClockwise,
        Ordering::Less => Orientation::Clockwise,
        Ordering::Equal => Orientation::Collinear,
    }
}

/// `p` lies on the closed segment `s`.
#[inline]
pub fn point_on_segment(p: Point, s: &Segment) -> bool {
    cross(s.a, s.b, p) == 0 && within_box(p, s.a, s.b)
}

#[inline]
fn within_box(p: Point, a: Point, b: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// `p` lies on `s` but is neither of its endpoints.
#[inline]
pub fn point_strictly_inside(p: Point, s: &Segment) -> bool {
    !s.has_endpoint(p) && point_on_segment(p, s)
}

/// Contest intersection: the segments share a point that is not an endpoint
/// of both. Touching at a common endpoint is not a conflict; an endpoint in
/// the relative interior of the other segment is; so is any collinear
/// overlap of positive length.
pub fn segments_conflict(s: &Segment, t: &Segment) -> Result<bool> {
    if s == t {
        return Err(Error::IdenticalSegments);
    }
    Ok(conflict_unchecked(s, t))
}

/// [`segments_conflict`] without the identity check. Returns `false` for
/// identical segments.
#[inline]
pub(crate) fn conflict_unchecked(s: &Segment, t: &Segment) -> bool {
    let (a, b, c, d) = (s.a, s.b, t.a, t.b);
    let o1 = cross(a, b, c).signum();
    let o2 = cross(a, b, d).signum();

    if o1 == 0 && o2 == 0 {
        // Collinear: both segments are ordered lexicographically along the
        // shared line, so their overlap is [max(a, c), min(b, d)].
        let lo = a.max(c);
        let hi = b.min(d);
        // A single touching point is necessarily a shared endpoint.
        return lo < hi;
    }

    let o3 = cross(c, d, a).signum();
    let o4 = cross(c, d, b).signum();

    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }

    // Non-parallel lines meet in at most one point; if that point is an
    // endpoint of one segment, it conflicts iff it is interior to the other.
    if o1 == 0 && within_box(c, a, b) {
        return !s.has_endpoint(c);
    }
    if o2 == 0 && within_box(d, a, b) {
        return !s.has_endpoint(d);
    }
    if o3 == 0 && within_box(a, c, d) {
        return !t.has_endpoint(a);
    }
    if o4 == 0 && within_box(b, c, d) {
        return !t.has_endpoint(b);
    }
    false
}

/// Segments share at least one point (closed-set intersection).
#[inline]
pub(crate) fn segments_touch(s: &Segment, t: &Segment) -> bool {
    let (a, b, c, d) = (s.a, s.b, t.a, t.b);
    let o1 = cross(a, b, c).signum();
    let o2 = cross(a, b, d).signum();
    let o3 = cross(c, d, a).signum();
    let o4 = cross(c, d, b).signum();
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && within_box(c, a, b))
        || (o2 == 0 && within_box(d, a, b))
        || (o3 == 0 && within_box(a, c, d))
        || (o4 == 0 && within_box(b, c, d))
}

/// A simple polygon with integer vertices, validated on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Validates simplicity: at least three vertices, no repeated vertex, no
    /// zero-area degeneracy, and no two edges meeting anywhere except adjacent
    /// edges at their shared vertex. Either orientation is accepted.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let h = vertices.len();
        if h < 3 {
            return Err(Error::NonSimplePolygon(format!("{h} vertices")));
        }
        if let Some(p) = vertices.iter().find(|p| !p.in_range()) {
            return Err(Error::CoordinateOutOfRange { x: p.x, y: p.y });
        }
        let mut sorted = vertices.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NonSimplePolygon("repeated vertex".into()));
        }
        let edges: Vec<Segment> = (0..h)
            .map(|i| Segment::new(vertices[i], vertices[(i + 1) % h]))
            .collect::<Result<_>>()?;
        for i in 0..h {
            for j in i + 1..h {
                let adjacent = j == i + 1 || (i == 0 && j == h - 1);
                if adjacent {
                    // Adjacent edges may only share their common vertex.
                    if conflict_unchecked(&edges[i], &edges[j]) {
                        return Err(Error::NonSimplePolygon(format!(
                            "edges {i} and {j} overlap"
                        )));
                    }
                } else if segments_touch(&edges[i], &edges[j]) {
                    return Err(Error::NonSimplePolygon(format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        let poly = Polygon { vertices };
        if poly.twice_signed_area() == 0 {
            return Err(Error::NonSimplePolygon("zero area".into()));
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn twice_signed_area(&self) -> i128 {
        let h = self.vertices.len();
        (0..h)
            .map(|i| {
                let p = self.vertices[i];
                let q = self.vertices[(i + 1) % h];
                p.x as i128 * q.y as i128 - q.x as i128 * p.y as i128
            })
            .sum()
    }

    pub fn bbox(&self) -> (i64, i64, i64, i64) {
        let xs = self.vertices.iter().map(|p| p.x);
        let ys = self.vertices.iter().map(|p| p.y);
        (
            xs.clone().min().unwrap(),
            ys.clone().min().unwrap(),
            xs.max().unwrap(),
            ys.max().unwrap(),
        )
    }

    fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let h = self.vertices.len();
        (0..h).map(move |i| (self.vertices[i], self.vertices[(i + 1) % h]))
    }

    /// Point lies on the polygon boundary.
    pub fn on_boundary(&self, p: Point) -> bool {
        self.edges()
            .any(|(u, v)| cross(u, v, p) == 0 && within_box(p, u, v))
    }

    /// Point lies in the open interior.
    pub fn contains_strictly(&self, p: Point) -> bool {
        !self.on_boundary(p) && self.crossing_parity(p, 1)
    }

    /// Point lies in the closed region.
    pub fn contains(&self, p: Point) -> bool {
        self.on_boundary(p) || self.crossing_parity(p, 1)
    }

    /// Even-odd test for the point `p / scale` against the polygon scaled by
    /// `scale`; lets callers test half-integer points exactly.
    fn crossing_parity(&self, p: Point, scale: i64) -> bool {
        let (px, py) = (p.x as i128, p.y as i128);
        let s = scale as i128;
        let mut inside = false;
        for (u, v) in self.edges() {
            let (ux, uy) = (u.x as i128 * s, u.y as i128 * s);
            let (vx, vy) = (v.x as i128 * s, v.y as i128 * s);
            if (uy > py) != (vy > py) {
                // x-coordinate of the crossing compared with px, exactly.
                let lhs = (px - ux) * (vy - uy);
                let rhs = (vx - ux) * (py - uy);
                let left_of_crossing = if vy > uy { lhs < rhs } else { lhs > rhs };
                if left_of_crossing {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn contains_scaled(&self, p: Point, scale: i64) -> bool {
        let s = scale as i128;
        let on_edge = self.edges().any(|(u, v)| {
            let (ux, uy) = (u.x as i128 * s, u.y as i128 * s);
            let (vx, vy) = (v.x as i128 * s, v.y as i128 * s);
            let (px, py) = (p.x as i128, p.y as i128);
            (vx - ux) * (py - uy) - (vy - uy) * (px - ux) == 0
                && px >= ux.min(vx)
                && px <= ux.max(vx)
                && py >= uy.min(vy)
                && py <= uy.max(vy)
        });
        on_edge || self.crossing_parity(p, scale)
    }
}

/// The open segment `pq` lies in the closed region bounded by `polygon`.
/// Touching the boundary is allowed; leaving the region is not. Both
/// endpoints are assumed to lie in the closed region.
pub fn visible(p: Point, q: Point, polygon: &Polygon) -> bool {
    if p == q {
        return true;
    }
    let pq = Segment { a: p.min(q), b: p.max(q) };
    let mut cuts: Vec<Point> = vec![p, q];
    for (u, v) in polygon.edges() {
        let o1 = cross(p, q, u).signum();
        let o2 = cross(p, q, v).signum();
        let o3 = cross(u, v, p).signum();
        let o4 = cross(u, v, q).signum();
        if o1 * o2 < 0 && o3 * o4 < 0 {
            return false;
        }
        if point_strictly_inside(u, &pq) {
            cuts.push(u);
        }
    }
    // Between consecutive boundary contacts the segment is either wholly
    // inside, wholly outside, or runs along an edge; its midpoint decides.
    cuts.sort();
    cuts.dedup();
    cuts.windows(2).all(|w| {
        let mid = Point {
            x: w[0].x + w[1].x,
            y: w[0].y + w[1].y,
        };
        polygon.contains_scaled(mid, 2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> Point {
        Point::new(x, y).unwrap()
    }

    fn seg(ax: i64, ay: i64, bx: i64, by: i64) -> Segment {
        Segment::new(pt(ax, ay), pt(bx, by)).unwrap()
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(
            orientation(pt(0, 0), pt(1, 0), pt(0, 1)),
            Orientation::CounterClockwise
        );
        assert_eq!(
            orientation(pt(0, 0), pt(1, 1), pt(2, 2)),
            Orientation::Collinear
        );
        assert_eq!(
            orientation(pt(0, 0), pt(0, 1), pt(1, 1)),
            Orientation::Clockwise
        );
    }

    #[test]
    fn orientation_at_range_extremes() {
        let l = COORD_LIMIT;
        let p = pt(-l, -l);
        let q = pt(l, -l);
        let r = pt(-l, l);
        assert_eq!(orientation(p, q, r), Orientation::CounterClockwise);
        assert_eq!(orientation(p, r, q), Orientation::Clockwise);
    }

    #[test]
    fn point_range_rejected() {
        assert!(Point::new(COORD_LIMIT + 1, 0).is_err());
        assert!(Point::new(0, -COORD_LIMIT - 1).is_err());
        assert!(Point::new(-COORD_LIMIT, COORD_LIMIT).is_ok());
    }

    #[test]
    fn segment_is_canonical() {
        assert_eq!(seg(2, 0, 0, 0), seg(0, 0, 2, 0));
        assert!(Segment::new(pt(1, 1), pt(1, 1)).is_err());
    }

    #[test]
    fn strictly_inside_examples() {
        let s = seg(0, 0, 2, 0);
        assert!(point_strictly_inside(pt(1, 0), &s));
        assert!(!point_strictly_inside(pt(0, 0), &s));
        assert!(!point_strictly_inside(pt(1, 1), &s));
        assert!(!point_strictly_inside(pt(3, 0), &s));
    }

    #[test]
    fn conflict_examples() {
        let c = |s: Segment, t: Segment| segments_conflict(&s, &t).unwrap();
        assert!(!c(seg(0, 0, 2, 0), seg(2, 0, 2, 2)));
        assert!(c(seg(0, 0, 4, 0), seg(2, 0, 2, 2)));
        assert!(c(seg(0, 0, 2, 2), seg(0, 2, 2, 0)));
        assert!(c(seg(0, 0, 2, 0), seg(1, 0, 3, 0)));
        assert!(!c(seg(0, 0, 1, 0), seg(1, 0, 2, 0)));
        // Containment with a shared endpoint still overlaps.
        assert!(c(seg(0, 0, 2, 0), seg(0, 0, 1, 0)));
        // Collinear but disjoint.
        assert!(!c(seg(0, 0, 1, 1), seg(2, 2, 3, 3)));
        // Vertical collinear overlap.
        assert!(c(seg(0, 0, 0, 5), seg(0, 4, 0, 9)));
    }

    #[test]
    fn conflict_rejects_identical() {
        let s = seg(0, 0, 1, 1);
        assert!(matches!(
            segments_conflict(&s, &seg(1, 1, 0, 0)),
            Err(Error::IdenticalSegments)
        ));
    }

    #[test]
    fn polygon_validation() {
        let bowtie = vec![pt(0, 0), pt(2, 2), pt(2, 0), pt(0, 2)];
        assert!(Polygon::new(bowtie).is_err());
        assert!(Polygon::new(vec![pt(0, 0), pt(1, 0)]).is_err());
        assert!(Polygon::new(vec![pt(0, 0), pt(1, 0), pt(2, 0)]).is_err());
        let spike = vec![pt(0, 0), pt(4, 0), pt(4, 4), pt(2, 4), pt(2, 6), pt(2, 2), pt(0, 4)];
        assert!(Polygon::new(spike).is_err());
    }

    fn square() -> Polygon {
        Polygon::new(vec![pt(0, 0), pt(10, 0), pt(10, 10), pt(0, 10)]).unwrap()
    }

    fn l_shape() -> Polygon {
        Polygon::new(vec![
            pt(0, 0),
            pt(10, 0),
            pt(10, 4),
            pt(6, 4),
            pt(6, 10),
            pt(0, 10),
        ])
        .unwrap()
    }

    #[test]
    fn visibility_examples() {
        assert!(visible(pt(1, 1), pt(9, 9), &square()));
        assert!(!visible(pt(9, 2), pt(2, 9), &l_shape()));
        assert!(visible(pt(3, 3), pt(3, 3), &l_shape()));
    }

    #[test]
    fn visibility_along_boundary_and_through_reflex_vertex() {
        let l = l_shape();
        // Runs along the edge (10,4)-(6,4) and beyond, inside the region.
        assert!(visible(pt(10, 4), pt(2, 4), &l));
        // Grazes the reflex vertex (6,4) from inside.
        assert!(visible(pt(8, 2), pt(4, 6), &l));
        // Passes the reflex vertex on the outside.
        assert!(!visible(pt(9, 3), pt(5, 5), &l));
        // Boundary-to-boundary chord across the exterior notch.
        assert!(!visible(pt(10, 4), pt(6, 10), &l));
    }

    #[test]
    fn containment() {
        let l = l_shape();
        assert!(l.contains_strictly(pt(1, 1)));
        assert!(!l.contains_strictly(pt(6, 6)));
        assert!(l.contains(pt(6, 6)));
        assert!(!l.contains(pt(8, 8)));
    }
}
