//! Instances, colorings, their file formats, and solution verification.
//!
//! Both file formats are single JSON documents. An instance file looks like
//!
//! ```json
//! {"type":"instance","id":"demo","points":{"x":[0,4,2,2],"y":[0,0,-2,2]},
//!  "edges":{"i":[0,2],"j":[1,3]}}
//! ```
//!
//! and a solution file like
//!
//! ```json
//! {"type":"solution","instance":"demo","num_colors":2,"colors":[0,1]}
//! ```
//!
//! Colors are 0-based: a solution with `num_colors = k` uses values in
//! `0..k`.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conflict::ConflictGraph;
use crate::error::{Error, Result};
use crate::geometry::{conflict_unchecked, Point, Segment};

/// Default cap on the number of offending pairs a verification report lists.
pub const DEFAULT_CONFLICT_CAP: usize = 100;

/// A set of distinct segments given as an embedded straight-line graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    id: String,
    points: Vec<Point>,
    edges: Vec<(u32, u32)>,
    meta: Option<String>,
}

impl Instance {
    /// Validates and normalizes an instance. Points with equal coordinates
    /// are merged (indices remapped to the first occurrence); degenerate and
    /// duplicate segments are rejected.
    pub fn new(
        id: impl Into<String>,
        points: Vec<Point>,
        edges: Vec<(u32, u32)>,
        meta: Option<String>,
    ) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !p.in_range()) {
            return Err(Error::CoordinateOutOfRange { x: p.x, y: p.y });
        }
        if points.len() > u32::MAX as usize {
            return Err(Error::InvalidInstance("too many points".into()));
        }
        let mut first: HashMap<Point, u32> = HashMap::with_capacity(points.len());
        let mut remap = Vec::with_capacity(points.len());
        let mut merged = Vec::with_capacity(points.len());
        for p in &points {
            let next = merged.len() as u32;
            let idx = *first.entry(*p).or_insert_with(|| {
                merged.push(*p);
                next
            });
            remap.push(idx);
        }

        let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(edges.len());
        let mut out = Vec::with_capacity(edges.len());
        for (k, &(i, j)) in edges.iter().enumerate() {
            if i as usize >= points.len() || j as usize >= points.len() {
                return Err(Error::InvalidInstance(format!(
                    "segment {k}: point index out of range ({i}, {j})"
                )));
            }
            let (mi, mj) = (remap[i as usize], remap[j as usize]);
            if mi == mj {
                return Err(Error::InvalidInstance(format!(
                    "degenerate segment {k}: ({i}, {j})"
                )));
            }
            if !seen.insert((mi.min(mj), mi.max(mj))) {
                return Err(Error::InvalidInstance(format!(
                    "duplicate segment {k}: ({i}, {j})"
                )));
            }
            out.push((mi, mj));
        }
        Ok(Instance {
            id: id.into(),
            points: merged,
            edges: out,
            meta,
        })
    }

    /// Builds an instance from explicit segments, deduplicating endpoints.
    pub fn from_segments(
        id: impl Into<String>,
        segments: &[Segment],
        meta: Option<String>,
    ) -> Result<Self> {
        let mut index: HashMap<Point, u32> = HashMap::new();
        let mut points = Vec::new();
        let mut edges = Vec::with_capacity(segments.len());
        let mut intern = |p: Point| {
            *index.entry(p).or_insert_with(|| {
                points.push(p);
                (points.len() - 1) as u32
            })
        };
        for s in segments {
            let i = intern(s.a());
            let j = intern(s.b());
            edges.push((i, j));
        }
        Instance::new(id, points, edges, meta)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn set_id(&mut self, id: impl Into<String>) {
        self.id = id.into();
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn meta(&self) -> Option<&str> {
        self.meta.as_deref()
    }

    pub fn set_meta(&mut self, meta: Option<String>) {
        self.meta = meta;
    }

    /// Number of segments.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn segment(&self, e: usize) -> Segment {
        let (i, j) = self.edges[e];
        Segment::new(self.points[i as usize], self.points[j as usize])
            .expect("instance invariant: non-degenerate segments")
    }

    pub fn segments(&self) -> Vec<Segment> {
        (0..self.edges.len()).map(|e| self.segment(e)).collect()
    }

    /// Drops points not used by any segment, keeping relative order.
    pub fn compact_points(&self) -> Instance {
        let mut used = vec![false; self.points.len()];
        for &(i, j) in &self.edges {
            used[i as usize] = true;
            used[j as usize] = true;
        }
        let mut new_index = vec![u32::MAX; self.points.len()];
        let mut points = Vec::new();
        for (p, _) in used.iter().enumerate().filter(|(_, &u)| u) {
            new_index[p] = points.len() as u32;
            points.push(self.points[p]);
        }
        Instance {
            id: self.id.clone(),
            points,
            edges: self
                .edges
                .iter()
                .map(|&(i, j)| (new_index[i as usize], new_index[j as usize]))
                .collect(),
            meta: self.meta.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct XyLists {
    x: Vec<i64>,
    y: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct IjLists {
    i: Vec<u32>,
    j: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    #[serde(rename = "type")]
    kind: String,
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<String>,
    points: XyLists,
    edges: IjLists,
}

#[derive(Serialize, Deserialize)]
struct SolutionFile {
    #[serde(rename = "type")]
    kind: String,
    instance: String,
    num_colors: usize,
    colors: Vec<u32>,
}

pub fn load_instance<R: Read>(source: R) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_reader(source)?;
    if file.kind != "instance" {
        return Err(Error::Parse(format!(
            "expected type \"instance\", found \"{}\"",
            file.kind
        )));
    }
    if file.points.x.len() != file.points.y.len() {
        return Err(Error::Parse("points.x and points.y differ in length".into()));
    }
    if file.edges.i.len() != file.edges.j.len() {
        return Err(Error::Parse("edges.i and edges.j differ in length".into()));
    }
    let points = file
        .points
        .x
        .iter()
        .zip(&file.points.y)
        .map(|(&x, &y)| Point::new(x, y))
        .collect::<Result<Vec<_>>>()?;
    let edges = file.edges.i.into_iter().zip(file.edges.j).collect();
    Instance::new(file.id, points, edges, file.meta)
}

pub fn save_instance<W: Write>(instance: &Instance, mut sink: W) -> Result<()> {
    let file = InstanceFile {
        kind: "instance".into(),
        id: instance.id.clone(),
        meta: instance.meta.clone(),
        points: XyLists {
            x: instance.points.iter().map(|p| p.x).collect(),
            y: instance.points.iter().map(|p| p.y).collect(),
        },
        edges: IjLists {
            i: instance.edges.iter().map(|e| e.0).collect(),
            j: instance.edges.iter().map(|e| e.1).collect(),
        },
    };
    serde_json::to_writer(&mut sink, &file)?;
    sink.write_all(b"\n")?;
    Ok(())
}

/// Imports whitespace-separated `x1 y1 x2 y2` lines. Blank lines and lines
/// starting with `#` are skipped.
pub fn import_edge_list<R: BufRead>(source: R, id: &str) -> Result<Instance> {
    let mut segments = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums = line
            .split_whitespace()
            .map(|t| t.parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        if nums.len() != 4 {
            return Err(Error::Parse(format!(
                "line {}: expected 4 integers, found {}",
                lineno + 1,
                nums.len()
            )));
        }
        let p = Point::new(nums[0], nums[1])?;
        let q = Point::new(nums[2], nums[3])?;
        segments.push(Segment::new(p, q).map_err(|_| {
            Error::InvalidInstance(format!("degenerate segment on line {}", lineno + 1))
        })?);
    }
    let mut seen = HashSet::new();
    for (k, s) in segments.iter().enumerate() {
        if !seen.insert(*s) {
            return Err(Error::InvalidInstance(format!("duplicate segment {k}")));
        }
    }
    Instance::from_segments(id, &segments, None)
}

/// One color per segment, 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub instance_id: String,
    pub colors: Vec<u32>,
    pub num_colors: usize,
}

impl Coloring {
    /// Builds a coloring with compacted labels: the distinct values of
    /// `colors` are renumbered `0..k` preserving their relative order.
    pub fn from_colors(colors: Vec<u32>) -> Self {
        let mut used: Vec<u32> = colors.clone();
        used.sort_unstable();
        used.dedup();
        let k = used.len();
        let colors = if used.last().map_or(true, |&m| m as usize + 1 == k) {
            colors
        } else {
            colors
                .iter()
                .map(|c| used.binary_search(c).unwrap() as u32)
                .collect()
        };
        Coloring {
            instance_id: String::new(),
            colors,
            num_colors: k,
        }
    }

    /// Wraps values as read from a file without compaction or checks.
    pub fn from_raw(instance_id: impl Into<String>, colors: Vec<u32>, num_colors: usize) -> Self {
        Coloring {
            instance_id: instance_id.into(),
            colors,
            num_colors,
        }
    }

    pub fn with_instance_id(mut self, id: impl Into<String>) -> Self {
        self.instance_id = id.into();
        self
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Vertices grouped by color.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.num_colors];
        for (v, &c) in self.colors.iter().enumerate() {
            classes[c as usize].push(v);
        }
        classes
    }
}

pub fn load_solution<R: Read>(source: R) -> Result<Coloring> {
    let file: SolutionFile = serde_json::from_reader(source)?;
    if file.kind != "solution" {
        return Err(Error::Parse(format!(
            "expected type \"solution\", found \"{}\"",
            file.kind
        )));
    }
    Ok(Coloring::from_raw(file.instance, file.colors, file.num_colors))
}

pub fn save_solution<W: Write>(coloring: &Coloring, mut sink: W) -> Result<()> {
    let file = SolutionFile {
        kind: "solution".into(),
        instance: coloring.instance_id.clone(),
        num_colors: coloring.num_colors,
        colors: coloring.colors.clone(),
    };
    serde_json::to_writer(&mut sink, &file)?;
    sink.write_all(b"\n")?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub valid: bool,
    /// Number of distinct colors actually used.
    pub num_colors: usize,
    /// Intersecting pairs `(u, v)`, `u < v`, sharing a color; sorted, capped.
    pub conflicts: Vec<(usize, usize)>,
    pub error: Option<String>,
}

impl VerificationReport {
    fn structural(msg: String) -> Self {
        VerificationReport {
            valid: false,
            num_colors: 0,
            conflicts: Vec::new(),
            error: Some(msg),
        }
    }
}

fn structural_check(n: usize, coloring: &Coloring) -> Option<String> {
    if coloring.colors.len() != n {
        return Some(format!(
            "solution has {} colors but instance has {} segments",
            coloring.colors.len(),
            n
        ));
    }
    if let Some((v, c)) = coloring
        .colors
        .iter()
        .enumerate()
        .find(|(_, &c)| c as usize >= coloring.num_colors)
    {
        return Some(format!(
            "segment {v} has color {c}, outside 0..{}",
            coloring.num_colors
        ));
    }
    None
}

fn distinct_colors(colors: &[u32]) -> usize {
    colors.iter().collect::<HashSet<_>>().len()
}

/// Checks a coloring against the instance geometry, testing every pair of
/// equally colored segments with the exact predicate.
pub fn verify_solution(instance: &Instance, coloring: &Coloring) -> VerificationReport {
    verify_solution_capped(instance, coloring, DEFAULT_CONFLICT_CAP)
}

pub fn verify_solution_capped(
    instance: &Instance,
    coloring: &Coloring,
    cap: usize,
) -> VerificationReport {
    if coloring.instance_id != instance.id {
        return VerificationReport::structural(format!(
            "solution is for instance `{}`, not `{}`",
            coloring.instance_id, instance.id
        ));
    }
    if let Some(msg) = structural_check(instance.len(), coloring) {
        return VerificationReport::structural(msg);
    }
    let segments = instance.segments();
    let classes = coloring.classes();
    let mut conflicts: Vec<(usize, usize)> = classes
        .par_iter()
        .flat_map_iter(|class| {
            let segments = &segments;
            class.iter().enumerate().flat_map(move |(a, &u)| {
                class[a + 1..]
                    .iter()
                    .filter(move |&&v| conflict_unchecked(&segments[u], &segments[v]))
                    .map(move |&v| (u.min(v), u.max(v)))
            })
        })
        .collect();
    conflicts.sort_unstable();
    conflicts.truncate(cap);
    VerificationReport {
        valid: conflicts.is_empty(),
        num_colors: distinct_colors(&coloring.colors),
        conflicts,
        error: None,
    }
}

/// Checks a coloring against a prebuilt conflict graph. The instance id is
/// not checked.
pub fn verify_with_graph(graph: &ConflictGraph, coloring: &Coloring, cap: usize) -> VerificationReport {
    if let Some(msg) = structural_check(graph.n(), coloring) {
        return VerificationReport::structural(msg);
    }
    let mut conflicts = Vec::new();
    'outer: for u in 0..graph.n() {
        for v in graph.neighbors(u) {
            if v > u && coloring.colors[u] == coloring.colors[v] {
                conflicts.push((u, v));
                if conflicts.len() >= cap {
                    break 'outer;
                }
            }
        }
    }
    VerificationReport {
        valid: conflicts.is_empty(),
        num_colors: distinct_colors(&coloring.colors),
        conflicts,
        error: None,
    }
}
