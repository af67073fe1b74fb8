//! Per-instance statistics.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::conflict::ConflictGraph;
use crate::error::Result;
use crate::instance::Instance;
use crate::solvers::{dsatur, rlf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatRecord {
    pub id: String,
    pub n: usize,
    /// Segments over point pairs, `|E| / C(|V|, 2)`.
    pub geom_density: f64,
    pub m_conflict: u64,
    pub conflict_density: f64,
    pub deg_min: u32,
    pub deg_max: u32,
    pub deg_mean: f64,
    pub dsatur_k: usize,
    pub rlf_k: usize,
}

fn pairs(n: usize) -> f64 {
    n as f64 * (n as f64 - 1.0) / 2.0
}

pub fn instance_stats(instance: &Instance, graph: &ConflictGraph) -> StatRecord {
    let n = graph.n();
    let v = instance.points().len();
    let degrees = graph.degrees();
    StatRecord {
        id: instance.id().to_string(),
        n,
        geom_density: if v < 2 { 0.0 } else { instance.len() as f64 / pairs(v) },
        m_conflict: graph.m(),
        conflict_density: graph.density(),
        deg_min: degrees.iter().copied().min().unwrap_or(0),
        deg_max: degrees.iter().copied().max().unwrap_or(0),
        deg_mean: if n == 0 { 0.0 } else { 2.0 * graph.m() as f64 / n as f64 },
        dsatur_k: dsatur(graph).num_colors,
        rlf_k: rlf(graph).num_colors,
    }
}

/// Writes records as CSV with header
/// `id,n,geom_density,m_conflict,conflict_density,deg_min,deg_max,deg_mean,dsatur_k,rlf_k`.
pub fn write_stats<W: Write>(records: &[StatRecord], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stats<R: std::io::Read>(source: R) -> Result<Vec<StatRecord>> {
    let mut r = csv::Reader::from_reader(source);
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::build_conflict_graph;
    use crate::geometry::{Point, Segment};

    fn seg(a: (i64, i64), b: (i64, i64)) -> Segment {
        Segment::new(Point::new(a.0, a.1).unwrap(), Point::new(b.0, b.1).unwrap()).unwrap()
    }

    #[test]
    fn disjoint_pair() {
        let inst = Instance::from_segments("d", &[seg((0, 0), (1, 0)), seg((0, 5), (1, 5))], None).unwrap();
        let s = instance_stats(&inst, &build_conflict_graph(&inst).unwrap());
        assert_eq!((s.n, s.m_conflict, s.conflict_density), (2, 0, 0.0));
        assert_eq!((s.dsatur_k, s.rlf_k), (1, 1));
    }

    #[test]
    fn three_crossing() {
        let inst = Instance::from_segments(
            "t",
            &[
                seg((0, 0), (10, 10)),
                seg((0, 10), (10, 0)),
                seg((5, -1), (5, 11)),
            ],
            None,
        )
        .unwrap();
        let s = instance_stats(&inst, &build_conflict_graph(&inst).unwrap());
        assert_eq!(s.conflict_density, 1.0);
        assert_eq!((s.deg_min, s.deg_max, s.deg_mean), (2, 2, 2.0));
        assert_eq!(s.dsatur_k, 3);
    }

    #[test]
    fn csv_round_trip() {
        let r = StatRecord {
            id: "x".into(),
            n: 3,
            geom_density: 0.5,
            m_conflict: 1,
            conflict_density: 1.0 / 3.0,
            deg_min: 0,
            deg_max: 1,
            deg_mean: 2.0 / 3.0,
            dsatur_k: 2,
            rlf_k: 2,
        };
        let mut buf = Vec::new();
        write_stats(std::slice::from_ref(&r), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "id,n,geom_density,m_conflict,conflict_density,deg_min,deg_max,deg_mean,dsatur_k,rlf_k\n"
        ));
        assert_eq!(read_stats(&buf[..]).unwrap(), vec![r]);
    }
}
