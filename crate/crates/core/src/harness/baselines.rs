use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::score;
use crate::conflict::{build_conflict_graph, ConflictGraph};
use crate::error::Result;
use crate::instance::{verify_with_graph, Coloring, Instance};
use crate::solvers::{
    dsatur, iterated_greedy, rlf, solve_descending_with, DescentAlgorithm, DescentOptions,
    IgStrategy, SearchBudget,
};

/// Column names of the per-method results, in report order.
pub const METHODS: [&str; 5] = ["dsatur", "rlf", "min_dsatur_rlf", "iterated_greedy", "hybrid_ea"];

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub ig_iterations: usize,
    pub ig_strategy: IgStrategy,
    /// Wall-clock limit for each hybrid EA run.
    pub ea_seconds: Option<f64>,
    /// Per-color-step iteration limit for each hybrid EA run.
    pub ea_iterations: Option<u64>,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            ig_iterations: 500,
            ig_strategy: IgStrategy::Random,
            ea_seconds: Some(120.0),
            ea_iterations: None,
            seed: 0,
        }
    }
}

/// Colors used by each method on one instance; `None` marks a failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaselineRow {
    pub id: String,
    pub dsatur_k: Option<usize>,
    pub rlf_k: Option<usize>,
    pub min_dsatur_rlf_k: Option<usize>,
    pub iterated_greedy_k: Option<usize>,
    pub hybrid_ea_k: Option<usize>,
}

impl BaselineRow {
    pub fn values(&self) -> [Option<usize>; 5] {
        [
            self.dsatur_k,
            self.rlf_k,
            self.min_dsatur_rlf_k,
            self.iterated_greedy_k,
            self.hybrid_ea_k,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineReport {
    pub rows: Vec<BaselineRow>,
    /// Best k per instance used for the virtual scores.
    pub best: Vec<Option<usize>>,
    /// Summed virtual score per method, in [`METHODS`] order.
    pub totals: [f64; 5],
}

fn checked(graph: &ConflictGraph, id: &str, method: &str, c: Result<Coloring>) -> Option<Coloring> {
    match c {
        Ok(c) if verify_with_graph(graph, &c, 1).valid => Some(c),
        Ok(_) => {
            log::warn!("{id}: {method} produced an invalid coloring");
            None
        }
        Err(e) => {
            log::warn!("{id}: {method} failed: {e}");
            None
        }
    }
}

fn run_one(instance: &Instance, config: &BaselineConfig) -> BaselineRow {
    let id = instance.id().to_string();
    let graph = match build_conflict_graph(instance) {
        Ok(g) => g,
        Err(e) => {
            log::warn!("{id}: conflict graph failed: {e}");
            return BaselineRow {
                id,
                dsatur_k: None,
                rlf_k: None,
                min_dsatur_rlf_k: None,
                iterated_greedy_k: None,
                hybrid_ea_k: None,
            };
        }
    };
    let ds = checked(&graph, &id, "dsatur", Ok(dsatur(&graph)));
    let rl = checked(&graph, &id, "rlf", Ok(rlf(&graph)));
    let min = [&ds, &rl]
        .into_iter()
        .flatten()
        .min_by_key(|c| c.num_colors)
        .cloned();
    let ig = min.as_ref().and_then(|start| {
        checked(
            &graph,
            &id,
            "iterated_greedy",
            iterated_greedy(&graph, start, config.ig_strategy, config.ig_iterations, config.seed),
        )
    });
    let budget = SearchBudget {
        max_iterations: config.ea_iterations,
        max_seconds: config.ea_seconds,
        target_k: None,
        seed: config.seed,
    };
    let options = DescentOptions {
        ig_iterations: config.ig_iterations,
        ig_strategy: config.ig_strategy,
        ..DescentOptions::default()
    };
    let ea = checked(
        &graph,
        &id,
        "hybrid_ea",
        solve_descending_with(&graph, &budget, DescentAlgorithm::HybridEa, &options, None),
    );
    BaselineRow {
        id,
        dsatur_k: ds.map(|c| c.num_colors),
        rlf_k: rl.map(|c| c.num_colors),
        min_dsatur_rlf_k: min.map(|c| c.num_colors),
        iterated_greedy_k: ig.map(|c| c.num_colors),
        hybrid_ea_k: ea.map(|c| c.num_colors),
    }
}

/// Runs every baseline method on every instance (instances in parallel) and
/// scores each method as if it were a team. The best k of an instance is
/// the minimum over all methods and the optional reference value.
pub fn run_baselines(
    instances: &[Instance],
    config: &BaselineConfig,
    reference: Option<&HashMap<String, usize>>,
) -> Result<BaselineReport> {
    let rows: Vec<BaselineRow> = instances.par_iter().map(|i| run_one(i, config)).collect();
    let mut best = Vec::with_capacity(rows.len());
    let mut totals = [0.0; 5];
    for row in &rows {
        let pool = row.values().into_iter().flatten().min();
        let r = reference.and_then(|r| r.get(&row.id).copied());
        let b = match (pool, r) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if let Some(b) = b {
            for (t, k) in totals.iter_mut().zip(row.values()) {
                *t += score(k, b)?;
            }
        }
        best.push(b);
    }
    Ok(BaselineReport { rows, best, totals })
}

/// Per-instance CSV keyed by `id`, with a `best_k` column.
pub fn write_baseline_report<W: Write>(report: &BaselineReport, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "id",
        "dsatur_k",
        "rlf_k",
        "min_dsatur_rlf_k",
        "iterated_greedy_k",
        "hybrid_ea_k",
        "best_k",
    ])?;
    let cell = |k: Option<usize>| k.map_or_else(String::new, |k| k.to_string());
    for (row, best) in report.rows.iter().zip(&report.best) {
        let mut rec = vec![row.id.clone()];
        rec.extend(row.values().into_iter().map(cell));
        rec.push(cell(*best));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `method,total` virtual-score summary.
pub fn write_baseline_summary<W: Write>(report: &BaselineReport, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["method", "total"])?;
    for (m, t) in METHODS.iter().zip(report.totals) {
        w.write_record([m.to_string(), t.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, Segment};

    fn seg(a: (i64, i64), b: (i64, i64)) -> Segment {
        Segment::new(Point::new(a.0, a.1).unwrap(), Point::new(b.0, b.1).unwrap()).unwrap()
    }

    fn quick() -> BaselineConfig {
        BaselineConfig {
            ig_iterations: 20,
            ea_seconds: None,
            ea_iterations: Some(200),
            ..BaselineConfig::default()
        }
    }

    #[test]
    fn four_crossing_segments() {
        // Four lines through a common interior point.
        let inst = Instance::from_segments(
            "k4",
            &[
                seg((-10, 0), (10, 0)),
                seg((0, -10), (0, 10)),
                seg((-10, -10), (10, 10)),
                seg((-10, 10), (10, -10)),
            ],
            None,
        )
        .unwrap();
        let r = run_baselines(std::slice::from_ref(&inst), &quick(), None).unwrap();
        assert_eq!(r.rows[0].values(), [Some(4); 5]);
        assert_eq!(r.totals, [1.0; 5]);
        let mut buf = Vec::new();
        write_baseline_report(&r, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("k4,4,4,4,4,4,4\n"));
    }

    #[test]
    fn reference_caps_scores() {
        let inst = Instance::from_segments("one", &[seg((0, 0), (1, 1))], None).unwrap();
        let reference: HashMap<String, usize> = [("one".to_string(), 1)].into();
        let r = run_baselines(&[inst], &quick(), Some(&reference)).unwrap();
        assert_eq!(r.best, vec![Some(1)]);
        assert_eq!(r.totals, [1.0; 5]);
        let mut buf = Vec::new();
        write_baseline_summary(&r, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("method,total\ndsatur,1\n"));
    }
}
