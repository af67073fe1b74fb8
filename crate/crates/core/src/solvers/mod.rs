//! Graph coloring solvers: construction heuristics, tabu searches, a hybrid
//! evolutionary algorithm, backtracking branch-and-bound, and the
//! color-descent driver that ties them together.
//!
//! Every solver is deterministic for a fixed graph, configuration and seed,
//! as long as its budget is iteration-based. Wall-clock limits can cut a run
//! short at a machine-dependent point.

mod descent;
mod evolution;
mod exact;
mod greedy;
mod tabu;

use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::conflict::ConflictGraph;
use crate::error::{Error, Result};
use crate::instance::Coloring;

pub use descent::{
    best_construction, solve_descending, solve_descending_with, solve_portfolio, write_trace,
    DescentAlgorithm, DescentOptions, TraceRow,
};
pub use evolution::{gpx_crossover, hybrid_ea, Crossover, EAConfig, Replacement};
pub use exact::{exact_bnb_dsatur, ExactResult};
pub use greedy::{
    dsatur, greedy_welsh_powell, iterated_greedy, iterated_greedy_with_history, rlf, IgStrategy,
};
pub use tabu::{partialcol, partialcol_from, tabucol, tabucol_from};

/// Marker for a vertex without a color.
pub const UNCOLORED: u32 = u32::MAX;

/// A k-assignment that may contain conflicts or uncolored vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialColoring {
    pub colors: Vec<u32>,
    pub k: usize,
    /// Monochromatic edges among colored vertices.
    pub conflict_count: u64,
    pub uncolored_count: usize,
}

impl PartialColoring {
    /// Wraps an assignment and counts its conflicts and uncolored vertices.
    pub fn from_assignment(graph: &ConflictGraph, colors: Vec<u32>, k: usize) -> Self {
        let (conflict_count, uncolored_count) = count_defects(graph, &colors);
        PartialColoring {
            colors,
            k,
            conflict_count,
            uncolored_count,
        }
    }

    pub fn is_complete_proper(&self) -> bool {
        self.conflict_count == 0 && self.uncolored_count == 0
    }

    /// Converts a conflict-free complete assignment into a compacted
    /// [`Coloring`].
    pub fn to_coloring(&self) -> Option<Coloring> {
        self.is_complete_proper()
            .then(|| Coloring::from_colors(self.colors.clone()))
    }

    /// Recomputes both counters from scratch.
    pub fn audit(&self, graph: &ConflictGraph) -> bool {
        count_defects(graph, &self.colors) == (self.conflict_count, self.uncolored_count)
    }
}

pub(crate) fn count_defects(graph: &ConflictGraph, colors: &[u32]) -> (u64, usize) {
    let mut conflicts = 0;
    let mut uncolored = 0;
    for (v, &cv) in colors.iter().enumerate() {
        if cv == UNCOLORED {
            uncolored += 1;
            continue;
        }
        conflicts += graph
            .neighbors(v)
            .filter(|&u| u > v && colors[u] == cv)
            .count() as u64;
    }
    (conflicts, uncolored)
}

/// Stopping rules for the search procedures. At least one of
/// `max_iterations` and `max_seconds` must be set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    pub max_iterations: Option<u64>,
    pub max_seconds: Option<f64>,
    /// Stop descending once this many colors are reached.
    pub target_k: Option<usize>,
    pub seed: u64,
}

impl SearchBudget {
    pub fn iterations(max_iterations: u64, seed: u64) -> Self {
        SearchBudget {
            max_iterations: Some(max_iterations),
            max_seconds: None,
            target_k: None,
            seed,
        }
    }

    pub fn seconds(max_seconds: f64, seed: u64) -> Self {
        SearchBudget {
            max_iterations: None,
            max_seconds: Some(max_seconds),
            target_k: None,
            seed,
        }
    }

    pub fn with_target(mut self, k: usize) -> Self {
        self.target_k = Some(k);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let secs_ok = self.max_seconds.is_some_and(|s| s.is_finite() && s >= 0.0);
        if self.max_iterations.is_none() && !secs_ok {
            return Err(Error::InvalidConfig(
                "search budget needs a finite iteration or time limit".into(),
            ));
        }
        if let Some(s) = self.max_seconds {
            if !(s >= 0.0) {
                return Err(Error::InvalidConfig(format!("negative time limit {s}")));
            }
        }
        Ok(())
    }

    pub(crate) fn iteration_cap(&self) -> u64 {
        self.max_iterations.unwrap_or(u64::MAX)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Clock {
    start: Instant,
    deadline: Option<Instant>,
}

impl Clock {
    pub(crate) fn new(max_seconds: Option<f64>) -> Self {
        let start = Instant::now();
        Clock {
            start,
            deadline: max_seconds
                .filter(|s| s.is_finite())
                .map(|s| start + Duration::from_secs_f64(s.max(0.0))),
        }
    }

    #[inline]
    pub(crate) fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub(crate) fn elapsed_secs(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// Dynamic tabu tenure: `floor(0.6 * objective) + U{0..9}`.
#[inline]
pub(crate) fn tenure<R: Rng>(objective: u64, rng: &mut R) -> u64 {
    (objective * 3) / 5 + rng.gen_range(0..=9)
}

/// Top-level algorithm selector, as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    WelshPowell,
    Dsatur,
    Rlf,
    IteratedGreedy,
    Tabucol,
    Partialcol,
    HybridEa,
    Exact,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "wp" => Algorithm::WelshPowell,
            "dsatur" => Algorithm::Dsatur,
            "rlf" => Algorithm::Rlf,
            "ig" => Algorithm::IteratedGreedy,
            "tabucol" => Algorithm::Tabucol,
            "partialcol" => Algorithm::Partialcol,
            "hybrid_ea" => Algorithm::HybridEa,
            "exact" => Algorithm::Exact,
            other => return Err(Error::InvalidConfig(format!("unknown algorithm `{other}`"))),
        })
    }
}
