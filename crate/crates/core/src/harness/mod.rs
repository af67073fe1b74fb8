//! Scoring, leaderboards, baseline runs and instance selection.

mod baselines;
mod select;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{load_instance, load_solution, verify_solution, Instance};

pub use baselines::{
    run_baselines, write_baseline_report, write_baseline_summary, BaselineConfig, BaselineReport,
    BaselineRow, METHODS,
};
pub use select::{feature_distance, normalize_features, select_diverse, FeatureVector, FEATURES};

/// `0.95^(100 * (team_k - best_k) / best_k)`, or 0 for a missing entry.
pub fn score(team_k: Option<usize>, best_k: usize) -> Result<f64> {
    if best_k == 0 {
        return Err(Error::Score("best k must be at least 1".into()));
    }
    let Some(t) = team_k else {
        return Ok(0.0);
    };
    if t < best_k {
        return Err(Error::Score(format!(
            "team k {t} is below the best k {best_k}"
        )));
    }
    let excess = 100.0 * (t - best_k) as f64 / best_k as f64;
    Ok(0.95f64.powf(excess))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submission {
    pub team: String,
    pub instance_id: String,
    pub num_colors: usize,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeamScore {
    pub team: String,
    pub total: f64,
    pub rank: usize,
    /// Latest timestamp among the submissions behind the team's per-instance
    /// bests.
    pub achieved_at: Option<u64>,
    pub best_k: BTreeMap<String, usize>,
    pub scores: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ScoreTable {
    /// Instance ids in sorted order.
    pub instances: Vec<String>,
    /// B(I) per instance; `None` when nobody solved it and no reference exists.
    pub best: BTreeMap<String, Option<usize>>,
    /// Teams in rank order.
    pub teams: Vec<TeamScore>,
}

/// Builds the score table. Invalid submissions are ignored. For each team
/// and instance the smallest k counts, dated by the earliest submission that
/// reached it. B(I) is the smallest valid k in the pool, lowered further by
/// `reference` where given. Teams are ranked by total (descending), then by
/// the time their final total was reached (earlier first), then by name.
pub fn leaderboard(
    submissions: &[Submission],
    instance_ids: &[String],
    reference: Option<&HashMap<String, usize>>,
) -> Result<ScoreTable> {
    let known: BTreeSet<&str> = instance_ids.iter().map(String::as_str).collect();
    if let Some(s) = submissions.iter().find(|s| !known.contains(s.instance_id.as_str())) {
        return Err(Error::UnknownInstance(s.instance_id.clone()));
    }
    if submissions.is_empty() {
        return Ok(ScoreTable::default());
    }

    let mut per_team: BTreeMap<&str, BTreeMap<&str, (usize, u64)>> = BTreeMap::new();
    for s in submissions {
        let entry = per_team.entry(s.team.as_str()).or_default();
        if !s.valid {
            continue;
        }
        entry
            .entry(s.instance_id.as_str())
            .and_modify(|(k, t)| {
                if s.num_colors < *k || (s.num_colors == *k && s.timestamp < *t) {
                    *k = s.num_colors;
                    *t = s.timestamp;
                }
            })
            .or_insert((s.num_colors, s.timestamp));
    }

    let mut best: BTreeMap<String, Option<usize>> = BTreeMap::new();
    for &id in &known {
        let pool = per_team.values().filter_map(|m| m.get(id).map(|e| e.0)).min();
        let r = reference.and_then(|r| r.get(id).copied());
        let b = match (pool, r) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        best.insert(id.to_string(), b);
    }

    let mut teams = Vec::with_capacity(per_team.len());
    for (team, entries) in &per_team {
        let mut total = 0.0;
        let mut scores = BTreeMap::new();
        for &id in &known {
            let s = match best[id] {
                Some(b) => score(entries.get(id).map(|e| e.0), b)?,
                None => 0.0,
            };
            total += s;
            scores.insert(id.to_string(), s);
        }
        teams.push(TeamScore {
            team: team.to_string(),
            total,
            rank: 0,
            achieved_at: entries.values().map(|e| e.1).max(),
            best_k: entries.iter().map(|(id, e)| (id.to_string(), e.0)).collect(),
            scores,
        });
    }
    teams.sort_by(|a, b| {
        b.total
            .total_cmp(&a.total)
            .then_with(|| match (a.achieved_at, b.achieved_at) {
                (Some(x), Some(y)) => x.cmp(&y),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            })
            .then_with(|| a.team.cmp(&b.team))
    });
    for (i, t) in teams.iter_mut().enumerate() {
        t.rank = i + 1;
    }
    Ok(ScoreTable {
        instances: known.iter().map(|s| s.to_string()).collect(),
        best,
        teams,
    })
}

/// `team,total,rank`.
pub fn write_scores<W: Write>(table: &ScoreTable, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["team", "total", "rank"])?;
    for t in &table.teams {
        w.write_record([t.team.clone(), t.total.to_string(), t.rank.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per team, one score column per instance.
pub fn write_scores_wide<W: Write>(table: &ScoreTable, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec!["team".to_string()];
    header.extend(table.instances.iter().cloned());
    w.write_record(&header)?;
    for t in &table.teams {
        let mut row = vec![t.team.clone()];
        row.extend(table.instances.iter().map(|id| t.scores[id].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct ManifestRow {
    team: String,
    instance: String,
    file: PathBuf,
    timestamp: u64,
}

/// Reads `<root>/manifest.csv` (`team,instance,file,timestamp`, with `file`
/// relative to `root`, conventionally `<team>/<instance>.solution`) and
/// verifies every listed solution against its instance.
pub fn load_submissions(root: &Path, instances: &[Instance]) -> Result<Vec<Submission>> {
    let by_id: HashMap<&str, &Instance> = instances.iter().map(|i| (i.id(), i)).collect();
    let mut reader = csv::Reader::from_path(root.join("manifest.csv"))?;
    let rows: Vec<ManifestRow> = reader.deserialize().collect::<std::result::Result<_, _>>()?;
    rows.par_iter()
        .map(|row| {
            let inst = by_id
                .get(row.instance.as_str())
                .ok_or_else(|| Error::UnknownInstance(row.instance.clone()))?;
            let path = root.join(&row.file);
            let (valid, k) = match File::open(&path)
                .map_err(Error::from)
                .and_then(|f| load_solution(BufReader::new(f)))
            {
                Ok(c) => {
                    let report = verify_solution(inst, &c);
                    (report.valid, report.num_colors)
                }
                Err(e) => {
                    log::warn!("{}: {e}", path.display());
                    (false, 0)
                }
            };
            Ok(Submission {
                team: row.team.clone(),
                instance_id: row.instance.clone(),
                num_colors: k,
                timestamp: row.timestamp,
                valid,
            })
        })
        .collect()
}

/// Loads every `*.json` instance file in a directory, in file-name order.
pub fn load_instance_dir(dir: &Path) -> Result<Vec<Instance>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    paths
        .par_iter()
        .map(|p| {
            load_instance(BufReader::new(File::open(p)?))
                .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
        })
        .collect()
}

/// Reads a two-column `id,best_k` CSV of reference values.
pub fn load_reference<R: std::io::Read>(source: R) -> Result<HashMap<String, usize>> {
    #[derive(Deserialize)]
    struct Row {
        id: String,
        best_k: usize,
    }
    let mut r = csv::Reader::from_reader(source);
    let mut out = HashMap::new();
    for row in r.deserialize::<Row>() {
        let row = row?;
        out.insert(row.id, row.best_k);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sub(team: &str, id: &str, k: usize, t: u64) -> Submission {
        Submission {
            team: team.into(),
            instance_id: id.into(),
            num_colors: k,
            timestamp: t,
            valid: true,
        }
    }

    fn ids(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn score_values() {
        assert_eq!(score(Some(7), 7).unwrap(), 1.0);
        assert_eq!(score(None, 7).unwrap(), 0.0);
        assert!((score(Some(110), 100).unwrap() - 0.95f64.powi(10)).abs() < 1e-12);
        assert!(score(Some(6), 7).is_err());
        assert!(score(Some(1), 0).is_err());
    }

    #[test]
    fn empty_pool() {
        let t = leaderboard(&[], &ids(&["a"]), None).unwrap();
        assert!(t.teams.is_empty());
    }

    #[test]
    fn unknown_instance_rejected() {
        assert!(matches!(
            leaderboard(&[sub("x", "zz", 3, 0)], &ids(&["a"]), None),
            Err(Error::UnknownInstance(_))
        ));
    }

    #[test]
    fn best_and_earliest_kept() {
        let subs = vec![
            sub("x", "a", 5, 10),
            sub("x", "a", 4, 30),
            sub("x", "a", 4, 20),
            Submission {
                valid: false,
                ..sub("y", "a", 1, 0)
            },
            sub("y", "a", 5, 1),
        ];
        let t = leaderboard(&subs, &ids(&["a"]), None).unwrap();
        assert_eq!(t.best["a"], Some(4));
        assert_eq!(t.teams[0].team, "x");
        assert_eq!(t.teams[0].achieved_at, Some(20));
        assert_eq!(t.teams[0].total, 1.0);
        assert!((t.teams[1].total - 0.95f64.powi(25)).abs() < 1e-12);
    }

    #[test]
    fn ties_go_to_earlier_team() {
        let subs = vec![
            sub("late", "a", 3, 100),
            sub("late", "b", 3, 50),
            sub("early", "a", 3, 10),
            sub("early", "b", 3, 90),
        ];
        let t = leaderboard(&subs, &ids(&["a", "b"]), None).unwrap();
        assert_eq!(t.teams[0].team, "early");
        assert_eq!(t.teams[0].rank, 1);
        assert_eq!(t.teams[1].rank, 2);
    }

    #[test]
    fn reference_lowers_best() {
        let reference: HashMap<String, usize> = [("a".to_string(), 4)].into();
        let t = leaderboard(&[sub("x", "a", 5, 0)], &ids(&["a", "b"]), Some(&reference)).unwrap();
        assert_eq!(t.best["a"], Some(4));
        assert_eq!(t.best["b"], None);
        assert!((t.teams[0].total - 0.95f64.powi(25)).abs() < 1e-12);
    }

    #[test]
    fn csv_outputs() {
        let subs = vec![sub("x", "a", 3, 0), sub("y", "b", 2, 0)];
        let t = leaderboard(&subs, &ids(&["a", "b"]), None).unwrap();
        let mut buf = Vec::new();
        write_scores(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "team,total,rank\nx,1,1\ny,1,2\n");
        let mut buf = Vec::new();
        write_scores_wide(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "team,a,b\nx,1,0\ny,0,1\n");
    }
}
