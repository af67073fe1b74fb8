use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::StatRecord;

pub const FEATURES: usize = 6;

/// Instance features: n, geometric density, conflict edges, conflict
/// density, DSATUR k, RLF k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub id: String,
    pub values: [f64; FEATURES],
}

impl From<&StatRecord> for FeatureVector {
    fn from(s: &StatRecord) -> Self {
        FeatureVector {
            id: s.id.clone(),
            values: [
                s.n as f64,
                s.geom_density,
                s.m_conflict as f64,
                s.conflict_density,
                s.dsatur_k as f64,
                s.rlf_k as f64,
            ],
        }
    }
}

/// Min-max normalizes each component to `[0, 1]` over the pool. Constant
/// components become 0.
pub fn normalize_features(pool: &[FeatureVector]) -> Vec<FeatureVector> {
    let mut lo = [f64::INFINITY; FEATURES];
    let mut hi = [f64::NEG_INFINITY; FEATURES];
    for f in pool {
        for c in 0..FEATURES {
            lo[c] = lo[c].min(f.values[c]);
            hi[c] = hi[c].max(f.values[c]);
        }
    }
    pool.iter()
        .map(|f| {
            let mut values = [0.0; FEATURES];
            for c in 0..FEATURES {
                let span = hi[c] - lo[c];
                if span > 0.0 {
                    values[c] = (f.values[c] - lo[c]) / span;
                }
            }
            FeatureVector {
                id: f.id.clone(),
                values,
            }
        })
        .collect()
}

/// Weighted Euclidean distance.
pub fn feature_distance(a: &FeatureVector, b: &FeatureVector, weights: &[f64; FEATURES]) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .zip(weights)
        .map(|((x, y), w)| w * (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Greedy dispersion on normalized features. Starts from the farthest pair,
/// then repeatedly adds the candidate farthest from its nearest selected
/// one. Ties go to the lowest id. Ids are returned in selection order.
pub fn select_diverse(
    candidates: &[FeatureVector],
    count: usize,
    weights: Option<&[f64; FEATURES]>,
) -> Result<Vec<String>> {
    if count > candidates.len() {
        return Err(Error::InvalidConfig(format!(
            "cannot select {count} of {} candidates",
            candidates.len()
        )));
    }
    let w = weights.copied().unwrap_or([1.0; FEATURES]);
    if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidConfig("weights must be finite and non-negative".into()));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut pool = normalize_features(candidates);
    pool.sort_by(|a, b| a.id.cmp(&b.id));
    let n = pool.len();
    if n == 1 {
        return Ok(vec![pool[0].id.clone()]);
    }

    let (mut a, mut b, mut far) = (0, 1, -1.0);
    for i in 0..n {
        for j in i + 1..n {
            let d = feature_distance(&pool[i], &pool[j], &w);
            if d > far {
                (a, b, far) = (i, j, d);
            }
        }
    }
    let mut chosen = vec![a];
    if count >= 2 {
        chosen.push(b);
    }
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| {
            chosen
                .iter()
                .map(|&c| feature_distance(&pool[i], &pool[c], &w))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut taken = vec![false; n];
    for &c in &chosen {
        taken[c] = true;
    }
    while chosen.len() < count {
        let mut pick = usize::MAX;
        for i in 0..n {
            if !taken[i] && (pick == usize::MAX || nearest[i] > nearest[pick]) {
                pick = i;
            }
        }
        taken[pick] = true;
        chosen.push(pick);
        for i in 0..n {
            nearest[i] = nearest[i].min(feature_distance(&pool[i], &pool[pick], &w));
        }
    }
    Ok(chosen.into_iter().map(|i| pool[i].id.clone()).collect())
}
