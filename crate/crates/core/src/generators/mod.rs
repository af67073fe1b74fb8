//! Random instance families and their modifiers.
//!
//! * `sqrp`: random points in a rectangle, edges from a length-rank window.
//! * `visp`: random points inside a polygon, edges between visible pairs.
//! * `re`: a random regular graph drawn with a stress layout.
//!
//! An `r` prefix marks added noise edges; an `ecn` suffix marks segments
//! inflated about their midpoints so that shared endpoints become crossings.

mod modifiers;
mod re;
mod sqrp;
mod visp;

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conflict::build_conflict_graph;
use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::instance::Instance;

pub use modifiers::{apply_ecn, apply_noise, ECN_SCALE};
pub use re::{gen_re, random_regular_graph, stress_layout};
pub use sqrp::gen_sqrp;
pub use visp::gen_visp;

/// Positive rational `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon {num}/{den} must be positive"
            )));
        }
        Ok(Ratio { num, den })
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Default for Ratio {
    fn default() -> Self {
        Ratio { num: 1, den: 64 }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Accepts `a/b`, an integer, or a decimal such as `0.015625`.
impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("cannot parse `{s}` as a positive rational"));
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse().map_err(|_| bad())?;
            let den = b.trim().parse().map_err(|_| bad())?;
            return Ratio::new(num, den).map_err(|_| bad());
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        let g = gcd(num, den);
        Ratio::new(num / g.max(1), den / g.max(1)).map_err(|_| bad())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqrpParams {
    pub a: i64,
    pub b: i64,
    pub npoints: usize,
    pub q_low: f64,
    pub q_high: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VispParams {
    pub polygon: Vec<[i64; 2]>,
    pub m: usize,
    pub min_segments: usize,
    pub max_segments: usize,
    pub max_retries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReParams {
    pub ell: usize,
    pub m: usize,
    pub p_extra: f64,
    pub layout_iterations: usize,
    pub grid_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Sqrp(SqrpParams),
    Visp(VispParams),
    Re(ReParams),
}

impl Family {
    pub fn base_name(&self) -> &'static str {
        match self {
            Family::Sqrp(_) => "sqrp",
            Family::Visp(_) => "visp",
            Family::Re(_) => "re",
        }
    }
}

/// Full generator configuration. Stored as JSON, e.g.
///
/// ```json
/// {"family":"sqrp","a":1000,"b":1000,"npoints":60,"q_low":0,"q_high":30,
///  "p":0.5,"ecn":{"num":1,"den":64},"noise":5,"seed":7}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecn: Option<Ratio>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<usize>,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(family: Family, seed: u64) -> Self {
        GeneratorConfig {
            family,
            ecn: None,
            noise: None,
            seed,
        }
    }

    /// `r` prefix for noise, family name, `ecn` suffix.
    pub fn name(&self) -> String {
        let mut s = String::new();
        if self.noise.is_some_and(|c| c > 0) {
            s.push('r');
        }
        s.push_str(self.family.base_name());
        if self.ecn.is_some() {
            s.push_str("ecn");
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if let Some(e) = self.ecn {
            Ratio::new(e.num, e.den)?;
        }
        match &self.family {
            Family::Sqrp(c) => {
                if c.a < 0 || c.b < 0 {
                    return bad(format!("rectangle [0,{}]x[0,{}] is empty", c.a, c.b));
                }
                if c.npoints < 2 {
                    return bad("sqrp needs at least 2 points".into());
                }
                let cells = (c.a as u128 + 1) * (c.b as u128 + 1);
                if c.npoints as u128 > cells {
                    return bad(format!("{} distinct points do not fit the rectangle", c.npoints));
                }
                if !(0.0..=100.0).contains(&c.q_low)
                    || !(0.0..=100.0).contains(&c.q_high)
                    || c.q_low >= c.q_high
                {
                    return bad(format!("quantile window [{}, {}] invalid", c.q_low, c.q_high));
                }
                if !(c.p > 0.0 && c.p <= 1.0) {
                    return bad(format!("probability {} outside (0, 1]", c.p));
                }
            }
            Family::Visp(c) => {
                if c.m < 2 {
                    return bad("visp needs m >= 2".into());
                }
                if c.min_segments > c.max_segments {
                    return bad(format!(
                        "segment window [{}, {}] is empty",
                        c.min_segments, c.max_segments
                    ));
                }
                polygon_from_pairs(&c.polygon)?;
            }
            Family::Re(c) => {
                if c.m == 0 || c.m >= c.ell {
                    return bad(format!("degree {} must lie in 1..{}", c.m, c.ell));
                }
                if (c.ell * c.m) % 2 != 0 {
                    return bad(format!("ell * m = {} is odd", c.ell * c.m));
                }
                if !(0.0..=1.0).contains(&c.p_extra) {
                    return bad(format!("probability {} outside [0, 1]", c.p_extra));
                }
                if !(c.grid_scale.is_finite() && c.grid_scale > 0.0) {
                    return bad(format!("grid scale {} must be positive", c.grid_scale));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn polygon_from_pairs(pairs: &[[i64; 2]]) -> Result<Polygon> {
    let pts = pairs
        .iter()
        .map(|&[x, y]| Point::new(x, y))
        .collect::<Result<Vec<_>>>()?;
    Polygon::new(pts)
}

/// Reads a polygon file: a vertex count line, then one `x y` pair per line.
pub fn load_polygon<R: BufRead>(source: R) -> Result<Vec<[i64; 2]>> {
    let mut lines = source
        .lines()
        .map(|l| l.map_err(Error::from))
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let count: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty polygon file".into()))??
        .trim()
        .parse()
        .map_err(|_| Error::Parse("first line must be the vertex count".into()))?;
    let mut out = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        let line = line?;
        let nums: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("polygon line {}: `{line}`", i + 2)))?;
        match nums[..] {
            [x, y] => out.push([x, y]),
            _ => return Err(Error::Parse(format!("polygon line {}: `{line}`", i + 2))),
        }
    }
    if out.len() != count {
        return Err(Error::Parse(format!(
            "polygon file announces {count} vertices but lists {}",
            out.len()
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenerationReport {
    pub accepted: bool,
    pub retries: usize,
    pub n: usize,
    pub components: usize,
    pub largest_component: usize,
    /// Segments with at least one conflict.
    pub non_isolated: usize,
}

impl GenerationReport {
    pub(crate) fn summarize(instance: &Instance, retries: usize) -> Result<Self> {
        let g = build_conflict_graph(instance)?;
        let comps = g.components();
        let non_isolated = g.degrees().iter().filter(|&&d| d > 0).count();
        let nontrivial: Vec<usize> = comps.iter().map(Vec::len).filter(|&s| s > 1).collect();
        Ok(GenerationReport {
            accepted: true,
            retries,
            n: instance.len(),
            components: nontrivial.len(),
            largest_component: nontrivial.iter().copied().max().unwrap_or(0),
            non_isolated,
        })
    }

    /// The largest component holds at least 95% of the segments that have
    /// a conflict.
    pub fn well_connected(&self) -> bool {
        self.largest_component as u128 * 100 >= self.non_isolated as u128 * 95
    }
}

/// Runs the configured family, then noise, then ecn. The instance id is the
/// composed name followed by the segment count.
pub fn generate(config: &GeneratorConfig) -> Result<(Instance, GenerationReport)> {
    config.validate()?;
    let (mut instance, retries) = match &config.family {
        Family::Sqrp(c) => (gen_sqrp(c, config.seed)?, 0),
        Family::Visp(c) => {
            let (inst, report) = gen_visp(c, config.seed)?;
            (inst, report.retries)
        }
        Family::Re(c) => (gen_re(c, config.seed)?, 0),
    };
    if let Some(count) = config.noise.filter(|&c| c > 0) {
        instance = apply_noise(&instance, count, noise_seed(config.seed))?;
    }
    if let Some(eps) = config.ecn {
        instance = apply_ecn(&instance, eps)?;
    }
    instance.set_id(format!("{}{}", config.name(), instance.len()));
    let report = GenerationReport::summarize(&instance, retries)?;
    Ok((instance, report))
}

fn noise_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}
