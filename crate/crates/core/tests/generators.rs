mod common;

use std::collections::HashSet;

use common::{oracle_conflict, oracle_visible, pt};
use planepart::generators::{
    apply_ecn, apply_noise, gen_re, gen_sqrp, gen_visp, generate, random_regular_graph,
    stress_layout, Family, GeneratorConfig, Ratio, ReParams, SqrpParams, VispParams,
};
use planepart::geometry::{Point, Polygon};
use planepart::instance::{save_instance, Instance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sqrp(npoints: usize, q_low: f64, q_high: f64, p: f64) -> SqrpParams {
    SqrpParams {
        a: 1000,
        b: 1000,
        npoints,
        q_low,
        q_high,
        p,
    }
}

fn bytes(inst: &Instance) -> Vec<u8> {
    let mut buf = Vec::new();
    save_instance(inst, &mut buf).unwrap();
    buf
}

fn len2(inst: &Instance, e: usize) -> i64 {
    let s = inst.segment(e);
    let (dx, dy) = (s.b().x - s.a().x, s.b().y - s.a().y);
    dx * dx + dy * dy
}

/// Pairs of segment indices that share exactly one endpoint.
fn endpoint_sharing_pairs(inst: &Instance) -> Vec<(usize, usize)> {
    let e = inst.edges();
    let mut out = Vec::new();
    for u in 0..e.len() {
        for v in u + 1..e.len() {
            let a: HashSet<u32> = [e[u].0, e[u].1].into();
            let shared = a.contains(&e[v].0) as usize + a.contains(&e[v].1) as usize;
            if shared == 1 {
                out.push((u, v));
            }
        }
    }
    out
}

fn endpoints(inst: &Instance, e: usize) -> (Point, Point) {
    let s = inst.segment(e);
    (s.a(), s.b())
}

#[test]
fn sqrp_is_deterministic() {
    let p = sqrp(50, 20.0, 80.0, 0.3);
    let a = gen_sqrp(&p, 17).unwrap();
    let b = gen_sqrp(&p, 17).unwrap();
    assert_eq!(bytes(&a), bytes(&b));
    assert_ne!(bytes(&a), bytes(&gen_sqrp(&p, 18).unwrap()));
}

#[test]
fn sqrp_full_window_is_complete() {
    let inst = gen_sqrp(&sqrp(12, 0.0, 100.0, 1.0), 3).unwrap();
    assert_eq!(inst.points().len(), 12);
    assert_eq!(inst.len(), 12 * 11 / 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sqrp_respects_length_window(npoints in 5usize..40, lo in 0.0f64..90.0, width in 5.0f64..60.0, seed: u64) {
        let hi = (lo + width).min(100.0);
        let params = sqrp(npoints, lo, hi, 1.0);
        let Ok(inst) = gen_sqrp(&params, seed) else { return Ok(()) };
        // Independent ranking of all candidate pair lengths.
        let pts = inst.points();
        let mut all: Vec<i64> = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let (dx, dy) = (pts[j].x - pts[i].x, pts[j].y - pts[i].y);
                all.push(dx * dx + dy * dy);
            }
        }
        all.sort_unstable();
        let m = all.len();
        let lo_rank = (lo * m as f64 / 100.0).floor() as usize;
        let hi_rank = ((hi * m as f64 / 100.0).floor() as usize).min(m);
        prop_assert_eq!(inst.len(), hi_rank - lo_rank);
        for e in 0..inst.len() {
            let l = len2(&inst, e);
            prop_assert!(l >= all[lo_rank] && l <= all[hi_rank - 1]);
        }
    }

    #[test]
    fn random_regular_is_regular_and_simple(half in 2usize..40, m in 1usize..6, seed: u64) {
        let ell = 2 * half;
        prop_assume!(m < ell);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = random_regular_graph(ell, m, &mut rng).unwrap();
        let mut deg = vec![0usize; ell];
        let mut seen = HashSet::new();
        for &(u, v) in &edges {
            prop_assert!(u < v);
            prop_assert!(seen.insert((u, v)));
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        prop_assert!(deg.iter().all(|&d| d == m));
    }
}

#[test]
fn re_degree_audit() {
    let params = ReParams {
        ell: 100,
        m: 4,
        p_extra: 0.0,
        layout_iterations: 200,
        grid_scale: 1000.0,
    };
    let inst = gen_re(&params, 5).unwrap();
    assert_eq!(inst.points().len(), 100);
    assert_eq!(inst.len(), 200);
    let mut deg = vec![0; 100];
    for &(u, v) in inst.edges() {
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    }
    assert!(deg.iter().all(|&d| d == 4));
    assert_eq!(bytes(&inst), bytes(&gen_re(&params, 5).unwrap()));

    let extra = gen_re(&ReParams { p_extra: 0.01, ..params }, 5).unwrap();
    assert!(extra.len() > 200);
}

#[test]
fn re_small_cases() {
    let mk = |ell, m| ReParams {
        ell,
        m,
        p_extra: 0.0,
        layout_iterations: 100,
        grid_scale: 100.0,
    };
    assert_eq!(gen_re(&mk(4, 2), 1).unwrap().len(), 4);
    assert_eq!(gen_re(&mk(3, 2), 1).unwrap().len(), 3);
    assert!(gen_re(&mk(5, 3), 1).is_err());
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[test]
fn stress_layout_shapes() {
    let tri = stress_layout(3, &[(0, 1), (1, 2), (0, 2)], 500, 0).unwrap();
    let d = [dist(tri[0], tri[1]), dist(tri[1], tri[2]), dist(tri[0], tri[2])];
    for x in d {
        assert!((x / d[0] - 1.0).abs() < 0.05);
    }
    let p2 = stress_layout(2, &[(0, 1)], 500, 0).unwrap();
    assert!((dist(p2[0], p2[1]) - 1.0).abs() < 0.05);
    let c4 = stress_layout(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], 2000, 0).unwrap();
    let side = (0..4).map(|i| dist(c4[i], c4[(i + 1) % 4])).sum::<f64>() / 4.0;
    let diag = (dist(c4[0], c4[2]) + dist(c4[1], c4[3])) / 2.0;
    assert!((diag / side / 2f64.sqrt() - 1.0).abs() < 0.10);
    assert!(stress_layout(4, &[(0, 1), (2, 3)], 10, 0).is_err());
}

fn l_polygon() -> Vec<[i64; 2]> {
    vec![[0, 0], [600, 0], [600, 200], [200, 200], [200, 600], [0, 600]]
}

#[test]
fn visp_matches_visibility_oracle() {
    let params = VispParams {
        polygon: l_polygon(),
        m: 40,
        min_segments: 0,
        max_segments: usize::MAX,
        max_retries: 50,
    };
    let (inst, report) = gen_visp(&params, 8).unwrap();
    assert!(report.accepted);
    let poly = Polygon::new(l_polygon().into_iter().map(|[x, y]| pt(x, y)).collect()).unwrap();
    let pts = inst.points();
    assert_eq!(pts.len(), 40);
    let have: HashSet<(u32, u32)> = inst.edges().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let want = oracle_visible(pts[i], pts[j], &poly);
            assert_eq!(have.contains(&(i as u32, j as u32)), want, "{:?} {:?}", pts[i], pts[j]);
        }
    }
}

#[test]
fn visp_convex_is_complete() {
    let params = VispParams {
        polygon: vec![[0, 0], [100, 0], [100, 100], [0, 100]],
        m: 15,
        min_segments: 0,
        max_segments: usize::MAX,
        max_retries: 5,
    };
    let (inst, _) = gen_visp(&params, 2).unwrap();
    assert_eq!(inst.len(), 15 * 14 / 2);
}

#[test]
fn visp_retries_exhaust() {
    let params = VispParams {
        polygon: vec![[0, 0], [100, 0], [100, 100], [0, 100]],
        m: 10,
        min_segments: 1000,
        max_segments: 2000,
        max_retries: 3,
    };
    assert!(gen_visp(&params, 2).is_err());
}

#[test]
fn ecn_right_angle() {
    let inst = Instance::from_segments(
        "l",
        &[common::seg((0, 0), (1, 0)), common::seg((0, 0), (0, 1))],
        None,
    )
    .unwrap();
    let out = apply_ecn(&inst, Ratio::default()).unwrap();
    assert!(oracle_conflict(endpoints(&out, 0), endpoints(&out, 1)));
}

#[test]
fn ecn_single_segment() {
    let inst = Instance::from_segments("s", &[common::seg((0, 0), (100, 0))], None).unwrap();
    let eps = Ratio::new(1, 10).unwrap();
    let out = apply_ecn(&inst, eps).unwrap();
    let s = out.segment(0);
    let (lo, hi) = (s.a().x.min(s.b().x), s.a().x.max(s.b().x));
    assert_eq!(hi - lo, 110 * 1024);
    assert_eq!(lo + hi, 100 * 1024);
}

#[test]
fn ecn_audit_on_corpus() {
    for seed in 0..20 {
        let inst = gen_sqrp(&sqrp(40, 0.0, 40.0, 0.5), seed).unwrap();
        let out = apply_ecn(&inst, Ratio::default()).unwrap();
        assert_eq!(out.len(), inst.len());
        for (u, v) in endpoint_sharing_pairs(&inst) {
            assert!(oracle_conflict(endpoints(&out, u), endpoints(&out, v)));
        }
    }
}

#[test]
fn noise_behaviour() {
    let base = gen_sqrp(&sqrp(30, 0.0, 20.0, 1.0), 1).unwrap();
    assert_eq!(bytes(&apply_noise(&base, 0, 3).unwrap()), bytes(&base));
    let a = apply_noise(&base, 10, 3).unwrap();
    assert_eq!(bytes(&a), bytes(&apply_noise(&base, 10, 3).unwrap()));
    assert_eq!(a.len(), base.len() + 10);
    let set: HashSet<(u32, u32)> = a.edges().iter().map(|&(x, y)| (x.min(y), x.max(y))).collect();
    assert_eq!(set.len(), a.len());

    let two = Instance::new("two", vec![pt(0, 0), pt(5, 5)], vec![], None).unwrap();
    assert_eq!(apply_noise(&two, 1, 0).unwrap().len(), 1);
    assert!(apply_noise(&two, 2, 0).is_err());
}

#[test]
fn generate_composes_names_and_is_deterministic() {
    let mut cfg = GeneratorConfig::new(Family::Sqrp(sqrp(40, 0.0, 50.0, 0.5)), 9);
    assert_eq!(cfg.name(), "sqrp");
    cfg.ecn = Some(Ratio::default());
    cfg.noise = Some(4);
    assert_eq!(cfg.name(), "rsqrpecn");
    let (a, _) = generate(&cfg).unwrap();
    let (b, _) = generate(&cfg).unwrap();
    assert_eq!(bytes(&a), bytes(&b));
    assert!(a.id().starts_with("rsqrpecn"));

    let json = serde_json::to_string(&cfg).unwrap();
    let back: GeneratorConfig = serde_json::from_str(&json).unwrap();
    assert_eq!(back, cfg);
}
