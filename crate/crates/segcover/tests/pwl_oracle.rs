mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segcover::pwl::*;
use segcover::{Dir, Segment};
use common::*;






#[test]
fn skyline_matches_scan_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(1..=30);
        let segs = rand_segs(&mut rng, n);
        let sky = skyline_of(&segs, Dir::Up);
        for _ in 0..1000 {
            let l = rng.gen_range(-1.0..8.0);
            assert!(agree(sky.f.eval(l), scan_skyline(&segs, l), 1e-9), "l={l}");
        }
        // Breakpoints are where the sampling is most likely to go wrong.
        for l in sky.f.breakpoints() {
            assert!(agree(sky.f.eval(l), scan_skyline(&segs, l), 1e-9), "bp l={l}");
        }
        assert!(sky.f.len() <= 64 * n);
    }
}

#[test]
fn directional_skyline_is_skyline_of_transformed_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let segs = rand_segs(&mut rng, 15);
        for d in Dir::ALL {
            let sky = skyline_of(&segs, d);
            let moved: Vec<Segment> = segs.iter().map(|s| segcover::geom_core::transform_cardinal(s, d)).collect();
            for _ in 0..200 {
                let l = rng.gen_range(-8.0..8.0);
                assert!(agree(sky.f.eval(l), scan_skyline(&moved, l), 1e-9));
            }
        }
    }
}

#[test]
fn envelope_matches_scan_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let n = rng.gen_range(1..=20);
        let segs = rand_segs(&mut rng, n);
        let env = upper_envelope(&segs);
        for _ in 0..1000 {
            let x = rng.gen_range(-1.0..8.0);
            assert!(agree(env.eval(x), scan_envelope(&segs, x), 1e-9), "x={x}");
        }
        for x in env.breakpoints() {
            assert!(agree(env.eval(x), scan_envelope(&segs, x), 1e-9), "bp x={x}");
        }
        assert!(env.len() <= 64 * n);
    }
}

fn rand_pwl(rng: &mut ChaCha8Rng, k: usize, closure: Closure, monotone: bool) -> Pwl {
    let mut t = rng.gen_range(-5.0..0.0);
    let mut v: f64 = rng.gen_range(-5.0..5.0);
    let mut pieces = Vec::new();
    for _ in 0..k {
        let t1 = t + rng.gen_range(0.01..0.5);
        let v1 = if monotone { v + rng.gen_range(0.0..0.5) } else { rng.gen_range(-5.0..5.0) };
        if monotone || rng.gen_bool(0.85) {
            pieces.push(Piece::new(t, t1, v, v1));
        }
        t = t1;
        v = if monotone { v1 } else if rng.gen_bool(0.7) { v1 } else { rng.gen_range(-5.0..5.0) };
    }
    Pwl::from_pieces(pieces, closure)
}

/// Direct evaluation of the pointwise extreme, from the pieces themselves.
fn naive_eval(f: &Pwl, t: f64, c: Closure) -> Option<f64> {
    f.pieces()
        .iter()
        .filter(|p| p.t0 <= t && t <= p.t1)
        .map(|p| if p.t0 == p.t1 { p.v0 } else { p.v0 + (p.v1 - p.v0) * (t - p.t0) / (p.t1 - p.t0) })
        .reduce(|a, b| match c {
            Closure::Min => a.min(b),
            Closure::Max => a.max(b),
        })
}

#[test]
fn min_max_match_pointwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..50 {
        let f = rand_pwl(&mut rng, 50, Closure::Min, false);
        let g = rand_pwl(&mut rng, 50, Closure::Min, false);
        let m = pwl_min(&f, &g);
        let fm = f.clone().with_closure(Closure::Max);
        let gm = g.clone().with_closure(Closure::Max);
        let mx = pwl_max(&fm, &gm);
        for _ in 0..1000 {
            let t = rng.gen_range(-6.0..22.0);
            let want = match (naive_eval(&f, t, Closure::Min), naive_eval(&g, t, Closure::Min)) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, None) => a,
                (None, b) => b,
            };
            assert!(agree(m.eval(t), want, 1e-9), "min t={t}");
            let want = match (naive_eval(&f, t, Closure::Max), naive_eval(&g, t, Closure::Max)) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, None) => a,
                (None, b) => b,
            };
            assert!(agree(mx.eval(t), want, 1e-9), "max t={t}");
        }
    }
}

#[test]
fn compose_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let f = rand_pwl(&mut rng, 40, Closure::Min, true);
        let (lo, hi) = f.domain().unwrap();
        // Monotone g with range inside f's domain.
        let mut pieces = Vec::new();
        let mut t = 0.0;
        let mut v = lo + (hi - lo) * 0.05;
        for _ in 0..30 {
            let t1 = t + rng.gen_range(0.05..0.3);
            let v1 = (v + rng.gen_range(0.0..0.4)).min(hi);
            pieces.push(Piece::new(t, t1, v, v1));
            t = t1;
            v = v1;
        }
        let g = Pwl::from_pieces(pieces, Closure::Min);
        let h = pwl_compose(&f, &g).unwrap();
        let (a, b) = g.domain().unwrap();
        for _ in 0..1000 {
            let x = rng.gen_range(a..b);
            let want = g.eval(x).and_then(|u| f.eval(u));
            assert!(agree(h.eval(x), want, 1e-12), "x={x}");
        }
        assert!(h.len() <= 2 * (f.len() + g.len()) + 2);
    }
}

proptest! {
    #[test]
    fn merged_skyline_is_monotone(coords in prop::collection::vec((0.0f64..4.0, 0.0f64..4.0, 0.0f64..4.0, 0.0f64..4.0), 1..25)) {
        let segs: Vec<Segment> = coords.iter().map(|&(a, b, c, d)| Segment::from_coords(a, b, c, d)).collect();
        let sky = skyline_of(&segs, Dir::Up).f;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..400 {
            let l = -0.5 + i as f64 * 0.0125;
            if let Some(v) = sky.eval(l) {
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
    }

    #[test]
    fn envelope_dominates_and_touches(coords in prop::collection::vec((0.0f64..4.0, 0.0f64..4.0, 0.0f64..4.0, 0.0f64..4.0), 1..25), s in 0.0f64..1.0) {
        let segs: Vec<Segment> = coords.iter().map(|&(a, b, c, d)| Segment::from_coords(a, b, c, d)).collect();
        let env = upper_envelope(&segs);
        for seg in &segs {
            let p = seg.at(s);
            let v = env.eval(p.x).unwrap();
            prop_assert!(v >= p.y - 1e-9);
        }
        for x in env.breakpoints() {
            prop_assert!(agree(env.eval(x), scan_envelope(&segs, x), 1e-9));
        }
    }

    #[test]
    fn min_max_duality(seed in 0u64..10_000, t in -6.0f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = rand_pwl(&mut rng, 10, Closure::Min, false);
        let g = rand_pwl(&mut rng, 10, Closure::Min, false);
        let a = pwl_min(&f, &g).eval(t);
        let b = pwl_max(&f.neg(), &g.neg()).eval(t).map(|v| -v);
        prop_assert!(agree(a, b, 1e-12));
    }
}
