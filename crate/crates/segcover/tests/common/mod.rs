#![allow(dead_code)]
//! Brute-force scans shared by the integration tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use segcover::cover_decision::{coverable_k_eps, Order};
use segcover::geom_core::clip_segment_to_square;
use segcover::traj_index::{TrajPos, Trajectory};
use segcover::{bounding_box, Dir, Point, Rect, Segment, UnitSquare};

pub fn rand_segs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Segment> {
    (0..n)
        .map(|_| {
            let a = Point::new(rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0));
            match rng.gen_range(0..6) {
                0 => Segment::new(a, Point::new(a.x, a.y + rng.gen_range(0.0..2.0))),
                1 => Segment::new(a, Point::new(a.x + rng.gen_range(0.0..2.0), a.y)),
                2 => Segment::point(a),
                _ => Segment::new(a, Point::new(rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0))),
            }
        })
        .collect()
}

/// Leftmost x over the part of `s` with y >= l.
pub fn leftmost_above(s: &Segment, l: f64) -> Option<f64> {
    let (lo, hi) = if s.a.y <= s.b.y { (s.a, s.b) } else { (s.b, s.a) };
    if hi.y < l {
        return None;
    }
    if lo.y >= l {
        return Some(lo.x.min(hi.x));
    }
    let t = (l - lo.y) / (hi.y - lo.y);
    let cut = lo.x + (hi.x - lo.x) * t;
    Some(cut.min(hi.x))
}

pub fn scan_skyline(segs: &[Segment], l: f64) -> Option<f64> {
    segs.iter().filter_map(|s| leftmost_above(s, l)).reduce(f64::min)
}

pub fn scan_envelope(segs: &[Segment], x: f64) -> Option<f64> {
    segs.iter()
        .filter_map(|s| {
            let (l, r) = if s.a.x <= s.b.x { (s.a, s.b) } else { (s.b, s.a) };
            if x < l.x || x > r.x {
                None
            } else if l.x == r.x {
                Some(l.y.max(r.y))
            } else {
                Some(l.y + (r.y - l.y) * (x - l.x) / (r.x - l.x))
            }
        })
        .reduce(f64::max)
}

pub fn agree(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        _ => false,
    }
}

pub fn random_range(r: &mut ChaCha8Rng, t: &Trajectory) -> (TrajPos, TrajPos) {
    let m = t.n_edges() as f64;
    let pick = |r: &mut ChaCha8Rng| {
        if r.gen_bool(0.2) {
            t.vertex_pos(r.gen_range(0..t.n_vertices()))
        } else {
            t.pos_at_param(r.gen_range(0.0..m))
        }
    };
    let (a, b) = (pick(r), pick(r));
    if a <= b { (a, b) } else { (b, a) }
}

pub fn scan_line(segs: &[Segment], c: f64, dir: Dir) -> Option<Point> {
    let mut best: Option<Point> = None;
    for s in segs {
        let vertical = matches!(dir, Dir::Up | Dir::Down);
        let (u0, u1, w0, w1) = if vertical { (s.a.x, s.b.x, s.a.y, s.b.y) } else { (s.a.y, s.b.y, s.a.x, s.b.x) };
        let (lo, hi) = (u0.min(u1), u0.max(u1));
        if c < lo || c > hi {
            continue;
        }
        let ws: Vec<f64> = if u0 == u1 {
            vec![w0, w1]
        } else if c == u0 {
            vec![w0]
        } else if c == u1 {
            vec![w1]
        } else {
            vec![w0 + (w1 - w0) * (c - u0) / (u1 - u0)]
        };
        for w in ws {
            let p = if vertical { Point::new(c, w) } else { Point::new(w, c) };
            let better = match (best, dir) {
                (None, _) => true,
                (Some(b), Dir::Up) => p.y > b.y,
                (Some(b), Dir::Down) => p.y < b.y,
                (Some(b), Dir::Left) => p.x < b.x,
                (Some(b), Dir::Right) => p.x > b.x,
            };
            if better {
                best = Some(p);
            }
        }
    }
    best
}

pub fn scan_vertex(t: &Trajectory, a: TrajPos, b: TrajPos, rect: &Rect, dir: Dir) -> Option<Point> {
    let key = |p: Point| match dir {
        Dir::Up => p.y,
        Dir::Down => -p.y,
        Dir::Left => -p.x,
        Dir::Right => p.x,
    };
    t.vertex_range(a, b)
        .map(|i| t.vertices()[i])
        .filter(|p| rect.contains(*p, 0.0))
        .reduce(|x, y| if key(y) > key(x) { y } else { x })
}

pub fn close_pt(a: Option<Point>, b: Option<Point>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(p), Some(q)) => p.dist(q) <= 1e-9,
        _ => false,
    }
}

/// Short random range, so that a fair share of queries is coverable.
pub fn short_range(r: &mut ChaCha8Rng, t: &Trajectory, max_arc: f64) -> (TrajPos, TrajPos) {
    let s = r.gen_range(0.0..t.length());
    let a = if r.gen_bool(0.2) { t.vertex_pos(t.pos_at_arc(s).edge) } else { t.pos_at_arc(s) };
    let b = t.pos_at_arc(t.arc(a) + r.gen_range(0.0..max_arc));
    (a, b)
}

/// Offline answer, or `None` inside the tolerance band.
pub fn offline(t: &Trajectory, a: TrajPos, b: TrajPos, k: usize) -> Option<bool> {
    let segs = t.subsegments(a, b);
    let lo = coverable_k_eps(&segs, k, 1e-11).unwrap().is_some();
    let hi = coverable_k_eps(&segs, k, 1e-7).unwrap().is_some();
    (lo == hi).then_some(lo)
}

pub struct Direct {
    pub x_t: Option<f64>,
    pub x_b: Option<f64>,
    pub x_r1: Option<f64>,
    pub x_r2: Option<f64>,
    pub y_r1: Option<f64>,
    pub y_r2: Option<f64>,
}

pub fn clip_all(segs: &[Segment], q: UnitSquare) -> Vec<Segment> {
    let mut out = Vec::new();
    for s in segs {
        let c = clip_segment_to_square(*s, q, 1e-12);
        if c.covered.is_none() {
            out.push(*s);
        } else {
            out.extend(c.uncovered.into_iter().filter(|u| u.len() > 1e-12));
        }
    }
    out
}

pub fn min_x(s: &[Segment]) -> Option<f64> {
    s.iter().flat_map(|s| [s.a.x, s.b.x]).reduce(f64::min)
}

/// Places the squares one after another and measures the rest directly.
pub fn direct(segs: &[Segment], order: Order, y_l: f64) -> Direct {
    let b = bounding_box(segs).unwrap();
    let rest = clip_all(segs, UnitSquare::new(b.x_min, y_l));
    let x2 = min_x(&rest);
    let second = |x: f64| match order {
        Order::Ltbr => UnitSquare::new(x, b.y_max),
        Order::Lbtr => UnitSquare::new(x, b.y_min + 1.0),
    };
    let third = |x: f64| match order {
        Order::Ltbr => UnitSquare::new(x, b.y_min + 1.0),
        Order::Lbtr => UnitSquare::new(x, b.y_max),
    };
    let rest = x2.map(|x| clip_all(&rest, second(x))).unwrap_or_default();
    let x3 = min_x(&rest);
    let rest = x3.map(|x| clip_all(&rest, third(x))).unwrap_or_default();
    let xs = || rest.iter().flat_map(|s| [s.a.x, s.b.x]);
    let ys = || rest.iter().flat_map(|s| [s.a.y, s.b.y]);
    let (x_t, x_b) = match order {
        Order::Ltbr => (x2, x3),
        Order::Lbtr => (x3, x2),
    };
    Direct {
        x_t,
        x_b,
        x_r1: xs().reduce(f64::min),
        x_r2: xs().reduce(f64::max),
        y_r1: ys().reduce(f64::max),
        y_r2: ys().reduce(f64::min),
    }
}

pub fn close_opt(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= 1e-9,
        _ => false,
    }
}

