//! Deciding whether a set of segments is k-coverable, k = 1..4.
//!
//! Every positive answer carries a witness that has been checked with
//! [`verify_covering`].

use thiserror::Error;

use crate::geom_core::{
    apply_all, bounding_box, clip_segment_to_square, verify_covering, Covering, Rect, Segment, Sym, Transform,
    UnitSquare, EPS_GEOM,
};
use crate::pwl::{combine_all, compose_partial, threshold_extreme, Axis, Closure, Pwl};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("bounding box extent along the thin axis exceeds 1")]
    NotThin,
    #[error("four-square profile needs a bounding box wider and taller than 1")]
    TooSmall,
    #[error("k must be between 1 and 4")]
    BadK,
}

/// Parts of `segs` outside `sq`. Clipped fragments shorter than `eps` are
/// dropped.
pub fn uncovered_by(segs: &[Segment], sq: UnitSquare, eps: f64) -> Vec<Segment> {
    let mut out = Vec::with_capacity(segs.len());
    for s in segs {
        let c = clip_segment_to_square(*s, sq, eps);
        if c.covered.is_none() {
            out.push(*s);
            continue;
        }
        out.extend(c.uncovered.into_iter().filter(|u| u.len() >= eps));
    }
    out
}

fn fits_one(r: &Rect, eps: f64) -> bool {
    r.width() <= 1.0 + eps && r.height() <= 1.0 + eps
}

fn certified(segs: &[Segment], cov: Covering, eps: f64) -> Option<Covering> {
    verify_covering(segs, &cov, eps).then_some(cov)
}

fn corners(b: &Rect) -> [UnitSquare; 4] {
    [
        UnitSquare::new(b.x_min, b.y_max),
        UnitSquare::new(b.x_max - 1.0, b.y_max),
        UnitSquare::new(b.x_min, b.y_min + 1.0),
        UnitSquare::new(b.x_max - 1.0, b.y_min + 1.0),
    ]
}

pub fn coverable_1(segs: &[Segment]) -> Option<Covering> {
    coverable_1_eps(segs, EPS_GEOM)
}

pub fn coverable_1_eps(segs: &[Segment], eps: f64) -> Option<Covering> {
    let Ok(b) = bounding_box(segs) else {
        return Some(Covering::empty());
    };
    if !fits_one(&b, eps) {
        return None;
    }
    certified(segs, Covering::new(vec![UnitSquare::from_top_left(b.top_left())]), eps)
}

/// Greedy covering of a set whose extent along `thin` is at most 1, using at
/// most `budget` squares. `thin == Axis::X` means a vertical strip.
pub fn coverable_1d(segs: &[Segment], thin: Axis, budget: usize) -> Result<Option<Covering>, CoverError> {
    coverable_1d_eps(segs, thin, budget, EPS_GEOM)
}

pub fn coverable_1d_eps(
    segs: &[Segment],
    thin: Axis,
    budget: usize,
    eps: f64,
) -> Result<Option<Covering>, CoverError> {
    let Ok(b) = bounding_box(segs) else {
        return Ok(Some(Covering::empty()));
    };
    let along = match thin {
        Axis::X => Axis::Y,
        Axis::Y => Axis::X,
    };
    let (ext_lo, ext_hi) = match thin {
        Axis::X => (b.x_min, b.x_max),
        Axis::Y => (b.y_min, b.y_max),
    };
    if ext_hi - ext_lo > 1.0 + eps {
        return Err(CoverError::NotThin);
    }
    let top = match along {
        Axis::Y => b.y_max,
        Axis::X => b.x_max,
    };
    let mut ivs: Vec<(f64, f64)> = segs
        .iter()
        .map(|s| {
            let (a, c) = (along.of(s.a), along.of(s.b));
            (a.min(c), a.max(c))
        })
        .collect();
    ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut covered_to = f64::NEG_INFINITY;
    let mut fars: Vec<f64> = Vec::new();
    for (lo, hi) in ivs {
        while hi > covered_to + eps {
            let start = if lo > covered_to { lo } else { covered_to };
            let far = (start + 1.0).min(top);
            fars.push(far);
            if fars.len() > budget {
                return Ok(None);
            }
            covered_to = far;
        }
    }
    let squares = fars
        .into_iter()
        .map(|far| match thin {
            Axis::X => UnitSquare::new(b.x_min, far),
            Axis::Y => UnitSquare::new(far - 1.0, b.y_max),
        })
        .collect();
    Ok(certified(segs, Covering::new(squares), eps))
}

fn thin_axis(b: &Rect, eps: f64) -> Option<Axis> {
    if b.width() <= 1.0 + eps {
        Some(Axis::X)
    } else if b.height() <= 1.0 + eps {
        Some(Axis::Y)
    } else {
        None
    }
}

pub fn coverable_2(segs: &[Segment]) -> Option<Covering> {
    coverable_2_eps(segs, EPS_GEOM)
}

pub fn coverable_2_eps(segs: &[Segment], eps: f64) -> Option<Covering> {
    let Ok(b) = bounding_box(segs) else {
        return Some(Covering::empty());
    };
    if fits_one(&b, eps) {
        return coverable_1_eps(segs, eps);
    }
    let [tl, tr, bl, br] = corners(&b);
    for pair in [[tl, br], [tr, bl]] {
        if let Some(c) = certified(segs, Covering::new(pair.to_vec()), eps) {
            return Some(c);
        }
    }
    None
}

pub fn coverable_3(segs: &[Segment]) -> Option<Covering> {
    coverable_3_eps(segs, EPS_GEOM)
}

pub fn coverable_3_eps(segs: &[Segment], eps: f64) -> Option<Covering> {
    corner_recursion(segs, 3, eps)
}

/// Places a square in each corner of the bounding box and recurses on the
/// rest with one square less.
fn corner_recursion(segs: &[Segment], k: usize, eps: f64) -> Option<Covering> {
    let Ok(b) = bounding_box(segs) else {
        return Some(Covering::empty());
    };
    if fits_one(&b, eps) {
        return coverable_1_eps(segs, eps);
    }
    if let Some(axis) = thin_axis(&b, eps) {
        return coverable_1d_eps(segs, axis, k, eps).ok().flatten();
    }
    for q in corners(&b) {
        let rest = uncovered_by(segs, q, eps);
        let sub = match k {
            3 => coverable_2_eps(&rest, eps),
            _ => coverable_3_eps(&rest, eps),
        };
        if let Some(sub) = sub {
            let mut squares = vec![q];
            squares.extend(sub.squares);
            if let Some(c) = certified(segs, Covering::new(squares), eps) {
                return Some(c);
            }
        }
    }
    None
}

pub fn coverable_4(segs: &[Segment]) -> Option<Covering> {
    coverable_4_eps(segs, EPS_GEOM)
}

pub fn coverable_4_eps(segs: &[Segment], eps: f64) -> Option<Covering> {
    if let Some(c) = corner_recursion(segs, 4, eps) {
        return Some(c);
    }
    let b = bounding_box(segs).ok()?;
    if thin_axis(&b, eps).is_some() {
        return None;
    }
    for sym in CASE_II_SYMS {
        let moved = apply_all(segs, sym);
        if let Some(c) = ltbr_search(&moved, eps) {
            let back = c.apply(sym.inverse());
            if let Some(c) = certified(segs, back, eps) {
                return Some(c);
            }
        }
    }
    None
}

/// Identity, vertical mirror (order L,B,T,R), transpose, transpose+mirror.
const CASE_II_SYMS: [Sym; 4] = [
    Sym::IDENTITY,
    Sym { swap: false, neg_x: false, neg_y: true },
    Sym { swap: true, neg_x: false, neg_y: false },
    Sym { swap: true, neg_x: false, neg_y: true },
];

pub fn coverable_k(segs: &[Segment], k: usize) -> Result<Option<Covering>, CoverError> {
    coverable_k_eps(segs, k, EPS_GEOM)
}

pub fn coverable_k_eps(segs: &[Segment], k: usize, eps: f64) -> Result<Option<Covering>, CoverError> {
    Ok(match k {
        1 => coverable_1_eps(segs, eps),
        2 => coverable_2_eps(segs, eps),
        3 => coverable_3_eps(segs, eps),
        4 => coverable_4_eps(segs, eps),
        _ => return Err(CoverError::BadK),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// Left to right: L, T, B, R.
    Ltbr,
    /// Left to right: L, B, T, R.
    Lbtr,
}

/// The six placement functions of the one-square-per-side case, as
/// functions of the height `y_L` of the top side of the left square.
#[derive(Debug, Clone)]
pub struct FourCoverProfile {
    pub order: Order,
    pub x_t: Pwl,
    pub x_b: Pwl,
    pub x_r1: Pwl,
    pub x_r2: Pwl,
    pub y_r1: Pwl,
    pub y_r2: Pwl,
    pub y_l_domain: (f64, f64),
}

impl FourCoverProfile {
    /// Largest of the two spans of the rest minus 1; `None` when nothing is
    /// left for R.
    pub fn slack(&self, y_l: f64) -> Option<f64> {
        let x1 = self.x_r1.eval(y_l)?;
        let x2 = self.x_r2.eval(y_l)?;
        let y1 = self.y_r1.eval(y_l)?;
        let y2 = self.y_r2.eval(y_l)?;
        Some((x2 - x1).max(y1 - y2) - 1.0)
    }
}

pub fn four_cover_profile(segs: &[Segment], order: Order) -> Result<FourCoverProfile, CoverError> {
    let b = bounding_box(segs).map_err(|_| CoverError::TooSmall)?;
    if b.width() <= 1.0 || b.height() <= 1.0 {
        return Err(CoverError::TooSmall);
    }
    match order {
        Order::Ltbr => Ok(ltbr_profile(segs, &b)),
        Order::Lbtr => {
            let flip = Sym { swap: false, neg_x: false, neg_y: true };
            let moved = apply_all(segs, flip);
            let mb = bounding_box(&moved).expect("non-empty");
            let p = ltbr_profile(&moved, &mb);
            let back = |f: &Pwl| f.reflect_domain().shift_domain(1.0);
            Ok(FourCoverProfile {
                order,
                x_t: back(&p.x_b),
                x_b: back(&p.x_t),
                x_r1: back(&p.x_r1),
                x_r2: back(&p.x_r2),
                y_r1: back(&p.y_r2.neg()),
                y_r2: back(&p.y_r1.neg()),
                y_l_domain: (b.y_min + 1.0, b.y_max),
            })
        }
    }
}

fn clip_rect(segs: &[Segment], r: &Rect) -> Vec<Segment> {
    segs.iter().filter_map(|s| s.clip_params(r).map(|(a, c)| s.sub(a, c))).collect()
}

fn extreme_const(segs: &[Segment], v: Axis, maximize: bool) -> Option<f64> {
    segs.iter()
        .flat_map(|s| [v.of(s.a), v.of(s.b)])
        .reduce(if maximize { f64::max } else { f64::min })
}

fn const_fn(v: Option<f64>, c: Closure) -> Pwl {
    match v {
        Some(v) => Pwl::constant(f64::NEG_INFINITY, f64::INFINITY, v, c),
        None => Pwl::empty(c),
    }
}

fn ltbr_profile(segs: &[Segment], b: &Rect) -> FourCoverProfile {
    let inf = f64::INFINITY;
    let (x0, y0, y1) = (b.x_min, b.y_min, b.y_max);
    let (d0, d1) = (y0 + 1.0, y1);
    let ext = |s: &[Segment], t: Axis, ge: bool, v: Axis, max: bool| threshold_extreme(s, t, ge, v, max);

    let su = ext(segs, Axis::Y, true, Axis::X, false);
    let sd1 = ext(segs, Axis::Y, false, Axis::X, false).shift_domain(1.0);
    let right_of_l = clip_rect(segs, &Rect::new(x0 + 1.0, inf, -inf, inf));
    let c1 = const_fn(extreme_const(&right_of_l, Axis::X, false), Closure::Min);
    let x_t = combine_all(vec![su, sd1.clone(), c1], Closure::Min).restrict(d0, d1);

    let below_t = clip_rect(segs, &Rect::new(-inf, inf, -inf, y1 - 1.0));
    let a2 = ext(&below_t, Axis::Y, true, Axis::X, false);
    let below_t_right = clip_rect(&below_t, &Rect::new(x0 + 1.0, inf, -inf, inf));
    let c2 = const_fn(extreme_const(&below_t_right, Axis::X, false), Closure::Min);
    let right_of = |s: &[Segment], v: Axis, max: bool| ext(s, Axis::X, true, v, max);
    let f4 = compose_partial(&right_of(segs, Axis::X, false), &x_t.add_const(1.0));
    let x_b = combine_all(vec![sd1, a2, c2, f4], Closure::Min).restrict(d0, d1);

    let above_b = clip_rect(segs, &Rect::new(-inf, inf, y0 + 1.0, inf));
    let band = clip_rect(segs, &Rect::new(-inf, inf, y0 + 1.0, y1 - 1.0));
    let band_right = clip_rect(&band, &Rect::new(x0 + 1.0, inf, -inf, inf));
    let r_fn = |v: Axis, max: bool| {
        let op = if max { Closure::Max } else { Closure::Min };
        let p1 = compose_partial(&right_of(segs, v, max), &x_b.add_const(1.0));
        let p2 = compose_partial(&right_of(&above_b, v, max), &x_t.add_const(1.0));
        let p4 = const_fn(extreme_const(&band_right, v, max), op);
        let p5 = ext(&band, Axis::Y, true, v, max);
        let p6 = ext(&band, Axis::Y, false, v, max).shift_domain(1.0);
        combine_all(vec![p1, p2, p4, p5, p6], op).restrict(d0, d1)
    };
    FourCoverProfile {
        order: Order::Ltbr,
        x_r1: r_fn(Axis::X, false),
        x_r2: r_fn(Axis::X, true),
        y_r1: r_fn(Axis::Y, true),
        y_r2: r_fn(Axis::Y, false),
        x_t,
        x_b,
        y_l_domain: (d0, d1),
    }
}

/// Places L with top `y_l`, then T, B and R greedily, clipping as it goes.
/// Returns the squares placed before nothing was left, or `None` when the
/// rest after three squares does not fit in one.
pub fn place_ltbr(segs: &[Segment], b: &Rect, y_l: f64, eps: f64) -> Option<Covering> {
    let l = UnitSquare::new(b.x_min, y_l);
    let mut squares = vec![l];
    let rest = uncovered_by(segs, l, eps);
    let Some(x_t) = extreme_const(&rest, Axis::X, false) else {
        return Some(Covering::new(squares));
    };
    let t = UnitSquare::new(x_t, b.y_max);
    squares.push(t);
    let rest = uncovered_by(&rest, t, eps);
    let Some(x_b) = extreme_const(&rest, Axis::X, false) else {
        return Some(Covering::new(squares));
    };
    let bq = UnitSquare::new(x_b, b.y_min + 1.0);
    squares.push(bq);
    let rest = uncovered_by(&rest, bq, eps);
    let Ok(rb) = bounding_box(&rest) else {
        return Some(Covering::new(squares));
    };
    if !fits_one(&rb, eps) {
        return None;
    }
    squares.push(UnitSquare::from_top_left(rb.top_left()));
    Some(Covering::new(squares))
}

/// y_L values worth trying: breakpoints, and for each stretch between
/// breakpoints a point inside the part where both spans are at most 1.
fn candidate_heights(p: &FourCoverProfile) -> Vec<f64> {
    let (d0, d1) = p.y_l_domain;
    let fs = [&p.x_r1, &p.x_r2, &p.y_r1, &p.y_r2, &p.x_t, &p.x_b];
    let mut bs: Vec<f64> = fs.iter().flat_map(|f| f.breakpoints()).filter(|t| *t >= d0 && *t <= d1).collect();
    bs.push(d0);
    bs.push(d1);
    bs.sort_by(f64::total_cmp);
    bs.dedup();
    let mut inner = Vec::new();
    for w in bs.windows(2) {
        let (a, c) = (w[0], w[1]);
        let right = |f: &Pwl| f.limits(a).1;
        let left = |f: &Pwl| f.limits(c).0;
        let vals = (
            right(&p.x_r1), right(&p.x_r2), right(&p.y_r1), right(&p.y_r2),
            left(&p.x_r1), left(&p.x_r2), left(&p.y_r1), left(&p.y_r2),
        );
        let (Some(x1a), Some(x2a), Some(y1a), Some(y2a), Some(x1c), Some(x2c), Some(y1c), Some(y2c)) = vals else {
            inner.push(0.5 * (a + c));
            continue;
        };
        let mut lo = a;
        let mut hi = c;
        for (sa, sc) in [(x2a - x1a, x2c - x1c), (y1a - y2a, y1c - y2c)] {
            // sublevel set {t : s(t) <= 1} of a linear function on [a, c]
            if sa <= 1.0 && sc <= 1.0 {
                continue;
            }
            if sa > 1.0 && sc > 1.0 {
                lo = f64::INFINITY;
                break;
            }
            let tc = a + (c - a) * (1.0 - sa) / (sc - sa);
            if sa <= 1.0 {
                hi = hi.min(tc);
            } else {
                lo = lo.max(tc);
            }
        }
        if lo <= hi {
            inner.push(0.5 * (lo + hi));
            inner.push(lo);
            inner.push(hi);
        }
    }
    inner.extend(bs);
    inner
}

fn ltbr_search(segs: &[Segment], eps: f64) -> Option<Covering> {
    let b = bounding_box(segs).ok()?;
    if b.width() <= 1.0 || b.height() <= 1.0 {
        return None;
    }
    let prof = ltbr_profile(segs, &b);
    let mut cands: Vec<(f64, f64)> = candidate_heights(&prof)
        .into_iter()
        .map(|y| (prof.slack(y).unwrap_or(f64::NEG_INFINITY), y))
        .filter(|(s, _)| *s <= 1e-7)
        .collect();
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    for (_, y) in cands {
        if let Some(c) = place_ltbr(segs, &b, y, eps) {
            if verify_covering(segs, &c, eps) {
                return Some(c);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom_core::Point;

    fn pt(x: f64, y: f64) -> Segment {
        Segment::point(Point::new(x, y))
    }

    #[test]
    fn one_square_examples() {
        assert!(coverable_1(&[Segment::from_coords(0.0, 0.0, 0.5, 0.5)]).is_some());
        assert!(coverable_1(&[Segment::from_coords(0.0, 0.0, 1.5, 0.0)]).is_none());
        assert_eq!(coverable_1(&[]), Some(Covering::empty()));
    }

    #[test]
    fn one_d_greedy_example() {
        let segs = [Segment::from_coords(0.2, 0.0, 0.2, 1.5), Segment::from_coords(0.7, 1.4, 0.9, 2.5)];
        let c = coverable_1d(&segs, Axis::X, 3).unwrap().unwrap();
        let tops: Vec<f64> = c.squares.iter().map(|s| s.top_left.y).collect();
        assert_eq!(tops, vec![1.0, 2.0, 2.5]);
        assert!(coverable_1d(&segs, Axis::X, 2).unwrap().is_none());
        assert_eq!(coverable_1d(&[Segment::from_coords(0.0, 0.0, 0.5, 0.9)], Axis::X, 3).unwrap().unwrap().len(), 1);
        assert_eq!(coverable_1d(&[], Axis::X, 3).unwrap().unwrap().len(), 0);
        assert_eq!(coverable_1d(&[Segment::from_coords(0.0, 0.0, 2.0, 0.0)], Axis::X, 3), Err(CoverError::NotThin));
    }

    #[test]
    fn two_square_examples() {
        let c = coverable_2(&[Segment::from_coords(0.0, 0.0, 2.0, 0.0)]).unwrap();
        assert_eq!(c.squares, vec![UnitSquare::new(0.0, 0.0), UnitSquare::new(1.0, 1.0)]);
        assert!(coverable_2(&[pt(0.0, 0.0), pt(1.5, 1.5), pt(3.0, 3.0)]).is_none());
    }

    #[test]
    fn pigeonhole_examples() {
        let four = [pt(0.0, 0.0), pt(1.5, 1.5), pt(3.0, 3.0), pt(4.5, 4.5)];
        assert!(coverable_3(&four).is_none());
        assert!(coverable_4(&four).is_some());
        let five = [pt(0.0, 0.0), pt(1.5, 1.5), pt(3.0, 3.0), pt(4.5, 4.5), pt(6.0, 6.0)];
        assert!(coverable_4(&five).is_none());
    }

    #[test]
    fn one_per_side_needs_case_two() {
        // A plus-shaped arrangement: no square of any covering sits in a
        // corner of the bounding box.
        let segs = vec![
            Segment::from_coords(0.0, 1.2, 0.9, 1.8),
            Segment::from_coords(1.1, 3.0, 1.9, 2.2),
            Segment::from_coords(1.6, 0.0, 2.5, 0.9),
            Segment::from_coords(3.0, 1.0, 2.2, 1.9),
        ];
        assert!(coverable_3(&segs).is_none());
        let c = coverable_4(&segs).unwrap();
        assert!(verify_covering(&segs, &c, EPS_GEOM));
        assert!(corner_recursion(&segs, 4, EPS_GEOM).is_none());
    }
}
