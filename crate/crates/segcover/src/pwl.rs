//! Piecewise-linear partial functions, skylines and upper envelopes.
//!
//! A [`Pwl`] is a sorted list of closed pieces. Pieces may be single points
//! (`t0 == t1`) and may leave gaps where the function is undefined. At a
//! shared breakpoint several pieces can apply; the function's [`Closure`]
//! picks the smallest or largest of them.

use std::cmp::Ordering;

use serde_json::{json, Value};
use thiserror::Error;

use crate::geom_core::{Dir, Point, Segment, Transform};

/// Relative tolerance used when merging collinear pieces and when deciding
/// whether a crossing is too close to an interval end to split at.
const TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PwlError {
    #[error("inner function is not monotone non-decreasing")]
    NotMonotone,
    #[error("range of inner function is outside the domain of the outer function")]
    RangeMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    Min,
    Max,
}

impl Closure {
    fn pick(self, a: f64, b: f64) -> f64 {
        match self {
            Closure::Min => a.min(b),
            Closure::Max => a.max(b),
        }
    }

    fn flip(self) -> Closure {
        match self {
            Closure::Min => Closure::Max,
            Closure::Max => Closure::Min,
        }
    }

    /// `a` is strictly better than `b` under this closure.
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Closure::Min => a < b,
            Closure::Max => a > b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub t0: f64,
    pub t1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Piece {
    pub fn new(t0: f64, t1: f64, v0: f64, v1: f64) -> Self {
        Piece { t0, t1, v0, v1 }
    }

    pub fn constant(t0: f64, t1: f64, v: f64) -> Self {
        Piece::new(t0, t1, v, v)
    }

    pub fn is_point(&self) -> bool {
        self.t0 == self.t1
    }

    /// Value of the piece's supporting line at `t` (extrapolates).
    pub fn at(&self, t: f64) -> f64 {
        if self.v0 == self.v1 || !self.t0.is_finite() || !self.t1.is_finite() || self.t0 == self.t1 {
            return self.v0;
        }
        if t == self.t0 {
            return self.v0;
        }
        if t == self.t1 {
            return self.v1;
        }
        self.v0 + (self.v1 - self.v0) * ((t - self.t0) / (self.t1 - self.t0))
    }

    pub fn slope(&self) -> f64 {
        if self.v0 == self.v1 || self.t0 == self.t1 {
            0.0
        } else {
            (self.v1 - self.v0) / (self.t1 - self.t0)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pwl {
    pieces: Vec<Piece>,
    closure: Closure,
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= TOL * a.abs().max(b.abs()).max(1.0)
}

fn mid(a: f64, b: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (false, true) => b - 1.0,
        (true, false) => a + 1.0,
        (false, false) => 0.0,
    }
}

impl Pwl {
    pub fn empty(closure: Closure) -> Self {
        Pwl { pieces: Vec::new(), closure }
    }

    /// Builds a function from pieces, sorting and canonicalizing them.
    pub fn from_pieces(mut pieces: Vec<Piece>, closure: Closure) -> Self {
        pieces.retain(|p| p.t0 <= p.t1 && !p.v0.is_nan() && !p.v1.is_nan());
        pieces.sort_by(|a, b| a.t0.total_cmp(&b.t0).then(a.t1.total_cmp(&b.t1)));
        let mut f = Pwl { pieces, closure };
        f.canonicalize();
        f
    }

    pub fn constant(t0: f64, t1: f64, v: f64, closure: Closure) -> Self {
        Pwl::from_pieces(vec![Piece::constant(t0, t1, v)], closure)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    /// Convex hull of the domain, `None` for the nowhere-defined function.
    pub fn domain(&self) -> Option<(f64, f64)> {
        let lo = self.pieces.first()?.t0;
        let hi = self.pieces.iter().map(|p| p.t1).fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi))
    }

    /// Sorted distinct finite breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.t0, p.t1])
            .filter(|t| t.is_finite())
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Index of the first piece whose right end is at or after `t`.
    fn first_reaching(&self, t: f64) -> usize {
        self.pieces.partition_point(|p| p.t1 < t)
    }

    pub fn eval(&self, t: f64) -> Option<f64> {
        let mut out: Option<f64> = None;
        for p in &self.pieces[self.first_reaching(t)..] {
            if p.t0 > t {
                break;
            }
            if p.t1 >= t {
                let v = p.at(t);
                out = Some(out.map_or(v, |o| self.closure.pick(o, v)));
            }
        }
        out
    }

    /// Left and right limits at `t` (`None` when undefined on that side).
    pub fn limits(&self, t: f64) -> (Option<f64>, Option<f64>) {
        let (mut l, mut r) = (None, None);
        for p in &self.pieces[self.first_reaching(t)..] {
            if p.t0 > t {
                break;
            }
            if p.is_point() {
                continue;
            }
            if p.t0 < t && p.t1 >= t {
                l = Some(p.at(t));
            }
            if p.t0 <= t && p.t1 > t {
                r = Some(p.at(t));
            }
        }
        (l, r)
    }

    /// The non-point piece covering the open interval around `t`, if any.
    fn piece_over(&self, t: f64) -> Option<&Piece> {
        self.pieces[self.first_reaching(t)..]
            .iter()
            .take_while(|p| p.t0 <= t)
            .find(|p| !p.is_point() && p.t0 <= t && p.t1 >= t)
    }

    pub fn neg(&self) -> Pwl {
        Pwl {
            pieces: self.pieces.iter().map(|p| Piece::new(p.t0, p.t1, -p.v0, -p.v1)).collect(),
            closure: self.closure.flip(),
        }
    }

    pub fn add_const(&self, c: f64) -> Pwl {
        Pwl {
            pieces: self.pieces.iter().map(|p| Piece::new(p.t0, p.t1, p.v0 + c, p.v1 + c)).collect(),
            closure: self.closure,
        }
    }

    /// `t -> f(t - d)`.
    pub fn shift_domain(&self, d: f64) -> Pwl {
        Pwl {
            pieces: self.pieces.iter().map(|p| Piece::new(p.t0 + d, p.t1 + d, p.v0, p.v1)).collect(),
            closure: self.closure,
        }
    }

    /// `t -> f(-t)`.
    pub fn reflect_domain(&self) -> Pwl {
        let mut pieces: Vec<Piece> =
            self.pieces.iter().rev().map(|p| Piece::new(-p.t1, -p.t0, p.v1, p.v0)).collect();
        pieces.sort_by(|a, b| a.t0.total_cmp(&b.t0).then(a.t1.total_cmp(&b.t1)));
        Pwl { pieces, closure: self.closure }
    }

    /// Restriction to `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Pwl {
        let pieces = self
            .pieces
            .iter()
            .filter(|p| p.t1 >= lo && p.t0 <= hi)
            .map(|p| {
                let a = p.t0.max(lo);
                let b = p.t1.min(hi);
                Piece::new(a, b, p.at(a), p.at(b))
            })
            .collect();
        Pwl::from_pieces(pieces, self.closure)
    }

    pub fn with_closure(mut self, c: Closure) -> Pwl {
        self.closure = c;
        self
    }

    fn canonicalize(&mut self) {
        let c = self.closure;
        let src = std::mem::take(&mut self.pieces);
        let (points, segs): (Vec<Piece>, Vec<Piece>) = src.into_iter().partition(|p| p.is_point());
        // Collapse point pieces per location and drop the ones the closure
        // already implies.
        let tmp = Pwl { pieces: segs.clone(), closure: c };
        let mut kept: Vec<Piece> = Vec::new();
        for p in points {
            if let Some(last) = kept.last_mut() {
                if last.t0 == p.t0 {
                    let v = c.pick(last.v0, p.v0);
                    *last = Piece::constant(p.t0, p.t0, v);
                    continue;
                }
            }
            kept.push(p);
        }
        kept.retain(|p| {
            let (l, r) = tmp.limits(p.t0);
            let implied = match (l, r) {
                (Some(a), Some(b)) => Some(c.pick(a, b)),
                (Some(a), None) | (None, Some(a)) => Some(a),
                (None, None) => None,
            };
            implied.map_or(true, |v| c.better(p.v0, v) && !close(p.v0, v))
        });
        let pts: Vec<f64> = kept.iter().map(|p| p.t0).collect();
        let mut merged: Vec<Piece> = Vec::with_capacity(segs.len());
        for p in segs {
            if let Some(last) = merged.last_mut() {
                let joint = last.t1 == p.t0;
                let continuous = close(last.v1, p.v0);
                let no_point = pts.binary_search_by(|x| x.total_cmp(&p.t0)).is_err();
                if joint && continuous && no_point {
                    let cand = Piece::new(last.t0, p.t1, last.v0, p.v1);
                    let collinear = if !cand.t0.is_finite() || !cand.t1.is_finite() {
                        last.v0 == last.v1 && p.v0 == p.v1 && close(last.v0, p.v0)
                    } else {
                        close(cand.at(last.t1), last.v1)
                    };
                    if collinear {
                        *last = cand;
                        continue;
                    }
                }
            }
            merged.push(p);
        }
        merged.extend(kept);
        merged.sort_by(|a, b| a.t0.total_cmp(&b.t0).then(a.t1.total_cmp(&b.t1)));
        self.pieces = merged;
    }

    pub fn to_json(&self) -> Value {
        let num = |x: f64| if x.is_finite() { json!(x) } else { Value::Null };
        json!({
            "closure": match self.closure { Closure::Min => "min", Closure::Max => "max" },
            "pieces": self.pieces.iter().map(|p| json!([num(p.t0), num(p.v0), num(p.t1), num(p.v1)])).collect::<Vec<_>>(),
        })
    }
}

/// Pointwise min or max of two functions; undefined acts as the identity.
pub fn combine(f: &Pwl, g: &Pwl, op: Closure) -> Pwl {
    if f.is_empty() {
        return g.clone().with_closure(op);
    }
    if g.is_empty() {
        return f.clone().with_closure(op);
    }
    let mut ts: Vec<f64> = f
        .pieces
        .iter()
        .chain(g.pieces.iter())
        .flat_map(|p| [p.t0, p.t1])
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut out: Vec<Piece> = Vec::with_capacity(ts.len() * 2);
    for w in ts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = mid(a, b);
        let fp = f.piece_over(m).filter(|p| p.t0 <= a && p.t1 >= b);
        let gp = g.piece_over(m).filter(|p| p.t0 <= a && p.t1 >= b);
        match (fp, gp) {
            (None, None) => {}
            (Some(p), None) | (None, Some(p)) => out.push(Piece::new(a, b, p.at(a), p.at(b))),
            (Some(p), Some(q)) => {
                let (pa, pb, qa, qb) = (p.at(a), p.at(b), q.at(a), q.at(b));
                let da = pa - qa;
                let db = pb - qb;
                let crosses = a.is_finite() && b.is_finite() && ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0));
                let tc = if crosses { a + (b - a) * (da / (da - db)) } else { f64::NAN };
                let eps = TOL * a.abs().max(b.abs()).max(1.0);
                if crosses && tc - a > eps && b - tc > eps {
                    let vc = p.at(tc);
                    out.push(Piece::new(a, tc, op.pick(pa, qa), vc));
                    out.push(Piece::new(tc, b, vc, op.pick(pb, qb)));
                } else {
                    let pm = p.at(m);
                    let qm = q.at(m);
                    let take_p = op.pick(pm, qm) == pm;
                    let s = if take_p { p } else { q };
                    out.push(Piece::new(a, b, s.at(a), s.at(b)));
                }
            }
        }
    }
    // Isolated values at breakpoints.
    for &t in ts.iter().filter(|t| t.is_finite()) {
        let vals = [f.eval_with(t, op), g.eval_with(t, op)];
        let v = match vals {
            [Some(x), Some(y)] => Some(op.pick(x, y)),
            [Some(x), None] | [None, Some(x)] => Some(x),
            [None, None] => None,
        };
        if let Some(v) = v {
            out.push(Piece::constant(t, t, v));
        }
    }
    Pwl::from_pieces(out, op)
}

impl Pwl {
    /// Evaluation using an explicit closure rule instead of the stored one.
    fn eval_with(&self, t: f64, c: Closure) -> Option<f64> {
        let mut out: Option<f64> = None;
        for p in &self.pieces[self.first_reaching(t)..] {
            if p.t0 > t {
                break;
            }
            if p.t1 >= t {
                let v = p.at(t);
                out = Some(out.map_or(v, |o| c.pick(o, v)));
            }
        }
        out
    }
}

pub fn pwl_min(f: &Pwl, g: &Pwl) -> Pwl {
    combine(f, g, Closure::Min)
}

pub fn pwl_max(f: &Pwl, g: &Pwl) -> Pwl {
    combine(f, g, Closure::Max)
}

/// Divide-and-conquer reduction of many functions.
pub fn combine_all(mut fs: Vec<Pwl>, op: Closure) -> Pwl {
    if fs.is_empty() {
        return Pwl::empty(op);
    }
    while fs.len() > 1 {
        let mut next = Vec::with_capacity(fs.len().div_ceil(2));
        let mut it = fs.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(combine(&a, &b, op)),
                None => next.push(a.with_closure(op)),
            }
        }
        fs = next;
    }
    fs.pop().unwrap().with_closure(op)
}

/// `x -> f(g(x))` for monotone non-decreasing `g` whose range lies in the
/// domain of `f`.
pub fn pwl_compose(f: &Pwl, g: &Pwl) -> Result<Pwl, PwlError> {
    let mut last = f64::NEG_INFINITY;
    for p in &g.pieces {
        if p.v1 < p.v0 || p.v0 < last {
            return Err(PwlError::NotMonotone);
        }
        last = p.v1;
    }
    if let (Some((lo, hi)), Some(_)) = (f.domain(), g.domain()) {
        if g.pieces.iter().any(|p| p.v0 < lo || p.v1 > hi) {
            return Err(PwlError::RangeMismatch);
        }
    } else if !g.is_empty() {
        return Err(PwlError::RangeMismatch);
    }
    Ok(compose_partial(f, g))
}

/// Composition without preconditions: each piece of `g` is treated
/// separately, and values of `g` where `f` is undefined give gaps.
pub fn compose_partial(f: &Pwl, g: &Pwl) -> Pwl {
    let fb = f.breakpoints();
    let mut out = Vec::new();
    for p in &g.pieces {
        let (a, b) = (p.t0, p.t1);
        if p.is_point() || p.v0 == p.v1 || !a.is_finite() || !b.is_finite() {
            if let Some(v) = f.eval(p.v0) {
                out.push(Piece::constant(a, b, v));
            }
            continue;
        }
        let (lo, hi) = if p.v0 < p.v1 { (p.v0, p.v1) } else { (p.v1, p.v0) };
        let i0 = fb.partition_point(|&u| u <= lo);
        let i1 = fb.partition_point(|&u| u < hi);
        let mut us = vec![lo];
        us.extend_from_slice(&fb[i0..i1]);
        us.push(hi);
        let to_t = |u: f64| {
            if u == p.v0 {
                a
            } else if u == p.v1 {
                b
            } else {
                (a + (b - a) * ((u - p.v0) / (p.v1 - p.v0))).clamp(a, b)
            }
        };
        for w in us.windows(2) {
            let (u0, u1) = (w[0], w[1]);
            if let Some(fp) = f.piece_over(mid(u0, u1)).filter(|q| q.t0 <= u0 && q.t1 >= u1) {
                let (t0, t1) = (to_t(u0), to_t(u1));
                let (v0, v1) = (fp.at(u0), fp.at(u1));
                if t0 <= t1 {
                    out.push(Piece::new(t0, t1, v0, v1));
                } else {
                    out.push(Piece::new(t1, t0, v1, v0));
                }
            }
        }
        for &u in &us {
            if let Some(v) = f.eval(u) {
                let t = to_t(u);
                out.push(Piece::constant(t, t, v));
            }
        }
    }
    Pwl::from_pieces(out, f.closure)
}

/// Partial function of the line height: leftmost x of the set on or above
/// that height, for the canonical upward orientation. Other orientations
/// are the canonical skyline of the transformed input.
#[derive(Debug, Clone, PartialEq)]
pub struct Skyline {
    pub f: Pwl,
    pub dir: Dir,
}

fn canonical_skyline(seg: Segment) -> Pwl {
    let (lo, hi) = if seg.a.y <= seg.b.y { (seg.a, seg.b) } else { (seg.b, seg.a) };
    let inf = f64::NEG_INFINITY;
    if lo.y == hi.y || lo.x == hi.x {
        return Pwl::constant(inf, hi.y, lo.x.min(hi.x), Closure::Min);
    }
    if lo.x < hi.x {
        Pwl::from_pieces(
            vec![Piece::constant(inf, lo.y, lo.x), Piece::new(lo.y, hi.y, lo.x, hi.x)],
            Closure::Min,
        )
    } else {
        Pwl::constant(inf, hi.y, hi.x, Closure::Min)
    }
}

pub fn segment_skyline(seg: Segment, dir: Dir) -> Skyline {
    Skyline { f: canonical_skyline(seg.apply(dir.sym())), dir }
}

pub fn merge_skylines(skylines: Vec<Skyline>) -> Skyline {
    let dir = skylines.first().map_or(Dir::Up, |s| s.dir);
    debug_assert!(skylines.iter().all(|s| s.dir == dir));
    Skyline { f: combine_all(skylines.into_iter().map(|s| s.f).collect(), Closure::Min), dir }
}

pub fn skyline_of(segments: &[Segment], dir: Dir) -> Skyline {
    merge_skylines(segments.iter().map(|s| segment_skyline(*s, dir)).collect())
}

/// Upper envelope `x -> max y`. Vertical segments contribute a single point.
pub fn upper_envelope(segments: &[Segment]) -> Pwl {
    let fs = segments
        .iter()
        .map(|s| {
            let (l, r) = if s.a.x <= s.b.x { (s.a, s.b) } else { (s.b, s.a) };
            if l.x == r.x {
                Pwl::constant(l.x, l.x, l.y.max(r.y), Closure::Max)
            } else {
                Pwl::from_pieces(vec![Piece::new(l.x, r.x, l.y, r.y)], Closure::Max)
            }
        })
        .collect();
    combine_all(fs, Closure::Max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn of(self, p: Point) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
        }
    }
}

/// `l -> extreme of v_axis over points with t_axis >= l` (`ge`) or
/// `t_axis <= l` (`!ge`); the extreme is a max when `maximize`.
pub fn threshold_extreme(segments: &[Segment], t_axis: Axis, ge: bool, v_axis: Axis, maximize: bool) -> Pwl {
    let st = if ge { 1.0 } else { -1.0 };
    let sv = if maximize { -1.0 } else { 1.0 };
    let map = |p: Point| Point::new(sv * v_axis.of(p), st * t_axis.of(p));
    let fs = segments.iter().map(|s| canonical_skyline(Segment::new(map(s.a), map(s.b)))).collect();
    let mut f = combine_all(fs, Closure::Min);
    if !ge {
        f = f.reflect_domain();
    }
    if maximize {
        f = f.neg();
    }
    f
}

/// Total order on floats for sorting helper code.
pub fn fcmp(a: &f64, b: &f64) -> Ordering {
    a.total_cmp(b)
}
