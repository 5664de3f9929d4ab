//! 2- and 3-coverability of subtrajectories, answered from a [`TrajIndex`].
//!
//! A candidate configuration of squares is checked without touching the
//! edges one by one. The start point must lie in the union; after that the
//! subtrajectory leaves the union only by touching its boundary, and each
//! boundary piece is tested with one extreme-crossing query on its line.

use thiserror::Error;

use crate::geom_core::{Covering, Dir, Point, Rect, UnitSquare, EPS_GEOM};
use crate::traj_index::{TrajError, TrajIndex, TrajPos};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error(transparent)]
    Traj(#[from] TrajError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub fn is_2coverable(idx: &TrajIndex, a: TrajPos, b: TrajPos) -> Result<Option<Covering>, QueryError> {
    is_2coverable_eps(idx, a, b, EPS_GEOM)
}

pub fn is_3coverable(idx: &TrajIndex, a: TrajPos, b: TrajPos) -> Result<Option<Covering>, QueryError> {
    is_3coverable_eps(idx, a, b, EPS_GEOM)
}

/// Dispatches on `k`; only 2 and 3 are supported.
pub fn is_k_coverable(idx: &TrajIndex, a: TrajPos, b: TrajPos, k: usize) -> Result<Option<Covering>, QueryError> {
    match k {
        2 => is_2coverable(idx, a, b),
        3 => is_3coverable(idx, a, b),
        _ => Err(QueryError::Internal(format!("k = {k} is not supported for subtrajectory queries"))),
    }
}

struct Query<'a> {
    idx: &'a TrajIndex,
    a: TrajPos,
    b: TrajPos,
    bbox: Rect,
    eps: f64,
}

fn tl(b: &Rect) -> UnitSquare {
    UnitSquare::new(b.x_min, b.y_max)
}

fn br(b: &Rect) -> UnitSquare {
    UnitSquare::new(b.x_max - 1.0, b.y_min + 1.0)
}

fn tr(b: &Rect) -> UnitSquare {
    UnitSquare::new(b.x_max - 1.0, b.y_max)
}

fn bl(b: &Rect) -> UnitSquare {
    UnitSquare::new(b.x_min, b.y_min + 1.0)
}

/// Early answers shared by both queries: one square, or a connected
/// subtrajectory in a strip, which needs exactly ceil(length) squares.
fn shortcut(bbox: &Rect, k: usize, eps: f64) -> Option<Option<Covering>> {
    let (w, h) = (bbox.width(), bbox.height());
    if w <= 1.0 + eps && h <= 1.0 + eps {
        return Some(Some(Covering::new(vec![tl(bbox)])));
    }
    if w <= 1.0 + eps {
        if h > k as f64 + eps {
            return Some(None);
        }
        let n = ((h - eps).ceil() as usize).max(1);
        return Some(Some(Covering::new((0..n).map(|i| UnitSquare::new(bbox.x_min, bbox.y_max - i as f64)).collect())));
    }
    if h <= 1.0 + eps {
        if w > k as f64 + eps {
            return Some(None);
        }
        let n = ((w - eps).ceil() as usize).max(1);
        return Some(Some(Covering::new((0..n).map(|i| UnitSquare::new(bbox.x_min + i as f64, bbox.y_max)).collect())));
    }
    if w > k as f64 + eps || h > k as f64 + eps {
        return Some(None);
    }
    None
}

fn start(idx: &TrajIndex, a: TrajPos, b: TrajPos) -> Result<(TrajPos, TrajPos, Rect), QueryError> {
    let t = idx.trajectory();
    let (a, b) = (t.check(a)?, t.check(b)?);
    let bbox = idx.query_bbox(a, b)?;
    Ok((a, b, bbox))
}

pub fn is_2coverable_eps(idx: &TrajIndex, a: TrajPos, b: TrajPos, eps: f64) -> Result<Option<Covering>, QueryError> {
    let (a, b, bbox) = start(idx, a, b)?;
    if let Some(ans) = shortcut(&bbox, 2, eps) {
        return Ok(ans);
    }
    let q = Query { idx, a, b, bbox, eps };
    for pair in [[tl(&bbox), br(&bbox)], [tr(&bbox), bl(&bbox)]] {
        if q.covers(&pair, None)? {
            return Ok(Some(Covering::new(pair.to_vec())));
        }
    }
    Ok(None)
}

pub fn is_3coverable_eps(idx: &TrajIndex, a: TrajPos, b: TrajPos, eps: f64) -> Result<Option<Covering>, QueryError> {
    let (a, b, bbox) = start(idx, a, b)?;
    if let Some(ans) = shortcut(&bbox, 3, eps) {
        return Ok(ans);
    }
    let q = Query { idx, a, b, bbox, eps };
    for q1 in [tl(&bbox), tr(&bbox), bl(&bbox), br(&bbox)] {
        let Some(rest) = q.uncovered_bbox(&q1)? else {
            return Ok(Some(Covering::new(vec![q1])));
        };
        for [q2, q3] in [[tl(&rest), br(&rest)], [tr(&rest), bl(&rest)]] {
            let sq = [q1, q2, q3];
            if q.covers(&sq, Some(rest))? {
                return Ok(Some(Covering::new(sq.to_vec())));
            }
        }
    }
    Ok(None)
}

/// A maximal part of one square side on the boundary of the union.
#[derive(Debug, Clone, Copy)]
struct Piece {
    horizontal: bool,
    c: f64,
    lo: f64,
    hi: f64,
}

/// Removes the open interval `(p, q)` from each closed interval.
fn subtract(ivs: Vec<(f64, f64)>, p: f64, q: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(ivs.len() + 1);
    for (l, h) in ivs {
        if q <= l || p >= h {
            out.push((l, h));
            continue;
        }
        if l < p {
            out.push((l, p));
        }
        if q < h {
            out.push((q, h));
        }
    }
    out
}

fn boundary_pieces(rects: &[Rect]) -> Vec<Piece> {
    let mut out = Vec::new();
    for (i, r) in rects.iter().enumerate() {
        let sides = [
            (true, r.y_max, r.x_min, r.x_max),
            (true, r.y_min, r.x_min, r.x_max),
            (false, r.x_min, r.y_min, r.y_max),
            (false, r.x_max, r.y_min, r.y_max),
        ];
        for (horizontal, c, lo, hi) in sides {
            let mut ivs = vec![(lo, hi)];
            for (j, o) in rects.iter().enumerate() {
                if j == i {
                    continue;
                }
                let (across, along) = if horizontal { ((o.y_min, o.y_max), (o.x_min, o.x_max)) } else { ((o.x_min, o.x_max), (o.y_min, o.y_max)) };
                if across.0 < c && c < across.1 {
                    ivs = subtract(ivs, along.0, along.1);
                }
            }
            out.extend(ivs.into_iter().map(|(lo, hi)| Piece { horizontal, c, lo, hi }));
        }
    }
    out
}

/// The along-line extent of `r` at cross coordinate `c`, if the line meets it.
fn along(r: &Rect, horizontal: bool, c: f64) -> Option<(f64, f64)> {
    if horizontal {
        (r.y_min <= c && c <= r.y_max).then_some((r.x_min, r.x_max))
    } else {
        (r.x_min <= c && c <= r.x_max).then_some((r.y_min, r.y_max))
    }
}

impl Query<'_> {
    fn inflated(&self, q: &UnitSquare) -> Rect {
        q.rect().inflate(self.eps)
    }

    /// Bounding box of the part of the subtrajectory outside the interior of
    /// `q1` (inflated by eps), or `None` when nothing is outside.
    fn uncovered_bbox(&self, q1: &UnitSquare) -> Result<Option<Rect>, QueryError> {
        let (a, b, bb) = (self.a, self.b, self.bbox);
        let r = self.inflated(q1);
        let inside = |p: Point| r.x_min < p.x && p.x < r.x_max && r.y_min < p.y && p.y < r.y_max;
        let mut acc: Option<Rect> = None;
        let mut add = |p: Point| match acc.as_mut() {
            Some(x) => x.add_point(p),
            None => acc = Some(Rect::at_point(p)),
        };
        let t = self.idx.trajectory();
        for p in [t.point(a), t.point(b)] {
            if !inside(p) {
                add(p);
            }
        }
        let parts = [
            Rect::new(bb.x_min, r.x_min, bb.y_min, bb.y_max),
            Rect::new(r.x_max, bb.x_max, bb.y_min, bb.y_max),
            Rect::new(bb.x_min, bb.x_max, bb.y_min, r.y_min),
            Rect::new(bb.x_min, bb.x_max, r.y_max, bb.y_max),
        ];
        for part in parts.iter().filter(|p| p.x_min <= p.x_max && p.y_min <= p.y_max) {
            for d in Dir::ALL {
                if let Some(p) = self.idx.query_extreme_vertex(a, b, part, d)? {
                    add(p);
                }
            }
        }
        for (c, vertical) in [(r.x_min, true), (r.x_max, true), (r.y_min, false), (r.y_max, false)] {
            let dirs = if vertical { [Dir::Up, Dir::Down] } else { [Dir::Left, Dir::Right] };
            for d in dirs {
                if let Some(p) = self.idx.query_envelope(a, b, c, d)? {
                    add(p);
                }
            }
        }
        Ok(acc)
    }

    /// Whether the union of `squares`, each inflated by eps, contains the
    /// subtrajectory. For three squares `rest` bounds everything outside the
    /// first square.
    fn covers(&self, squares: &[UnitSquare], rest: Option<Rect>) -> Result<bool, QueryError> {
        let t = self.idx.trajectory();
        let rects: Vec<Rect> = squares.iter().map(|q| self.inflated(q)).collect();
        let in_union = |p: Point| rects.iter().any(|r| r.contains(p, 0.0));
        if !in_union(t.point(self.a)) {
            return Ok(false);
        }
        // Boundary points of the union lie outside the first square, so the
        // subtrajectory can only reach them inside `zone`.
        let zone = match rest {
            Some(r) => match self.bbox.intersect(&r) {
                Some(z) => z,
                None => return Ok(true),
            },
            None => self.bbox,
        };
        let mut stuck = Vec::new();
        for p in boundary_pieces(&rects) {
            let Some((zlo, zhi)) = along(&zone, p.horizontal, p.c) else {
                continue;
            };
            let (lo, hi) = (p.lo.max(zlo), p.hi.min(zhi));
            if lo > hi {
                continue;
            }
            let piece = Piece { lo, hi, ..p };
            match self.free_direction(&rects, &piece, rest) {
                Some(true) => {
                    let d = if p.horizontal { Dir::Right } else { Dir::Up };
                    if let Some(x) = self.idx.query_envelope(self.a, self.b, p.c, d)? {
                        let v = if p.horizontal { x.x } else { x.y };
                        if v >= lo {
                            return Ok(false);
                        }
                    }
                }
                Some(false) => {
                    let d = if p.horizontal { Dir::Left } else { Dir::Down };
                    if let Some(x) = self.idx.query_envelope(self.a, self.b, p.c, d)? {
                        let v = if p.horizontal { x.x } else { x.y };
                        if v <= hi {
                            return Ok(false);
                        }
                    }
                }
                None => stuck.push(piece),
            }
        }
        match stuck.len() {
            0 => Ok(true),
            1 => {
                // Leaving through the one blocked piece either ends outside
                // or turns at a vertex outside the union.
                if !in_union(t.point(self.b)) {
                    return Ok(false);
                }
                Ok(!self.vertex_outside(&rects, &zone)?)
            }
            n => Err(QueryError::Internal(format!("{n} boundary pieces cannot be extended"))),
        }
    }

    /// `Some(true)` if the line through `p` is free of the union's interior
    /// beyond `p.hi`, `Some(false)` if free before `p.lo`, `None` if neither.
    /// Only the stretch the subtrajectory can reach matters: the bounding
    /// box, and outside the first square also the leftovers box `rest`.
    fn free_direction(&self, rects: &[Rect], p: &Piece, rest: Option<Rect>) -> Option<bool> {
        let (blo, bhi) = along(&self.bbox, p.horizontal, p.c)?;
        let rest_along = rest.and_then(|r| along(&r, p.horizontal, p.c));
        let blocked = |from: f64, to: f64| {
            rects.iter().enumerate().any(|(i, r)| {
                let (across, al) = if p.horizontal {
                    ((r.y_min, r.y_max), (r.x_min, r.x_max))
                } else {
                    ((r.x_min, r.x_max), (r.y_min, r.y_max))
                };
                if !(across.0 < p.c && p.c < across.1) {
                    return false;
                }
                let (mut lo, mut hi) = (al.0.max(from), al.1.min(to));
                if rest.is_some() && i > 0 {
                    match rest_along {
                        Some((z0, z1)) => {
                            lo = lo.max(z0);
                            hi = hi.min(z1);
                        }
                        None => return false,
                    }
                }
                lo < hi
            })
        };
        if !blocked(p.hi, bhi) {
            Some(true)
        } else if !blocked(blo, p.lo) {
            Some(false)
        } else {
            None
        }
    }

    /// Whether a vertex of the subtrajectory lies in `zone` outside the union.
    fn vertex_outside(&self, rects: &[Rect], zone: &Rect) -> Result<bool, QueryError> {
        let grid = |lo: f64, hi: f64, f: &dyn Fn(&Rect) -> [f64; 2]| {
            let mut v = vec![lo, hi];
            v.extend(rects.iter().flat_map(f).filter(|&c| lo < c && c < hi));
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let xs = grid(zone.x_min, zone.x_max, &|r| [r.x_min, r.x_max]);
        let ys = grid(zone.y_min, zone.y_max, &|r| [r.y_min, r.y_max]);
        let in_union = |p: Point| rects.iter().any(|r| r.contains(p, 0.0));
        let tiny = self.eps * 1e-3;
        for xw in xs.windows(2) {
            for yw in ys.windows(2) {
                let (x0, x1, y0, y1) = (xw[0], xw[1], yw[0], yw[1]);
                let (mx, my) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
                if in_union(Point::new(mx, my)) {
                    continue;
                }
                // Pull in only the sides that lie on the union.
                let cell = Rect::new(
                    if in_union(Point::new(x0, my)) { x0 + tiny } else { x0 },
                    if in_union(Point::new(x1, my)) { x1 - tiny } else { x1 },
                    if in_union(Point::new(mx, y0)) { y0 + tiny } else { y0 },
                    if in_union(Point::new(mx, y1)) { y1 - tiny } else { y1 },
                );
                if cell.x_min > cell.x_max || cell.y_min > cell.y_max {
                    continue;
                }
                if self.idx.query_extreme_vertex(self.a, self.b, &cell, Dir::Up)?.is_some() {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}
