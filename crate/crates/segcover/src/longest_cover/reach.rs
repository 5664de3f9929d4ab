//! Reach and reverse reach for 1- and 2-coverability.

use crate::geom_core::{Point, Rect};
use crate::subtraj_query::{is_2coverable_eps, QueryError};
use crate::traj_index::{TrajIndex, TrajPos, Trajectory};

/// Tolerance of the in-edge bisection, as an edge parameter.
pub const EPS_REACH: f64 = 1e-9;

/// Containment slack used while searching. Much tighter than
/// [`crate::EPS_GEOM`] so reach positions can be fed to the event checks.
pub(crate) const EPS_TIGHT: f64 = 1e-12;

const BISECT_STOP: f64 = 1e-13;

/// Reach and reverse reach of every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachTable {
    pub k: usize,
    /// `reach[i]`: furthest `q` with `T[v_i, q]` k-coverable.
    pub reach: Vec<TrajPos>,
    /// `reverse_reach[j]`: earliest `p` with `T[p, v_j]` k-coverable.
    pub reverse_reach: Vec<TrajPos>,
}

impl ReachTable {
    /// Index of the last vertex at or before `reach[i]`.
    pub fn last_vertex(&self, traj: &Trajectory, i: usize) -> usize {
        last_vertex_at_or_before(traj, self.reach[i])
    }
}

pub(crate) fn last_vertex_at_or_before(traj: &Trajectory, p: TrajPos) -> usize {
    let p = traj.normalize(p);
    if p == traj.end() {
        traj.n_vertices() - 1
    } else {
        p.edge
    }
}

fn fits(b: &Rect) -> bool {
    b.width() <= 1.0 + EPS_TIGHT && b.height() <= 1.0 + EPS_TIGHT
}

/// Largest `t` in `[0, 1]` such that `b` grown by `from + t (to - from)`
/// still fits in a unit square. `b` must fit and contain `from`.
fn frontier(b: &Rect, from: Point, to: Point) -> f64 {
    let mut t = 1.0f64;
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    if dx > 0.0 {
        t = t.min((b.x_min + 1.0 - from.x) / dx);
    } else if dx < 0.0 {
        t = t.min((b.x_max - 1.0 - from.x) / dx);
    }
    if dy > 0.0 {
        t = t.min((b.y_min + 1.0 - from.y) / dy);
    } else if dy < 0.0 {
        t = t.min((b.y_max - 1.0 - from.y) / dy);
    }
    t.clamp(0.0, 1.0)
}

/// Reach of every vertex under 1-coverability by a two-pointer sweep. The
/// end of each window is solved in closed form on its last edge.
pub fn reach_all_vertices(idx: &TrajIndex) -> ReachTable {
    let t = idx.trajectory();
    let n = t.n_vertices();
    let bbox = |i: usize, j: usize| idx.query_bbox(t.vertex_pos(i), t.vertex_pos(j)).expect("ordered vertex range");
    let mut reach = Vec::with_capacity(n);
    let mut j = 0;
    for i in 0..n {
        j = j.max(i);
        while j + 1 < n && fits(&bbox(i, j + 1)) {
            j += 1;
        }
        if j + 1 == n {
            reach.push(t.end());
        } else {
            let f = frontier(&bbox(i, j), t.vertices()[j], t.vertices()[j + 1]);
            reach.push(t.normalize(TrajPos::new(j, f)));
        }
    }
    let mut reverse_reach = vec![t.start(); n];
    let mut i = n - 1;
    for j in (0..n).rev() {
        i = i.min(j);
        while i > 0 && fits(&bbox(i - 1, j)) {
            i -= 1;
        }
        if i > 0 {
            let f = frontier(&bbox(i, j), t.vertices()[i], t.vertices()[i - 1]);
            reverse_reach[j] = t.normalize(TrajPos::new(i - 1, 1.0 - f));
        }
    }
    ReachTable { k: 1, reach, reverse_reach }
}

/// Reach of every vertex under 2-coverability.
pub fn reach_all_vertices_2(idx: &TrajIndex) -> Result<ReachTable, QueryError> {
    let t = idx.trajectory();
    let n = t.n_vertices();
    let reach = (0..n).map(|i| reach_point(idx, t.vertex_pos(i), 2)).collect::<Result<_, _>>()?;
    let reverse_reach = (0..n).map(|j| reach_start(idx, t.vertex_pos(j), 2)).collect::<Result<_, _>>()?;
    Ok(ReachTable { k: 2, reach, reverse_reach })
}

fn coverable(idx: &TrajIndex, a: TrajPos, b: TrajPos, k: usize) -> Result<bool, QueryError> {
    match k {
        1 => Ok(fits(&idx.query_bbox(a, b)?)),
        2 => Ok(is_2coverable_eps(idx, a, b, EPS_TIGHT)?.is_some()),
        _ => Err(QueryError::Internal(format!("reach is defined for k = 1 or 2, got {k}"))),
    }
}

/// Largest `q >= p` with `T[p, q]` k-coverable, for `k` in {1, 2}.
///
/// Binary search over the vertices after `p`, then the last edge is solved
/// in closed form (k = 1) or bisected (k = 2).
pub fn reach_point(idx: &TrajIndex, p: TrajPos, k: usize) -> Result<TrajPos, QueryError> {
    let t = idx.trajectory();
    let p = t.check(p)?;
    if coverable(idx, p, t.end(), k)? {
        return Ok(t.end());
    }
    // Vertices strictly after p: first..n-1; the last one is not reachable.
    let first = p.edge + 1;
    let (mut lo, mut hi) = (first, t.n_vertices() - 1);
    if !coverable(idx, p, t.vertex_pos(first), k)? {
        return finish_forward(idx, p, p.edge, p.frac, k);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if coverable(idx, p, t.vertex_pos(mid), k)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    finish_forward(idx, p, lo, 0.0, k)
}

/// `T[p, (edge, lo)]` is coverable and `T[p, v_{edge+1}]` is not.
fn finish_forward(idx: &TrajIndex, p: TrajPos, edge: usize, lo: f64, k: usize) -> Result<TrajPos, QueryError> {
    let t = idx.trajectory();
    if k == 1 {
        let from = t.point(TrajPos::new(edge, lo));
        let b = idx.query_bbox(p, TrajPos::new(edge, lo))?;
        let f = frontier(&b, from, t.vertices()[edge + 1]);
        return Ok(t.normalize(TrajPos::new(edge, lo + f * (1.0 - lo))));
    }
    let (mut lo, mut hi) = (lo, 1.0);
    while hi - lo > BISECT_STOP {
        let mid = 0.5 * (lo + hi);
        if coverable(idx, p, TrajPos::new(edge, mid), k)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(t.normalize(TrajPos::new(edge, lo)))
}

/// Smallest `p <= q` with `T[p, q]` k-coverable (the reverse reach).
pub fn reach_start(idx: &TrajIndex, q: TrajPos, k: usize) -> Result<TrajPos, QueryError> {
    let t = idx.trajectory();
    let q = t.check(q)?;
    if coverable(idx, t.start(), q, k)? {
        return Ok(t.start());
    }
    // Vertices at or before q: 0..=last; vertex 0 is not coverable.
    let last = q.edge;
    if !coverable(idx, t.vertex_pos(last), q, k)? {
        return finish_backward(idx, q, last, q.frac, k);
    }
    let (mut lo, mut hi) = (0, last);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if coverable(idx, t.vertex_pos(mid), q, k)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    finish_backward(idx, q, hi - 1, 1.0, k)
}

/// `T[(edge, hi), q]` is coverable and `T[v_edge, q]` is not.
fn finish_backward(idx: &TrajIndex, q: TrajPos, edge: usize, hi: f64, k: usize) -> Result<TrajPos, QueryError> {
    let t = idx.trajectory();
    if k == 1 {
        let from = t.point(TrajPos::new(edge, hi));
        let b = idx.query_bbox(t.normalize(TrajPos::new(edge, hi)), q)?;
        let f = frontier(&b, from, t.vertices()[edge]);
        return Ok(t.normalize(TrajPos::new(edge, hi * (1.0 - f))));
    }
    let (mut lo, mut hi) = (0.0, hi);
    while hi - lo > BISECT_STOP {
        let mid = 0.5 * (lo + hi);
        if coverable(idx, TrajPos::new(edge, mid), q, k)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(t.normalize(TrajPos::new(edge, hi)))
}
