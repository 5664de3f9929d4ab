//! Longest 1-coverable subtrajectory by candidate squares.

use std::cmp::Ordering;

use crate::geom_core::{Point, Segment, UnitSquare};
use crate::traj_index::{TrajIndex, TrajPos, Trajectory};

use super::reach::{reach_all_vertices, ReachTable};

/// Slack used when clipping the trajectory against a candidate square.
const CLIP_SLACK: f64 = 1e-12;
const LEN_TIE: f64 = 1e-12;

/// Where a candidate square came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Two sides pinned by vertex coordinates.
    VertexPair,
    /// One side pinned by a vertex, one corner on an edge.
    VertexEdgeCorner,
    /// Opposite corners on the edges of a reach or reverse reach pair.
    OppositeCorner,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::VertexPair, Family::VertexEdgeCorner, Family::OppositeCorner];

    pub fn name(self) -> &'static str {
        match self {
            Family::VertexPair => "vertex-pair",
            Family::VertexEdgeCorner => "vertex-edge-corner",
            Family::OppositeCorner => "opposite-corner",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerPair {
    /// Top-left corner on the first edge, bottom-right on the second.
    TlBr,
    /// Top-right corner on the first edge, bottom-left on the second.
    TrBl,
}

/// A candidate placement and a trajectory position inside it; the run of
/// the trajectory through that position is what gets scored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub square: UnitSquare,
    pub family: Family,
    pub anchor: TrajPos,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateSquares {
    pub entries: Vec<Candidate>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Longest1 {
    pub start: TrajPos,
    pub end: TrajPos,
    pub witness: UnitSquare,
    pub length: f64,
    /// Family of the winning candidate; `None` when the whole trajectory fits.
    pub family: Option<Family>,
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Solves for the unit square with one corner on `e_i` and the opposite
/// corner on `e_j`. Returns the square and both edge parameters.
pub(crate) fn opposite_corner_solve(e_i: &Segment, e_j: &Segment, pair: CornerPair) -> Option<(UnitSquare, f64, f64)> {
    // Corner on e_j minus corner on e_i.
    let off = match pair {
        CornerPair::TlBr => Point::new(1.0, -1.0),
        CornerPair::TrBl => Point::new(-1.0, -1.0),
    };
    let di = Point::new(e_i.b.x - e_i.a.x, e_i.b.y - e_i.a.y);
    let dj = Point::new(e_j.b.x - e_j.a.x, e_j.b.y - e_j.a.y);
    // s di - t dj = a_j - a_i - off
    let rhs = Point::new(e_j.a.x - e_i.a.x - off.x, e_j.a.y - e_i.a.y - off.y);
    let neg_dj = Point::new(-dj.x, -dj.y);
    let det = cross(di, neg_dj);
    let scale = (di.x.abs() + di.y.abs()) * (dj.x.abs() + dj.y.abs());
    if det.abs() <= 1e-14 * scale || scale == 0.0 {
        return None;
    }
    let s = cross(rhs, neg_dj) / det;
    let t = cross(di, rhs) / det;
    let tol = 1e-12;
    if !(-tol..=1.0 + tol).contains(&s) || !(-tol..=1.0 + tol).contains(&t) {
        return None;
    }
    let (s, t) = (s.clamp(0.0, 1.0), t.clamp(0.0, 1.0));
    let c = e_i.at(s);
    let sq = match pair {
        CornerPair::TlBr => UnitSquare::from_top_left(c),
        CornerPair::TrBl => UnitSquare::from_top_right(c),
    };
    Some((sq, s, t))
}

/// The unique unit square with the given corners on `e_i` and `e_j`, if the
/// edges are not parallel and both corners land on the edges.
pub fn opposite_corner_square(e_i: &Segment, e_j: &Segment, pair: CornerPair) -> Option<UnitSquare> {
    opposite_corner_solve(e_i, e_j, pair).map(|(sq, _, _)| sq)
}

fn clip(traj: &Trajectory, sq: &UnitSquare, e: usize) -> Option<(f64, f64)> {
    traj.edge(e).clip_params(&sq.rect().inflate(CLIP_SLACK))
}

/// Maximal contiguous piece of the trajectory inside `sq` that contains
/// `anchor`, or `None` if the anchor is outside.
pub fn run_through(traj: &Trajectory, sq: &UnitSquare, anchor: TrajPos) -> Option<(TrajPos, TrajPos)> {
    let anchor = traj.normalize(anchor);
    let (t0, t1) = clip(traj, sq, anchor.edge)?;
    let slack = 1e-9;
    if anchor.frac < t0 - slack || anchor.frac > t1 + slack {
        return None;
    }
    let mut start = TrajPos::new(anchor.edge, t0);
    if t0 <= 0.0 {
        let mut e = anchor.edge;
        while e > 0 {
            match clip(traj, sq, e - 1) {
                Some((a, b)) if b >= 1.0 => {
                    start = TrajPos::new(e - 1, a);
                    if a > 0.0 {
                        break;
                    }
                    e -= 1;
                }
                _ => break,
            }
        }
    }
    let mut end = TrajPos::new(anchor.edge, t1);
    if t1 >= 1.0 {
        let mut e = anchor.edge + 1;
        while e < traj.n_edges() {
            match clip(traj, sq, e) {
                Some((a, b)) if a <= 0.0 => {
                    end = TrajPos::new(e, b);
                    if b < 1.0 {
                        break;
                    }
                    e += 1;
                }
                _ => break,
            }
        }
    }
    Some((traj.normalize(start), traj.normalize(end)))
}

fn family_a(traj: &Trajectory, out: &mut Vec<Candidate>) {
    let vs = traj.vertices();
    let mut order: Vec<usize> = (0..vs.len()).collect();
    order.sort_by(|&a, &b| vs[a].x.total_cmp(&vs[b].x));
    for (ai, &a) in order.iter().enumerate() {
        let va = vs[a];
        let lo = order[..ai].partition_point(|&b| vs[b].x < va.x - 1.0 - 1e-12);
        let hi = ai + 1 + order[ai + 1..].partition_point(|&b| vs[b].x <= va.x + 1.0 + 1e-12);
        for &b in &order[lo..hi] {
            let vb = vs[b];
            if (va.y - vb.y).abs() > 1.0 + 1e-12 {
                continue;
            }
            // v_a pins a vertical side, v_b a horizontal one.
            for left in [va.x, va.x - 1.0] {
                for top in [vb.y, vb.y + 1.0] {
                    let sq = UnitSquare::new(left, top);
                    if sq.contains(va, 1e-12) && sq.contains(vb, 1e-12) {
                        out.push(Candidate { square: sq, family: Family::VertexPair, anchor: traj.vertex_pos(a) });
                        if a != b {
                            out.push(Candidate { square: sq, family: Family::VertexPair, anchor: traj.vertex_pos(b) });
                        }
                    }
                }
            }
        }
    }
}

/// Crossing of `e` with the line `axis = c`, as the other coordinate.
fn crossing(e: &Segment, c: f64, vertical_line: bool) -> Option<f64> {
    let (pa, pb, qa, qb) = if vertical_line { (e.a.x, e.b.x, e.a.y, e.b.y) } else { (e.a.y, e.b.y, e.a.x, e.b.x) };
    if pa == pb || c < pa.min(pb) || c > pa.max(pb) {
        return None;
    }
    let t = (c - pa) / (pb - pa);
    Some(qa + t * (qb - qa))
}

fn family_b(traj: &Trajectory, out: &mut Vec<Candidate>) {
    let vs = traj.vertices();
    let edges: Vec<Segment> = traj.edges().collect();
    for (a, &va) in vs.iter().enumerate() {
        let anchor = traj.vertex_pos(a);
        let mut push = |sq: UnitSquare| {
            if sq.contains(va, 1e-12) {
                out.push(Candidate { square: sq, family: Family::VertexEdgeCorner, anchor });
            }
        };
        for left in [va.x, va.x - 1.0] {
            for line in [left, left + 1.0] {
                for e in &edges {
                    if let Some(y) = crossing(e, line, true) {
                        if (y - va.y).abs() <= 1.0 + 1e-12 {
                            push(UnitSquare::new(left, y));
                            push(UnitSquare::new(left, y + 1.0));
                        }
                    }
                }
            }
        }
        for top in [va.y, va.y + 1.0] {
            for line in [top, top - 1.0] {
                for e in &edges {
                    if let Some(x) = crossing(e, line, false) {
                        if (x - va.x).abs() <= 1.0 + 1e-12 {
                            push(UnitSquare::new(x, top));
                            push(UnitSquare::new(x - 1.0, top));
                        }
                    }
                }
            }
        }
    }
}

fn family_c(traj: &Trajectory, table: &ReachTable, out: &mut Vec<Candidate>) {
    let m = traj.n_edges();
    let mut pairs = Vec::new();
    for (i, &r) in table.reach.iter().enumerate() {
        if i < m {
            pairs.push((i, r.edge.min(m - 1)));
        }
    }
    for (j, &rr) in table.reverse_reach.iter().enumerate() {
        if j >= m {
            continue;
        }
        if rr.frac > 0.0 {
            pairs.push((rr.edge, j));
        } else if rr.edge > 0 {
            pairs.push((rr.edge - 1, j));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    for (i, j) in pairs {
        if i > j {
            continue;
        }
        let (ei, ej) = (traj.edge(i), traj.edge(j));
        for pair in [CornerPair::TlBr, CornerPair::TrBl] {
            if let Some((sq, s, _)) = opposite_corner_solve(&ei, &ej, pair) {
                out.push(Candidate { square: sq, family: Family::OppositeCorner, anchor: TrajPos::new(i, s) });
            }
            if let Some((sq, _, t)) = opposite_corner_solve(&ej, &ei, pair) {
                out.push(Candidate { square: sq, family: Family::OppositeCorner, anchor: TrajPos::new(i, t) });
            }
        }
    }
}

/// All candidate squares of the three families.
pub fn candidate_squares(traj: &Trajectory, table: &ReachTable) -> CandidateSquares {
    let mut entries = Vec::new();
    family_a(traj, &mut entries);
    family_b(traj, &mut entries);
    family_c(traj, table, &mut entries);
    CandidateSquares { entries }
}

fn better(len: f64, start: TrajPos, best: &Option<Longest1>) -> bool {
    match best {
        None => true,
        Some(b) => match len.partial_cmp(&(b.length + LEN_TIE)) {
            Some(Ordering::Greater) => true,
            _ => len >= b.length - LEN_TIE && start < b.start,
        },
    }
}

/// Best run over a candidate list, optionally restricted to one family.
pub fn best_candidate(traj: &Trajectory, cands: &CandidateSquares, only: Option<Family>) -> Option<Longest1> {
    let mut best: Option<Longest1> = None;
    for c in &cands.entries {
        if only.is_some_and(|f| f != c.family) {
            continue;
        }
        let Some((s, e)) = run_through(traj, &c.square, c.anchor) else { continue };
        let len = traj.arc(e) - traj.arc(s);
        if better(len, s, &best) {
            best = Some(Longest1 { start: s, end: e, witness: c.square, length: len, family: Some(c.family) });
        }
    }
    best
}

/// A longest subtrajectory that fits in one unit square; ties go to the
/// earliest start.
pub fn longest_1coverable(idx: &TrajIndex) -> Longest1 {
    let traj = idx.trajectory();
    let all = idx.query_bbox(traj.start(), traj.end()).expect("whole range");
    if all.width() <= 1.0 && all.height() <= 1.0 {
        return Longest1 {
            start: traj.start(),
            end: traj.end(),
            witness: UnitSquare::new(all.x_min, all.y_max),
            length: traj.length(),
            family: None,
        };
    }
    let table = reach_all_vertices(idx);
    let cands = candidate_squares(traj, &table);
    best_candidate(traj, &cands, None).expect("every vertex anchors a candidate")
}
