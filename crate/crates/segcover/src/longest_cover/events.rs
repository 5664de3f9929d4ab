//! Candidate starting points for the longest 2-coverable subtrajectory.
//!
//! Every event is stated for one orientation: "top", "left", "upper
//! envelope" and the corner names refer to the frame obtained by applying
//! a [`Sym`] to the trajectory. Trajectory positions do not depend on the
//! frame, and neither does the reach, so all frames share one reach cache.

use std::collections::HashMap;

use crate::cover_decision::uncovered_by;
use crate::geom_core::{bounding_box, verify_covering, Covering, Point, Segment, Sym, UnitSquare};
use crate::pwl::upper_envelope;
use crate::subtraj_query::QueryError;
use crate::traj_index::{TrajIndex, TrajPos, Trajectory};

use super::reach::{last_vertex_at_or_before, reach_point, reach_start, EPS_REACH};

/// Tolerance of the event checks.
pub const EVENT_TOL: f64 = 1e-9;

/// Arc offset at which a local-maximum event is compared with its
/// neighbours.
const LOCAL_MAX_STEP: f64 = 1e-7;
/// Gain over the interval ends below which no local-maximum event is kept.
const LEN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Vertex,
    Reach,
    BoundingBox,
    Bridge,
    UpperEnvelope,
    Special1,
    Special2,
    Special3,
    LocalMax,
}

impl EventKind {
    pub const ALL: [EventKind; 9] = [
        EventKind::Vertex,
        EventKind::Reach,
        EventKind::BoundingBox,
        EventKind::Bridge,
        EventKind::UpperEnvelope,
        EventKind::Special1,
        EventKind::Special2,
        EventKind::Special3,
        EventKind::LocalMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EventKind::Vertex => "vertex",
            EventKind::Reach => "reach",
            EventKind::BoundingBox => "bounding_box",
            EventKind::Bridge => "bridge",
            EventKind::UpperEnvelope => "upper_envelope",
            EventKind::Special1 => "special_config_1",
            EventKind::Special2 => "special_config_2",
            EventKind::Special3 => "special_config_3",
            EventKind::LocalMax => "local_max",
        }
    }

    /// Stage of the candidate set that first contains events of this kind.
    pub fn stage(self) -> u8 {
        match self {
            EventKind::UpperEnvelope => 2,
            EventKind::Special1 | EventKind::Special2 | EventKind::Special3 | EventKind::LocalMax => 3,
            _ => 1,
        }
    }
}

/// One candidate start with the reason it was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventPoint {
    pub pos: TrajPos,
    pub kind: EventKind,
    pub frame: Sym,
    /// Companion position: the vertex reached (reach), the point `u`
    /// (bridge, upper envelope), or the point on the edge met by the
    /// opposite corner (special configurations).
    pub aux: Option<TrajPos>,
}

/// Sorted, deduplicated candidate starts with the stage each one entered.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateStartSet {
    pub members: Vec<TrajPos>,
    pub stage: Vec<u8>,
    pub events: Vec<EventPoint>,
}

impl CandidateStartSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members of stage `s` (1, 2 or 3); stages are nested.
    pub fn upto(&self, s: u8) -> Vec<TrajPos> {
        self.members.iter().zip(&self.stage).filter(|(_, &g)| g <= s).map(|(&p, _)| p).collect()
    }
}

fn sub(a: Point, b: Point) -> Point {
    Point::new(a.x - b.x, a.y - b.y)
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

fn dot(a: Point, b: Point) -> f64 {
    a.x * b.x + a.y * b.y
}

fn norm1(a: Point) -> f64 {
    a.x.abs() + a.y.abs()
}

fn seg_param(s: &Segment, p: Point) -> f64 {
    let d = sub(s.b, s.a);
    let l2 = dot(d, d);
    if l2 == 0.0 {
        0.0
    } else {
        dot(sub(p, s.a), d) / l2
    }
}

fn seg_dist(s: &Segment, p: Point) -> f64 {
    s.at(seg_param(s, p).clamp(0.0, 1.0)).dist(p)
}

fn on_segment(s: &Segment, p: Point) -> Option<f64> {
    let t = seg_param(s, p);
    let tol = 1e-9;
    ((-tol..=1.0 + tol).contains(&t) && s.at(t.clamp(0.0, 1.0)).dist(p) <= 1e-7).then_some(t.clamp(0.0, 1.0))
}

/// Root of `c0 + c1 t` when it is well defined.
fn root(c0: f64, c1: f64, scale: f64) -> Option<f64> {
    if c1.abs() <= 1e-13 * scale.max(1e-300) {
        None
    } else {
        Some(-c0 / c1)
    }
}

/// Reach cache and shared state for the event computations.
pub struct EventContext<'a> {
    idx: &'a TrajIndex,
    cache: HashMap<(usize, u64), TrajPos>,
    vertex_reach: Vec<TrajPos>,
    rejected: HashMap<EventKind, usize>,
    nodes: Vec<TrajPos>,
}

impl<'a> EventContext<'a> {
    pub fn new(idx: &'a TrajIndex) -> Result<Self, QueryError> {
        let mut ctx =
            EventContext { idx, cache: HashMap::new(), vertex_reach: Vec::new(), rejected: HashMap::new(), nodes: Vec::new() };
        let t = idx.trajectory();
        ctx.vertex_reach = (0..t.n_vertices()).map(|i| ctx.reach(t.vertex_pos(i))).collect::<Result<_, _>>()?;
        Ok(ctx)
    }

    pub fn index(&self) -> &'a TrajIndex {
        self.idx
    }

    fn traj(&self) -> &'a Trajectory {
        self.idx.trajectory()
    }

    /// Reach under 2-coverability, memoized by position.
    pub fn reach(&mut self, p: TrajPos) -> Result<TrajPos, QueryError> {
        let p = self.traj().normalize(p);
        let key = (p.edge, p.frac.to_bits());
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        let r = reach_point(self.idx, p, 2)?;
        self.cache.insert(key, r);
        Ok(r)
    }

    /// Number of computed candidates that failed their check, per kind.
    pub fn rejected(&self) -> &HashMap<EventKind, usize> {
        &self.rejected
    }

    /// Vertex set used by the upper envelope events: the members of the
    /// previous stage.
    pub fn set_nodes(&mut self, nodes: Vec<TrajPos>) {
        self.nodes = nodes;
    }

    fn fp(&self, s: Sym, p: TrajPos) -> Point {
        s.point(self.traj().point(p))
    }

    fn fv(&self, s: Sym, i: usize) -> Point {
        s.point(self.traj().vertices()[i])
    }

    fn fedge(&self, s: Sym, e: usize) -> Segment {
        Segment::new(self.fv(s, e), self.fv(s, e + 1))
    }

    fn fsegs(&self, s: Sym, a: TrajPos, b: TrajPos) -> Vec<Segment> {
        self.traj().subsegments(a, b).iter().map(|g| Segment::new(s.point(g.a), s.point(g.b))).collect()
    }

    fn at(&self, e: usize, f: f64) -> TrajPos {
        self.traj().normalize(TrajPos::new(e, f.clamp(0.0, 1.0)))
    }

    fn keep(&mut self, ev: EventPoint, out: &mut Vec<EventPoint>) -> Result<(), QueryError> {
        // Among starts reaching the end, the earliest one is a reach event.
        if ev.kind.stage() > 1 || ev.kind == EventKind::BoundingBox || ev.kind == EventKind::Bridge {
            if self.reach(ev.pos)? == self.traj().end() {
                return Ok(());
            }
        }
        if self.validate(&ev)? {
            out.push(ev);
        } else {
            *self.rejected.entry(ev.kind).or_default() += 1;
        }
        Ok(())
    }

    /// Re-checks the defining predicate of `ev`.
    pub fn validate(&mut self, ev: &EventPoint) -> Result<bool, QueryError> {
        let tol = EVENT_TOL;
        let t = self.traj();
        let p = t.normalize(ev.pos);
        let s = ev.frame;
        match ev.kind {
            EventKind::Vertex => Ok(p.frac == 0.0 || p == t.end()),
            EventKind::Reach => {
                let Some(v) = ev.aux else { return Ok(false) };
                let r = self.reach(p)?;
                if r < v || p >= v {
                    return Ok(false);
                }
                if p == t.start() {
                    return Ok(true);
                }
                let before = t.pos_at_arc(t.arc(p) - tol);
                Ok(reach_point(self.idx, before, 2)? < v)
            }
            EventKind::BoundingBox => {
                let r = self.reach(p)?;
                let vs = t.vertex_range(p, r);
                if vs.is_empty() {
                    return Ok(false);
                }
                let top = vs.map(|i| self.fv(s, i).y).fold(f64::NEG_INFINITY, f64::max);
                Ok((top - self.fp(s, p).y).abs() <= tol)
            }
            EventKind::Bridge | EventKind::UpperEnvelope => {
                let Some(u) = ev.aux else { return Ok(false) };
                let r = self.reach(p)?;
                let vs = t.vertex_range(p, r);
                if vs.is_empty() {
                    return Ok(false);
                }
                let segs = self.fsegs(s, p, r);
                let pp = self.fp(s, p);
                let up = self.fp(s, u);
                let bb = bounding_box(&segs).expect("nonempty");
                if bb.x_min < pp.x - tol || (up.x - pp.x - 1.0).abs() > tol {
                    return Ok(false);
                }
                if !segs.iter().any(|g| seg_dist(g, up) <= tol) {
                    return Ok(false);
                }
                if ev.kind == EventKind::Bridge {
                    let low = vs.map(|i| self.fv(s, i).y).fold(f64::INFINITY, f64::min);
                    return Ok((up.y - low - 1.0).abs() <= tol);
                }
                let top = segs.iter().filter_map(|g| crate::traj_index::crossing_top(g, up.x)).fold(f64::NEG_INFINITY, f64::max);
                if (top - up.y).abs() > tol {
                    return Ok(false);
                }
                let touching = segs.iter().filter(|g| seg_dist(g, up) <= tol).count();
                let is_node = t.vertices().iter().any(|v| s.point(*v).dist(up) <= tol)
                    || self.nodes.iter().any(|&m| m > p && m <= r && self.fp(s, m).dist(up) <= tol);
                Ok(touching >= 2 || is_node)
            }
            EventKind::LocalMax => {
                let here = self.window_len(p)?;
                let a = t.arc(p);
                for d in [-LOCAL_MAX_STEP, LOCAL_MAX_STEP] {
                    let q = t.pos_at_arc((a + d).clamp(0.0, t.length()));
                    if self.window_len(q)? > here + tol {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            EventKind::Special1 | EventKind::Special2 | EventKind::Special3 => {
                let r = self.reach(p)?;
                if r <= p {
                    return Ok(false);
                }
                let segs = self.fsegs(s, p, r);
                let pp = self.fp(s, p);
                let rp = self.fp(s, r);
                let touches = |q: Point| segs.iter().any(|g| seg_dist(g, q) <= tol);
                match ev.kind {
                    EventKind::Special1 => {
                        let h1 = UnitSquare::from_top_right(pp);
                        Ok(rp.cheb(Point::new(pp.x - 1.0, pp.y - 1.0)) <= tol && rest_fits(&segs, h1))
                    }
                    EventKind::Special2 => {
                        let h1 = UnitSquare::from_top_left(pp);
                        Ok(touches(Point::new(pp.x + 1.0, pp.y - 1.0)) && rest_fits(&segs, h1))
                    }
                    _ => {
                        let h1 = UnitSquare::from_top_left(pp);
                        let h2 = UnitSquare::from_bottom_right(rp);
                        let c = h2.top_left;
                        Ok(h1.contains(c, tol)
                            && touches(Point::new(pp.x + 1.0, c.y))
                            && touches(Point::new(c.x, pp.y - 1.0))
                            && verify_covering(&segs, &Covering::new(vec![h1, h2]), tol))
                    }
                }
            }
        }
    }

    /// Windows `(e, j)`: a start inside edge `e` whose reach has `v_j` as
    /// its last vertex, so the window vertices are `v_{e+1}..=v_j`.
    fn windows(&self) -> Vec<(usize, usize)> {
        let t = self.traj();
        let mut out = Vec::new();
        for e in 0..t.n_edges() {
            let lo = last_vertex_at_or_before(t, self.vertex_reach[e]).max(e + 1);
            let hi = last_vertex_at_or_before(t, self.vertex_reach[e + 1]);
            out.extend((lo..=hi).map(|j| (e, j)));
        }
        out
    }

    /// For each vertex `v_j`, the earliest start whose reach is at or past
    /// `v_j`.
    pub fn reach_events(&mut self) -> Result<Vec<EventPoint>, QueryError> {
        let t = self.traj();
        let mut out = Vec::new();
        for j in 1..t.n_vertices() {
            let v = t.vertex_pos(j);
            let p = reach_start(self.idx, v, 2)?;
            let ev = EventPoint { pos: p, kind: EventKind::Reach, frame: Sym::IDENTITY, aux: Some(v) };
            self.keep(ev, &mut out)?;
        }
        Ok(out)
    }

    /// Starts level with the topmost vertex of their window.
    pub fn bounding_box_events(&mut self, s: Sym) -> Result<Vec<EventPoint>, QueryError> {
        let mut out = Vec::new();
        for (e, j) in self.windows() {
            let top = (e + 1..=j).map(|i| self.fv(s, i).y).fold(f64::NEG_INFINITY, f64::max);
            let (a, b) = (self.fv(s, e), self.fv(s, e + 1));
            if a.y == b.y {
                continue;
            }
            let f = (top - a.y) / (b.y - a.y);
            if f > 0.0 && f < 1.0 {
                let ev = EventPoint { pos: self.at(e, f), kind: EventKind::BoundingBox, frame: s, aux: None };
                self.keep(ev, &mut out)?;
            }
        }
        Ok(out)
    }

    /// Starts one unit left of a point `u` that sits one unit above the
    /// lowest window vertex.
    pub fn bridge_events(&mut self, s: Sym) -> Result<Vec<EventPoint>, QueryError> {
        let t = self.traj();
        let mut out = Vec::new();
        for (e, j) in self.windows() {
            let low = (e + 1..=j).map(|i| self.fv(s, i).y).fold(f64::INFINITY, f64::min);
            let line = low + 1.0;
            let (a, b) = (self.fv(s, e), self.fv(s, e + 1));
            if a.x == b.x {
                continue;
            }
            for k in e..=j.min(t.n_edges() - 1) {
                let g = self.fedge(s, k);
                let mut us = Vec::new();
                if g.a.y == g.b.y {
                    if g.a.y == line {
                        us.extend([(0.0, g.a), (1.0, g.b)]);
                    }
                } else {
                    let f = (line - g.a.y) / (g.b.y - g.a.y);
                    if (0.0..=1.0).contains(&f) {
                        us.push((f, g.at(f)));
                    }
                }
                for (fu, u) in us {
                    let f = (u.x - 1.0 - a.x) / (b.x - a.x);
                    if f > 0.0 && f < 1.0 {
                        let ev = EventPoint {
                            pos: self.at(e, f),
                            kind: EventKind::Bridge,
                            frame: s,
                            aux: Some(self.at(k, fu)),
                        };
                        self.keep(ev, &mut out)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Consecutive members of `base` as `(edge, f0, f1)`.
    fn intervals(&self, base: &[TrajPos]) -> Vec<(usize, f64, f64)> {
        base.windows(2)
            .filter_map(|w| {
                let (a, b) = (w[0], w[1]);
                let f1 = if b.edge == a.edge { b.frac } else { 1.0 };
                (f1 > a.frac).then_some((a.edge, a.frac, f1))
            })
            .collect()
    }

    /// Starts one unit left of a vertex or crossing on the upper envelope
    /// of their window, computed per interval of `base`.
    pub fn upper_envelope_events(&mut self, s: Sym, base: &[TrajPos]) -> Result<Vec<EventPoint>, QueryError> {
        let t = self.traj();
        let mut out = Vec::new();
        for (e, f0, f1) in self.intervals(base) {
            let (pa, pb) = (self.at(e, f0), self.at(e, f1));
            let (ra, rb) = (self.reach(pa)?, self.reach(pb)?);
            let (p0, p1) = (self.fp(s, pa), self.fp(s, pb));
            let xlo = p0.x.min(p1.x);
            // Vertices in every window of the interval must not lie left of it.
            let inner = t.vertex_range(pb, ra);
            if inner.clone().any(|i| i > e && self.fv(s, i).x < xlo - EVENT_TOL) {
                continue;
            }
            if p0.x == p1.x || rb <= pa {
                continue;
            }
            let segs = self.fsegs(s, pa, rb);
            let env = upper_envelope(&segs);
            let mut us: Vec<Point> = Vec::new();
            for pc in env.pieces() {
                us.push(Point::new(pc.t0, pc.v0));
                us.push(Point::new(pc.t1, pc.v1));
            }
            let lo = self.nodes.partition_point(|&m| m <= pa);
            let hi = self.nodes.partition_point(|&m| m <= rb);
            us.extend(self.nodes[lo..hi].iter().map(|&m| self.fp(s, m)));
            let xhi = p0.x.max(p1.x);
            for u in us {
                let x = u.x - 1.0;
                if x < xlo - EVENT_TOL || x > xhi + EVENT_TOL {
                    continue;
                }
                let tt = (x - p0.x) / (p1.x - p0.x);
                if !(tt > 0.0 && tt < 1.0) {
                    continue;
                }
                let pos = self.at(e, f0 + tt * (f1 - f0));
                let Some(aux) = locate(t, s, u, pa, rb) else { continue };
                let ev = EventPoint { pos, kind: EventKind::UpperEnvelope, frame: s, aux: Some(aux) };
                self.keep(ev, &mut out)?;
            }
        }
        Ok(out)
    }

    /// `arc(r(p)) - arc(p)`.
    fn window_len(&mut self, p: TrajPos) -> Result<f64, QueryError> {
        let t = self.traj();
        Ok(t.arc(self.reach(p)?) - t.arc(p))
    }

    /// Interior maxima of the window length inside each interval of
    /// `base`, found by sampling and golden-section refinement.
    pub fn local_max_events(&mut self, base: &[TrajPos]) -> Result<Vec<EventPoint>, QueryError> {
        const SAMPLES: usize = 16;
        let mut out = Vec::new();
        for (e, f0, f1) in self.intervals(base) {
            let mut vals = Vec::with_capacity(SAMPLES + 1);
            for i in 0..=SAMPLES {
                let f = f0 + (f1 - f0) * i as f64 / SAMPLES as f64;
                vals.push(self.window_len(self.at(e, f))?);
            }
            let ends = vals[0].max(vals[SAMPLES]);
            let best = (0..=SAMPLES).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
            let step = (f1 - f0) / SAMPLES as f64;
            let (mut lo, mut hi) = (f0 + step * best.saturating_sub(1) as f64, f0 + step * (best + 1).min(SAMPLES) as f64);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
            let (mut v1, mut v2) = (self.window_len(self.at(e, x1))?, self.window_len(self.at(e, x2))?);
            while hi - lo > 1e-14 {
                if v1 < v2 {
                    lo = x1;
                    (x1, v1) = (x2, v2);
                    x2 = lo + g * (hi - lo);
                    v2 = self.window_len(self.at(e, x2))?;
                } else {
                    hi = x2;
                    (x2, v2) = (x1, v1);
                    x1 = hi - g * (hi - lo);
                    v1 = self.window_len(self.at(e, x1))?;
                }
            }
            let (f, v) = if v1 >= v2 { (x1, v1) } else { (x2, v2) };
            if f > f0 && f < f1 && v > ends + LEN_GAIN {
                let ev = EventPoint { pos: self.at(e, f), kind: EventKind::LocalMax, frame: Sym::IDENTITY, aux: None };
                self.keep(ev, &mut out)?;
            }
        }
        Ok(out)
    }

    /// The three special configurations, solved per interval of `base` by
    /// sliding the square(s) with the start.
    pub fn special_events(&mut self, s: Sym, base: &[TrajPos]) -> Result<Vec<EventPoint>, QueryError> {
        let t = self.traj();
        let last_edge = t.n_edges() - 1;
        let mut out = Vec::new();
        for (e, f0, f1) in self.intervals(base) {
            let (pa, pb) = (self.at(e, f0), self.at(e, f1));
            let pm = self.at(e, 0.5 * (f0 + f1));
            let (ra, rb) = (self.reach(pa)?, self.reach(pb)?);
            self.reach(pm)?;
            if rb <= pa {
                continue;
            }
            let (p0, p1) = (self.fp(s, pa), self.fp(s, pb));
            let dp = sub(p1, p0);
            let q_edges: Vec<usize> = (ra.edge.min(last_edge)..=rb.edge.min(last_edge)).collect();
            let win: Vec<usize> = (e..=rb.edge.min(last_edge)).collect();
            let mut cands: Vec<(f64, EventKind, usize, Point)> = Vec::new();

            // 1: p top-right of H1, reach at its bottom-left.
            for &k in &q_edges {
                let g = self.fedge(s, k);
                let d = sub(g.b, g.a);
                let c0 = cross(sub(Point::new(p0.x - 1.0, p0.y - 1.0), g.a), d);
                if let Some(tt) = root(c0, cross(dp, d), norm1(dp) * norm1(d)) {
                    let p = p0.lerp(p1, tt);
                    cands.push((tt, EventKind::Special1, k, Point::new(p.x - 1.0, p.y - 1.0)));
                }
            }
            // 2: p top-left of H1, the trajectory through its bottom-right.
            for &k in &win {
                let g = self.fedge(s, k);
                let d = sub(g.b, g.a);
                let c0 = cross(sub(Point::new(p0.x + 1.0, p0.y - 1.0), g.a), d);
                if let Some(tt) = root(c0, cross(dp, d), norm1(dp) * norm1(d)) {
                    let p = p0.lerp(p1, tt);
                    cands.push((tt, EventKind::Special2, k, Point::new(p.x + 1.0, p.y - 1.0)));
                }
            }
            // 3: p top-left of H1, reach bottom-right of H2, and the
            // trajectory through both crossings of the two boundaries.
            let (xa, xb) = (p0.x.min(p1.x) + 1.0, p0.x.max(p1.x) + 1.0);
            let (ya, yb) = (p0.y.min(p1.y) - 1.0, p0.y.max(p1.y) - 1.0);
            let tol = EVENT_TOL;
            let b1s: Vec<usize> = win
                .iter()
                .copied()
                .filter(|&k| {
                    let r = self.fedge(s, k).bbox();
                    r.x_max >= xa - tol && r.x_min <= xb + tol && r.x_max > r.x_min
                })
                .collect();
            let b2s: Vec<usize> = win
                .iter()
                .copied()
                .filter(|&k| {
                    let r = self.fedge(s, k).bbox();
                    r.y_max >= ya - tol && r.y_min <= yb + tol && r.y_max > r.y_min
                })
                .collect();
            for &k1 in &b1s {
                let g1 = self.fedge(s, k1);
                let d1 = sub(g1.b, g1.a);
                let m1 = d1.y / d1.x;
                // b(t): height of g1 at x = p(t).x + 1
                let (beta0, beta1) = (g1.a.y + (p0.x + 1.0 - g1.a.x) * m1, dp.x * m1);
                for &k2 in &b2s {
                    let g2 = self.fedge(s, k2);
                    let d2 = sub(g2.b, g2.a);
                    let w2 = d2.x / d2.y;
                    // a(t): abscissa of g2 at y = p(t).y - 1
                    let (alpha0, alpha1) = (g2.a.x + (p0.y - 1.0 - g2.a.y) * w2, dp.y * w2);
                    for &kq in &q_edges {
                        let gq = self.fedge(s, kq);
                        let dq = sub(gq.b, gq.a);
                        let g0 = (alpha0 + 1.0 - gq.a.x) * dq.y - (beta0 - 1.0 - gq.a.y) * dq.x;
                        let gl = alpha1 * dq.y - beta1 * dq.x;
                        let scale = (alpha1.abs() + beta1.abs()).max(norm1(dp)) * norm1(dq);
                        let Some(tt) = root(g0, gl, scale) else { continue };
                        if !(-1e-12..=1.0 + 1e-12).contains(&tt) {
                            continue;
                        }
                        let p = p0.lerp(p1, tt);
                        let (a, b) = (alpha0 + alpha1 * tt, beta0 + beta1 * tt);
                        let inside = a >= p.x - tol && a <= p.x + 1.0 + tol && b >= p.y - 1.0 - tol && b <= p.y + tol;
                        if inside
                            && on_segment(&g1, Point::new(p.x + 1.0, b)).is_some()
                            && on_segment(&g2, Point::new(a, p.y - 1.0)).is_some()
                        {
                            cands.push((tt, EventKind::Special3, kq, Point::new(a + 1.0, b - 1.0)));
                        }
                    }
                }
            }
            for (tt, kind, k, q) in cands {
                if !(-1e-12..=1.0 + 1e-12).contains(&tt) {
                    continue;
                }
                let Some(fq) = on_segment(&self.fedge(s, k), q) else { continue };
                let ev = EventPoint { pos: self.at(e, f0 + tt * (f1 - f0)), kind, frame: s, aux: Some(self.at(k, fq)) };
                self.keep(ev, &mut out)?;
            }
        }
        Ok(out)
    }
}

/// Position of frame point `u` on `T[a, b]`, if it lies there.
fn locate(t: &Trajectory, s: Sym, u: Point, a: TrajPos, b: TrajPos) -> Option<TrajPos> {
    let inv = s.inv_point(u);
    let mut best: Option<(f64, TrajPos)> = None;
    for e in a.edge..=b.edge.min(t.n_edges() - 1) {
        let g = t.edge(e);
        let f = seg_param(&g, inv).clamp(0.0, 1.0);
        let d = g.at(f).dist(inv);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, TrajPos::new(e, f)));
        }
    }
    best.filter(|(d, _)| *d <= 1e-7).map(|(_, p)| t.normalize(p))
}

/// Whether the part of `segs` outside `h1` fits in one unit square.
fn rest_fits(segs: &[Segment], h1: UnitSquare) -> bool {
    let rest = uncovered_by(segs, h1, EVENT_TOL);
    match bounding_box(&rest) {
        Err(_) => true,
        Ok(b) => b.width() <= 1.0 + EVENT_TOL && b.height() <= 1.0 + EVENT_TOL,
    }
}

/// Merges `new` into the sorted member list. Positions closer than
/// [`EPS_REACH`] (global edge parameter) collapse onto an existing member,
/// else onto a vertex, else onto the earliest.
fn merge(t: &Trajectory, set: &mut CandidateStartSet, new: &[EventPoint], stage: u8) {
    let mut all: Vec<(TrajPos, u8)> = set.members.iter().copied().zip(set.stage.iter().copied()).collect();
    all.extend(new.iter().map(|ev| (t.normalize(ev.pos), stage)));
    all.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut members: Vec<TrajPos> = Vec::with_capacity(all.len());
    let mut stages: Vec<u8> = Vec::with_capacity(all.len());
    let mut anchor = f64::NEG_INFINITY;
    for (p, g) in all {
        let x = t.param(p);
        if x - anchor <= EPS_REACH {
            let k = members.len() - 1;
            let better = g < stages[k] || (g == stages[k] && p.frac == 0.0 && members[k].frac != 0.0);
            if better {
                members[k] = p;
                stages[k] = g;
            }
            continue;
        }
        anchor = x;
        members.push(p);
        stages.push(g);
    }
    set.members = members;
    set.stage = stages;
    set.events.extend_from_slice(new);
}

/// Dispatches one event kind for one frame. `base` is the previous stage
/// for upper envelope and special configuration events.
pub fn compute_events(
    ctx: &mut EventContext<'_>,
    kind: EventKind,
    frame: Sym,
    base: &[TrajPos],
) -> Result<Vec<EventPoint>, QueryError> {
    match kind {
        EventKind::Vertex => {
            let t = ctx.traj();
            Ok((0..t.n_vertices())
                .map(|i| EventPoint { pos: t.vertex_pos(i), kind, frame: Sym::IDENTITY, aux: None })
                .collect())
        }
        EventKind::Reach => ctx.reach_events(),
        EventKind::BoundingBox => ctx.bounding_box_events(frame),
        EventKind::Bridge => ctx.bridge_events(frame),
        EventKind::UpperEnvelope => {
            ctx.set_nodes(base.to_vec());
            ctx.upper_envelope_events(frame, base)
        }
        EventKind::LocalMax => ctx.local_max_events(base),
        EventKind::Special1 | EventKind::Special2 | EventKind::Special3 => {
            let evs = ctx.special_events(frame, base)?;
            Ok(evs.into_iter().filter(|e| e.kind == kind).collect())
        }
    }
}

/// Builds the staged candidate set: vertex, reach, bounding box and bridge
/// events; then upper envelope events over the first stage; then special
/// configuration events over the second; last, interior maxima of the
/// window length between the members gathered so far.
pub fn build_candidate_starts_with(ctx: &mut EventContext<'_>) -> Result<CandidateStartSet, QueryError> {
    let t = ctx.traj();
    let mut set = CandidateStartSet::default();
    let mut stage1 = compute_events(ctx, EventKind::Vertex, Sym::IDENTITY, &[])?;
    stage1.extend(ctx.reach_events()?);
    for s in Sym::all() {
        stage1.extend(ctx.bounding_box_events(s)?);
        stage1.extend(ctx.bridge_events(s)?);
    }
    merge(t, &mut set, &stage1, 1);

    let t1 = set.members.clone();
    ctx.set_nodes(t1.clone());
    let mut stage2 = Vec::new();
    for s in Sym::all() {
        stage2.extend(ctx.upper_envelope_events(s, &t1)?);
    }
    merge(t, &mut set, &stage2, 2);

    let t2 = set.members.clone();
    let mut stage3 = Vec::new();
    for s in Sym::all() {
        stage3.extend(ctx.special_events(s, &t2)?);
    }
    merge(t, &mut set, &stage3, 3);

    let t3 = set.members.clone();
    let extra = ctx.local_max_events(&t3)?;
    merge(t, &mut set, &extra, 3);
    Ok(set)
}

pub fn build_candidate_starts(idx: &TrajIndex) -> Result<CandidateStartSet, QueryError> {
    let mut ctx = EventContext::new(idx)?;
    build_candidate_starts_with(&mut ctx)
}
