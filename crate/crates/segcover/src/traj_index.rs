//! Trajectories and the three range structures over them.
//!
//! Tool 1 answers bounding boxes of subtrajectories, Tool 2 the extreme
//! crossing of a subtrajectory with an axis-parallel line and Tool 3 the
//! extreme vertex of a subtrajectory inside a rectangle.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::geom_core::{Dir, Point, Rect, Segment, Sym, Transform};
use crate::pwl::{pwl_max, upper_envelope, Pwl};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrajError {
    #[error("trajectory needs >=2 vertices")]
    TooFewVertices,
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),
    #[error("query range is reversed ({0} > {1})")]
    Reversed(TrajPos, TrajPos),
    #[error("position {0} is outside the trajectory")]
    OutOfRange(TrajPos),
    #[error("bad position {0:?}, expected EDGE:FRAC")]
    BadPos(String),
    #[error("bad snapshot: {0}")]
    Snapshot(String),
}

/// A position on a trajectory: a fraction along a 0-based edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajPos {
    pub edge: usize,
    pub frac: f64,
}

impl TrajPos {
    pub const fn new(edge: usize, frac: f64) -> Self {
        TrajPos { edge, frac }
    }
}

impl Eq for TrajPos {}

impl PartialOrd for TrajPos {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TrajPos {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edge.cmp(&other.edge).then(self.frac.total_cmp(&other.frac))
    }
}

impl fmt::Display for TrajPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.edge, self.frac)
    }
}

impl FromStr for TrajPos {
    type Err = TrajError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TrajError::BadPos(s.to_string());
        let (e, f) = s.split_once(':').ok_or_else(bad)?;
        let edge = e.trim().parse().map_err(|_| bad())?;
        let frac: f64 = f.trim().parse().map_err(|_| bad())?;
        if !(0.0..=1.0).contains(&frac) {
            return Err(bad());
        }
        Ok(TrajPos { edge, frac })
    }
}

/// A polygonal curve given by its vertices in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    vertices: Vec<Point>,
    cum: Vec<f64>,
    dropped: usize,
}

impl Trajectory {
    /// Validates and normalizes `vertices`, dropping repeated consecutive
    /// vertices. A trajectory whose vertices all coincide keeps a single
    /// zero-length edge.
    pub fn new(vertices: Vec<Point>) -> Result<Self, TrajError> {
        if vertices.len() < 2 {
            return Err(TrajError::TooFewVertices);
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(TrajError::NonFinite(i));
        }
        let total = vertices.len();
        let mut vs: Vec<Point> = Vec::with_capacity(total);
        for p in vertices {
            if vs.last() != Some(&p) {
                vs.push(p);
            }
        }
        if vs.len() == 1 {
            vs.push(vs[0]);
        }
        let dropped = total - vs.len();
        let mut cum = Vec::with_capacity(vs.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in vs.windows(2) {
            acc += w[0].dist(w[1]);
            cum.push(acc);
        }
        Ok(Trajectory { vertices: vs, cum, dropped })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Number of vertices removed during normalization.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn edge(&self, i: usize) -> Segment {
        Segment::new(self.vertices[i], self.vertices[i + 1])
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        self.vertices.windows(2).map(|w| Segment::new(w[0], w[1]))
    }

    pub fn start(&self) -> TrajPos {
        TrajPos::new(0, 0.0)
    }

    pub fn end(&self) -> TrajPos {
        TrajPos::new(self.n_edges() - 1, 1.0)
    }

    /// Position of vertex `i` in normalized form.
    pub fn vertex_pos(&self, i: usize) -> TrajPos {
        if i + 1 >= self.vertices.len() {
            self.end()
        } else {
            TrajPos::new(i, 0.0)
        }
    }

    /// Clamps into range and moves `frac == 1` to the start of the next edge.
    pub fn normalize(&self, p: TrajPos) -> TrajPos {
        let last = self.n_edges() - 1;
        if p.edge > last {
            return self.end();
        }
        let frac = p.frac.clamp(0.0, 1.0);
        if frac >= 1.0 && p.edge < last {
            TrajPos::new(p.edge + 1, 0.0)
        } else {
            TrajPos::new(p.edge, frac)
        }
    }

    pub fn check(&self, p: TrajPos) -> Result<TrajPos, TrajError> {
        if p.edge >= self.n_edges() || !(0.0..=1.0).contains(&p.frac) {
            return Err(TrajError::OutOfRange(p));
        }
        Ok(self.normalize(p))
    }

    pub fn point(&self, p: TrajPos) -> Point {
        self.edge(p.edge).at(p.frac)
    }

    /// Arc length from the start to `p`.
    pub fn arc(&self, p: TrajPos) -> f64 {
        let e = p.edge.min(self.n_edges() - 1);
        self.cum[e] + p.frac * (self.cum[e + 1] - self.cum[e])
    }

    pub fn length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Position at arc length `s` (clamped). Zero-length edges are skipped.
    pub fn pos_at_arc(&self, s: f64) -> TrajPos {
        if s <= 0.0 {
            return self.start();
        }
        if s >= self.length() {
            return self.end();
        }
        let i = self.cum.partition_point(|&c| c <= s) - 1;
        let len = self.cum[i + 1] - self.cum[i];
        self.normalize(TrajPos::new(i, (s - self.cum[i]) / len))
    }

    /// Global parameter in `[0, n_edges]`, used for sampling.
    pub fn param(&self, p: TrajPos) -> f64 {
        p.edge as f64 + p.frac
    }

    pub fn pos_at_param(&self, t: f64) -> TrajPos {
        let m = self.n_edges();
        let t = t.clamp(0.0, m as f64);
        let e = (t.floor() as usize).min(m - 1);
        self.normalize(TrajPos::new(e, t - e as f64))
    }

    /// The pieces of `T[a, b]`, one segment per edge touched.
    pub fn subsegments(&self, a: TrajPos, b: TrajPos) -> Vec<Segment> {
        if b <= a {
            let p = self.point(a);
            return vec![Segment::point(p)];
        }
        (a.edge..=b.edge)
            .map(|e| {
                let f0 = if e == a.edge { a.frac } else { 0.0 };
                let f1 = if e == b.edge { b.frac } else { 1.0 };
                self.edge(e).sub(f0, f1)
            })
            .collect()
    }

    /// Vertex indices `i` with `a <= v_i <= b`.
    pub fn vertex_range(&self, a: TrajPos, b: TrajPos) -> Range<usize> {
        let lo = if a.frac == 0.0 { a.edge } else { a.edge + 1 };
        let hi = if b.frac == 1.0 { b.edge + 2 } else { b.edge + 1 };
        lo..hi.max(lo)
    }

    /// Sub-trajectory between two positions as a new trajectory.
    pub fn extract(&self, a: TrajPos, b: TrajPos) -> Trajectory {
        let segs = self.subsegments(a, b);
        let mut vs = vec![segs[0].a];
        vs.extend(segs.iter().map(|s| s.b));
        Trajectory::new(vs).expect("extracted vertices are finite")
    }
}

const LEAF: usize = 16;

#[derive(Debug, Clone)]
struct Node {
    edges: Range<usize>,
    kids: Option<(usize, usize)>,
    bbox: Rect,
    env: [Option<Pwl>; 4],
}

#[derive(Debug, Clone, Copy)]
struct KdBox {
    idx: (usize, usize),
    rect: Rect,
}

/// Tools 1 to 3 over one trajectory. Immutable after construction.
#[derive(Debug, Clone)]
pub struct TrajIndex {
    traj: Trajectory,
    nodes: Vec<Node>,
    /// Edges in each of the four direction frames.
    frames: [Vec<Segment>; 4],
    kd: Vec<(usize, Point)>,
    kd_box: Vec<KdBox>,
}

fn dir_slot(d: Dir) -> usize {
    match d {
        Dir::Up => 0,
        Dir::Down => 1,
        Dir::Left => 2,
        Dir::Right => 3,
    }
}

pub fn build_index(traj: &Trajectory) -> TrajIndex {
    TrajIndex::new(traj.clone())
}

impl TrajIndex {
    pub fn new(traj: Trajectory) -> Self {
        let edges: Vec<Segment> = traj.edges().collect();
        let frames = Dir::ALL.map(|d| edges.iter().map(|e| e.apply(d.sym())).collect::<Vec<_>>());
        let mut idx = TrajIndex { traj, nodes: Vec::new(), frames, kd: Vec::new(), kd_box: Vec::new() };
        idx.build_node(0..edges.len());
        idx.kd = idx.traj.vertices.iter().copied().enumerate().collect();
        idx.kd_box = vec![KdBox { idx: (0, 0), rect: Rect::at_point(Point::new(0.0, 0.0)) }; idx.kd.len()];
        let n = idx.kd.len();
        idx.build_kd(0, n, 0);
        idx
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }

    fn build_node(&mut self, edges: Range<usize>) -> usize {
        let id = self.nodes.len();
        let bbox = edges.clone().map(|e| self.traj.edge(e).bbox()).reduce(|a, b| a.union(&b)).unwrap();
        self.nodes.push(Node { edges: edges.clone(), kids: None, bbox, env: Default::default() });
        if edges.len() > 1 {
            let mid = edges.start + edges.len() / 2;
            let l = self.build_node(edges.start..mid);
            let r = self.build_node(mid..edges.end);
            self.nodes[id].kids = Some((l, r));
            if edges.len() > LEAF {
                for s in 0..4 {
                    let env = self.child_env(l, s, edges.start..mid);
                    let env = pwl_max(&env, &self.child_env(r, s, mid..edges.end));
                    self.nodes[id].env[s] = Some(env);
                }
            }
        }
        id
    }

    fn child_env(&self, node: usize, s: usize, edges: Range<usize>) -> Pwl {
        match &self.nodes[node].env[s] {
            Some(e) => e.clone(),
            None => upper_envelope(&self.frames[s][edges]),
        }
    }

    fn build_kd(&mut self, lo: usize, hi: usize, depth: usize) {
        if lo >= hi {
            return;
        }
        let m = (lo + hi) / 2;
        let key = |v: &(usize, Point)| -> f64 {
            match depth % 3 {
                0 => v.0 as f64,
                1 => v.1.x,
                _ => v.1.y,
            }
        };
        self.kd[lo..hi].select_nth_unstable_by(m - lo, |a, b| key(a).total_cmp(&key(b)));
        let slice = &self.kd[lo..hi];
        let mut rect = Rect::at_point(slice[0].1);
        let (mut i0, mut i1) = (usize::MAX, 0);
        for (i, p) in slice {
            rect.add_point(*p);
            i0 = i0.min(*i);
            i1 = i1.max(*i);
        }
        self.kd_box[m] = KdBox { idx: (i0, i1), rect };
        self.build_kd(lo, m, depth + 1);
        self.build_kd(m + 1, hi, depth + 1);
    }

    /// Node ranges covering the full edges `lo..hi`, left to right.
    pub fn canonical_ranges(&self, lo: usize, hi: usize) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        self.collect(0, lo, hi, &mut |n| out.push(self.nodes[n].edges.clone()));
        out
    }

    fn collect(&self, n: usize, lo: usize, hi: usize, f: &mut dyn FnMut(usize)) {
        let r = &self.nodes[n].edges;
        if hi <= r.start || r.end <= lo || lo >= hi {
            return;
        }
        if lo <= r.start && r.end <= hi {
            f(n);
            return;
        }
        if let Some((a, b)) = self.nodes[n].kids {
            self.collect(a, lo, hi, f);
            self.collect(b, lo, hi, f);
        }
    }

    /// Stored node aggregates: edge range, bounding box and the envelope
    /// in the frame of `dir` when the node is large enough to keep one.
    pub fn node_aggregates(&self, dir: Dir) -> impl Iterator<Item = (Range<usize>, Rect, Option<&Pwl>)> {
        let s = dir_slot(dir);
        self.nodes.iter().map(move |n| (n.edges.clone(), n.bbox, n.env[s].as_ref()))
    }

    fn range(&self, a: TrajPos, b: TrajPos) -> Result<(TrajPos, TrajPos), TrajError> {
        let a = self.traj.check(a)?;
        let b = self.traj.check(b)?;
        if a > b {
            return Err(TrajError::Reversed(a, b));
        }
        Ok((a, b))
    }

    /// Partial end edges and the range of whole edges strictly between.
    fn split(&self, a: TrajPos, b: TrajPos) -> (Vec<Segment>, Range<usize>) {
        if a.edge == b.edge {
            return (vec![self.traj.edge(a.edge).sub(a.frac, b.frac)], 0..0);
        }
        let mut ends = vec![self.traj.edge(a.edge).sub(a.frac, 1.0)];
        if b.frac > 0.0 {
            ends.push(self.traj.edge(b.edge).sub(0.0, b.frac));
        }
        (ends, a.edge + 1..b.edge)
    }

    /// Tool 1: bounding box of `T[a, b]`.
    pub fn query_bbox(&self, a: TrajPos, b: TrajPos) -> Result<Rect, TrajError> {
        let (a, b) = self.range(a, b)?;
        let (ends, mid) = self.split(a, b);
        let mut r = ends[0].bbox();
        for e in &ends[1..] {
            r = r.union(&e.bbox());
        }
        self.collect(0, mid.start, mid.end, &mut |n| r = r.union(&self.nodes[n].bbox));
        Ok(r)
    }

    /// Tool 2: the extreme point of `T[a, b]` on an axis-parallel line.
    /// `Up`/`Down` take the vertical line `x = c` and return its highest or
    /// lowest crossing, `Left`/`Right` take the horizontal line `y = c`.
    pub fn query_envelope(&self, a: TrajPos, b: TrajPos, c: f64, dir: Dir) -> Result<Option<Point>, TrajError> {
        let (a, b) = self.range(a, b)?;
        let sym = dir.sym();
        let s = dir_slot(dir);
        let probe = match dir {
            Dir::Up | Dir::Down => Point::new(c, 0.0),
            Dir::Left | Dir::Right => Point::new(0.0, c),
        };
        let cx = sym.point(probe).x;
        let (ends, mid) = self.split(a, b);
        let mut best: Option<f64> = None;
        let mut take = |v: Option<f64>| {
            if let Some(v) = v {
                best = Some(best.map_or(v, |o: f64| o.max(v)));
            }
        };
        for e in &ends {
            take(crossing_top(&e.apply(sym), cx));
        }
        self.collect(0, mid.start, mid.end, &mut |n| {
            let node = &self.nodes[n];
            match &node.env[s] {
                Some(env) => take(env.eval(cx)),
                None => {
                    for e in &self.frames[s][node.edges.clone()] {
                        take(crossing_top(e, cx));
                    }
                }
            }
        });
        Ok(best.map(|y| sym.inv_point(Point::new(cx, y))))
    }

    /// Tool 3: the extreme vertex `v_i` with `a <= v_i <= b` inside the closed
    /// rectangle `rect`. Ties go to the smaller cross coordinate, then to the
    /// smaller vertex index.
    pub fn query_extreme_vertex(&self, a: TrajPos, b: TrajPos, rect: &Rect, dir: Dir) -> Result<Option<Point>, TrajError> {
        Ok(self.extreme_vertex_index(a, b, rect, dir)?.map(|i| self.traj.vertices[i]))
    }

    pub fn extreme_vertex_index(&self, a: TrajPos, b: TrajPos, rect: &Rect, dir: Dir) -> Result<Option<usize>, TrajError> {
        let (a, b) = self.range(a, b)?;
        let vr = self.traj.vertex_range(a, b);
        if vr.is_empty() {
            return Ok(None);
        }
        let mut best: Option<(Point, usize)> = None;
        self.kd_search(0, self.kd.len(), vr.start, vr.end - 1, rect, dir.sym(), &mut best);
        Ok(best.map(|(_, i)| i))
    }

    #[allow(clippy::too_many_arguments)]
    fn kd_search(&self, lo: usize, hi: usize, i0: usize, i1: usize, rect: &Rect, sym: Sym, best: &mut Option<(Point, usize)>) {
        if lo >= hi {
            return;
        }
        let m = (lo + hi) / 2;
        let bx = self.kd_box[m];
        if bx.idx.1 < i0 || bx.idx.0 > i1 || rect.intersect(&bx.rect).is_none() {
            return;
        }
        if let Some((bp, _)) = best {
            if sym.rect(&bx.rect).y_max < bp.y {
                return;
            }
        }
        let (i, p) = self.kd[m];
        if (i0..=i1).contains(&i) && rect.contains(p, 0.0) {
            let q = sym.point(p);
            let better = match *best {
                None => true,
                Some((bp, bi)) => q.y.total_cmp(&bp.y).then(bp.x.total_cmp(&q.x)).then(bi.cmp(&i)) == Ordering::Greater,
            };
            if better {
                *best = Some((q, i));
            }
        }
        self.kd_search(lo, m, i0, i1, rect, sym, best);
        self.kd_search(m + 1, hi, i0, i1, rect, sym, best);
    }

    /// Snapshot holding only the trajectory; aggregates are rebuilt on load.
    pub fn snapshot(&self) -> Value {
        json!({
            "format": "segcover-index",
            "version": 1,
            "vertices": self.traj.vertices.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
        })
    }

    pub fn from_snapshot(v: &Value) -> Result<TrajIndex, TrajError> {
        let bad = |m: &str| TrajError::Snapshot(m.to_string());
        if v.get("format").and_then(Value::as_str) != Some("segcover-index") {
            return Err(bad("missing format tag"));
        }
        if v.get("version").and_then(Value::as_u64) != Some(1) {
            return Err(bad("unsupported version"));
        }
        let vs = v.get("vertices").and_then(Value::as_array).ok_or_else(|| bad("missing vertices"))?;
        let pts = vs
            .iter()
            .map(|p| {
                let x = p.get(0).and_then(Value::as_f64);
                let y = p.get(1).and_then(Value::as_f64);
                x.zip(y).map(|(x, y)| Point::new(x, y)).ok_or_else(|| bad("vertex is not a pair of numbers"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TrajIndex::new(Trajectory::new(pts)?))
    }
}

/// Highest point of `e` on the vertical line `x = c`.
pub(crate) fn crossing_top(e: &Segment, c: f64) -> Option<f64> {
    let (l, r) = if e.a.x <= e.b.x { (e.a, e.b) } else { (e.b, e.a) };
    if c < l.x || c > r.x {
        return None;
    }
    if l.x == r.x {
        return Some(l.y.max(r.y));
    }
    if c == l.x {
        return Some(l.y);
    }
    if c == r.x {
        return Some(r.y);
    }
    Some(l.y + (r.y - l.y) * (c - l.x) / (r.x - l.x))
}
