//! Planar primitives, square clipping and witness checking.

use std::fmt;

use thiserror::Error;

/// Global containment tolerance. Squares are closed, so points within this
/// distance of a square count as inside it.
pub const EPS_GEOM: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("empty instance")]
    EmptyInstance,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    /// L-infinity distance.
    pub fn cheb(&self, o: Point) -> f64 {
        (self.x - o.x).abs().max((self.y - o.y).abs())
    }

    pub fn lerp(&self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn from_coords(ax: f64, ay: f64, bx: f64, by: f64) -> Self {
        Segment::new(Point::new(ax, ay), Point::new(bx, by))
    }

    pub fn point(p: Point) -> Self {
        Segment::new(p, p)
    }

    pub fn len(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn is_point(&self) -> bool {
        self.a == self.b
    }

    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    pub fn sub(&self, t0: f64, t1: f64) -> Segment {
        Segment::new(self.at(t0), self.at(t1))
    }

    pub fn bbox(&self) -> Rect {
        Rect::from_points(self.a, self.b)
    }

    /// Parameter interval of the part of the segment inside the closed
    /// rectangle, or `None` when they are disjoint.
    pub fn clip_params(&self, r: &Rect) -> Option<(f64, f64)> {
        let dx = self.b.x - self.a.x;
        let dy = self.b.y - self.a.y;
        let mut t0 = 0.0f64;
        let mut t1 = 1.0f64;
        for (p, q) in [
            (-dx, self.a.x - r.x_min),
            (dx, r.x_max - self.a.x),
            (-dy, self.a.y - r.y_min),
            (dy, r.y_max - self.a.y),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let t = q / p;
                if p < 0.0 {
                    t0 = t0.max(t);
                } else {
                    t1 = t1.min(t);
                }
            }
        }
        if t0 > t1 {
            None
        } else {
            Some((t0, t1))
        }
    }
}

/// Axis-aligned rectangle with closed sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect { x_min, x_max, y_min, y_max }
    }

    pub fn from_points(a: Point, b: Point) -> Self {
        Rect::new(a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y))
    }

    pub fn at_point(p: Point) -> Self {
        Rect::new(p.x, p.x, p.y, p.y)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn union(&self, o: &Rect) -> Rect {
        Rect::new(
            self.x_min.min(o.x_min),
            self.x_max.max(o.x_max),
            self.y_min.min(o.y_min),
            self.y_max.max(o.y_max),
        )
    }

    pub fn add_point(&mut self, p: Point) {
        self.x_min = self.x_min.min(p.x);
        self.x_max = self.x_max.max(p.x);
        self.y_min = self.y_min.min(p.y);
        self.y_max = self.y_max.max(p.y);
    }

    pub fn inflate(&self, d: f64) -> Rect {
        Rect::new(self.x_min - d, self.x_max + d, self.y_min - d, self.y_max + d)
    }

    pub fn contains(&self, p: Point, eps: f64) -> bool {
        p.x >= self.x_min - eps
            && p.x <= self.x_max + eps
            && p.y >= self.y_min - eps
            && p.y <= self.y_max + eps
    }

    /// Intersection, `None` when empty.
    pub fn intersect(&self, o: &Rect) -> Option<Rect> {
        let r = Rect::new(
            self.x_min.max(o.x_min),
            self.x_max.min(o.x_max),
            self.y_min.max(o.y_min),
            self.y_max.min(o.y_max),
        );
        (r.x_min <= r.x_max && r.y_min <= r.y_max).then_some(r)
    }

    pub fn top_left(&self) -> Point {
        Point::new(self.x_min, self.y_max)
    }
}

/// Unit square stored by its top-left corner; occupies
/// `[x, x + 1] x [y - 1, y]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSquare {
    pub top_left: Point,
}

impl UnitSquare {
    pub const fn new(x: f64, y: f64) -> Self {
        UnitSquare { top_left: Point::new(x, y) }
    }

    pub fn from_top_left(p: Point) -> Self {
        UnitSquare { top_left: p }
    }

    pub fn from_bottom_left(p: Point) -> Self {
        UnitSquare::new(p.x, p.y + 1.0)
    }

    pub fn from_top_right(p: Point) -> Self {
        UnitSquare::new(p.x - 1.0, p.y)
    }

    pub fn from_bottom_right(p: Point) -> Self {
        UnitSquare::new(p.x - 1.0, p.y + 1.0)
    }

    pub fn rect(&self) -> Rect {
        let p = self.top_left;
        Rect::new(p.x, p.x + 1.0, p.y - 1.0, p.y)
    }

    pub fn contains(&self, p: Point, eps: f64) -> bool {
        self.rect().contains(p, eps)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> UnitSquare {
        UnitSquare::new(self.top_left.x + dx, self.top_left.y + dy)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Covering {
    pub squares: Vec<UnitSquare>,
}

impl Covering {
    pub fn new(squares: Vec<UnitSquare>) -> Self {
        Covering { squares }
    }

    pub fn empty() -> Self {
        Covering::default()
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn contains(&self, p: Point, eps: f64) -> bool {
        self.squares.iter().any(|s| s.contains(p, eps))
    }
}

pub fn bounding_box(segments: &[Segment]) -> Result<Rect, GeomError> {
    let (first, rest) = segments.split_first().ok_or(GeomError::EmptyInstance)?;
    let mut r = first.bbox();
    for s in rest {
        r.add_point(s.a);
        r.add_point(s.b);
    }
    Ok(r)
}

/// Result of clipping a segment against one square.
#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    pub covered: Option<Segment>,
    pub uncovered: Vec<Segment>,
}

/// Splits `seg` into the part inside `sq` (inflated by `eps`) and the at most
/// two parts outside it. Zero-length outside parts are dropped.
pub fn clip_segment_to_square(seg: Segment, sq: UnitSquare, eps: f64) -> Clip {
    match seg.clip_params(&sq.rect().inflate(eps)) {
        None => Clip { covered: None, uncovered: vec![seg] },
        Some((t0, t1)) => {
            let mut uncovered = Vec::new();
            if t0 > 0.0 {
                uncovered.push(seg.sub(0.0, t0));
            }
            if t1 < 1.0 {
                uncovered.push(seg.sub(t1, 1.0));
            }
            Clip { covered: Some(seg.sub(t0, t1)), uncovered }
        }
    }
}

/// Every segment lies in the union of the squares, up to `eps`.
pub fn verify_covering(segments: &[Segment], cov: &Covering, eps: f64) -> bool {
    segments.iter().all(|s| segment_covered(s, &cov.squares, eps))
}

fn segment_covered(seg: &Segment, squares: &[UnitSquare], eps: f64) -> bool {
    let mut ivs: Vec<(f64, f64)> = squares
        .iter()
        .filter_map(|q| seg.clip_params(&q.rect().inflate(eps)))
        .collect();
    if ivs.is_empty() {
        return false;
    }
    let len = seg.len();
    if len == 0.0 {
        return true;
    }
    let gap = eps / len;
    ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reach = 0.0;
    for (t0, t1) in ivs {
        if t0 > reach + gap {
            return false;
        }
        reach = f64::max(reach, t1);
    }
    reach >= 1.0 - gap
}

/// Cardinal direction used to reduce directional constructions to the
/// canonical upward case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Up,
    Down,
    Left,
    Right,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::Up, Dir::Down, Dir::Left, Dir::Right];

    pub fn sym(self) -> Sym {
        match self {
            Dir::Up => Sym::IDENTITY,
            Dir::Down => Sym { swap: false, neg_x: true, neg_y: true },
            Dir::Left => Sym { swap: true, neg_x: false, neg_y: true },
            Dir::Right => Sym { swap: true, neg_x: true, neg_y: false },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dir::Up => "up",
            Dir::Down => "down",
            Dir::Left => "left",
            Dir::Right => "right",
        }
    }
}

/// One of the 8 symmetries of the square: optional coordinate swap followed
/// by optional negation of each coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sym {
    pub swap: bool,
    pub neg_x: bool,
    pub neg_y: bool,
}

impl Sym {
    pub const IDENTITY: Sym = Sym { swap: false, neg_x: false, neg_y: false };

    pub fn all() -> [Sym; 8] {
        let mut out = [Sym::IDENTITY; 8];
        for (i, s) in out.iter_mut().enumerate() {
            *s = Sym { swap: i & 4 != 0, neg_x: i & 2 != 0, neg_y: i & 1 != 0 };
        }
        out
    }

    pub fn point(&self, p: Point) -> Point {
        let (mut x, mut y) = if self.swap { (p.y, p.x) } else { (p.x, p.y) };
        if self.neg_x {
            x = -x;
        }
        if self.neg_y {
            y = -y;
        }
        Point::new(x, y)
    }

    pub fn inverse(&self) -> Sym {
        if self.swap {
            Sym { swap: true, neg_x: self.neg_y, neg_y: self.neg_x }
        } else {
            *self
        }
    }

    pub fn inv_point(&self, p: Point) -> Point {
        self.inverse().point(p)
    }

    pub fn rect(&self, r: &Rect) -> Rect {
        Rect::from_points(
            self.point(Point::new(r.x_min, r.y_min)),
            self.point(Point::new(r.x_max, r.y_max)),
        )
    }

    pub fn square(&self, s: &UnitSquare) -> UnitSquare {
        UnitSquare::from_top_left(self.rect(&s.rect()).top_left())
    }
}

/// Objects that can be mapped by a symmetry of the square.
pub trait Transform: Sized {
    fn apply(&self, s: Sym) -> Self;
}

impl Transform for Point {
    fn apply(&self, s: Sym) -> Self {
        s.point(*self)
    }
}

impl Transform for Segment {
    fn apply(&self, s: Sym) -> Self {
        Segment::new(s.point(self.a), s.point(self.b))
    }
}

impl Transform for Rect {
    fn apply(&self, s: Sym) -> Self {
        s.rect(self)
    }
}

impl Transform for UnitSquare {
    fn apply(&self, s: Sym) -> Self {
        s.square(self)
    }
}

impl Transform for Covering {
    fn apply(&self, s: Sym) -> Self {
        Covering::new(self.squares.iter().map(|q| q.apply(s)).collect())
    }
}

impl<T: Transform> Transform for Vec<T> {
    fn apply(&self, s: Sym) -> Self {
        self.iter().map(|x| x.apply(s)).collect()
    }
}

pub fn apply_all<T: Transform>(xs: &[T], s: Sym) -> Vec<T> {
    xs.iter().map(|x| x.apply(s)).collect()
}

/// Maps `obj` so that direction `dir` becomes the canonical upward direction.
pub fn transform_cardinal<T: Transform>(obj: &T, dir: Dir) -> T {
    obj.apply(dir.sym())
}

pub fn inverse_cardinal<T: Transform>(obj: &T, dir: Dir) -> T {
    obj.apply(dir.sym().inverse())
}
