//! Instance generators and brute-force oracles.
//!
//! The oracles only rely on the primitives in [`crate::geom_core`] and on
//! the offline decision procedures, never on the trajectory index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thiserror::Error;

use crate::cover_decision::coverable_2_eps;
use crate::geom_core::{
    bounding_box, clip_segment_to_square, verify_covering, Covering, Point, Segment, UnitSquare, EPS_GEOM,
};
use crate::traj_index::Trajectory;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point_in(r: &mut ChaCha8Rng, q: &UnitSquare) -> Point {
    let p = q.top_left;
    Point::new(p.x + r.gen_range(0.0..=1.0), p.y - r.gen_range(0.0..=1.0))
}

/// Samples `n` segments inside the union of `plant`.
fn fill(r: &mut ChaCha8Rng, plant: &[UnitSquare], n: usize) -> Vec<Segment> {
    let cov = Covering::new(plant.to_vec());
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let i = r.gen_range(0..plant.len());
        let a = point_in(r, &plant[i]);
        let kind = r.gen_range(0..10);
        let seg = if kind == 0 {
            Segment::point(a)
        } else if kind < 5 {
            Segment::new(a, point_in(r, &plant[i]))
        } else {
            let mut s = Segment::point(a);
            for _ in 0..20 {
                let j = r.gen_range(0..plant.len());
                let cand = Segment::new(a, point_in(r, &plant[j]));
                if verify_covering(&[cand], &cov, 0.0) {
                    s = cand;
                    break;
                }
            }
            s
        };
        out.push(seg);
    }
    out
}

/// `n` segments inside the union of `k` random unit squares whose top-left
/// corners lie in `[0, spread]^2`. Returns the segments and the plant.
pub fn gen_planted_coverable(k: usize, n: usize, seed: u64, spread: f64) -> (Vec<Segment>, Covering) {
    let mut r = rng(seed);
    let plant: Vec<UnitSquare> = (0..k)
        .map(|_| UnitSquare::new(r.gen_range(0.0..=spread), r.gen_range(0.0..=spread)))
        .collect();
    let segs = fill(&mut r, &plant, n);
    (segs, Covering::new(plant))
}

/// Four squares, one against each side of the bounding box and none in a
/// corner. The returned plant is ordered L, T, B, R.
pub fn gen_planted_one_per_side(n: usize, seed: u64) -> (Vec<Segment>, Covering) {
    let mut r = rng(seed);
    let w = r.gen_range(2.3..3.2);
    let h = r.gen_range(2.3..3.2);
    let l = UnitSquare::new(0.0, r.gen_range(1.25..h - 0.25));
    let t = UnitSquare::new(r.gen_range(0.25..w - 1.25), h);
    let b = UnitSquare::new(r.gen_range(0.25..w - 1.25), 1.0);
    let rr = UnitSquare::new(w - 1.0, r.gen_range(1.25..h - 0.25));
    let plant = vec![l, t, b, rr];
    // Pin each square to its side so the bounding box is [0, w] x [0, h].
    let mut segs = vec![
        Segment::point(Point::new(0.0, l.top_left.y - 0.5)),
        Segment::point(Point::new(t.top_left.x + 0.5, h)),
        Segment::point(Point::new(b.top_left.x + 0.5, 0.0)),
        Segment::point(Point::new(w, rr.top_left.y - 0.5)),
    ];
    segs.extend(fill(&mut r, &plant, n.saturating_sub(4)));
    (segs, Covering::new(plant))
}

/// `k + 1` points with pairwise Chebyshev distance above 1, so no `k`
/// squares cover them.
pub fn gen_separated_points(k: usize, seed: u64) -> Vec<Segment> {
    let mut r = rng(seed);
    let mut x = r.gen_range(-1.0..1.0);
    (0..=k)
        .map(|_| {
            let p = Point::new(x, r.gen_range(-2.0..2.0));
            x += r.gen_range(1.2..2.0);
            Segment::point(p)
        })
        .collect()
}

/// Separated points plus short segments next to them.
pub fn gen_separated_with_clutter(k: usize, seed: u64, clutter: usize) -> Vec<Segment> {
    let mut r = rng(seed ^ 0x5eed);
    let pts = gen_separated_points(k, seed);
    let mut out = pts.clone();
    for _ in 0..clutter {
        let p = pts[r.gen_range(0..pts.len())].a;
        let q = Point::new(p.x + r.gen_range(-0.05..0.05), p.y + r.gen_range(-0.05..0.05));
        out.push(Segment::new(p, q));
    }
    out
}

/// Random segments in `[0, size]^2` with lengths up to `max_len`.
pub fn gen_random_segments(n: usize, seed: u64, size: f64, max_len: f64) -> Vec<Segment> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let a = Point::new(r.gen_range(0.0..size), r.gen_range(0.0..size));
            let ang: f64 = r.gen_range(0.0..std::f64::consts::TAU);
            let len = r.gen_range(0.0..max_len);
            Segment::new(a, Point::new(a.x + len * ang.cos(), a.y + len * ang.sin()))
        })
        .collect()
}

/// Random walk with `n` vertices and steps of length up to `step`.
pub fn gen_random_walk(n: usize, step: f64, seed: u64) -> Vec<Point> {
    let mut r = rng(seed);
    let mut p = Point::new(0.0, 0.0);
    let mut out = Vec::with_capacity(n);
    out.push(p);
    while out.len() < n {
        let ang: f64 = r.gen_range(0.0..std::f64::consts::TAU);
        let len = r.gen_range(0.05 * step..=step);
        p = Point::new(p.x + len * ang.cos(), p.y + len * ang.sin());
        out.push(p);
    }
    out
}

/// Default tolerance re-exported for oracle callers.
pub const ORACLE_EPS: f64 = EPS_GEOM;

/// Containment slack of the sampling oracles. Matches the slack used by
/// the reach search so both sides judge the same boundary cases alike.
pub const SAMPLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledLongest {
    /// Start and end as arc length from the trajectory start.
    pub start: f64,
    pub end: f64,
    pub length: f64,
}

fn offline_coverable(traj: &Trajectory, a: f64, b: f64, k: usize) -> bool {
    let segs = traj.subsegments(traj.pos_at_arc(a), traj.pos_at_arc(b));
    match k {
        1 => bounding_box(&segs).is_ok_and(|r| r.width() <= 1.0 + SAMPLE_EPS && r.height() <= 1.0 + SAMPLE_EPS),
        _ => coverable_2_eps(&segs, SAMPLE_EPS).is_some(),
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// Sampled reach profile: for each of `samples_start` equally spaced starts
/// (by arc length), the furthest of `samples_end` equally spaced ends that
/// keeps the subtrajectory k-coverable under the offline decision
/// procedures. Returned as `(start, end)` arc-length pairs.
pub fn oracle_profile(traj: &Trajectory, k: usize, samples_start: usize, samples_end: usize) -> Vec<(f64, f64)> {
    assert!(k == 1 || k == 2, "sampling oracles support k = 1 or 2");
    let total = traj.length();
    let ends: Vec<f64> = grid(0.0, total, samples_end).collect();
    let mut out = Vec::with_capacity(samples_start);
    let mut j = 0;
    for s in grid(0.0, total, samples_start) {
        while j < ends.len() && ends[j] < s {
            j += 1;
        }
        // Ends before the current pointer stay coverable for later starts.
        while j + 1 < ends.len() && offline_coverable(traj, s, ends[j + 1], k) {
            j += 1;
        }
        out.push((s, if j < ends.len() && ends[j] >= s { ends[j] } else { s }));
    }
    out
}

/// Best pair of [`oracle_profile`], earliest start on ties. A lower bound
/// on the optimum.
pub fn oracle_longest(traj: &Trajectory, k: usize, samples_start: usize, samples_end: usize) -> SampledLongest {
    let mut best = SampledLongest { start: 0.0, end: 0.0, length: 0.0 };
    for (s, e) in oracle_profile(traj, k, samples_start, samples_end) {
        if e - s > best.length {
            best = SampledLongest { start: s, end: e, length: e - s };
        }
    }
    best
}

/// Reach of the start at arc length `start`, as arc length: a scan over
/// `samples` equally spaced ends followed by bisection inside the last
/// bracket.
pub fn oracle_reach(traj: &Trajectory, start: f64, k: usize, samples: usize) -> f64 {
    let total = traj.length();
    let ends: Vec<f64> = grid(start, total, samples).collect();
    let mut j = 0;
    while j + 1 < ends.len() && offline_coverable(traj, start, ends[j + 1], k) {
        j += 1;
    }
    if j + 1 == ends.len() {
        return total;
    }
    let (mut lo, mut hi) = (ends[j], ends[j + 1]);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if offline_coverable(traj, start, mid, k) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * total.max(1.0) {
            break;
        }
    }
    lo
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridVerdict {
    Yes,
    No,
    /// Not decided at this resolution: squares grown by twice the
    /// resolution cover the input but exact squares on the grid do not.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid resolution must be positive, got {0}")]
    Resolution(f64),
}

/// Exhaustive placement search on a grid. The square covering the leftmost
/// uncovered point may be shifted until its left side passes through that
/// point, so only the top coordinate is searched: over the endpoint
/// coordinates, their offsets by one, and a grid of step `resolution`.
pub fn oracle_decide_grid(segments: &[Segment], k: usize, resolution: f64) -> Result<GridVerdict, OracleError> {
    if resolution.is_nan() || resolution <= 0.0 {
        return Err(OracleError::Resolution(resolution));
    }
    if segments.is_empty() {
        return Ok(GridVerdict::Yes);
    }
    let mut ys: Vec<f64> = segments.iter().flat_map(|s| [s.a.y, s.b.y]).flat_map(|y| [y, y + 1.0]).collect();
    let (lo, hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &y| (l.min(y), h.max(y)));
    let steps = ((hi - lo) / resolution).ceil() as usize;
    ys.extend((0..=steps).map(|i| lo + i as f64 * resolution));
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    if grid_search(segments, k, &ys, 0.0) {
        Ok(GridVerdict::Yes)
    } else if grid_search(segments, k, &ys, 2.0 * resolution) {
        Ok(GridVerdict::Boundary)
    } else {
        Ok(GridVerdict::No)
    }
}

fn grid_search(segs: &[Segment], k: usize, tops: &[f64], grow: f64) -> bool {
    let segs: Vec<Segment> = segs.iter().copied().filter(|s| s.len() > 1e-12 || s.is_point()).collect();
    let Some(p) = segs.iter().flat_map(|s| [s.a, s.b]).min_by(|a, b| a.x.total_cmp(&b.x)) else {
        return true;
    };
    if k == 0 {
        return false;
    }
    let lo = tops.partition_point(|&y| y < p.y - grow);
    let hi = tops.partition_point(|&y| y <= p.y + 1.0 + grow);
    tops[lo..hi].iter().any(|&top| {
        let sq = UnitSquare::new(p.x, top);
        let rest: Vec<Segment> = segs
            .iter()
            .flat_map(|s| clip_segment_to_square(*s, sq, grow + EPS_GEOM).uncovered)
            .filter(|u| u.len() > 1e-12 || u.is_point())
            .collect();
        grid_search(&rest, k - 1, tops, grow)
    })
}
