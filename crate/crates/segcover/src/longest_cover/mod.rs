//! Longest 1- and 2-coverable subtrajectories.
//!
//! For k = 1 a finite family of candidate squares is scored by the run of
//! the trajectory each one contains. For k = 2 the optimum starts at one of
//! a staged set of candidate starting points; each candidate is paired with
//! its reach and the longest pair wins.

mod events;
mod one;
mod reach;

pub use events::{
    build_candidate_starts, build_candidate_starts_with, compute_events, CandidateStartSet, EventContext, EventKind,
    EventPoint, EVENT_TOL,
};
pub use one::{
    best_candidate, candidate_squares, longest_1coverable, opposite_corner_square, run_through, Candidate,
    CandidateSquares, CornerPair, Family, Longest1,
};
pub use reach::{reach_all_vertices, reach_all_vertices_2, reach_point, reach_start, ReachTable, EPS_REACH};

use crate::geom_core::{verify_covering, Covering};
use crate::subtraj_query::{is_2coverable, QueryError};
use crate::traj_index::{TrajIndex, TrajPos};

/// Ties closer than this (in arc length) go to the earlier start.
const LEN_TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Longest2 {
    pub start: TrajPos,
    pub end: TrajPos,
    pub witness: Covering,
    pub length: f64,
    /// The candidate starts that were scored; empty when the whole
    /// trajectory is 2-coverable.
    pub candidates: CandidateStartSet,
}

/// Longest 2-coverable subtrajectory with a checked two-square witness.
pub fn longest_2coverable(idx: &TrajIndex) -> Result<Longest2, QueryError> {
    let t = idx.trajectory();
    if let Some(w) = is_2coverable(idx, t.start(), t.end())? {
        return Ok(Longest2 {
            start: t.start(),
            end: t.end(),
            witness: w,
            length: t.length(),
            candidates: CandidateStartSet::default(),
        });
    }
    let mut ctx = EventContext::new(idx)?;
    let set = build_candidate_starts_with(&mut ctx)?;
    let mut best: Option<(TrajPos, TrajPos, f64)> = None;
    for &p in &set.members {
        let r = ctx.reach(p)?;
        let len = t.arc(r) - t.arc(p);
        if best.is_none_or(|(_, _, b)| len > b + LEN_TIE) {
            best = Some((p, r, len));
        }
    }
    let (start, end, length) = best.ok_or_else(|| QueryError::Internal("no candidate starts".into()))?;
    let witness = is_2coverable(idx, start, end)?
        .ok_or_else(|| QueryError::Internal("reach of the best start is not 2-coverable".into()))?;
    if !verify_covering(&t.subsegments(start, end), &witness, crate::EPS_GEOM) {
        return Err(QueryError::Internal("witness fails verification".into()));
    }
    Ok(Longest2 { start, end, witness, length, candidates: set })
}
