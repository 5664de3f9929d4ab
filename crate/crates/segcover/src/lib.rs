//! Covering segment sets and trajectories with unit axis-parallel squares.
//!
//! * [`cover_decision`] decides whether a set of segments fits in the union
//!   of k unit squares, for k up to 4, and returns a checked witness.
//! * [`traj_index`] and [`subtraj_query`] preprocess a trajectory so that
//!   2- and 3-coverability of any subtrajectory can be queried quickly.
//! * [`longest_cover`] finds longest 1- and 2-coverable subtrajectories.
//! * [`oracle_harness`] holds brute-force checkers and instance generators.
//! * [`cli_io`] reads and writes the JSON formats and drives the binary.

pub mod cli_io;
pub mod cover_decision;
pub mod geom_core;
pub mod longest_cover;
pub mod oracle_harness;
pub mod pwl;
pub mod subtraj_query;
pub mod traj_index;

pub use geom_core::{
    bounding_box, clip_segment_to_square, verify_covering, Covering, Dir, Point, Rect, Segment, Sym, Transform,
    UnitSquare, EPS_GEOM,
};
