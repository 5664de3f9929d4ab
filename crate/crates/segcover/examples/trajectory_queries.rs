//! Bounding box, envelope and extreme-vertex queries on a subtrajectory.

use segcover::oracle_harness::gen_random_walk;
use segcover::traj_index::{build_index, TrajPos, Trajectory};
use segcover::Dir;

fn main() {
    let t = Trajectory::new(gen_random_walk(200, 0.5, 3)).expect("walk has distinct points");
    let idx = build_index(&t);
    let (a, b) = (TrajPos::new(20, 0.25), TrajPos::new(90, 0.5));
    let bb = idx.query_bbox(a, b).unwrap();
    println!("bbox of T[{a}, {b}]: {bb:?}");
    let mid = 0.5 * (bb.x_min + bb.x_max);
    let top = idx.query_envelope(a, b, mid, Dir::Up).unwrap();
    println!("highest point on x = {mid:.3}: {top:?}");
    let v = idx.query_extreme_vertex(a, b, &bb, Dir::Right).unwrap();
    println!("rightmost vertex inside the box: {v:?}");
}
