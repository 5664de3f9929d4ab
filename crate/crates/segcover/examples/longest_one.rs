//! Longest subtrajectory inside a single unit square.

use segcover::longest_cover::longest_1coverable;
use segcover::oracle_harness::gen_random_walk;
use segcover::traj_index::{build_index, Trajectory};

fn main() {
    let t = Trajectory::new(gen_random_walk(60, 0.4, 8)).expect("walk has distinct points");
    let idx = build_index(&t);
    let best = longest_1coverable(&idx);
    println!("T[{}, {}] has length {:.6}", best.start, best.end, best.length);
    println!("square top-left {:?}, family {:?}", best.witness.top_left, best.family);
}
