//! 2- and 3-coverability of subtrajectories after one preprocessing pass.

use segcover::oracle_harness::gen_random_walk;
use segcover::subtraj_query::{is_2coverable, is_3coverable};
use segcover::traj_index::{build_index, Trajectory};

fn main() {
    let t = Trajectory::new(gen_random_walk(500, 0.6, 11)).expect("walk has distinct points");
    let idx = build_index(&t);
    let start = t.pos_at_arc(1.0);
    for len in [1.0, 2.0, 4.0, 6.0, 8.0, 12.0] {
        let end = t.pos_at_arc(1.0 + len);
        let two = is_2coverable(&idx, start, end).unwrap().is_some();
        let three = is_3coverable(&idx, start, end).unwrap().is_some();
        println!("arc length {len}: 2-coverable {two}, 3-coverable {three}");
    }
}
