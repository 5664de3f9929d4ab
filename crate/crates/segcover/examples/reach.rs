//! Reach of every vertex: the furthest point a covering starting there
//! can extend to.

use segcover::longest_cover::{reach_all_vertices, reach_point};
use segcover::oracle_harness::gen_random_walk;
use segcover::traj_index::{build_index, Trajectory};

fn main() {
    let t = Trajectory::new(gen_random_walk(30, 0.6, 5)).expect("walk has distinct points");
    let idx = build_index(&t);
    let table = reach_all_vertices(&idx);
    for (i, r) in table.reach.iter().enumerate().take(10) {
        println!("v{i:<2} reaches {r}  (arc {:.3} -> {:.3})", t.arc(t.vertex_pos(i)), t.arc(*r));
    }
    let p = t.pos_at_arc(2.5);
    for k in 1..=2 {
        println!("from arc 2.5 with k={k}: reach at arc {:.4}", t.arc(reach_point(&idx, p, k).unwrap()));
    }
}
