//! Generators and the brute-force oracles used by the tests.

use segcover::cover_decision::coverable_k;
use segcover::longest_cover::longest_2coverable;
use segcover::oracle_harness::{gen_planted_coverable, gen_random_walk, oracle_decide_grid, oracle_longest};
use segcover::traj_index::{build_index, Trajectory};

fn main() {
    let (segs, plant) = gen_planted_coverable(3, 12, 4, 2.0);
    println!("planted {} squares over {} segments", plant.len(), segs.len());
    for k in 1..=3 {
        let fast = coverable_k(&segs, k).unwrap().is_some();
        let grid = oracle_decide_grid(&segs, k, 0.02).expect("resolution is positive");
        println!("k={k}: decision {fast}, grid oracle {grid:?}");
    }

    let t = Trajectory::new(gen_random_walk(20, 0.6, 2)).expect("walk has distinct points");
    let sampled = oracle_longest(&t, 2, 2000, 2000);
    let exact = longest_2coverable(&build_index(&t)).unwrap();
    println!("longest 2-coverable: sampled {:.6}, exact {:.6}", sampled.length, exact.length);
}
