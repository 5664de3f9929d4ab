//! Longest 2-coverable subtrajectory together with the candidate starts
//! it was chosen from.

use std::collections::BTreeMap;

use segcover::longest_cover::longest_2coverable;
use segcover::oracle_harness::gen_random_walk;
use segcover::traj_index::{build_index, Trajectory};

fn main() {
    let t = Trajectory::new(gen_random_walk(50, 0.6, 21)).expect("walk has distinct points");
    let idx = build_index(&t);
    let best = longest_2coverable(&idx).unwrap();
    println!("T[{}, {}] has length {:.6}", best.start, best.end, best.length);
    for sq in &best.witness.squares {
        println!("  square at {:?}", sq.top_left);
    }
    let mut by_kind = BTreeMap::new();
    for ev in &best.candidates.events {
        *by_kind.entry(ev.kind.name()).or_insert(0) += 1;
    }
    println!("{} candidate starts for {} vertices", best.candidates.len(), t.n_vertices());
    for (kind, n) in by_kind {
        println!("  {kind:<16} {n}");
    }
}
