//! Placement functions of the four-square search, as piecewise linear
//! functions of the left square's top.

use segcover::cover_decision::{four_cover_profile, Order};
use segcover::oracle_harness::gen_planted_one_per_side;

fn main() {
    let (segs, _) = gen_planted_one_per_side(20, 7);
    for order in [Order::Ltbr, Order::Lbtr] {
        let p = four_cover_profile(&segs, order).expect("bounding box is large enough");
        let (lo, hi) = p.y_l_domain;
        println!("{order:?}: y_L in [{lo:.3}, {hi:.3}], x_T has {} pieces", p.x_t.len());
        for i in 0..=4 {
            let y = lo + (hi - lo) * i as f64 / 4.0;
            println!("  y_L={y:.3}  x_T={:?}  x_B={:?}  slack={:?}", p.x_t.eval(y), p.x_b.eval(y), p.slack(y));
        }
    }
}
