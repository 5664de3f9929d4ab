//! Decide whether a segment set fits in k unit squares and print the witness.

use segcover::cover_decision::coverable_k;
use segcover::{verify_covering, Segment, EPS_GEOM};

fn main() {
    let segs = vec![
        Segment::from_coords(0.0, 0.0, 0.8, 0.6),
        Segment::from_coords(2.0, 0.1, 2.5, 0.9),
        Segment::from_coords(0.3, 2.2, 0.9, 2.4),
        Segment::from_coords(2.1, 2.0, 2.9, 2.8),
    ];
    for k in 1..=4 {
        match coverable_k(&segs, k).expect("k is in 1..=4") {
            Some(c) => {
                assert!(verify_covering(&segs, &c, EPS_GEOM));
                let corners: Vec<_> = c.squares.iter().map(|s| (s.top_left.x, s.top_left.y)).collect();
                println!("k={k}: yes, top-left corners {corners:?}");
            }
            None => println!("k={k}: no"),
        }
    }
}
