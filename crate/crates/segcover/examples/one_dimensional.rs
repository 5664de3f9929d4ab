//! Greedy cover of a thin instance: everything fits in a unit-wide column,
//! so squares are stacked along y.

use segcover::cover_decision::coverable_1d;
use segcover::pwl::Axis;
use segcover::Segment;

fn main() {
    let segs: Vec<Segment> = (0..6)
        .map(|i| {
            let y = i as f64 * 0.7;
            Segment::from_coords(0.1, y, 0.9, y + 0.3)
        })
        .collect();
    for budget in 1..=5 {
        let found = coverable_1d(&segs, Axis::X, budget).expect("instance is thin");
        match found {
            Some(c) => {
                let tops: Vec<f64> = c.squares.iter().map(|s| s.top_left.y).collect();
                println!("{budget} squares suffice, tops at {tops:?}");
                break;
            }
            None => println!("{budget} squares are not enough"),
        }
    }
}
