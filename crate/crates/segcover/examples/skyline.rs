//! Skylines and the upper envelope of a few segments.

use segcover::pwl::{skyline_of, upper_envelope};
use segcover::{Dir, Segment};

fn main() {
    let segs = [
        Segment::from_coords(0.0, 0.0, 2.0, 1.0),
        Segment::from_coords(1.0, 1.5, 3.0, 0.0),
        Segment::from_coords(2.5, 0.5, 4.0, 0.5),
    ];
    let env = upper_envelope(&segs);
    println!("upper envelope:");
    for pc in env.pieces() {
        println!("  [{:.3}, {:.3}] {:.3} -> {:.3}", pc.t0, pc.t1, pc.v0, pc.v1);
    }
    // Upward skyline: for each height h, the leftmost x of the set at or
    // above h.
    let sky = skyline_of(&segs, Dir::Up);
    for h in [0.0, 0.25, 0.75, 1.25, 2.0] {
        println!("leftmost x at or above y={h}: {:?}", sky.f.eval(h));
    }
}
