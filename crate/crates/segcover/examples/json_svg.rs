//! Round trip through the JSON instance format and draw the witness as SVG.

use segcover::cli_io::{covering_json, instance_json, parse_instance, render_svg, Instance};
use segcover::cover_decision::coverable_k;

fn main() {
    let text = r#"{"segments": [[[0, 0], [0.9, 0.4]], [[2, 2], [2.5, 2.8]], [[0.2, 0.8], [0.6, 0.1]]]}"#;
    let inst = parse_instance(text).expect("valid instance");
    let Instance::Segments(segs) = &inst else { unreachable!() };
    let c = coverable_k(segs, 2).unwrap().expect("two squares suffice");
    println!("{}", instance_json(&inst));
    println!("{}", covering_json(&c));
    let svg = render_svg(&inst, &c.squares);
    let path = std::env::temp_dir().join("segcover_example.svg");
    std::fs::write(&path, svg).expect("temp dir is writable");
    println!("wrote {}", path.display());
}
