mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segcover::cover_decision::coverable_k;
use segcover::oracle_harness::gen_random_walk;
use segcover::subtraj_query::*;
use segcover::traj_index::*;
use segcover::{verify_covering, Point, EPS_GEOM};
use common::*;



#[test]
fn queries_agree_with_offline_decision() {
    let mut r = ChaCha8Rng::seed_from_u64(31);
    let mut counts = [[0usize; 2]; 2];
    let mut skipped = 0;
    for seed in 0..4u64 {
        let t = Trajectory::new(gen_random_walk(2000, 0.4, seed)).unwrap();
        let idx = build_index(&t);
        for _ in 0..1000 {
            let (a, b) = short_range(&mut r, &t, 16.0);
            let segs = t.subsegments(a, b);
            for (ki, k) in [2usize, 3].into_iter().enumerate() {
                let got = is_k_coverable(&idx, a, b, k).unwrap_or_else(|e| panic!("{a} {b} k={k}: {e}"));
                if let Some(c) = &got {
                    assert!(c.len() <= k);
                    assert!(verify_covering(&segs, c, EPS_GEOM), "witness fails {a} {b} k={k}");
                }
                match offline(&t, a, b, k) {
                    Some(want) => {
                        assert_eq!(got.is_some(), want, "seed {seed} {a} {b} k={k}");
                        counts[ki][want as usize] += 1;
                    }
                    None => skipped += 1,
                }
            }
        }
    }
    println!("agreement counts (no, yes) k=2 {:?} k=3 {:?}, skipped {skipped}", counts[0], counts[1]);
    assert!(counts.iter().all(|c| c[0] > 100 && c[1] > 100));
}

#[test]
fn nested_ranges_are_monotone() {
    let mut r = ChaCha8Rng::seed_from_u64(32);
    let t = Trajectory::new(gen_random_walk(500, 0.4, 9)).unwrap();
    let idx = build_index(&t);
    for _ in 0..1000 {
        let (a, b) = short_range(&mut r, &t, 8.0);
        let (s0, s1) = (t.arc(a), t.arc(b));
        let a2 = t.pos_at_arc(r.gen_range(s0..=s1));
        let b2 = t.pos_at_arc(r.gen_range(t.arc(a2)..=s1));
        let (a2, b2) = (a2.max(a), b2.min(b).max(a2.max(a)));
        for k in [2, 3] {
            if is_k_coverable(&idx, a, b, k).unwrap().is_some() {
                assert!(is_k_coverable(&idx, a2, b2, k).unwrap().is_some(), "{a} {b} > {a2} {b2} k={k}");
            }
        }
    }
}

#[test]
fn simple_cases() {
    let t = Trajectory::new(vec![
        Point::new(0.0, 0.0),
        Point::new(3.0, 0.0),
        Point::new(3.0, 3.0),
        Point::new(0.0, 3.0),
    ])
    .unwrap();
    let idx = build_index(&t);
    let p = TrajPos::new(1, 0.5);
    assert_eq!(is_2coverable(&idx, p, p).unwrap().unwrap().len(), 1);
    assert!(is_2coverable(&idx, t.start(), t.end()).unwrap().is_none());
    assert!(is_3coverable(&idx, t.start(), t.end()).unwrap().is_none());
    assert!(is_2coverable(&idx, t.end(), t.start()).is_err());
    // An L inside two corner squares.
    let l = Trajectory::new(vec![Point::new(0.2, 1.9), Point::new(0.5, 1.2), Point::new(1.8, 0.5)]).unwrap();
    let li = build_index(&l);
    let c = is_2coverable(&li, l.start(), l.end()).unwrap().unwrap();
    assert!(verify_covering(&l.subsegments(l.start(), l.end()), &c, EPS_GEOM));
    assert!(coverable_k(&l.subsegments(l.start(), l.end()), 2).unwrap().is_some());
}

fn u_shape(extra: &[Point], tail: &[Point]) -> Trajectory {
    // Squares [0,1]x[1.5,2.5], [1.5,2.5]x[1.5,2.5] and [0.75,1.75]x[0.6,1.6]
    // leave a notch above the bottom square between the two top ones.
    let mut v = vec![
        Point::new(0.0, 2.5),
        Point::new(0.5, 1.55),
        Point::new(0.9, 1.55),
        Point::new(0.8, 0.6),
        Point::new(1.7, 1.0),
    ];
    v.extend_from_slice(extra);
    v.extend_from_slice(&[Point::new(1.6, 1.55), Point::new(2.5, 2.5)]);
    v.extend_from_slice(tail);
    Trajectory::new(v).unwrap()
}

#[test]
fn notch_between_three_squares() {
    let cases = [
        (u_shape(&[], &[]), true),
        // Dips into the notch and turns there.
        (u_shape(&[Point::new(1.25, 1.55), Point::new(1.25, 2.2), Point::new(1.3, 1.5)], &[]), false),
        // Touches the notch floor from below.
        (u_shape(&[Point::new(1.25, 1.6), Point::new(1.3, 1.5)], &[]), true),
        // Ends inside the notch.
        (u_shape(&[], &[Point::new(1.6, 1.55), Point::new(1.25, 1.55), Point::new(1.25, 2.2)]), false),
    ];
    for (i, (t, want)) in cases.iter().enumerate() {
        let idx = build_index(t);
        let segs = t.subsegments(t.start(), t.end());
        assert_eq!(coverable_k(&segs, 3).unwrap().is_some(), *want, "offline case {i}");
        assert_eq!(is_3coverable(&idx, t.start(), t.end()).unwrap().is_some(), *want, "case {i}");
    }
}
