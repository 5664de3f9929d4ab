use proptest::prelude::*;
use segcover::geom_core::*;

fn seg() -> impl Strategy<Value = Segment> {
    (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b, c, d)| Segment::from_coords(a, b, c, d))
}

fn square() -> impl Strategy<Value = UnitSquare> {
    (-4.0f64..4.0, -4.0f64..4.0).prop_map(|(x, y)| UnitSquare::new(x, y))
}

fn sym() -> impl Strategy<Value = Sym> {
    (0usize..8).prop_map(|i| Sym::all()[i])
}

proptest! {
    #[test]
    fn clip_partitions_the_segment(s in seg(), q in square()) {
        let c = clip_segment_to_square(s, q, 0.0);
        let total: f64 = c.covered.iter().chain(c.uncovered.iter()).map(|p| p.len()).sum();
        prop_assert!((total - s.len()).abs() <= 1e-9);
        if let Some(cv) = c.covered {
            prop_assert!(q.contains(cv.a, 1e-9) && q.contains(cv.b, 1e-9));
        }
        for u in &c.uncovered {
            prop_assert!(!q.contains(u.at(0.5), -1e-9) || u.len() < 1e-9);
        }
    }

    #[test]
    fn verification_is_monotone_in_squares(segs in prop::collection::vec(seg(), 1..6), qs in prop::collection::vec(square(), 0..4), extra in square()) {
        let small = Covering::new(qs.clone());
        let mut more = qs;
        more.push(extra);
        if verify_covering(&segs, &small, EPS_GEOM) {
            prop_assert!(verify_covering(&segs, &Covering::new(more), EPS_GEOM));
        }
    }

    #[test]
    fn verification_is_translation_invariant(segs in prop::collection::vec(seg(), 1..6), qs in prop::collection::vec(square(), 1..4), dx in -3.0f64..3.0, dy in -3.0f64..3.0) {
        // Dyadic shifts keep the arithmetic exact.
        let dx = (dx * 8.0).round() / 8.0;
        let dy = (dy * 8.0).round() / 8.0;
        let a = verify_covering(&segs, &Covering::new(qs.clone()), EPS_GEOM);
        let moved: Vec<Segment> = segs.iter().map(|s| Segment::from_coords(s.a.x + dx, s.a.y + dy, s.b.x + dx, s.b.y + dy)).collect();
        let mq: Vec<UnitSquare> = qs.iter().map(|q| q.translate(dx, dy)).collect();
        prop_assert_eq!(a, verify_covering(&moved, &Covering::new(mq), EPS_GEOM));
    }

    #[test]
    fn symmetry_round_trips(x in -1e3f64..1e3, y in -1e3f64..1e3, s in sym()) {
        let p = Point::new(x, y);
        let q = s.inv_point(s.point(p));
        prop_assert!(p.dist(q) <= 1e-12);
        for d in Dir::ALL {
            let r = inverse_cardinal(&transform_cardinal(&p, d), d);
            prop_assert!(p.dist(r) <= 1e-12);
        }
    }

    #[test]
    fn bbox_commutes_with_symmetry(segs in prop::collection::vec(seg(), 1..8), s in sym()) {
        let a = bounding_box(&segs).unwrap().apply(s);
        let b = bounding_box(&apply_all(&segs, s)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn covering_commutes_with_symmetry(segs in prop::collection::vec(seg(), 1..6), qs in prop::collection::vec(square(), 1..4), s in sym()) {
        let c = Covering::new(qs);
        prop_assert_eq!(
            verify_covering(&segs, &c, EPS_GEOM),
            verify_covering(&apply_all(&segs, s), &c.apply(s), EPS_GEOM)
        );
    }
}

#[test]
fn empty_instance_has_no_bbox() {
    assert!(bounding_box(&[]).is_err());
}
