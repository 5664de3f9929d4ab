use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segcover::longest_cover::*;
use segcover::oracle_harness::{gen_random_walk, oracle_longest, oracle_reach};
use segcover::traj_index::*;
use segcover::{verify_covering, Covering, Point, Segment, EPS_GEOM};

fn traj(pts: &[(f64, f64)]) -> Trajectory {
    Trajectory::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
}

fn walk(n: usize, seed: u64) -> Trajectory {
    Trajectory::new(gen_random_walk(n, 0.6, seed)).unwrap()
}

#[test]
fn staircase_reach_hits_width_one() {
    let t = traj(&[(0.0, 0.0), (0.5, 0.0), (0.5, 0.5), (1.2, 0.5)]);
    let idx = build_index(&t);
    let r = reach_all_vertices(&idx).reach[0];
    assert_eq!(r.edge, 2);
    assert!(t.point(r).dist(Point::new(1.0, 0.5)) < 1e-12);
}

#[test]
fn one_square_trajectory() {
    let t = traj(&[(0.1, 0.1), (0.9, 0.2), (0.8, 0.9), (0.2, 0.7), (0.5, 0.5)]);
    let idx = build_index(&t);
    let l1 = longest_1coverable(&idx);
    assert_eq!((l1.start, l1.end), (t.start(), t.end()));
    assert!((l1.length - t.length()).abs() < 1e-12);
    let l2 = longest_2coverable(&idx).unwrap();
    assert!((l2.length - t.length()).abs() < 1e-12);
    let set = build_candidate_starts(&idx).unwrap();
    let vertices: Vec<TrajPos> = (0..t.n_vertices()).map(|i| t.vertex_pos(i)).collect();
    assert_eq!(set.members, vertices);
}

#[test]
fn reach_matches_sampling_k1() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..3 {
        let t = walk(200, seed);
        let idx = build_index(&t);
        let table = reach_all_vertices(&idx);
        for _ in 0..20 {
            let i = r.gen_range(0..t.n_vertices());
            let want = oracle_reach(&t, t.arc(t.vertex_pos(i)), 1, 10_000);
            assert!((t.arc(table.reach[i]) - want).abs() < 1e-6, "seed {seed} vertex {i}");
            let s = r.gen_range(0.0..t.length());
            let got = reach_point(&idx, t.pos_at_arc(s), 1).unwrap();
            assert!((t.arc(got) - oracle_reach(&t, s, 1, 10_000)).abs() < 1e-6);
        }
    }
}

#[test]
fn reach_matches_sampling_k2() {
    let mut r = ChaCha8Rng::seed_from_u64(6);
    for seed in 0..3 {
        let t = walk(50, seed);
        let idx = build_index(&t);
        for _ in 0..10 {
            let s = r.gen_range(0.0..t.length());
            let got = reach_point(&idx, t.pos_at_arc(s), 2).unwrap();
            let want = oracle_reach(&t, s, 2, 10_000);
            assert!((t.arc(got) - want).abs() < 1e-6, "seed {seed} start {s}");
        }
    }
}

#[test]
fn reverse_reach_is_consistent() {
    let t = walk(80, 2);
    let idx = build_index(&t);
    for k in [1, 2] {
        let table = if k == 1 { reach_all_vertices(&idx) } else { reach_all_vertices_2(&idx).unwrap() };
        for w in table.reach.windows(2).chain(table.reverse_reach.windows(2)) {
            assert!(w[0] <= w[1]);
        }
        for j in 0..t.n_vertices() {
            let p = table.reverse_reach[j];
            let back = reach_point(&idx, p, k).unwrap();
            assert!(t.arc(back) >= t.arc(t.vertex_pos(j)) - 1e-9, "k={k} j={j}");
        }
    }
}

#[test]
fn reach_is_monotone() {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let t = walk(50, 11);
    let idx = build_index(&t);
    for k in [1, 2] {
        for _ in 0..2000 {
            let (a, b) = (r.gen_range(0.0..t.length()), r.gen_range(0.0..t.length()));
            let (p, q) = (t.pos_at_arc(a.min(b)), t.pos_at_arc(a.max(b)));
            assert!(reach_point(&idx, p, k).unwrap() <= reach_point(&idx, q, k).unwrap());
        }
    }
}

#[test]
fn opposite_corner_by_hand() {
    // y = x against y = 1 - x: the top-left corner at t gives 2t = 1.
    let ei = Segment::from_coords(0.0, 0.0, 2.0, 2.0);
    let ej = Segment::from_coords(0.5, 0.5, 2.5, -1.5);
    let sq = opposite_corner_square(&ei, &ej, CornerPair::TlBr).unwrap();
    assert!(sq.top_left.dist(Point::new(0.5, 0.5)) < 1e-12);
    let br = Point::new(sq.top_left.x + 1.0, sq.top_left.y - 1.0);
    assert!((br.y - (1.0 - br.x)).abs() < 1e-12);
    let par = Segment::from_coords(0.0, 1.0, 2.0, 3.0);
    assert!(opposite_corner_square(&ei, &par, CornerPair::TlBr).is_none());
    let short = Segment::from_coords(3.0, -2.0, 4.0, -3.0);
    assert!(opposite_corner_square(&ei, &short, CornerPair::TlBr).is_none());
}

#[test]
fn opposite_corner_candidates_touch_the_trajectory() {
    let t = walk(100, 4);
    let idx = build_index(&t);
    let cands = candidate_squares(&t, &reach_all_vertices(&idx));
    let near_t = |p: Point| t.edges().any(|e| {
        let d = Point::new(e.b.x - e.a.x, e.b.y - e.a.y);
        let f = (((p.x - e.a.x) * d.x + (p.y - e.a.y) * d.y) / (d.x * d.x + d.y * d.y)).clamp(0.0, 1.0);
        e.at(f).dist(p) <= 1e-9
    });
    let mut n = 0;
    for c in cands.entries.iter().filter(|c| c.family == Family::OppositeCorner) {
        let tl = c.square.top_left;
        let (tr, bl, br) = (Point::new(tl.x + 1.0, tl.y), Point::new(tl.x, tl.y - 1.0), Point::new(tl.x + 1.0, tl.y - 1.0));
        assert!((near_t(tl) && near_t(br)) || (near_t(tr) && near_t(bl)), "{:?}", c.square);
        n += 1;
    }
    assert!(n > 0);
}

#[test]
fn longest_1_against_sampling() {
    for seed in 0..10 {
        let t = walk(100, seed);
        let idx = build_index(&t);
        let got = longest_1coverable(&idx);
        let oracle = oracle_longest(&t, 1, 400, 400);
        assert!(got.length >= oracle.length - 1e-6, "seed {seed}");
        let cov = Covering::new(vec![got.witness]);
        assert!(verify_covering(&t.subsegments(got.start, got.end), &cov, EPS_GEOM));
        assert!((t.arc(got.end) - t.arc(got.start) - got.length).abs() < 1e-9);
    }
}

#[test]
fn opposite_corner_family_beats_vertex_families() {
    let t = traj(&[(-3.0, 7.0), (0.3, 0.4), (0.45, 0.7), (0.6, 0.2), (7.0, -3.0)]);
    let idx = build_index(&t);
    let cands = candidate_squares(&t, &reach_all_vertices(&idx));
    let c = best_candidate(&t, &cands, Some(Family::OppositeCorner)).unwrap();
    let ab = [Family::VertexPair, Family::VertexEdgeCorner]
        .into_iter()
        .filter_map(|f| best_candidate(&t, &cands, Some(f)))
        .map(|b| b.length)
        .fold(0.0, f64::max);
    assert!(c.length > ab + 1e-3);
    assert!(c.witness.top_left.dist(Point::new(0.0, 1.0)) < 1e-9);
    assert_eq!(longest_1coverable(&idx).family, Some(Family::OppositeCorner));
}

#[test]
fn straight_line_ties_go_to_the_start() {
    let t = traj(&[(0.0, 0.0), (4.0, 0.0), (10.0, 0.0)]);
    let idx = build_index(&t);
    let l1 = longest_1coverable(&idx);
    assert_eq!(l1.start, t.start());
    assert!((l1.length - 1.0).abs() < 1e-9);
    let l2 = longest_2coverable(&idx).unwrap();
    assert_eq!(l2.start, t.start());
    assert!((l2.length - 2.0).abs() < 1e-9);
}

#[test]
fn staircase_events_are_its_vertices() {
    let t = traj(&[(0.0, 0.0), (0.5, 0.0), (0.5, 0.5), (1.0, 0.5), (1.0, 1.0)]);
    let idx = build_index(&t);
    let mut ctx = EventContext::new(&idx).unwrap();
    let ev = compute_events(&mut ctx, EventKind::Vertex, segcover::Sym::IDENTITY, &[]).unwrap();
    let got: Vec<TrajPos> = ev.iter().map(|e| e.pos).collect();
    let want: Vec<TrajPos> = (0..t.n_vertices()).map(|i| t.vertex_pos(i)).collect();
    assert_eq!(got, want);
}

#[test]
fn single_edge_has_no_structural_events() {
    let t = traj(&[(0.0, 0.0), (5.0, 1.0)]);
    let idx = build_index(&t);
    let set = build_candidate_starts(&idx).unwrap();
    let odd: Vec<_> = set.events.iter().filter(|e| !matches!(e.kind, EventKind::Vertex | EventKind::Reach)).collect();
    assert!(odd.is_empty(), "{odd:?}");
}

#[test]
fn candidate_stages_and_events() {
    for seed in 0..5 {
        let t = walk(50, seed);
        let idx = build_index(&t);
        let mut ctx = EventContext::new(&idx).unwrap();
        let set = build_candidate_starts_with(&mut ctx).unwrap();
        assert!(set.members.windows(2).all(|w| w[0] < w[1]));
        let (t1, t2, t3) = (set.upto(1), set.upto(2), set.upto(3));
        assert!(t1.iter().all(|p| t2.contains(p)) && t2.iter().all(|p| t3.contains(p)));
        for i in 0..t.n_vertices() {
            assert!(t1.contains(&t.vertex_pos(i)));
        }
        for ev in &set.events {
            assert!(ctx.validate(ev).unwrap(), "seed {seed}: {ev:?}");
        }
        assert!(set.len() <= 64 * t.n_vertices());
    }
}

#[test]
fn longest_2_against_sampling() {
    for seed in 0..8 {
        let t = walk(50, seed + 100);
        let idx = build_index(&t);
        let l2 = longest_2coverable(&idx).unwrap();
        let l1 = longest_1coverable(&idx);
        assert!(l2.length >= l1.length - 1e-12);
        let oracle = oracle_longest(&t, 2, 500, 500);
        assert!(l2.length >= oracle.length - 1e-6, "seed {seed}");
        assert!(l2.witness.len() <= 2);
        assert!(verify_covering(&t.subsegments(l2.start, l2.end), &l2.witness, EPS_GEOM));
    }
}
