use std::path::Path;
use std::process::Command;

use segcover::cli_io::*;
use segcover::cover_decision::coverable_k;
use segcover::traj_index::{TrajPos, Trajectory};
use serde_json::Value;
use tempfile::tempdir;

fn run(args: &[&str]) -> (i32, Value, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("segcover").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    let v = serde_json::from_slice(&out).unwrap_or(Value::Null);
    (code, v, String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn load_examples() {
    match parse_instance(r#"{"trajectory":[[0,0],[1,0],[1,1]]}"#).unwrap() {
        Instance::Trajectory(t) => assert_eq!(t.n_vertices(), 3),
        other => panic!("{other:?}"),
    }
    match parse_instance(r#"{"segments":[[[0,0],[1,1]]]}"#).unwrap() {
        Instance::Segments(s) => assert_eq!(s.len(), 1),
        other => panic!("{other:?}"),
    }
    let e = parse_instance(r#"{"trajectory":[[0,0]]}"#).unwrap_err();
    assert!(e.to_string().contains("trajectory needs >=2 vertices"));
    assert!(matches!(parse_instance("{"), Err(IoError::Json(_))));
    assert!(matches!(parse_instance(r#"{"points":[]}"#), Err(IoError::Format(_))));
    assert!(parse_instance(r#"{"segments":[[[0,0],[1e999,1]]]}"#).is_err());
}

#[test]
fn decide_planted_and_svg() {
    let dir = tempdir().unwrap();
    let file = dir.path().join("planted.json");
    let (code, _, _) = run(&["--seed", "7", "gen", "planted", "--k", "2", "--n", "30", "--out", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    let svg = dir.path().join("w.svg");
    let (code, v, _) = run(&["decide", "--k", "2", file.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["coverable"], Value::Bool(true));
    assert!(v["witness"].as_array().unwrap().len() <= 2);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("<rect"));
    let (_, again, _) = run(&["decide", "--k", "2", file.to_str().unwrap()]);
    assert_eq!(v, again);
}

#[test]
fn longest_one_square() {
    let dir = tempdir().unwrap();
    let f = write(dir.path(), "t.json", r#"{"trajectory":[[0,0],[0.5,0.5],[1,0]]}"#);
    let (code, v, _) = run(&["longest", "--k", "1", &f]);
    assert_eq!(code, 0);
    let want = 2.0f64.sqrt();
    assert!((v["length"].as_f64().unwrap() - want).abs() < 1e-11);
    assert_eq!(v["start"], "0:0");
    let (code, v2, _) = run(&["longest", "--k", "2", &f]);
    assert_eq!(code, 0);
    assert_eq!(v["length"], v2["length"]);
}

#[test]
fn query_ask_matches_decide_on_extracted_file() {
    let dir = tempdir().unwrap();
    let walk = dir.path().join("walk.json");
    let (code, _, _) = run(&["--seed", "3", "gen", "random-walk", "--n", "60", "--step", "0.5", "--out", walk.to_str().unwrap()]);
    assert_eq!(code, 0);
    let idx = dir.path().join("walk.idx");
    assert_eq!(run(&["query", "build", walk.to_str().unwrap(), "--out", idx.to_str().unwrap()]).0, 0);
    let t = match load_instance(&walk).unwrap() {
        Instance::Trajectory(t) => t,
        other => panic!("{other:?}"),
    };
    let mut seen = [0usize; 2];
    for (i, (a, b)) in [(0usize, 0.25), (3, 0.5), (10, 0.0), (20, 0.75), (31, 0.5), (40, 0.1)].into_iter().enumerate() {
        let from = TrajPos::new(a, b);
        let to = t.pos_at_arc(t.arc(from) + 2.0 + 1.5 * i as f64);
        let (from_s, to_s) = (format!("{}:{}", from.edge, from.frac), format!("{}:{}", to.edge, to.frac));
        let sub = Trajectory::new(t.subsegments(from, to).iter().flat_map(|s| [s.a, s.b]).collect()).unwrap();
        let f = write(dir.path(), &format!("sub{i}.json"), &instance_json(&Instance::Trajectory(sub)).to_string());
        for k in ["2", "3"] {
            let (c1, ask, _) = run(&["query", "ask", idx.to_str().unwrap(), "--k", k, "--from", &from_s, "--to", &to_s]);
            let (c2, dec, _) = run(&["decide", "--k", k, &f]);
            assert_eq!((c1, c2), (0, 0));
            assert_eq!(ask["coverable"], dec["coverable"], "{from_s} {to_s} k={k}");
            seen[ask["coverable"].as_bool().unwrap() as usize] += 1;
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn oracle_commands() {
    let dir = tempdir().unwrap();
    let f = write(dir.path(), "s.json", r#"{"segments":[[[0,0],[1.0001,0.5]]]}"#);
    let (code, v, _) = run(&["oracle", "grid", "--k", "1", "--resolution", "0.01", &f]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "boundary");
    let (code, _, err) = run(&["oracle", "grid", "--k", "1", "--resolution", "0", &f]);
    assert_eq!(code, 1, "{err}");
    let t = write(dir.path(), "t.json", r#"{"trajectory":[[0,0],[3,0]]}"#);
    let (code, v, _) = run(&["oracle", "longest", "--k", "2", "--samples", "301", &t]);
    assert_eq!(code, 0);
    assert!((v["length"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&["decide", "--k", "9", "x.json"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(run(&["decide", "--k", "1", &bad]).0, 2);
    let short = write(dir.path(), "short.json", r#"{"trajectory":[[0,0]]}"#);
    assert_eq!(run(&["longest", "--k", "1", &short]).0, 2);
    assert_eq!(run(&["decide", "--k", "1", dir.path().join("missing.json").to_str().unwrap()]).0, 2);
    let t = write(dir.path(), "t.json", r#"{"trajectory":[[0,0],[3,0],[3,3]]}"#);
    let idx = dir.path().join("t.idx");
    assert_eq!(run(&["query", "build", &t, "--out", idx.to_str().unwrap()]).0, 0);
    let (code, _, _) = run(&["query", "ask", idx.to_str().unwrap(), "--k", "2", "--from", "1:0.5", "--to", "0:0.5"]);
    assert_eq!(code, 1);
    assert_eq!(run(&["--eps", "-1", "decide", "--k", "1", &t]).0, 1);
}

#[test]
fn floats_use_twelve_digits() {
    assert_eq!(round12(0.1 + 0.2), 0.3);
    assert_eq!(round12(1.0 / 3.0).to_string(), "0.333333333333");
    assert_eq!(pos_json(TrajPos::new(3, 0.25)), "3:0.25");
}

#[test]
fn decide_agrees_with_library() {
    let dir = tempdir().unwrap();
    let f = write(dir.path(), "s.json", r#"{"segments":[[[0,0],[0,0]],[[1.5,1.5],[1.5,1.5]],[[3,3],[3,3]]]}"#);
    let segs = load_instance(Path::new(&f)).unwrap().segments();
    for k in 1..=4 {
        let (_, v, _) = run(&["decide", "--k", &k.to_string(), &f]);
        assert_eq!(v["coverable"].as_bool().unwrap(), coverable_k(&segs, k).unwrap().is_some());
    }
}

#[test]
fn binary_runs() {
    let dir = tempdir().unwrap();
    let f = write(dir.path(), "t.json", r#"{"trajectory":[[0,0],[2,0],[2,2]]}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_segcover")).args(["longest", "--k", "2", &f]).output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["length"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    let out = Command::new(env!("CARGO_BIN_EXE_segcover")).args(["decide", "--k", "1", "nope.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
