//! JSON instance formats, result encoding, SVG rendering and the command
//! line driver behind the `segcover` binary.
//!
//! Instances are JSON objects with either a `segments` key (a list of
//! `[[x0, y0], [x1, y1]]` pairs) or a `trajectory` key (a list of `[x, y]`
//! vertices). Squares are written as their top-left corner `[x, y]`,
//! trajectory positions as `"EDGE:FRAC"` strings, and every float is
//! rounded to 12 significant digits.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cover_decision::coverable_k_eps;
use crate::geom_core::{bounding_box, Covering, Point, Segment, UnitSquare, EPS_GEOM};
use crate::longest_cover::{longest_1coverable, longest_2coverable};
use crate::oracle_harness::{
    gen_planted_coverable, gen_random_walk, gen_separated_points, oracle_decide_grid, oracle_longest, GridVerdict,
};
use crate::subtraj_query::{is_2coverable_eps, is_3coverable_eps, QueryError};
use crate::traj_index::{TrajError, TrajIndex, TrajPos, Trajectory};

/// Environment variable that overrides the containment tolerance.
pub const EPS_ENV: &str = "SEGCOVER_EPS";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad instance: {0}")]
    Format(String),
    #[error("non-finite coordinate in {0}")]
    NonFinite(String),
    #[error(transparent)]
    Trajectory(#[from] TrajError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Query(QueryError),
}

impl From<QueryError> for IoError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::Traj(t) => IoError::Usage(t.to_string()),
            other => IoError::Query(other),
        }
    }
}

impl IoError {
    /// Process exit code: 1 usage, 2 input, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            IoError::Usage(_) => 1,
            IoError::Query(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Segments(Vec<Segment>),
    Trajectory(Trajectory),
}

impl Instance {
    pub fn segments(&self) -> Vec<Segment> {
        match self {
            Instance::Segments(s) => s.clone(),
            Instance::Trajectory(t) => t.edges().collect(),
        }
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.into(), source })
}

fn point(v: &Value, what: &str) -> Result<Point, IoError> {
    let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| IoError::Format(format!("{what} is not [x, y]")))?;
    let c = |i: usize| pair[i].as_f64().ok_or_else(|| IoError::Format(format!("{what} has a non-numeric coordinate")));
    let p = Point::new(c(0)?, c(1)?);
    if !p.is_finite() {
        return Err(IoError::NonFinite(what.into()));
    }
    Ok(p)
}

/// Parses an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    let v: Value = serde_json::from_str(text)?;
    if let Some(ts) = v.get("trajectory") {
        let arr = ts.as_array().ok_or_else(|| IoError::Format("trajectory is not a list".into()))?;
        let pts = arr.iter().enumerate().map(|(i, p)| point(p, &format!("vertex {i}"))).collect::<Result<_, _>>()?;
        return Ok(Instance::Trajectory(Trajectory::new(pts)?));
    }
    if let Some(ss) = v.get("segments") {
        let arr = ss.as_array().ok_or_else(|| IoError::Format("segments is not a list".into()))?;
        let segs = arr
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let ends = s.as_array().filter(|a| a.len() == 2);
                let ends = ends.ok_or_else(|| IoError::Format(format!("segment {i} is not [[x0, y0], [x1, y1]]")))?;
                Ok(Segment::new(point(&ends[0], &format!("segment {i}"))?, point(&ends[1], &format!("segment {i}"))?))
            })
            .collect::<Result<_, IoError>>()?;
        return Ok(Instance::Segments(segs));
    }
    Err(IoError::Format("expected a \"segments\" or \"trajectory\" key".into()))
}

pub fn load_instance(path: &Path) -> Result<Instance, IoError> {
    parse_instance(&read(path)?)
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn num(x: f64) -> Value {
    json!(round12(x))
}

pub fn pos_json(p: TrajPos) -> Value {
    Value::String(format!("{}:{}", p.edge, round12(p.frac)))
}

pub fn pt_json(p: Point) -> Value {
    json!([num(p.x), num(p.y)])
}

pub fn covering_json(c: &Covering) -> Value {
    Value::Array(c.squares.iter().map(|s| pt_json(s.top_left)).collect())
}

pub fn instance_json(inst: &Instance) -> Value {
    match inst {
        Instance::Segments(s) => json!({ "segments": s.iter().map(|g| json!([pt_json(g.a), pt_json(g.b)])).collect::<Vec<_>>() }),
        Instance::Trajectory(t) => json!({ "trajectory": t.vertices().iter().map(|&p| pt_json(p)).collect::<Vec<_>>() }),
    }
}

/// Renders the segments (or trajectory) and the squares of `witness`.
pub fn render_svg(inst: &Instance, witness: &[UnitSquare]) -> String {
    let segs = inst.segments();
    let mut bb = match bounding_box(&segs) {
        Ok(b) => b,
        Err(_) => crate::Rect::at_point(Point::new(0.0, 0.0)),
    };
    for s in witness {
        bb = bb.union(&s.rect());
    }
    let pad = 0.1 * (bb.width().max(bb.height())).max(1.0);
    let (x0, y1) = (bb.x_min - pad, bb.y_max + pad);
    let (w, h) = (bb.width() + 2.0 * pad, bb.height() + 2.0 * pad);
    let scale = 600.0 / w.max(h);
    let tx = |p: Point| ((p.x - x0) * scale, (y1 - p.y) * scale);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}">"#,
        w * scale,
        h * scale
    );
    for s in witness {
        let (x, y) = tx(s.top_left);
        let _ = writeln!(
            out,
            r#"<rect x="{x:.3}" y="{y:.3}" width="{scale:.3}" height="{scale:.3}" fill="steelblue" fill-opacity="0.2" stroke="steelblue"/>"#
        );
    }
    match inst {
        Instance::Trajectory(t) => {
            let pts: Vec<String> = t.vertices().iter().map(|&p| tx(p)).map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="black"/>"#, pts.join(" "));
        }
        Instance::Segments(ss) => {
            for g in ss {
                let ((ax, ay), (bx, by)) = (tx(g.a), tx(g.b));
                let _ = writeln!(
                    out,
                    r#"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}" stroke="black" stroke-linecap="round" stroke-width="2"/>"#
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Parser)]
#[command(name = "segcover", version, about = "Cover segments and trajectories with unit squares")]
struct Cli {
    /// Seed for the generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Containment tolerance (defaults to SEGCOVER_EPS, then 1e-9).
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Also write an SVG rendering of the input and the witness.
    #[arg(long, global = true, value_name = "OUT.svg")]
    svg: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Decide whether the instance is k-coverable.
    Decide {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        k: u8,
        file: PathBuf,
    },
    /// Build or query a trajectory index.
    #[command(subcommand)]
    Query(QueryCmd),
    /// Longest k-coverable subtrajectory.
    Longest {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        k: u8,
        file: PathBuf,
    },
    /// Write a generated instance.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Run a brute-force oracle.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Debug, Subcommand)]
enum QueryCmd {
    Build {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Ask {
        index: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        k: u8,
        #[arg(long)]
        from: TrajPos,
        #[arg(long)]
        to: TrajPos,
    },
}

#[derive(Debug, Args)]
struct OutArg {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenCmd {
    Planted {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        k: u8,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        spread: f64,
        #[command(flatten)]
        out: OutArg,
    },
    Separated {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        k: u8,
        #[command(flatten)]
        out: OutArg,
    },
    RandomWalk {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Subcommand)]
enum OracleCmd {
    /// Dense-sampling lower bound on the longest k-coverable subtrajectory.
    Longest {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        k: u8,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        file: PathBuf,
    },
    /// Grid search decision for small instances.
    Grid {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        k: u8,
        #[arg(long, default_value_t = 0.01)]
        resolution: f64,
        file: PathBuf,
    },
}

fn eps_from(flag: Option<f64>) -> Result<f64, IoError> {
    let eps = match flag {
        Some(e) => e,
        None => match std::env::var(EPS_ENV) {
            Ok(s) => s.trim().parse().map_err(|_| IoError::Usage(format!("{EPS_ENV} is not a number: {s:?}")))?,
            Err(_) => EPS_GEOM,
        },
    };
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(IoError::Usage(format!("tolerance must be finite and non-negative, got {eps}")));
    }
    Ok(eps)
}

fn trajectory_of(inst: Instance) -> Result<Trajectory, IoError> {
    match inst {
        Instance::Trajectory(t) => Ok(t),
        Instance::Segments(_) => Err(IoError::Format("expected a trajectory".into())),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Write { path: path.into(), source })
}

fn emit(v: &Value, out: &mut dyn Write, to: Option<&Path>) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match to {
        Some(p) => write_file(p, &text),
        None => out.write_all(text.as_bytes()).map_err(|source| IoError::Write { path: "<stdout>".into(), source }),
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), IoError> {
    let eps = eps_from(cli.eps)?;
    let svg = |inst: &Instance, sq: &[UnitSquare]| -> Result<(), IoError> {
        match &cli.svg {
            Some(p) => write_file(p, &render_svg(inst, sq)),
            None => Ok(()),
        }
    };
    match cli.cmd {
        Cmd::Decide { k, file } => {
            let inst = load_instance(&file)?;
            let segs = inst.segments();
            let got = coverable_k_eps(&segs, k as usize, eps).map_err(|e| IoError::Usage(e.to_string()))?;
            let sq = got.as_ref().map(|c| c.squares.clone()).unwrap_or_default();
            svg(&inst, &sq)?;
            let mut m = Map::new();
            m.insert("coverable".into(), json!(got.is_some()));
            m.insert("witness".into(), got.as_ref().map(covering_json).unwrap_or(json!([])));
            if let Instance::Trajectory(t) = &inst {
                m.insert("dropped_vertices".into(), json!(t.dropped()));
            }
            emit(&Value::Object(m), out, None)
        }
        Cmd::Query(QueryCmd::Build { file, out: dest }) => {
            let t = trajectory_of(load_instance(&file)?)?;
            let idx = TrajIndex::new(t);
            write_file(&dest, &(serde_json::to_string(&idx.snapshot())? + "\n"))?;
            emit(&json!({ "vertices": idx.trajectory().n_vertices(), "index": dest.display().to_string() }), out, None)
        }
        Cmd::Query(QueryCmd::Ask { index, k, from, to }) => {
            let v: Value = serde_json::from_str(&read(&index)?)?;
            let idx = TrajIndex::from_snapshot(&v)?;
            let got = if k == 2 { is_2coverable_eps(&idx, from, to, eps)? } else { is_3coverable_eps(&idx, from, to, eps)? };
            let sq = got.as_ref().map(|c| c.squares.clone()).unwrap_or_default();
            svg(&Instance::Trajectory(idx.trajectory().extract(from, to)), &sq)?;
            let witness = got.as_ref().map(covering_json).unwrap_or(json!([]));
            emit(&json!({ "coverable": got.is_some(), "witness": witness }), out, None)
        }
        Cmd::Longest { k, file } => {
            let t = trajectory_of(load_instance(&file)?)?;
            let idx = TrajIndex::new(t);
            let (start, end, length, cov) = if k == 1 {
                let r = longest_1coverable(&idx);
                (r.start, r.end, r.length, Covering::new(vec![r.witness]))
            } else {
                let r = longest_2coverable(&idx)?;
                (r.start, r.end, r.length, r.witness)
            };
            svg(&Instance::Trajectory(idx.trajectory().clone()), &cov.squares)?;
            let v = json!({
                "start": pos_json(start),
                "end": pos_json(end),
                "length": num(length),
                "witness": covering_json(&cov),
            });
            emit(&v, out, None)
        }
        Cmd::Gen(g) => {
            let (inst, dest) = match g {
                GenCmd::Planted { k, n, spread, out } => {
                    (Instance::Segments(gen_planted_coverable(k as usize, n, cli.seed, spread).0), out.out)
                }
                GenCmd::Separated { k, out } => (Instance::Segments(gen_separated_points(k as usize, cli.seed)), out.out),
                GenCmd::RandomWalk { n, step, out } => {
                    if n < 2 {
                        return Err(IoError::Usage("a random walk needs n >= 2".into()));
                    }
                    (Instance::Trajectory(Trajectory::new(gen_random_walk(n, step, cli.seed))?), out.out)
                }
            };
            svg(&inst, &[])?;
            emit(&instance_json(&inst), out, dest.as_deref())
        }
        Cmd::Oracle(OracleCmd::Longest { k, samples, file }) => {
            let t = trajectory_of(load_instance(&file)?)?;
            let o = oracle_longest(&t, k as usize, samples, samples);
            let v = json!({
                "start": pos_json(t.pos_at_arc(o.start)),
                "end": pos_json(t.pos_at_arc(o.end)),
                "length": num(o.length),
            });
            emit(&v, out, None)
        }
        Cmd::Oracle(OracleCmd::Grid { k, resolution, file }) => {
            let segs = load_instance(&file)?.segments();
            let verdict = oracle_decide_grid(&segs, k as usize, resolution).map_err(|e| IoError::Usage(e.to_string()))?;
            let name = match verdict {
                GridVerdict::Yes => "yes",
                GridVerdict::No => "no",
                GridVerdict::Boundary => "boundary",
            };
            emit(&json!({ "verdict": name }), out, None)
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
