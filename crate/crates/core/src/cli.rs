//! `expdist build|compute|verify`.
//!
//! Graph specs and reports are JSON. Rationals are always strings in
//! canonical `p/q` form, and object keys are emitted sorted.
//!
//! Exit codes: 0 success, 1 verification failures, 2 spec or validation
//! errors, 3 singular parameter, 64 usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::closed_forms::{cofsum_bi_block, det_bi_block, inverse_bi_block};
use crate::edm::{aux_matrix_a, aux_matrix_b, exponential_matrix, mu_vector, q_laplacian, x_vector, EdmBundle};
use crate::error::Error;
use crate::graph::{Attachment, BiBlockGraph, BlockSpec, Side};
use crate::matrix::{oracle_adjugate_sum, oracle_det, RationalMatrix};
use crate::rational::Rational;
use crate::recognize::ingest_edge_list;
use crate::verify::{sweep, Outcome, SweepParams, SweepReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_SPEC: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default `q` list of `expdist verify`.
pub const DEFAULT_Q_LIST: &str = "1/2,1/3,3/7,5/4,-2/3,2,-1,1";

/// Upper bound on the vertex count of a spec file; keeps malformed input
/// from exhausting memory.
pub const MAX_SPEC_VERTICES: usize = 4096;

#[derive(Debug, Parser)]
#[command(name = "expdist", version, about = "Exact exponential distance matrices of bi-block graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a graph spec and emit its canonical model and distance matrix.
    Build {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one object of F(G) at a given q.
    Compute {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded sweep of every check over random bi-block graphs.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        cases: u64,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..=64))]
        r_max: u64,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=64))]
        size_max: u64,
        /// Comma-separated rationals.
        #[arg(long, default_value = DEFAULT_Q_LIST, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum What {
    Det,
    Inv,
    Cofsum,
    Qlap,
    #[value(name = "F")]
    F,
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
    Mu,
    X,
}

impl What {
    pub fn name(self) -> &'static str {
        match self {
            What::Det => "det",
            What::Inv => "inv",
            What::Cofsum => "cofsum",
            What::Qlap => "qlap",
            What::F => "F",
            What::A => "A",
            What::B => "B",
            What::Mu => "mu",
            What::X => "x",
        }
    }
}

/// A command failure: exit code plus the message for standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, name: &str, detail: impl std::fmt::Display) -> Self {
        Failure { code, message: format!("{name}: {detail}") }
    }

    fn spec(name: &str, detail: impl std::fmt::Display) -> Self {
        Self::new(EXIT_SPEC, name, detail)
    }

    fn usage(detail: impl std::fmt::Display) -> Self {
        Self::new(EXIT_USAGE, "UsageError", detail)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SingularParameter(_) | Error::VanishingBlockDenominator(_) | Error::SingularMatrix => EXIT_SINGULAR,
            Error::ZeroQ | Error::InvalidRational(_) => EXIT_USAGE,
            _ => EXIT_SPEC,
        };
        Failure::new(code, e.name(), e)
    }
}

// ---------------------------------------------------------------- spec files

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockEntry {
    m: usize,
    n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttachmentEntry {
    cut_vertex: usize,
    side: Side,
}

/// On-disk graph description: either `blocks` (+ `attachments`) or `edges`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpecFile {
    blocks: Option<Vec<BlockEntry>>,
    attachments: Option<Vec<AttachmentEntry>>,
    edges: Option<Vec<(usize, usize)>>,
}

/// A validated spec. `input_ids` is set for edge-list specs and maps
/// canonical ids back to the ids used in the file.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub graph: BiBlockGraph,
    pub input_ids: Option<Vec<usize>>,
}

pub fn parse_spec(text: &str) -> Result<LoadedSpec, Failure> {
    let file: GraphSpecFile = serde_json::from_str(text).map_err(|e| Failure::spec("InvalidSpec", e))?;
    match (file.blocks, file.attachments, file.edges) {
        (Some(_), _, Some(_)) | (_, Some(_), Some(_)) => {
            Err(Failure::spec("AmbiguousSpec", "give either blocks/attachments or edges, not both"))
        }
        (None, None, None) => Err(Failure::spec("InvalidSpec", "spec needs blocks or edges")),
        (None, Some(_), None) => Err(Failure::spec("InvalidSpec", "attachments given without blocks")),
        (Some(blocks), attachments, None) => {
            let mut total = 0usize;
            for b in &blocks {
                total = total.saturating_add(b.m.saturating_add(b.n));
            }
            if total > MAX_SPEC_VERTICES + blocks.len() {
                return Err(Failure::spec("SpecTooLarge", format!("more than {MAX_SPEC_VERTICES} vertices")));
            }
            let blocks = blocks.into_iter().map(|b| BlockSpec::new(b.m, b.n)).collect();
            let attachments =
                attachments.unwrap_or_default().into_iter().map(|a| Attachment::new(a.cut_vertex, a.side)).collect();
            Ok(LoadedSpec { graph: BiBlockGraph::new(blocks, attachments)?, input_ids: None })
        }
        (None, None, Some(edges)) => {
            let vertex_count = match edges.iter().map(|&(u, v)| u.max(v)).max() {
                None => return Err(Error::EmptyGraph.into()),
                Some(top) if top >= MAX_SPEC_VERTICES => {
                    return Err(Failure::spec("SpecTooLarge", format!("vertex id {top} exceeds the limit")))
                }
                Some(top) => top + 1,
            };
            let recognized = ingest_edge_list(&edges, vertex_count)?;
            Ok(LoadedSpec { graph: recognized.graph, input_ids: Some(recognized.input_ids) })
        }
    }
}

pub fn load_spec(path: &Path) -> Result<LoadedSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::spec("SpecIo", format!("{}: {e}", path.display())))?;
    parse_spec(&text)
}

pub fn parse_q(text: &str) -> Result<Rational, Failure> {
    let q: Rational = text.parse().map_err(|_| Failure::usage(format!("cannot parse q = {text:?}")))?;
    if q.is_zero() {
        return Err(Error::ZeroQ.into());
    }
    Ok(q)
}

pub fn parse_q_list(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',').map(|s| parse_q(s.trim())).collect()
}

// ------------------------------------------------------------------ JSON

pub fn rational_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn vector_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_json).collect())
}

pub fn matrix_json(m: &RationalMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_json(m.row(i))).collect())
}

pub fn graph_json(g: &BiBlockGraph) -> Value {
    json!({
        "blocks": g.blocks().iter().map(|b| json!({"m": b.m, "n": b.n})).collect::<Vec<_>>(),
        "attachments": g
            .attachments()
            .iter()
            .map(|a| json!({"cut_vertex": a.cut_vertex, "side": a.side.to_string()}))
            .collect::<Vec<_>>(),
        "vertex_count": g.vertex_count(),
    })
}

fn tool_json() -> Value {
    json!({"name": "expdist", "version": VERSION})
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn emit_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("a Value always serializes");
    s.push('\n');
    s
}

/// Parses a report back; `emit_json(&parse_report(s)?) == s` for every
/// report this tool writes.
pub fn parse_report(text: &str) -> serde_json::Result<Value> {
    serde_json::from_str(text)
}

fn outcome_json(outcome: &Outcome, values: &std::collections::BTreeMap<String, Rational>) -> Value {
    let mut o = Map::new();
    o.insert("status".into(), outcome.status().into());
    match outcome {
        Outcome::Pass => {}
        Outcome::Skipped(reason) => {
            o.insert("reason".into(), reason.clone().into());
        }
        Outcome::Fail(w) => {
            let mut wj = Map::new();
            wj.insert("relation".into(), w.relation.clone().into());
            wj.insert("expected".into(), w.expected.clone().into());
            wj.insert("actual".into(), w.actual.clone().into());
            if let Some((i, j)) = w.location {
                wj.insert("row".into(), i.into());
                wj.insert("col".into(), j.into());
            }
            o.insert("witness".into(), Value::Object(wj));
        }
    }
    if !values.is_empty() {
        let vals: Map<String, Value> = values.iter().map(|(k, v)| (k.clone(), rational_json(v))).collect();
        o.insert("values".into(), Value::Object(vals));
    }
    Value::Object(o)
}

/// The report written by `expdist verify`. Timings are left out so that
/// identical flags give byte-identical files.
pub fn sweep_report_json(report: &SweepReport) -> Value {
    let p = &report.params;
    let tally = report.tally();
    let by_check: Map<String, Value> = report
        .tally_by_kind()
        .into_iter()
        .map(|(k, t)| (k.name().to_string(), json!({"pass": t.pass, "fail": t.fail, "skipped": t.skipped})))
        .collect();
    let cases: Vec<Value> = report
        .cases
        .iter()
        .map(|c| {
            let graph = c.runs.first().map(|r| graph_json(&r.case.graph)).unwrap_or(Value::Null);
            let runs: Vec<Value> = c
                .runs
                .iter()
                .map(|r| {
                    let checks: Map<String, Value> = r
                        .records
                        .iter()
                        .map(|rec| (rec.kind.name().to_string(), outcome_json(&rec.outcome, &rec.values)))
                        .collect();
                    json!({"q": rational_json(&r.case.q), "checks": checks})
                })
                .collect();
            json!({"index": c.index, "graph_seed": c.graph_seed, "graph": graph, "runs": runs})
        })
        .collect();
    json!({
        "tool": tool_json(),
        "parameters": {
            "seed": p.seed,
            "cases": p.cases,
            "r_max": p.r_max,
            "size_max": p.size_max,
            "q": p.q_list.iter().map(rational_json).collect::<Vec<_>>(),
        },
        "summary": {
            "pass": tally.pass,
            "fail": tally.fail,
            "skipped": tally.skipped,
            "total": tally.total(),
            "by_check": by_check,
        },
        "cases": cases,
    })
}

// -------------------------------------------------------------- commands

pub fn build_json(spec: &LoadedSpec) -> Value {
    let g = &spec.graph;
    let mut v = graph_json(g);
    let obj = v.as_object_mut().expect("graph_json is an object");
    obj.insert("distance_matrix".into(), json!(g.distances()));
    if let Some(ids) = &spec.input_ids {
        obj.insert("input_ids".into(), json!(ids));
    }
    obj.insert("tool".into(), tool_json());
    v
}

fn agreement(closed: crate::error::Result<Rational>, oracle: crate::error::Result<Rational>) -> Result<Value, Failure> {
    let (closed, oracle) = (closed?, oracle?);
    Ok(json!({
        "closed_form": rational_json(&closed),
        "oracle": rational_json(&oracle),
        "agree": closed == oracle,
    }))
}

pub fn compute_json(spec: &LoadedSpec, q: &Rational, what: What) -> Result<Value, Failure> {
    let g = &spec.graph;
    let mut out = match what {
        What::Det => agreement(det_bi_block(g, q), exponential_matrix(g, q).and_then(|f| oracle_det(&f)))?,
        What::Cofsum => {
            agreement(cofsum_bi_block(g, q), exponential_matrix(g, q).and_then(|f| oracle_adjugate_sum(&f)))?
        }
        What::Inv => json!({"value": matrix_json(&inverse_bi_block(&EdmBundle::build(g, q)?)?)}),
        What::Qlap => {
            if (Rational::one() - q.square()).is_zero() {
                return Err(Error::SingularParameter(format!("q = {q} makes 1 - q^2 vanish")).into());
            }
            json!({"value": matrix_json(&q_laplacian(g, q)?)})
        }
        What::F => json!({"value": matrix_json(&exponential_matrix(g, q)?)}),
        What::A => json!({"value": matrix_json(&aux_matrix_a(g, q)?)}),
        What::B => json!({"value": matrix_json(&aux_matrix_b(g, q)?)}),
        What::Mu => json!({"value": vector_json(&mu_vector(g, q)?)}),
        What::X => json!({"value": vector_json(&x_vector(g, q)?)}),
    };
    let obj = out.as_object_mut().expect("compute output is an object");
    obj.insert("what".into(), what.name().into());
    obj.insert("q".into(), rational_json(q));
    obj.insert("graph".into(), graph_json(g));
    Ok(out)
}

fn write_output(out_path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out_path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::new(EXIT_SPEC, "OutputIo", format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::new(EXIT_SPEC, "OutputIo", e)),
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Build { spec, out } => {
            let loaded = load_spec(&spec)?;
            write_output(out.as_deref(), &emit_json(&build_json(&loaded)), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Compute { spec, q, what, out } => {
            let q = parse_q(&q)?;
            let loaded = load_spec(&spec)?;
            write_output(out.as_deref(), &emit_json(&compute_json(&loaded, &q, what)?), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify { seed, cases, r_max, size_max, q, out } => {
            let params = SweepParams {
                seed,
                cases: usize::try_from(cases).map_err(Failure::usage)?,
                r_max: r_max as usize,
                size_max: size_max as usize,
                q_list: parse_q_list(&q)?,
            };
            let report = sweep(&params).map_err(|e| Failure::usage(format!("{}: {e}", e.name())))?;
            write_output(out.as_deref(), &emit_json(&sweep_report_json(&report)), stdout)?;
            Ok(if report.failure_count() == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
