//! Batch front-end behind the `loopnet` binary: reads poset and field specs,
//! runs one construction or verification command and writes a JSON report.
//!
//! Every report carries a schema version, a SHA-256 digest of the input
//! files, the full run configuration and the command's results. Exit codes:
//! 0 when every requested check passes, 1 on failure or malformed input, 2
//! when some verdict is unknown.

pub mod spec;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::causet::{validate_poset, CausalPoset, ElemId, SymmetryAction};
use crate::cochain::{build_invariant_0cochain, filling_function, Atom, Cochain0, TestFunction};
use crate::connection::frame::{build_covariant_system_with, build_frame_system, build_path_frame_with};
use crate::connection::{
    apply_gauge, build_connection_system_on, check_system, frame_change_gauge, ConnectionSystem, FrameOrder,
    LoopRepresentation, MatrixRepresentation, PathFrame, SystemCheck, WeylRepresentation,
};
use crate::error::{Error, Result};
use crate::loopgrp::{format_word, in_loop_group, is_loop, is_path, multiply, parse_word, reduce, PathEnds, Word};
use crate::net::{check_causality, check_net, fibre_generators, Net};
use crate::quotient::{EngineConfig, QuotientEngine, Verdict};
use crate::simplex::{enumerate_1simplices, enumerate_2simplices, tangent_simplices, Simplex1, SimplexClass};
use crate::weyl::{
    certify_nonflat, certify_nontrivial, em_norm, em_transform, radial_momenta, FieldConnection, FieldFunction,
    HyperboloidProfile, WeylElement, WeylSeparator,
};
use spec::{FieldSpec, PosetSpec};

pub const SCHEMA_VERSION: &str = "loopnet-report/1";
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Parser)]
#[command(name = "loopnet", version, about = "Nets of causal loops: construction and verification")]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command.
#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Options {
    /// Write the report here instead of to stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed of the matrix backend; also overrides the field's Monte Carlo seed.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub seed: Option<u64>,
    /// Length cap of enumerated fibre loops.
    #[arg(long, global = true, default_value_t = 4)]
    pub loop_cap: usize,
    /// Most generators enumerated per fibre before the cap is lowered.
    #[arg(long, global = true, default_value_t = 50_000)]
    pub net_budget: usize,
    /// Moves allowed in a rewrite certificate search.
    #[arg(long, global = true, default_value_t = 6)]
    pub bfs_depth: usize,
    /// Distinct words visited by a rewrite certificate search.
    #[arg(long, global = true, default_value_t = 20_000)]
    pub bfs_width: usize,
    /// Longest word explored by a rewrite certificate search.
    #[arg(long, global = true, default_value_t = 40)]
    pub max_word_len: usize,
    /// Longest path tried when building a covariant path-frame.
    #[arg(long, global = true, default_value_t = 6)]
    pub frame_depth: usize,
    /// Most 2-simplices enumerated.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub simplex_cap: usize,
    /// Tolerance of connection checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Relative tolerance between the two routes of a nontriviality certificate.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub route_tolerance: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            output: None,
            seed: None,
            loop_cap: 4,
            net_budget: 50_000,
            bfs_depth: 6,
            bfs_width: 20_000,
            max_word_len: 40,
            frame_depth: 6,
            simplex_cap: 10_000,
            tolerance: 1e-6,
            route_tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Print the poset spec of a named fixture.
    Fixture {
        #[arg(value_parser = ["diamond", "twotowers", "minkowski", "circle12", "causalset7", "swap"])]
        name: String,
    },
    /// Check the causal-poset axioms.
    Validate { poset: PathBuf },
    /// Count 1- and 2-simplices.
    Simplices { poset: PathBuf },
    /// Operations on word literals.
    Word {
        /// Poset spec; the diamond fixture when absent.
        #[arg(long)]
        poset: Option<PathBuf>,
        #[command(subcommand)]
        op: WordOp,
    },
    /// Isotony, causality and covariance of the net of loops.
    Net { poset: PathBuf },
    /// A path-frame over one pole, or a covariant path-frame system.
    Pathframe {
        poset: PathBuf,
        #[arg(long)]
        pole: Option<String>,
        #[arg(long, value_enum, default_value_t = Order::Ascending)]
        order: Order,
        /// Build each frame independently instead of covariantly.
        #[arg(long)]
        independent: bool,
    },
    /// Build a connection system and check causality, covariance and inverses.
    ConnectionCheck(ConnectionArgs),
    /// Apply the gauge between two covariant frame systems and check that it
    /// carries one connection system onto the other and fixes loop values.
    GaugeApply(ConnectionArgs),
    /// Field holonomy of a word.
    Holonomy { poset: PathBuf, field: PathBuf, word: String },
    /// Certificates of nontriviality, non-flatness and causality.
    Certify {
        #[command(subcommand)]
        what: CertifyOp,
    },
    /// Hyperboloid transform of a bump on the radial momentum grid.
    EmTransform {
        field: PathBuf,
        /// Atom `t,x,y,z,r` with unit amplitude.
        #[arg(long, conflicts_with = "element")]
        atom: Option<String>,
        #[arg(long, requires = "element")]
        poset: Option<PathBuf>,
        /// Element whose filling bump is transformed.
        #[arg(long, requires = "poset")]
        element: Option<String>,
        /// Write the momentum grid and values as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Order {
    Ascending,
    Descending,
}

impl From<Order> for FrameOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Ascending => FrameOrder::Ascending,
            Order::Descending => FrameOrder::Descending,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Backend {
    Matrix,
    Weyl,
}

#[derive(Debug, Clone, Args)]
pub struct ConnectionArgs {
    pub poset: PathBuf,
    #[arg(long, value_enum, default_value_t = Backend::Matrix)]
    pub backend: Backend,
    /// Field spec, for the Weyl backend.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Space-separated causally disjoint components, one tensor factor each,
    /// for the matrix backend.
    #[arg(long, value_delimiter = ' ')]
    pub components: Vec<String>,
    #[arg(long, default_value_t = 2)]
    pub factor_dim: usize,
    /// Space-separated bases of the connection system; every pole when absent.
    #[arg(long, value_delimiter = ' ')]
    pub bases: Vec<String>,
    /// Only letters supported on these space-separated elements; every letter
    /// when absent.
    #[arg(long, value_delimiter = ' ')]
    pub supports: Vec<String>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum WordOp {
    /// Free reduction.
    Reduce { word: String },
    Inverse { word: String },
    /// `w1 w2`, reduced.
    Multiply { w1: String, w2: String },
    /// Whether the word is a path, and its end points.
    Path { word: String },
    /// Whether the word is a loop, and its base.
    Loop { word: String },
    /// Split into loop blocks when the word lies in the loop group.
    LoopGroup { word: String },
    /// Equality in the causal quotient.
    Equal { w1: String, w2: String },
}

#[derive(Debug, Clone, Subcommand)]
pub enum CertifyOp {
    /// `‖E_m((δf)^odd_b)‖² > 0` by two routes, with a zero-shift control.
    Nontrivial {
        poset: PathBuf,
        field: PathBuf,
        /// Simplex literal; the first tangent simplex with translated faces when absent.
        #[arg(long)]
        simplex: Option<String>,
    },
    /// A 2-simplex off the nerve violating the cocycle identity, rechecked
    /// with doubled Monte Carlo samples.
    Nonflat { poset: PathBuf, field: PathBuf },
    /// Quotient equality of commutators of loops under causally disjoint pairs.
    Causality {
        poset: PathBuf,
        /// Also measure the commutator phases in the field representation.
        #[arg(long)]
        field: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Status {
    Pass,
    Fail,
    Unknown,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Unknown => 2,
        }
    }

    fn of(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Echo of the command and every cap and tolerance in force.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    pub arguments: BTreeMap<String, Value>,
    pub seed: u64,
    #[serde(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema_version: &'static str,
    pub command: String,
    pub status: Status,
    pub input_digest: String,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    pub results: Value,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ErrorReport {
    pub schema_version: &'static str,
    pub command: String,
    pub error: ErrorObject,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorObject {
    pub kind: String,
    pub message: String,
}

impl ErrorObject {
    fn of(e: &Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        ErrorObject { kind, message: e.to_string() }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Input files read so far and their digest.
#[derive(Default)]
struct Inputs {
    paths: Vec<String>,
    hasher: Sha256,
}

impl Inputs {
    fn bytes(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = read(path)?;
        self.paths.push(path.display().to_string());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        Ok(bytes)
    }

    fn poset(&mut self, path: &Path) -> Result<(CausalPoset, SymmetryAction)> {
        let bytes = self.bytes(path)?;
        let spec: PosetSpec =
            serde_json::from_slice(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        spec.build()
    }

    fn field(&mut self, path: &Path, seed: Option<u64>) -> Result<FieldSpec> {
        let bytes = self.bytes(path)?;
        let mut cfg: FieldSpec =
            serde_json::from_slice(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if let Some(s) = seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn digest(&self) -> String {
        self.hasher.clone().finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

struct Outcome {
    status: Status,
    field: Option<FieldSpec>,
    results: Value,
}

impl Outcome {
    fn new(status: Status, results: Value) -> Self {
        Outcome { status, field: None, results }
    }

    fn with_field(mut self, f: FieldSpec) -> Self {
        self.field = Some(f);
        self
    }
}

fn check_options(o: &Options) -> Result<()> {
    let caps = [o.loop_cap, o.net_budget, o.bfs_depth, o.bfs_width, o.max_word_len, o.frame_depth, o.simplex_cap];
    let tols = [o.tolerance, o.route_tolerance];
    if caps.contains(&0) || tols.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidRange("caps and tolerances must be positive".into()));
    }
    Ok(())
}

fn engine_config(o: &Options) -> EngineConfig {
    EngineConfig { max_depth: o.bfs_depth, max_width: o.bfs_width, max_len: o.max_word_len }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Fixture { .. } => "fixture".into(),
        Command::Validate { .. } => "validate".into(),
        Command::Simplices { .. } => "simplices".into(),
        Command::Word { op, .. } => format!("word {}", word_op_name(op)),
        Command::Net { .. } => "net".into(),
        Command::Pathframe { .. } => "pathframe".into(),
        Command::ConnectionCheck(_) => "connection-check".into(),
        Command::GaugeApply(_) => "gauge-apply".into(),
        Command::Holonomy { .. } => "holonomy".into(),
        Command::Certify { what } => match what {
            CertifyOp::Nontrivial { .. } => "certify nontrivial".into(),
            CertifyOp::Nonflat { .. } => "certify nonflat".into(),
            CertifyOp::Causality { .. } => "certify causality".into(),
        },
        Command::EmTransform { .. } => "em-transform".into(),
    }
}

fn word_op_name(op: &WordOp) -> &'static str {
    match op {
        WordOp::Reduce { .. } => "reduce",
        WordOp::Inverse { .. } => "inverse",
        WordOp::Multiply { .. } => "multiply",
        WordOp::Path { .. } => "path",
        WordOp::Loop { .. } => "loop",
        WordOp::LoopGroup { .. } => "loop-group",
        WordOp::Equal { .. } => "equal",
    }
}

/// Non-file arguments of a command, for the configuration echo.
fn arguments(c: &Command) -> BTreeMap<String, Value> {
    let mut out = BTreeMap::new();
    let mut put = |k: &str, v: Value| {
        if !v.is_null() {
            out.insert(k.to_string(), v);
        }
    };
    match c {
        Command::Fixture { name } => put("name", json!(name)),
        Command::Word { op, .. } => match op {
            WordOp::Reduce { word }
            | WordOp::Inverse { word }
            | WordOp::Path { word }
            | WordOp::Loop { word }
            | WordOp::LoopGroup { word } => put("word", json!(word)),
            WordOp::Multiply { w1, w2 } | WordOp::Equal { w1, w2 } => {
                put("w1", json!(w1));
                put("w2", json!(w2));
            }
        },
        Command::Pathframe { pole, order, independent, .. } => {
            put("pole", json!(pole));
            put("order", json!(order));
            put("independent", json!(independent));
        }
        Command::ConnectionCheck(a) | Command::GaugeApply(a) => {
            put("backend", json!(a.backend));
            put("components", json!(a.components));
            put("factorDim", json!(a.factor_dim));
            put("bases", json!(a.bases));
            put("supports", json!(a.supports));
        }
        Command::Holonomy { word, .. } => put("word", json!(word)),
        Command::Certify { what: CertifyOp::Nontrivial { simplex, .. } } => put("simplex", json!(simplex)),
        Command::EmTransform { atom, element, csv, .. } => {
            put("atom", json!(atom));
            put("element", json!(element));
            put("csv", json!(csv.as_ref().map(|p| p.display().to_string())));
        }
        _ => {}
    }
    out
}

/// Parses arguments, runs the command and writes its report; returns the
/// exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let report = ErrorReport {
                schema_version: SCHEMA_VERSION,
                command: String::new(),
                error: ErrorObject { kind: "Usage".into(), message: e.to_string().trim_end().to_string() },
            };
            return emit(&Options::default(), &serde_json::to_string_pretty(&report).expect("serializable"), 1);
        }
    };
    configure_threads();
    run(&cli)
}

/// Caps rayon at `LOOPNET_THREADS` threads when set.
fn configure_threads() {
    if let Some(n) = std::env::var("LOOPNET_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // fails only when a pool already exists, which then stays in use
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

pub fn run(cli: &Cli) -> i32 {
    let name = command_name(&cli.command);
    if let Command::Fixture { name: fixture } = &cli.command {
        return match PosetSpec::fixture(fixture) {
            Ok(spec) => emit(&cli.options, &serde_json::to_string_pretty(&spec).expect("serializable"), 0),
            Err(e) => emit_error(&cli.options, &name, &e),
        };
    }
    let mut inputs = Inputs::default();
    let outcome = check_options(&cli.options).and_then(|_| execute(&cli.command, &cli.options, &mut inputs));
    match outcome {
        Ok(out) => {
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: name.clone(),
                status: out.status,
                input_digest: inputs.digest(),
                config: RunConfig {
                    command: name,
                    inputs: inputs.paths.clone(),
                    arguments: arguments(&cli.command),
                    seed: out.field.as_ref().map(|f| f.seed).or(cli.options.seed).unwrap_or(DEFAULT_SEED),
                    options: cli.options.clone(),
                },
                field: out.field,
                results: out.results,
            };
            emit(&cli.options, &serde_json::to_string_pretty(&report).expect("serializable"), out.status.exit_code())
        }
        Err(e) => emit_error(&cli.options, &name, &e),
    }
}

fn emit(o: &Options, text: &str, code: i32) -> i32 {
    use std::io::Write;
    match &o.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                eprintln!("cannot write {}: {e}", path.display());
                return 1;
            }
        }
        // a closed stdout must not hide the exit code
        None => drop(writeln!(std::io::stdout().lock(), "{text}")),
    }
    code
}

fn emit_error(o: &Options, command: &str, e: &Error) -> i32 {
    let report = ErrorReport { schema_version: SCHEMA_VERSION, command: command.to_string(), error: ErrorObject::of(e) };
    emit(o, &serde_json::to_string_pretty(&report).expect("serializable"), 1);
    1
}

fn execute(c: &Command, o: &Options, inputs: &mut Inputs) -> Result<Outcome> {
    match c {
        Command::Fixture { .. } => unreachable!("handled before execution"),
        Command::Validate { poset } => {
            let (p, act) = inputs.poset(poset)?;
            cmd_validate(&p, &act)
        }
        Command::Simplices { poset } => {
            let (p, _) = inputs.poset(poset)?;
            Ok(cmd_simplices(&p, o))
        }
        Command::Word { poset, op } => {
            let p = match poset {
                Some(path) => inputs.poset(path)?.0,
                None => crate::fixtures::diamond(),
            };
            cmd_word(&p, op, o)
        }
        Command::Net { poset } => {
            let (p, act) = inputs.poset(poset)?;
            Ok(cmd_net(&p, &act, o))
        }
        Command::Pathframe { poset, pole, order, independent } => {
            let (p, act) = inputs.poset(poset)?;
            cmd_pathframe(&p, &act, pole.as_deref(), (*order).into(), *independent, o)
        }
        Command::ConnectionCheck(a) => with_backend(a, o, inputs, cmd_connection_check),
        Command::GaugeApply(a) => with_backend(a, o, inputs, cmd_gauge_apply),
        Command::Holonomy { poset, field, word } => {
            let (p, act) = inputs.poset(poset)?;
            let cfg = inputs.field(field, o.seed)?;
            cmd_holonomy(&p, &act, &cfg, word).map(|r| r.with_field(cfg))
        }
        Command::Certify { what } => match what {
            CertifyOp::Nontrivial { poset, field, simplex } => {
                let (p, act) = inputs.poset(poset)?;
                let cfg = inputs.field(field, o.seed)?;
                cmd_nontrivial(&p, &act, &cfg, simplex.as_deref(), o).map(|r| r.with_field(cfg))
            }
            CertifyOp::Nonflat { poset, field } => {
                let (p, act) = inputs.poset(poset)?;
                let cfg = inputs.field(field, o.seed)?;
                cmd_nonflat(&p, &act, &cfg, o).map(|r| r.with_field(cfg))
            }
            CertifyOp::Causality { poset, field } => {
                let (p, act) = inputs.poset(poset)?;
                let cfg = field.as_ref().map(|f| inputs.field(f, o.seed)).transpose()?;
                let out = cmd_causality(&p, &act, cfg.as_ref(), o)?;
                Ok(match cfg {
                    Some(cfg) => out.with_field(cfg),
                    None => out,
                })
            }
        },
        Command::EmTransform { field, atom, poset, element, csv } => {
            let cfg = inputs.field(field, o.seed)?;
            let f = match (atom, poset, element) {
                (Some(a), _, _) => parse_atom(a)?,
                (None, Some(path), Some(label)) => {
                    let (p, _) = inputs.poset(path)?;
                    filling_function(&p, p.id(label)?)?
                }
                _ => return Err(Error::Parse("em-transform needs --atom or --poset with --element".into())),
            };
            cmd_em_transform(&f, &cfg, csv.as_deref()).map(|r| r.with_field(cfg))
        }
    }
}

fn labels(p: &CausalPoset, ids: impl IntoIterator<Item = ElemId>) -> Vec<String> {
    ids.into_iter().map(|a| p.label(a).to_string()).collect()
}

fn simplex_literal(p: &CausalPoset, b: Simplex1) -> String {
    b.display(p).to_string()
}

fn cmd_validate(p: &CausalPoset, act: &SymmetryAction) -> Result<Outcome> {
    let r = validate_poset(p);
    let results = json!({
        "elements": p.len(),
        "symmetryOrder": act.order(),
        "violations": r.violations,
        "pathwiseConnected": r.pathwise_connected,
        "continuumProperties": r.continuum_properties,
    });
    Ok(Outcome::new(Status::of(r.is_valid()), results))
}

fn cmd_simplices(p: &CausalPoset, o: &Options) -> Outcome {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, class) in enumerate_1simplices(p) {
        let key = match class {
            SimplexClass::Degenerate => "degenerate",
            SimplexClass::Nerve => "nerve",
            SimplexClass::Tangent => "tangent",
            SimplexClass::ReversedNerve => "reversedNerve",
        };
        *counts.entry(key).or_default() += 1;
    }
    let tangent = tangent_simplices(p);
    let involutions = tangent.iter().filter(|b| b.opposite() == **b).count();
    let two = enumerate_2simplices(p, o.simplex_cap);
    let nerve2 = two.simplices.iter().filter(|(_, n)| *n).count();
    let results = json!({
        "elements": p.len(),
        "oneSimplices": counts,
        "generators": (tangent.len() + involutions) / 2,
        "involutions": involutions,
        "twoSimplices": {
            "enumerated": two.simplices.len(),
            "nerve": nerve2,
            "truncated": two.truncated,
        },
    });
    Outcome::new(Status::Pass, results)
}

fn ends_json(p: &CausalPoset, e: Option<PathEnds>) -> Value {
    match e {
        None => json!({ "isPath": false }),
        Some(PathEnds::Everywhere) => json!({ "isPath": true, "empty": true }),
        Some(PathEnds::Span { start, end }) => {
            json!({ "isPath": true, "start": p.label(start), "end": p.label(end) })
        }
    }
}

fn verdict_json(p: &CausalPoset, v: &Verdict) -> Value {
    match v {
        Verdict::Equal(cert) => json!({
            "verdict": "equal",
            "steps": cert.steps.len(),
            "verified": cert.verify(p),
        }),
        Verdict::Unequal(sep) => json!({ "verdict": "unequal", "separation": sep }),
        Verdict::Unknown { explored } => json!({ "verdict": "unknown", "explored": explored }),
    }
}

fn cmd_word(p: &CausalPoset, op: &WordOp, o: &Options) -> Result<Outcome> {
    let lit = |w: &Word| format_word(p, w);
    let results = match op {
        WordOp::Reduce { word } => {
            let r = reduce(&parse_word(p, word)?);
            json!({ "word": lit(&r), "length": r.len() })
        }
        WordOp::Inverse { word } => {
            let r = parse_word(p, word)?.inverse();
            json!({ "word": lit(&r), "length": r.len() })
        }
        WordOp::Multiply { w1, w2 } => {
            let r = reduce(&multiply(&parse_word(p, w1)?, &parse_word(p, w2)?));
            json!({ "word": lit(&r), "length": r.len() })
        }
        WordOp::Path { word } => ends_json(p, is_path(&parse_word(p, word)?)),
        WordOp::Loop { word } => {
            let base = is_loop(&parse_word(p, word)?);
            json!({ "isLoop": base.is_some(), "base": base.map(|b| p.label(b)) })
        }
        WordOp::LoopGroup { word } => {
            let w = parse_word(p, word)?;
            match in_loop_group(&w) {
                None => json!({ "member": false }),
                Some(cuts) => {
                    let mut blocks = Vec::new();
                    let mut start = 0;
                    for &c in &cuts {
                        blocks.push(lit(&w.slice(start..c)));
                        start = c;
                    }
                    json!({ "member": true, "cuts": cuts, "blocks": blocks })
                }
            }
        }
        WordOp::Equal { w1, w2 } => {
            let engine = QuotientEngine::new(p, engine_config(o));
            let v = engine.equal(&parse_word(p, w1)?, &parse_word(p, w2)?);
            let status = if v.is_unknown() { Status::Unknown } else { Status::Pass };
            return Ok(Outcome::new(status, verdict_json(p, &v)));
        }
    };
    Ok(Outcome::new(Status::Pass, results))
}

fn cmd_net(p: &CausalPoset, act: &SymmetryAction, o: &Options) -> Outcome {
    let net = Net::build(p, o.loop_cap, o.net_budget);
    let engine = QuotientEngine::new(p, engine_config(o));
    let r = check_net(&net, &engine, act);
    let unknown = r.causality.iter().any(|e| e.verdict == "unknown");
    let status = match (r.holds(), unknown) {
        (true, _) => Status::Pass,
        (false, true) if r.isotony_holds() && r.covariance_holds() => Status::Unknown,
        _ => Status::Fail,
    };
    let results = json!({
        "fibres": net.fibres.iter().map(|f| json!({
            "base": p.label(f.base),
            "cap": f.cap,
            "generators": f.len(),
        })).collect::<Vec<_>>(),
        "isotony": r.isotony.iter().map(|e| json!({
            "small": p.label(e.small),
            "large": p.label(e.large),
            "generators": e.generators,
            "holds": e.holds,
        })).collect::<Vec<_>>(),
        "causality": r.causality.iter().map(|e| json!({
            "pair": [p.label(e.pair.0), p.label(e.pair.1)],
            "g": format_word(p, &e.g),
            "h": format_word(p, &e.h),
            "verdict": e.verdict,
            "steps": e.steps,
        })).collect::<Vec<_>>(),
        "covariance": r.covariance.iter().map(|e| json!({
            "groupElement": e.group_element,
            "base": p.label(e.base),
            "image": p.label(e.image),
            "generators": e.generators,
            "bijective": e.bijective,
            "composition": e.composition,
        })).collect::<Vec<_>>(),
        "summary": {
            "isotony": r.isotony_holds(),
            "causality": r.causality_holds(),
            "covariance": r.covariance_holds(),
        },
    });
    Outcome::new(status, results)
}

fn frame_json(p: &CausalPoset, f: &PathFrame) -> Value {
    let paths: BTreeMap<&str, String> = f.paths.iter().map(|(&a, w)| (p.label(a), format_word(p, w))).collect();
    json!({ "pole": p.label(f.pole), "paths": paths })
}

fn frame_error(p: &CausalPoset, e: &Error) -> Option<Value> {
    match e {
        Error::Obstructed { from, to, stabilizer } => Some(json!({
            "verdict": "obstructed",
            "from": p.label(*from),
            "to": p.label(*to),
            "stabilizer": stabilizer,
        })),
        Error::NotConnected { from, to } => Some(json!({
            "verdict": "notConnected",
            "from": p.label(*from),
            "to": p.label(*to),
        })),
        _ => None,
    }
}

fn cmd_pathframe(
    p: &CausalPoset,
    act: &SymmetryAction,
    pole: Option<&str>,
    order: FrameOrder,
    independent: bool,
    o: &Options,
) -> Result<Outcome> {
    let built = match pole {
        Some(label) => build_path_frame_with(p, p.id(label)?, order).map(|f| {
            json!({ "verdict": "constructed", "frame": frame_json(p, &f), "valid": f.validate(p) })
        }),
        None => {
            let sys = if independent {
                build_frame_system(p, order)
            } else {
                build_covariant_system_with(p, act, o.frame_depth, order)
            };
            sys.map(|s| {
                let violations: Vec<Value> = s
                    .covariance_violations(act)
                    .into_iter()
                    .map(|(g, b)| json!({ "groupElement": g, "pole": p.label(b) }))
                    .collect();
                json!({
                    "verdict": "constructed",
                    "valid": s.validate(p),
                    "covariant": violations.is_empty(),
                    "covarianceViolations": violations,
                    "frames": s.frames.values().map(|f| frame_json(p, f)).collect::<Vec<_>>(),
                })
            })
        }
    };
    match built {
        Ok(v) => {
            let pass = v["valid"] == json!(true) && (independent || pole.is_some() || v["covariant"] == json!(true));
            Ok(Outcome::new(Status::of(pass), v))
        }
        Err(e) => frame_error(p, &e).map(|v| Outcome::new(Status::Fail, v)).ok_or(e),
    }
}

/// Bases and letters of a connection system.
struct Scope {
    bases: Vec<ElemId>,
    letters: Vec<Simplex1>,
}

/// Elements named in a space-separated list.
fn ids(p: &CausalPoset, list: &[String]) -> Result<Vec<ElemId>> {
    list.iter().filter(|l| !l.is_empty()).map(|l| p.id(l)).collect()
}

fn scope(p: &CausalPoset, a: &ConnectionArgs) -> Result<Scope> {
    let mut bases = ids(p, &a.bases)?;
    if bases.is_empty() {
        bases = p.elements().filter(|&x| !p.is_maximal(x)).collect();
    }
    let supports = ids(p, &a.supports)?;
    let letters =
        tangent_simplices(p).into_iter().filter(|b| supports.is_empty() || supports.contains(&b.support)).collect();
    Ok(Scope { bases, letters })
}

type ConnectionCommand =
    fn(&CausalPoset, &SymmetryAction, Option<&SymmetryAction>, &dyn LoopRepresentation, &Scope, &Options) -> Result<Outcome>;

/// Builds the requested backend and runs `f` with it.
fn with_backend(a: &ConnectionArgs, o: &Options, inputs: &mut Inputs, f: ConnectionCommand) -> Result<Outcome> {
    let (p, act) = inputs.poset(&a.poset)?;
    let sc = scope(&p, a)?;
    match a.backend {
        Backend::Matrix => {
            let comps = ids(&p, &a.components)?;
            if comps.is_empty() {
                return Err(Error::InvalidRange("the matrix backend needs --components".into()));
            }
            let seed = o.seed.unwrap_or(DEFAULT_SEED);
            let symmetric = act.order() > 1;
            let rep = MatrixRepresentation::tensor(&p, &comps, symmetric.then_some(&act), a.factor_dim, seed)?;
            f(&p, &act, symmetric.then_some(&act), &rep, &sc, o)
        }
        Backend::Weyl => {
            let path = a.field.as_ref().ok_or_else(|| Error::Parse("the Weyl backend needs --field".into()))?;
            let cfg = inputs.field(path, o.seed)?;
            let prof = HyperboloidProfile::new(cfg.clone())?;
            let f0 = invariant_cochain(&p, &act)?;
            let conn = FieldConnection::from_0cochain(&p, &f0, &prof)?;
            let geometric = act.has_geometry().then_some(&act);
            let rep = WeylRepresentation::new(&conn, geometric);
            f(&p, &act, geometric, &rep, &sc, o).map(|r| r.with_field(cfg))
        }
    }
}

/// The invariant 0-cochain of filling bumps; every filling bump is
/// invariant under a group without geometry only if it is trivial.
fn invariant_cochain(p: &CausalPoset, act: &SymmetryAction) -> Result<Cochain0> {
    if act.has_geometry() {
        return build_invariant_0cochain(p, act);
    }
    if act.order() > 1 {
        return Err(Error::MissingGeometry);
    }
    Ok(Cochain0::from_values(p.elements().map(|a| filling_function(p, a).map(|f| (a, f))).collect::<Result<Vec<_>>>()?))
}

fn cmd_connection_check(
    p: &CausalPoset,
    act: &SymmetryAction,
    check_act: Option<&SymmetryAction>,
    rep: &dyn LoopRepresentation,
    sc: &Scope,
    o: &Options,
) -> Result<Outcome> {
    let sys = match build_covariant_system_with(p, act, o.frame_depth, FrameOrder::Ascending) {
        Ok(s) => s,
        Err(e) => return frame_error(p, &e).map(|v| Outcome::new(Status::Fail, v)).ok_or(e),
    };
    let u = build_connection_system_on(rep, &sys, &sc.bases, &sc.letters)?;
    let cfg = SystemCheck { loop_cap: o.loop_cap.min(2), tolerance: o.tolerance };
    let r = check_system(p, rep, &u, check_act, &cfg)?;
    let results = json!({
        "backend": rep.name(),
        "bases": labels(p, sc.bases.iter().copied()),
        "letters": sc.letters.len(),
        "causalityChecks": r.causality.len(),
        "maxCausalityDeviation": r.max_causality_deviation(),
        "covarianceChecks": r.covariance.len(),
        "maxCovarianceDeviation": r.max_covariance_deviation(),
        "inverseDefect": r.inverse_defect,
        "skippedLoops": r.skipped_loops,
        "loopCap": cfg.loop_cap,
        "violations": r.violations(p),
    });
    Ok(Outcome::new(Status::of(r.holds()), results))
}

fn cmd_gauge_apply(
    p: &CausalPoset,
    act: &SymmetryAction,
    check_act: Option<&SymmetryAction>,
    rep: &dyn LoopRepresentation,
    sc: &Scope,
    o: &Options,
) -> Result<Outcome> {
    let build = |order| build_covariant_system_with(p, act, o.frame_depth, order);
    let (sys_p, sys_q) = match (build(FrameOrder::Ascending), build(FrameOrder::Descending)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return frame_error(p, &e).map(|v| Outcome::new(Status::Fail, v)).ok_or(e),
    };
    let up = build_connection_system_on(rep, &sys_p, &sc.bases, &sc.letters)?;
    let uq = build_connection_system_on(rep, &sys_q, &sc.bases, &sc.letters)?;
    let g = frame_change_gauge(rep, &sys_p, &sys_q, &sc.bases)?;
    let ug = apply_gauge(rep, &up, &g)?;
    let mut connection_dev: f64 = 0.0;
    let mut changed = 0usize;
    for (base, c) in &uq.per_base {
        for (b, v) in c.iter() {
            let gauged = ug.base(*base).and_then(|u| u.get(b)).ok_or_else(|| Error::MissingValue(format!("{b:?}")))?;
            connection_dev = connection_dev.max(rep.deviation(gauged, v)?);
            let before = up.base(*base).and_then(|u| u.get(b)).ok_or_else(|| Error::MissingValue(format!("{b:?}")))?;
            if !rep.equal(before, v)? {
                changed += 1;
            }
        }
    }
    let (loop_dev, loops) = loop_invariance(p, rep, &up, &ug, o.loop_cap.min(3))?;
    let equivariance = match check_act {
        Some(a) => Some(g.equivariance_defect(rep, a)?),
        None => None,
    };
    let tol = o.tolerance;
    let pass = connection_dev <= tol && loop_dev <= tol && equivariance.is_none_or(|d| d <= tol);
    let results = json!({
        "backend": rep.name(),
        "bases": labels(p, sc.bases.iter().copied()),
        "letters": sc.letters.len(),
        "valuesChangedByFrame": changed,
        "gaugedVsTarget": connection_dev,
        "loopsChecked": loops,
        "loopValueDeviation": loop_dev,
        "gaugeEquivariance": equivariance,
        "gaugeUnitarity": g.unitarity_defect(),
    });
    Ok(Outcome::new(Status::of(pass), results))
}

/// Largest change of `w(ℓ)` under the gauge over fibre loops at each base.
fn loop_invariance(
    p: &CausalPoset,
    rep: &dyn LoopRepresentation,
    before: &ConnectionSystem,
    after: &ConnectionSystem,
    cap: usize,
) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &o in before.per_base.keys() {
        for top in p.upper_set(o) {
            for g in fibre_generators(p, top, cap).generators {
                if is_loop(&g) == Some(o) && before.covers(&g) {
                    worst = worst.max(rep.deviation(&after.loop_value(rep, &g)?, &before.loop_value(rep, &g)?)?);
                    count += 1;
                }
            }
        }
    }
    Ok((worst, count))
}

fn weyl_json(w: &WeylElement) -> Value {
    let terms: Vec<Value> = w
        .func
        .iter()
        .map(|((c, r), a)| {
            json!({
                "center": c.map(crate::causet::q_to_f64),
                "scale": crate::causet::q_to_f64(*r),
                "coefficient": a,
            })
        })
        .collect();
    json!({ "phase": w.phase, "function": terms })
}

fn cmd_holonomy(p: &CausalPoset, act: &SymmetryAction, cfg: &FieldSpec, word: &str) -> Result<Outcome> {
    let w = parse_word(p, word)?;
    let prof = HyperboloidProfile::new(cfg.clone())?;
    let conn = FieldConnection::from_0cochain(p, &invariant_cochain(p, act)?, &prof)?;
    let h = conn.holonomy(&w)?;
    let letters: Vec<Value> = w
        .letters()
        .iter()
        .map(|&b| {
            let c = conn.corona(b)?;
            Ok(json!({ "letter": simplex_literal(p, b), "corona": c }))
        })
        .collect::<Result<_>>()?;
    let results = json!({
        "word": format_word(p, &w),
        "reduced": format_word(p, &reduce(&w)),
        "isLoop": is_loop(&w).is_some(),
        "holonomy": weyl_json(&h),
        "letters": letters,
    });
    Ok(Outcome::new(Status::Pass, results))
}

fn cmd_nontrivial(
    p: &CausalPoset,
    act: &SymmetryAction,
    cfg: &FieldSpec,
    simplex: Option<&str>,
    o: &Options,
) -> Result<Outcome> {
    let prof = HyperboloidProfile::new(cfg.clone())?;
    let f0 = invariant_cochain(p, act)?;
    let tangent = tangent_simplices(p);
    let cert = match simplex {
        Some(text) => {
            let w = parse_word(p, text)?;
            let [b] = w.letters() else {
                return Err(Error::Parse("--simplex takes a single letter".into()));
            };
            certify_nontrivial(p, &f0, *b, &prof)?
        }
        None => tangent
            .iter()
            .filter(|b| b.d0 != b.d1)
            .find_map(|&b| certify_nontrivial(p, &f0, b, &prof).ok().filter(|c| c.direct > 0.0))
            .ok_or_else(|| Error::InvalidSimplex("no tangent simplex with translated faces".into()))?,
    };
    let control = tangent
        .iter()
        .filter(|b| b.d0 == b.d1)
        .find_map(|&b| certify_nontrivial(p, &f0, b, &prof).ok());
    let control_ok = control.as_ref().is_none_or(|c| c.direct == 0.0 && c.factorized == 0.0);
    let pass = cert.positive() && cert.rel_err < o.route_tolerance && control_ok;
    let results = json!({
        "simplex": simplex_literal(p, cert.simplex),
        "certificate": cert,
        "positive": cert.positive(),
        "routesAgree": cert.rel_err < o.route_tolerance,
        "control": control.map(|c| json!({ "simplex": simplex_literal(p, c.simplex), "direct": c.direct, "factorized": c.factorized })),
    });
    Ok(Outcome::new(Status::of(pass), results))
}

fn cmd_nonflat(p: &CausalPoset, act: &SymmetryAction, cfg: &FieldSpec, o: &Options) -> Result<Outcome> {
    let f0 = invariant_cochain(p, act)?;
    let prof = HyperboloidProfile::new(cfg.clone())?;
    let conn = FieldConnection::from_0cochain(p, &f0, &prof)?;
    let w = match certify_nonflat(&conn, o.simplex_cap) {
        Ok(w) => w,
        Err(Error::NoWitnessFound) => {
            return Ok(Outcome::new(Status::Fail, json!({ "verdict": "noWitness", "cap": o.simplex_cap })))
        }
        Err(e) => return Err(e),
    };
    let doubled = HyperboloidProfile::new(FieldSpec { mc_samples: 2 * cfg.mc_samples, ..cfg.clone() })?;
    let conn2 = FieldConnection::from_0cochain(p, &f0, &doubled)?;
    let w2 = certify_nonflat(&conn2, o.simplex_cap)?;
    let rel_change = (w2.mismatch - w.mismatch).abs() / w.mismatch;
    let reproducible = w2.simplex == w.simplex && rel_change < cfg.tolerances.monte_carlo;
    let c = &w.simplex;
    let results = json!({
        "verdict": "witness",
        "simplex": {
            "support": p.label(c.support),
            "faces": [simplex_literal(p, c.f0), simplex_literal(p, c.f1), simplex_literal(p, c.f2)],
        },
        "weights": w.weights,
        "mismatch": w.mismatch,
        "phase": w.phase,
        "examined": w.examined,
        "doubledSamples": { "mismatch": w2.mismatch, "relChange": rel_change, "sameSimplex": w2.simplex == w.simplex },
        "reproducible": reproducible,
    });
    Ok(Outcome::new(Status::of(w.mismatch > cfg.tolerances.function && reproducible), results))
}

fn cmd_causality(p: &CausalPoset, act: &SymmetryAction, cfg: Option<&FieldSpec>, o: &Options) -> Result<Outcome> {
    let prof = cfg.map(|c| HyperboloidProfile::new(c.clone())).transpose()?;
    let f0 = match prof {
        Some(_) => Some(invariant_cochain(p, act)?),
        None => None,
    };
    let conn = match (&prof, &f0) {
        (Some(prof), Some(f0)) => Some(FieldConnection::from_0cochain(p, f0, prof)?),
        _ => None,
    };
    let mut engine = QuotientEngine::new(p, engine_config(o));
    if let Some(c) = &conn {
        engine = engine.with_separator(Box::new(WeylSeparator { connection: c }));
    }
    let tol = cfg.map_or(o.tolerance, |c| c.tolerances.phase);
    let fibres: Vec<_> = p.elements().map(|x| fibre_generators(p, x, o.loop_cap.min(3))).collect();
    let mut pairs = Vec::new();
    let (mut equal, mut unequal, mut unknown) = (0, 0, 0);
    let mut worst_phase: f64 = 0.0;
    for x in p.elements() {
        for y in p.elements().filter(|&y| x < y && p.perp(x, y)) {
            let probe = conn.as_ref().map(|c| c as &dyn crate::net::CommutatorProbe);
            let r = check_causality(&engine, &fibres[x.idx()], &fibres[y.idx()], probe, tol)?;
            for e in &r.entries {
                match e.verdict.as_str() {
                    "equal" => equal += 1,
                    "unequal" => unequal += 1,
                    _ => unknown += 1,
                }
                worst_phase = worst_phase.max(e.phase.unwrap_or(0.0));
            }
            pairs.push(json!({
                "pair": [p.label(x), p.label(y)],
                "checks": r.entries.len(),
                "holds": r.holds(),
            }));
        }
    }
    let status = if unequal > 0 || worst_phase > tol {
        Status::Fail
    } else if unknown > 0 {
        Status::Unknown
    } else {
        Status::Pass
    };
    let results = json!({
        "pairs": pairs,
        "equal": equal,
        "unequal": unequal,
        "unknown": unknown,
        "maxCommutatorPhase": conn.as_ref().map(|_| worst_phase),
    });
    Ok(Outcome::new(status, results))
}

fn parse_atom(text: &str) -> Result<TestFunction> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("atom `{text}`: {e}"))))
        .collect::<Result<_>>()?;
    let [t, x, y, z, r] = v[..] else {
        return Err(Error::Parse(format!("atom `{text}` needs t,x,y,z,r")));
    };
    if !(r > 0.0) {
        return Err(Error::InvalidRange("atom scale must be positive".into()));
    }
    let q = crate::causet::q_from_f64;
    Ok(TestFunction::atom(Atom::new([t, x, y, z].map(q), q(r), q(1.0))))
}

fn cmd_em_transform(f: &TestFunction, cfg: &FieldSpec, csv: Option<&Path>) -> Result<Outcome> {
    let prof = HyperboloidProfile::new(cfg.clone())?;
    let g = FieldFunction::from(f);
    let momenta = radial_momenta(&prof);
    let samples = em_transform(&g, &prof, &momenta)?;
    if let Some(path) = csv {
        std::fs::write(path, samples.to_csv()).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    let peak = samples.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let results = json!({
        "momenta": momenta.len(),
        "relChange": samples.rel_change,
        "peakAbs": peak,
        "norm": em_norm(&g, &prof)?,
        "atoms": f.atoms().len(),
    });
    Ok(Outcome::new(Status::of(samples.rel_change <= cfg.tolerances.quadrature), results))
}
