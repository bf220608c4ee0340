//! Command-line front end for the toolkit: compute affinities, run the
//! clustering simulation, score partitions, sweep parameter grids,
//! ingest text corpora, and export the bundled benchmark networks.
//!
//! Every command writes its artifacts into `--out` (current directory by
//! default) and reports errors as a single line `error[E###]: message`
//! on stderr with a nonzero exit status.

use borgia::affinity::AffinitySpec;
use borgia::classic::{self, ClassicConfig};
use borgia::datasets::{self, DatasetError};
use borgia::dendrogram::SelectionMode;
use borgia::engine::{self, EngineConfig};
use borgia::graph::{Graph, GraphFormat, TemporalGraph};
use borgia::metrics::{self, MetricReport, Partition};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "borgia",
    version,
    about = "Affinity-based gravitational community detection"
)]
struct Cli {
    /// Directory the output files are written into.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Rendering of report-style output.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Record a per-iteration trace (cluster, simulation engine only).
    #[arg(long, global = true)]
    trace: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute an affinity matrix from a graph.
    Affinity(AffinityArgs),
    /// Run the clustering simulation and select a partition.
    Cluster(ClusterArgs),
    /// Score a partition against its graph and ground truth.
    Evaluate(EvaluateArgs),
    /// Run a grid of clustering configurations into one results table.
    Sweep(SweepArgs),
    /// Build word co-occurrence edge files from raw text.
    Ingest(IngestArgs),
    /// List or export the bundled benchmark datasets.
    Datasets(DatasetsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    StructuredText,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// Best friend: share of out-connectivity.
    Bf,
    /// Best common friend: strongest shared neighbour.
    Bcf,
    /// Friends forever: mean best-friend over time slices.
    Ff,
    /// Social networking: strongest two-hop chain.
    Sn,
    /// Machiavelli: best common enemy of the complement.
    Ma,
    /// Convex blend of bf and bcf weighted by --alpha.
    Combine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaseArg {
    Bf,
    Bcf,
    Ma,
    Combine,
}

impl BaseArg {
    fn spec(self, alpha: f64) -> AffinitySpec {
        match self {
            BaseArg::Bf => AffinitySpec::BestFriend,
            BaseArg::Bcf => AffinitySpec::BestCommonFriend { base: None },
            BaseArg::Ma => AffinitySpec::Machiavelli,
            BaseArg::Combine => AffinitySpec::Combined { alpha },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TnormArg {
    Product,
    Minimum,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DeltaModeArg {
    Static,
    DynamicFirst,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Naive,
    EarlyRoman,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaselineArg {
    /// The affinity-space simulation engine.
    Borgia,
    /// The classical point-cloud gravitational baseline.
    Classic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FeatureSourceArg {
    AdjacencyRows,
    AffinityRows,
}

#[derive(Args)]
struct AffinityArgs {
    /// Graph file or bundled dataset name; --kind ff takes two or more
    /// snapshot files in time order.
    #[arg(required = true)]
    inputs: Vec<String>,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Blend weight for --kind combine (and a combined --base).
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    /// Base affinity for bcf (adjacency when omitted) and sn (bf when omitted).
    #[arg(long, value_enum)]
    base: Option<BaseArg>,
    /// Actor whose strongest ties are tabulated (with --top).
    #[arg(long, requires = "top")]
    actor: Option<String>,
    /// Table size for the per-actor top-k report (with --actor).
    #[arg(long, requires = "actor")]
    top: Option<usize>,
    /// Read file inputs as directed graphs.
    #[arg(long)]
    directed: bool,
}

#[derive(Args)]
struct ClusterArgs {
    /// Graph file or bundled dataset name.
    #[arg(required_unless_present = "from_manifest")]
    input: Option<String>,
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    #[arg(long, default_value_t = 3.0)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    #[arg(long, value_enum, default_value_t = TnormArg::Product)]
    tnorm: TnormArg,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = DeltaModeArg::DynamicFirst)]
    delta_mode: DeltaModeArg,
    #[arg(long, value_enum, default_value_t = PolicyArg::EarlyRoman)]
    policy: PolicyArg,
    /// Cut the dendrogram to exactly K communities instead of the
    /// score-based rule.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = BaselineArg::Borgia)]
    baseline: BaselineArg,
    /// Gravitational constant (classic baseline).
    #[arg(long, default_value_t = 1.0)]
    classic_g: f64,
    /// Collision radius (classic baseline; derived from the data when omitted).
    #[arg(long)]
    classic_epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = FeatureSourceArg::AdjacencyRows)]
    feature_source: FeatureSourceArg,
    /// Read file inputs as directed graphs.
    #[arg(long)]
    directed: bool,
    /// Re-run a recorded manifest exactly, ignoring the other flags.
    #[arg(long)]
    from_manifest: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Graph file or bundled dataset name (bundled names carry their
    /// own ground truth).
    input: String,
    /// Partition CSV to score; defaults to <out>/partition.csv.
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Ground-truth label CSV for file inputs.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Read file inputs as directed graphs.
    #[arg(long)]
    directed: bool,
    /// Merge the metric report into this run manifest.
    #[arg(long)]
    update_manifest: Option<PathBuf>,
    /// Note lines recorded in the updated manifest (repeatable).
    #[arg(long, requires = "update_manifest")]
    note: Vec<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Graph file or bundled dataset name.
    input: String,
    /// Comma-separated alpha values to sweep.
    #[arg(long, value_delimiter = ',')]
    alpha_grid: Vec<f64>,
    /// Comma-separated p values to sweep.
    #[arg(long, value_delimiter = ',')]
    p_grid: Vec<f64>,
    /// Comma-separated c values to sweep.
    #[arg(long, value_delimiter = ',')]
    c_grid: Vec<f64>,
    /// Comma-separated edge fractions in (0,1]: each run keeps a
    /// deterministic sample of that share of the edges.
    #[arg(long, value_delimiter = ',')]
    edge_fraction_grid: Vec<f64>,
    /// Repetitions per grid point (for runtime medians).
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Fixed alpha for runs when --alpha-grid is absent.
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    /// Fixed p when --p-grid is absent.
    #[arg(long, default_value_t = 3.0)]
    p: f64,
    /// Fixed c when --c-grid is absent.
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Read file inputs as directed graphs.
    #[arg(long)]
    directed: bool,
}

#[derive(Args)]
struct IngestArgs {
    /// Raw UTF-8 text file.
    input: PathBuf,
    /// Vocabulary cap: keep the N most frequent tokens.
    #[arg(long, default_value_t = 130)]
    top_n: usize,
    /// Stopword file, one token per line.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Chapter slicing file: one chapter-start byte offset per line;
    /// adds one edge file per chapter over the shared vocabulary.
    #[arg(long)]
    slices: Option<PathBuf>,
}

#[derive(Args)]
struct DatasetsArgs {
    #[command(subcommand)]
    action: DatasetsCmd,
}

#[derive(Subcommand)]
enum DatasetsCmd {
    /// Tabulate the bundled datasets.
    List,
    /// Write a bundled dataset's edge and label files into --out.
    Export { name: String },
}

// ---------------------------------------------------------------------------
// error plumbing

struct CliError {
    code: u16,
    msg: String,
}

impl CliError {
    fn new(code: u16, msg: impl Into<String>) -> Self {
        CliError {
            code,
            msg: msg.into(),
        }
    }

    fn usage(msg: impl Into<String>) -> Self {
        CliError::new(7, msg)
    }

    fn io(context: &Path, e: std::io::Error) -> Self {
        CliError::new(1, format!("{}: {e}", context.display()))
    }

    fn manifest(msg: impl Into<String>) -> Self {
        CliError::new(8, msg)
    }
}

macro_rules! cli_error_from {
    ($ty:ty, $code:expr) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::new($code, e.to_string())
            }
        }
    };
}

cli_error_from!(borgia::graph::GraphError, 2);
cli_error_from!(borgia::affinity::AffinityError, 3);
cli_error_from!(borgia::engine::EngineError, 4);
cli_error_from!(borgia::classic::ClassicError, 4);
cli_error_from!(borgia::dendrogram::DendrogramError, 4);
cli_error_from!(borgia::metrics::MetricsError, 5);
cli_error_from!(DatasetError, 6);

fn single_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("bad arguments").to_string();
            eprintln!("error[E007]: {}", single_line(&first));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[E{:03}]: {}", e.code, single_line(&e.msg));
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Affinity(args) => cmd_affinity(&cli, args),
        Cmd::Cluster(args) => cmd_cluster(&cli, args),
        Cmd::Evaluate(args) => cmd_evaluate(&cli, args),
        Cmd::Sweep(args) => cmd_sweep(&cli, args),
        Cmd::Ingest(args) => cmd_ingest(&cli, args),
        Cmd::Datasets(args) => cmd_datasets(&cli, args),
    }
}

// ---------------------------------------------------------------------------
// input resolution

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
struct InputDescriptor {
    /// "bundled" or "file".
    kind: String,
    /// The dataset name or the path as given.
    spec: String,
    directed: bool,
    /// For files, over the raw bytes; for bundled data, over the
    /// canonical edge-list serialization.
    sha256: String,
}

struct ResolvedInput {
    graph: Graph,
    truth: Option<Partition>,
    descriptor: InputDescriptor,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

fn is_bundled(spec: &str) -> bool {
    (datasets::BENCHMARKS.contains(&spec) || spec == "eurovision") && !Path::new(spec).exists()
}

fn resolve_input(spec: &str, directed: bool) -> Result<ResolvedInput, CliError> {
    if is_bundled(spec) {
        if directed {
            return Err(CliError::usage(format!(
                "--directed cannot apply to the bundled dataset `{spec}`; its orientation is fixed"
            )));
        }
        let (graph, truth) = if spec == "eurovision" {
            (datasets::eurovision(datasets::EUROVISION_YEARS)?, None)
        } else {
            let ds = datasets::load_benchmark(spec)?;
            (ds.graph, ds.ground_truth)
        };
        let canonical = graph.save(GraphFormat::EdgeList)?;
        let descriptor = InputDescriptor {
            kind: "bundled".into(),
            spec: spec.to_string(),
            directed: graph.directed(),
            sha256: sha256_hex(canonical.as_bytes()),
        };
        return Ok(ResolvedInput {
            graph,
            truth,
            descriptor,
        });
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let format = match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_lowercase)
        .as_deref()
    {
        Some("csv") => GraphFormat::MatrixCsv,
        Some("gml") => GraphFormat::GmlSubset,
        _ => GraphFormat::EdgeList,
    };
    let graph = Graph::load(&text, format, directed)?;
    let descriptor = InputDescriptor {
        kind: "file".into(),
        spec: spec.to_string(),
        directed,
        sha256: sha256_hex(text.as_bytes()),
    };
    Ok(ResolvedInput {
        graph,
        truth: None,
        descriptor,
    })
}

fn write_out(out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let path = out_dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn edge_count(g: &Graph) -> usize {
    let mut count = 0;
    for i in 0..g.n() {
        for j in 0..g.n() {
            if (g.directed() || j > i) && g.weight(i, j) != 0.0 {
                count += 1;
            }
        }
    }
    count
}

// ---------------------------------------------------------------------------
// affinity

fn cmd_affinity(cli: &Cli, args: &AffinityArgs) -> Result<(), CliError> {
    if args.base.is_some() && !matches!(args.kind, KindArg::Bcf | KindArg::Sn) {
        return Err(CliError::usage(
            "--base only applies to --kind bcf and --kind sn",
        ));
    }
    let (graph, matrix) = match args.kind {
        KindArg::Ff => {
            if args.inputs.len() < 2 {
                return Err(CliError::usage(
                    "--kind ff needs two or more snapshot files in time order; \
                     a single graph has no temporal depth",
                ));
            }
            let mut slices = Vec::with_capacity(args.inputs.len());
            for spec in &args.inputs {
                slices.push(resolve_input(spec, args.directed)?.graph);
            }
            let tg = TemporalGraph::new(slices)?;
            let matrix = borgia::affinity::friends_forever(&tg);
            (tg.slices()[0].clone(), matrix)
        }
        kind => {
            if args.inputs.len() != 1 {
                return Err(CliError::usage(format!(
                    "--kind {} takes exactly one input graph, got {}",
                    kind_name(kind),
                    args.inputs.len()
                )));
            }
            let graph = resolve_input(&args.inputs[0], args.directed)?.graph;
            let spec = match kind {
                KindArg::Bf => AffinitySpec::BestFriend,
                KindArg::Bcf => AffinitySpec::BestCommonFriend {
                    base: args.base.map(|b| Box::new(b.spec(args.alpha))),
                },
                KindArg::Sn => AffinitySpec::SocialNetworking {
                    base: Box::new(
                        args.base.unwrap_or(BaseArg::Bf).spec(args.alpha),
                    ),
                },
                KindArg::Ma => AffinitySpec::Machiavelli,
                KindArg::Combine => AffinitySpec::Combined { alpha: args.alpha },
                KindArg::Ff => unreachable!(),
            };
            let matrix = spec.resolve(&graph)?;
            (graph, matrix)
        }
    };
    let labels = graph.labels();
    let matrix_path = write_out(&cli.out, "affinity_matrix.csv", &matrix.to_matrix_csv(labels))?;
    let long_path = write_out(&cli.out, "affinity_long.csv", &matrix.to_long_csv(labels))?;
    let mut written = vec![matrix_path, long_path];
    if let (Some(actor), Some(top)) = (&args.actor, args.top) {
        let x = graph
            .index_of(actor)
            .ok_or_else(|| CliError::usage(format!("actor `{actor}` is not in the graph")))?;
        let table = top_table(&matrix, labels, x, top, cli.format);
        let name = match cli.format {
            OutputFormat::Csv => "affinity_top.csv",
            OutputFormat::StructuredText => "affinity_top.txt",
        };
        written.push(write_out(&cli.out, name, &table)?);
    }
    println!(
        "affinity: {} over {} actors; wrote {}",
        kind_name(args.kind),
        graph.n(),
        join_paths(&written)
    );
    Ok(())
}

fn kind_name(kind: KindArg) -> &'static str {
    match kind {
        KindArg::Bf => "bf",
        KindArg::Bcf => "bcf",
        KindArg::Ff => "ff",
        KindArg::Sn => "sn",
        KindArg::Ma => "ma",
        KindArg::Combine => "combine",
    }
}

/// Strongest outgoing and incoming ties of one actor, strongest first,
/// ties on value broken by label.
fn top_table(
    matrix: &borgia::affinity::AffinityMatrix,
    labels: &[String],
    x: usize,
    top: usize,
    format: OutputFormat,
) -> String {
    let rank = |values: Vec<(String, f64)>| -> Vec<(String, f64)> {
        let mut v = values;
        v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        v.truncate(top);
        v
    };
    let outgoing = rank(
        (0..matrix.n())
            .filter(|&y| y != x)
            .map(|y| (labels[y].clone(), matrix.value(x, y)))
            .collect(),
    );
    let incoming = rank(
        (0..matrix.n())
            .filter(|&y| y != x)
            .map(|y| (labels[y].clone(), matrix.value(y, x)))
            .collect(),
    );
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("direction,rank,actor,value\n");
            for (dir, rows) in [("out", &outgoing), ("in", &incoming)] {
                for (i, (label, value)) in rows.iter().enumerate() {
                    let _ = writeln!(out, "{dir},{},{label},{value}", i + 1);
                }
            }
            out
        }
        OutputFormat::StructuredText => {
            let mut out = format!("strongest ties of {}\n", labels[x]);
            for (dir, rows) in [("outgoing", &outgoing), ("incoming", &incoming)] {
                let _ = writeln!(out, "\n{dir}:");
                for (i, (label, value)) in rows.iter().enumerate() {
                    let _ = writeln!(out, "  {:>2}. {label:<24} {value:.6}", i + 1);
                }
            }
            out
        }
    }
}

fn join_paths(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

// ---------------------------------------------------------------------------
// cluster

#[derive(Serialize, Deserialize)]
struct SelectionDescriptor {
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct ResultSummary {
    communities: usize,
    fusions: usize,
    total_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    iterations: Option<u64>,
}

/// Everything needed to reproduce a clustering run bit for bit, plus a
/// summary of what it produced.
#[derive(Serialize, Deserialize)]
struct RunManifest {
    tool: String,
    version: String,
    created_unix: u64,
    input: InputDescriptor,
    baseline: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    engine: Option<EngineConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classic: Option<ClassicConfig>,
    selection: SelectionDescriptor,
    trace: bool,
    duration_ms: f64,
    outputs: BTreeMap<String, String>,
    results: ResultSummary,
    #[serde(default)]
    notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    evaluation: Option<serde_json::Value>,
}

fn selection_mode(desc: &SelectionDescriptor) -> Result<SelectionMode, CliError> {
    match (desc.mode.as_str(), desc.k) {
        ("score", None) => Ok(SelectionMode::Score),
        ("lifespan", None) => Ok(SelectionMode::Lifespan),
        ("fixed-k", Some(k)) => Ok(SelectionMode::FixedK(k)),
        _ => Err(CliError::manifest(format!(
            "unrecognized selection `{}` (k: {:?})",
            desc.mode, desc.k
        ))),
    }
}

fn cmd_cluster(cli: &Cli, args: &ClusterArgs) -> Result<(), CliError> {
    // Assemble the run description, either fresh from flags or replayed
    // from a manifest.
    let (input, baseline, engine_cfg, classic_cfg, selection, trace, notes);
    if let Some(mpath) = &args.from_manifest {
        let text = std::fs::read_to_string(mpath).map_err(|e| CliError::io(mpath, e))?;
        let manifest: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::manifest(format!("{}: {e}", mpath.display())))?;
        let resolved = resolve_input(&manifest.input.spec, manifest.input.directed && manifest.input.kind == "file")?;
        if resolved.descriptor.sha256 != manifest.input.sha256 {
            return Err(CliError::manifest(format!(
                "input `{}` hashes to {} but the manifest recorded {}; refusing to replay",
                manifest.input.spec, resolved.descriptor.sha256, manifest.input.sha256
            )));
        }
        input = resolved;
        baseline = manifest.baseline.clone();
        engine_cfg = manifest.engine.clone();
        classic_cfg = manifest.classic.clone();
        selection = selection_mode(&manifest.selection)?;
        trace = manifest.trace;
        notes = manifest.notes.clone();
        if !(baseline == "borgia" && engine_cfg.is_some() && classic_cfg.is_none()
            || baseline == "classic" && classic_cfg.is_some() && engine_cfg.is_none())
        {
            return Err(CliError::manifest(format!(
                "manifest baseline `{baseline}` does not match its configuration sections"
            )));
        }
    } else {
        let spec = args.input.as_deref().expect("clap enforces input");
        input = resolve_input(spec, args.directed)?;
        notes = Vec::new();
        trace = cli.trace;
        match args.baseline {
            BaselineArg::Borgia => {
                baseline = "borgia".into();
                engine_cfg = Some(EngineConfig {
                    alpha: args.alpha,
                    p: args.p,
                    c: args.c,
                    tnorm: match args.tnorm {
                        TnormArg::Product => borgia::tnorm::TNorm::Product,
                        TnormArg::Minimum => borgia::tnorm::TNorm::Minimum,
                    },
                    delta: args.delta,
                    delta_mode: match args.delta_mode {
                        DeltaModeArg::Static => borgia::engine::DeltaMode::Static,
                        DeltaModeArg::DynamicFirst => borgia::engine::DeltaMode::DynamicFirst,
                    },
                    policy: match args.policy {
                        PolicyArg::Naive => borgia::engine::Policy::Naive,
                        PolicyArg::EarlyRoman => borgia::engine::Policy::EarlyRoman,
                    },
                    target_k: args.k,
                    ..EngineConfig::default()
                });
                classic_cfg = None;
                selection = match args.k {
                    Some(k) => SelectionMode::FixedK(k),
                    None => SelectionMode::Score,
                };
            }
            BaselineArg::Classic => {
                baseline = "classic".into();
                if cli.trace {
                    return Err(CliError::usage(
                        "--trace records engine iterations; the classic baseline has no trace",
                    ));
                }
                classic_cfg = Some(ClassicConfig {
                    g: args.classic_g,
                    epsilon: args.classic_epsilon,
                    delta: args.delta,
                    feature_source: match args.feature_source {
                        FeatureSourceArg::AdjacencyRows => {
                            borgia::classic::FeatureSource::AdjacencyRows
                        }
                        FeatureSourceArg::AffinityRows => {
                            borgia::classic::FeatureSource::AffinityRows
                        }
                    },
                    ..ClassicConfig::default()
                });
                engine_cfg = None;
                selection = match args.k {
                    Some(k) => SelectionMode::FixedK(k),
                    None => SelectionMode::Lifespan,
                };
            }
        }
    }

    // Run.
    let started = Instant::now();
    let (dendrogram, iterations, trace_rows) = if let Some(cfg) = &engine_cfg {
        let report = if trace {
            engine::run_traced(&input.graph, cfg)?
        } else {
            engine::run(&input.graph, cfg)?
        };
        (
            report.dendrogram,
            Some(report.iterations),
            report.trace,
        )
    } else {
        let cfg = classic_cfg.as_ref().expect("one baseline is configured");
        (classic::classic_run(&input.graph, cfg)?, None, None)
    };
    let partition = dendrogram.select(selection)?;
    let duration_ms = started.elapsed().as_secs_f64() * 1e3;

    // Write artifacts.
    let mut outputs = BTreeMap::new();
    let mut written = Vec::new();
    let p = write_out(&cli.out, "dendrogram.json", &dendrogram.to_json())?;
    outputs.insert("dendrogram".to_string(), "dendrogram.json".to_string());
    written.push(p);
    let p = write_out(
        &cli.out,
        "partition.csv",
        &partition.to_csv(input.graph.labels()),
    )?;
    outputs.insert("partition".to_string(), "partition.csv".to_string());
    written.push(p);
    if let Some(rows) = &trace_rows {
        let mut text = String::from("iteration,t,dt,live\n");
        for r in rows {
            let _ = writeln!(text, "{},{},{},{}", r.iteration, r.t, r.dt, r.live);
        }
        let p = write_out(&cli.out, "trace.csv", &text)?;
        outputs.insert("trace".to_string(), "trace.csv".to_string());
        written.push(p);
    }
    let manifest = RunManifest {
        tool: "borgia".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        input: input.descriptor.clone(),
        baseline,
        engine: engine_cfg,
        classic: classic_cfg,
        selection: match selection {
            SelectionMode::Score => SelectionDescriptor {
                mode: "score".into(),
                k: None,
            },
            SelectionMode::Lifespan => SelectionDescriptor {
                mode: "lifespan".into(),
                k: None,
            },
            SelectionMode::FixedK(k) => SelectionDescriptor {
                mode: "fixed-k".into(),
                k: Some(k),
            },
        },
        trace,
        duration_ms,
        outputs,
        results: ResultSummary {
            communities: partition.k(),
            fusions: dendrogram.fusions().len(),
            total_time: dendrogram.total_time(),
            iterations,
        },
        notes,
        evaluation: None,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    written.push(write_out(&cli.out, "manifest.json", &text)?);

    match iterations {
        Some(iters) => println!(
            "cluster: {} communities from {} actors in {} iterations; wrote {}",
            partition.k(),
            input.graph.n(),
            iters,
            join_paths(&written)
        ),
        None => println!(
            "cluster: {} communities from {} actors (classic baseline); wrote {}",
            partition.k(),
            input.graph.n(),
            join_paths(&written)
        ),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate

fn cmd_evaluate(cli: &Cli, args: &EvaluateArgs) -> Result<(), CliError> {
    let input = resolve_input(&args.input, args.directed)?;
    let truth = match &args.truth {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Some(Partition::from_csv(&text, input.graph.labels())?)
        }
        None => input.truth.clone(),
    };
    let partition_path = args
        .partition
        .clone()
        .unwrap_or_else(|| cli.out.join("partition.csv"));
    let text =
        std::fs::read_to_string(&partition_path).map_err(|e| CliError::io(&partition_path, e))?;
    let partition = Partition::from_csv(&text, input.graph.labels())?;

    let report = MetricReport {
        k: partition.k(),
        modularity: metrics::modularity(&input.graph, &partition)?,
        modularity_density: metrics::modularity_density(&input.graph, &partition)?,
        nmi: match &truth {
            Some(t) => Some(metrics::nmi(&partition, t)?),
            None => None,
        },
        ari: match &truth {
            Some(t) => Some(metrics::ari(&partition, t)?),
            None => None,
        },
    };

    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let rendered = match cli.format {
        OutputFormat::Csv => format!(
            "k,modularity,modularity_density,nmi,ari\n{},{},{},{},{}\n",
            report.k,
            report.modularity,
            report.modularity_density,
            opt(report.nmi),
            opt(report.ari),
        ),
        OutputFormat::StructuredText => {
            let fmt = |v: Option<f64>| {
                v.map(|x| format!("{x:.6}"))
                    .unwrap_or_else(|| "(no ground truth)".into())
            };
            format!(
                "communities          {}\nmodularity           {:.6}\nmodularity density   {:.6}\nnmi                  {}\nari                  {}\n",
                report.k,
                report.modularity,
                report.modularity_density,
                fmt(report.nmi),
                fmt(report.ari),
            )
        }
    };
    print!("{rendered}");
    let name = match cli.format {
        OutputFormat::Csv => "metrics.csv",
        OutputFormat::StructuredText => "metrics.txt",
    };
    write_out(&cli.out, name, &rendered)?;

    if let Some(mpath) = &args.update_manifest {
        let text = std::fs::read_to_string(mpath).map_err(|e| CliError::io(mpath, e))?;
        let mut manifest: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::manifest(format!("{}: {e}", mpath.display())))?;
        manifest.evaluation = Some(serde_json::json!({
            "k": report.k,
            "modularity": report.modularity,
            "modularity_density": report.modularity_density,
            "nmi": report.nmi,
            "ari": report.ari,
        }));
        manifest.notes.extend(args.note.iter().cloned());
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(mpath, text).map_err(|e| CliError::io(mpath, e))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

/// splitmix64: deterministic edge sampling without a seed flag.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    fn below(&mut self, bound: usize) -> usize {
        (self.next() % bound as u64) as usize
    }
}

/// Keeps a deterministic sample of `round(fraction * edges)` edges (all
/// actors stay). The sample depends only on the fraction and repeat
/// index, never on wall-clock state.
fn sample_edges(g: &Graph, fraction: f64, repeat: usize) -> Result<Graph, CliError> {
    let n = g.n();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if (g.directed() || j > i) && g.weight(i, j) != 0.0 {
                edges.push((i, j, g.weight(i, j)));
            }
        }
    }
    let m = edges.len();
    let keep = ((fraction * m as f64).round() as usize).clamp(1, m);
    let mut rng = SplitMix(0x0B0E_55EED ^ fraction.to_bits() ^ ((repeat as u64) << 17));
    for idx in 0..keep {
        let j = idx + rng.below(m - idx);
        edges.swap(idx, j);
    }
    edges.truncate(keep);
    let mut weights = vec![0.0; n * n];
    for (i, j, w) in edges {
        weights[i * n + j] = w;
        if !g.directed() {
            weights[j * n + i] = w;
        }
    }
    Ok(Graph::from_matrix(g.labels().to_vec(), weights, g.directed())?)
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<(), CliError> {
    if args.alpha_grid.is_empty()
        && args.p_grid.is_empty()
        && args.c_grid.is_empty()
        && args.edge_fraction_grid.is_empty()
    {
        return Err(CliError::usage(
            "sweep needs at least one grid: --alpha-grid, --p-grid, --c-grid, or --edge-fraction-grid",
        ));
    }
    if args.repeats == 0 {
        return Err(CliError::usage("--repeats must be at least 1"));
    }
    for &f in &args.edge_fraction_grid {
        if !(f > 0.0 && f <= 1.0) {
            return Err(CliError::usage(format!(
                "edge fractions must lie in (0, 1], got {f}"
            )));
        }
    }
    let input = resolve_input(&args.input, args.directed)?;
    let alphas = if args.alpha_grid.is_empty() {
        vec![args.alpha]
    } else {
        args.alpha_grid.clone()
    };
    let ps = if args.p_grid.is_empty() {
        vec![args.p]
    } else {
        args.p_grid.clone()
    };
    let cs = if args.c_grid.is_empty() {
        vec![args.c]
    } else {
        args.c_grid.clone()
    };
    let fractions = if args.edge_fraction_grid.is_empty() {
        vec![1.0]
    } else {
        args.edge_fraction_grid.clone()
    };

    let mut out = String::from(
        "alpha,p,c,edge_fraction,repeat,actors,edges,communities,modularity,modularity_density,runtime_ms,error\n",
    );
    let mut rows = 0usize;
    for &alpha in &alphas {
        for &p in &ps {
            for &c in &cs {
                for &fraction in &fractions {
                    for repeat in 0..args.repeats {
                        let row = sweep_row(&input.graph, args, alpha, p, c, fraction, repeat);
                        let _ = writeln!(out, "{row}");
                        rows += 1;
                    }
                }
            }
        }
    }
    let path = write_out(&cli.out, "sweep.csv", &out)?;
    println!("sweep: {rows} rows; wrote {}", path.display());
    Ok(())
}

fn sweep_row(
    graph: &Graph,
    args: &SweepArgs,
    alpha: f64,
    p: f64,
    c: f64,
    fraction: f64,
    repeat: usize,
) -> String {
    let prefix = |g: &Graph| {
        format!(
            "{alpha},{p},{c},{fraction},{repeat},{},{}",
            g.n(),
            edge_count(g)
        )
    };
    let sampled;
    let g = if fraction < 1.0 {
        match sample_edges(graph, fraction, repeat) {
            Ok(s) => {
                sampled = s;
                &sampled
            }
            Err(e) => {
                return format!(
                    "{},,,,{}",
                    prefix(graph),
                    csv_quote(&single_line(&e.msg))
                );
            }
        }
    } else {
        graph
    };
    let cfg = EngineConfig {
        alpha,
        p,
        c,
        delta: args.delta,
        ..EngineConfig::default()
    };
    let started = Instant::now();
    let outcome = engine::run(g, &cfg)
        .map_err(|e| e.to_string())
        .and_then(|report| {
            report
                .dendrogram
                .select(SelectionMode::Score)
                .map_err(|e| e.to_string())
        });
    let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(partition) => {
            let q = metrics::modularity(g, &partition);
            let d = metrics::modularity_density(g, &partition);
            match (q, d) {
                (Ok(q), Ok(d)) => format!(
                    "{},{},{q},{d},{runtime_ms},",
                    prefix(g),
                    partition.k()
                ),
                (q, d) => {
                    let msg = q.err().or(d.err()).map(|e| e.to_string()).unwrap_or_default();
                    format!(
                        "{},{},,,{runtime_ms},{}",
                        prefix(g),
                        partition.k(),
                        csv_quote(&single_line(&msg))
                    )
                }
            }
        }
        Err(msg) => format!(
            "{},,,,{runtime_ms},{}",
            prefix(g),
            csv_quote(&single_line(&msg))
        ),
    }
}

// ---------------------------------------------------------------------------
// ingest

fn cmd_ingest(cli: &Cli, args: &IngestArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let stopwords: BTreeSet<String> = match &args.stopwords {
        None => BTreeSet::new(),
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path, e))?
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty())
            .collect(),
    };
    let slicing = match &args.slices {
        None => None,
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let mut offsets = Vec::new();
            for (line0, l) in raw.lines().enumerate() {
                let l = l.trim();
                if l.is_empty() {
                    continue;
                }
                let off: usize = l.parse().map_err(|_| {
                    CliError::usage(format!(
                        "{} line {}: expected a byte offset, found {l:?}",
                        path.display(),
                        line0 + 1
                    ))
                })?;
                offsets.push(off);
            }
            if offsets.is_empty() {
                return Err(CliError::usage(format!(
                    "{} lists no chapter offsets",
                    path.display()
                )));
            }
            Some(offsets)
        }
    };
    let spec = datasets::CorpusSpec {
        text,
        top_n: args.top_n,
        unit: datasets::CoUnit::Paragraph,
        slicing,
        stopwords,
    };
    let (full, temporal) = datasets::build_cooccurrence(&spec)?;
    let mut written = vec![write_out(
        &cli.out,
        "corpus.edges",
        &full.save(GraphFormat::EdgeList)?,
    )?];
    let mut slices = 0;
    if let Some(tg) = &temporal {
        slices = tg.len();
        for (k, slice) in tg.slices().iter().enumerate() {
            written.push(write_out(
                &cli.out,
                &format!("corpus_slice_{:02}.edges", k + 1),
                &slice.save(GraphFormat::EdgeList)?,
            )?);
        }
    }
    println!(
        "ingest: vocabulary {} words, {} edges, {} chapter slice(s); wrote {}",
        full.n(),
        edge_count(&full),
        slices,
        join_paths(&written)
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// datasets

fn cmd_datasets(cli: &Cli, args: &DatasetsArgs) -> Result<(), CliError> {
    match &args.action {
        DatasetsCmd::List => {
            struct Row {
                name: String,
                actors: usize,
                edges: usize,
                truth: String,
                provenance: String,
            }
            let mut rows = Vec::new();
            for name in datasets::BENCHMARKS {
                let ds = datasets::load_benchmark(name)?;
                rows.push(Row {
                    name: name.to_string(),
                    actors: ds.graph.n(),
                    edges: edge_count(&ds.graph),
                    truth: ds
                        .ground_truth
                        .map(|t| t.k().to_string())
                        .unwrap_or_default(),
                    provenance: ds.provenance,
                });
            }
            let euro = datasets::eurovision(datasets::EUROVISION_YEARS)?;
            rows.push(Row {
                name: "eurovision".into(),
                actors: euro.n(),
                edges: edge_count(&euro),
                truth: String::new(),
                provenance: "Eurovision finals votes 1957-2019, directed, points-weighted".into(),
            });
            match cli.format {
                OutputFormat::Csv => {
                    println!("name,actors,edges,truth_communities,provenance");
                    for r in rows {
                        println!(
                            "{},{},{},{},{}",
                            r.name,
                            r.actors,
                            r.edges,
                            r.truth,
                            csv_quote(&r.provenance)
                        );
                    }
                }
                OutputFormat::StructuredText => {
                    println!(
                        "{:<12} {:>6} {:>6} {:>6}  provenance",
                        "name", "actors", "edges", "truth"
                    );
                    for r in rows {
                        println!(
                            "{:<12} {:>6} {:>6} {:>6}  {}",
                            r.name,
                            r.actors,
                            r.edges,
                            if r.truth.is_empty() { "-" } else { &r.truth },
                            r.provenance
                        );
                    }
                }
            }
            Ok(())
        }
        DatasetsCmd::Export { name } => {
            let mut written = Vec::new();
            if name == "eurovision" {
                let g = datasets::eurovision(datasets::EUROVISION_YEARS)?;
                written.push(write_out(
                    &cli.out,
                    "eurovision.edges",
                    &g.save(GraphFormat::EdgeList)?,
                )?);
            } else {
                let ds = datasets::load_benchmark(name)?;
                written.push(write_out(
                    &cli.out,
                    &format!("{name}.edges"),
                    &ds.graph.save(GraphFormat::EdgeList)?,
                )?);
                if let Some(truth) = &ds.ground_truth {
                    written.push(write_out(
                        &cli.out,
                        &format!("{name}_labels.csv"),
                        &truth.to_csv(ds.graph.labels()),
                    )?);
                }
            }
            println!("datasets: exported {name}; wrote {}", join_paths(&written));
            Ok(())
        }
    }
}
