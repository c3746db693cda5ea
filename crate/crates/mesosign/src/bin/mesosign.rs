use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mesosign::balance::{
    blockmodel_dob_zscore, frustration_report, sign_shuffle_zscores, triad_census,
};
use mesosign::blockmodel::{fit_blockmodel, fit_with_partition, BlockModelFit};
use mesosign::classify::{attach_robustness, bootstrap_certainty, classify_all, density_matrices};
use mesosign::graph::{
    descriptive_stats, largest_connected_component, load_edge_list, load_undirected_edge_list,
    symmetrize, EdgeListFormat, GraphStats, SignedGraph,
};
use mesosign::partition::{
    import_partition, louvain_signed, signed_modularity, spectral_signed, ModularityScore,
    Partition,
};
use mesosign::report::Envelope;
use mesosign::synth::{generate_planted, run_sweep, MethodId, PlantedParams};

#[derive(Parser)]
#[command(
    name = "mesosign",
    version,
    about = "Meso-scale structure analysis for signed networks",
    long_about = "Partitions signed networks, classifies every community pair into one of 18 \
                  relationship types, and measures balance at micro (triads) and meso \
                  (frustration) scales, with seeded null models and bootstrap robustness."
)]
struct Cli {
    /// Worker threads (0 = all cores). Outputs do not depend on the count.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics of the largest connected component
    Stats(StatsArgs),
    /// Compute or import a partition and score it
    Partition(PartitionArgs),
    /// Full pipeline: stats, partition, densities, classification,
    /// frustration, triads, optional z-scores and bootstrap
    Analyze(AnalyzeArgs),
    /// Frustration report for a partition
    Frustration(FrustrationArgs),
    /// Triad census
    Triads(TriadsArgs),
    /// Null-model z-scores (sign shuffle or block model)
    Null(NullArgs),
    /// Bootstrap certainty of the pair classification
    Robustness(RobustnessArgs),
    /// Generate one planted signed network
    Synth(SynthArgs),
    /// Planted-partition ratio sweep
    Sweep(SweepArgs),
}

#[derive(Args, Serialize)]
struct InputArgs {
    /// Edge-list file: "src dst weight" lines or CSV with source,target,weight header
    #[arg(long)]
    input: PathBuf,
    /// Lines are undirected edges (skip symmetrization; duplicates rejected)
    #[arg(long)]
    undirected: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Louvain,
    Spectral,
    Blockmodel,
    Import,
}

#[derive(Args, Serialize)]
struct MethodArgs {
    /// Partitioning method
    #[arg(long, value_enum, default_value_t = Method::Louvain)]
    method: Method,
    /// Partition CSV ("node,label"); required for --method import
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Block count for the spectral method
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Largest block count tried by the block model
    #[arg(long, default_value_t = 10)]
    bmax: usize,
    /// Randomized restarts for louvain/blockmodel
    #[arg(long, default_value_t = 8)]
    restarts: usize,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Serialize)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output directory (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct PartitionArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Sign-shuffle null samples (0 skips the z-score report)
    #[arg(long, default_value_t = 0)]
    samples: usize,
    /// Bootstrap replicates (0 skips robustness)
    #[arg(long, default_value_t = 0)]
    bootstrap_k: usize,
    /// Density comparison tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct FrustrationArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct TriadsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum NullModel {
    SignShuffle,
    Blockmodel,
}

#[derive(Args, Serialize)]
struct NullArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Null model to sample
    #[arg(long = "null", value_enum)]
    model: NullModel,
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Fix the block-model fit to this partition CSV
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    bmax: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct RobustnessArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    bootstrap_k: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SynthArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    groups: usize,
    #[arg(long)]
    p_pos_in: f64,
    #[arg(long, default_value_t = 0.0)]
    p_neg_in: f64,
    #[arg(long, default_value_t = 0.0)]
    p_pos_out: f64,
    #[arg(long, default_value_t = 0.0)]
    p_neg_out: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    #[arg(long, default_value_t = 180)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    groups: usize,
    #[arg(long, default_value_t = 0.2)]
    p_pos_in: f64,
    #[arg(long, default_value_t = 0.01)]
    p_pos_out: f64,
    #[arg(long, default_value_t = 0.01)]
    p_neg_out: f64,
    /// Comma-separated P-/P+ ratios, e.g. 0,0.5,1,1.5,2
    #[arg(long)]
    ratios: String,
    /// Comma-separated methods: louvain,spectral,blockmodel,oracle
    #[arg(long)]
    methods: String,
    #[arg(long, default_value_t = 20)]
    replicates: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Runtime failures exit 1; usage problems not caught by clap exit 2.
enum CliError {
    Runtime(String),
    Usage(String),
}

impl From<mesosign::Error> for CliError {
    fn from(e: mesosign::Error) -> CliError {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            eprintln!("run `mesosign --help` for usage");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Stats(args) => cmd_stats(args),
        Command::Partition(args) => cmd_partition(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Frustration(args) => cmd_frustration(args),
        Command::Triads(args) => cmd_triads(args),
        Command::Null(args) => cmd_null(args),
        Command::Robustness(args) => cmd_robustness(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

// ---------------------------------------------------------------------------
// shared plumbing

#[derive(Serialize)]
struct LoadSummary {
    input_nodes: usize,
    dropped_self_loops: usize,
    lcc_nodes: usize,
    lcc_edges: usize,
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))
}

fn detect_format(path: &Path) -> EdgeListFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => EdgeListFormat::Csv,
        _ => EdgeListFormat::Plain,
    }
}

/// Loads, symmetrizes (unless the file is undirected), and reduces to the
/// largest connected component.
fn load_input(args: &InputArgs) -> CliResult<(SignedGraph, LoadSummary)> {
    let text = read_file(&args.input)?;
    let format = detect_format(&args.input);
    let (full, dropped) = if args.undirected {
        load_undirected_edge_list(&text, format)?
    } else {
        let directed = load_edge_list(&text, format)?;
        let dropped = directed.dropped_self_loops();
        (symmetrize(&directed), dropped)
    };
    let lcc = largest_connected_component(&full);
    let summary = LoadSummary {
        input_nodes: full.node_count(),
        dropped_self_loops: dropped,
        lcc_nodes: lcc.node_count(),
        lcc_edges: lcc.edge_count(),
    };
    Ok((lcc, summary))
}

#[derive(Serialize)]
struct PartitionSummary {
    method: Method,
    block_count: usize,
    block_sizes: Vec<usize>,
    modularity: ModularityScore,
    description_length: f64,
}

fn compute_partition(
    g: &SignedGraph,
    args: &MethodArgs,
    seed: u64,
) -> CliResult<(Partition, PartitionSummary, Option<BlockModelFit>)> {
    let mut fit = None;
    let partition = match args.method {
        Method::Louvain => louvain_signed(g, seed, args.restarts)?,
        Method::Spectral => spectral_signed(g, args.k, seed)?,
        Method::Blockmodel => {
            let f = fit_blockmodel(g, args.bmax, seed, args.restarts)?;
            let p = f.partition.clone();
            fit = Some(f);
            p
        }
        Method::Import => {
            let path = args.partition.as_ref().ok_or_else(|| {
                CliError::Usage("--method import requires --partition <csv>".into())
            })?;
            import_partition(&read_file(path)?, g)?
        }
    };
    let summary = PartitionSummary {
        method: args.method,
        block_count: partition.block_count(),
        block_sizes: partition.block_sizes().to_vec(),
        modularity: signed_modularity(g, &partition)?,
        description_length: mesosign::blockmodel::description_length(g, &partition)?,
    };
    Ok((partition, summary, fit))
}

fn emit(out: &Option<PathBuf>, name: &str, content: &str) -> CliResult<()> {
    match out {
        Some(dir) => write_file(dir, name, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn write_file(dir: &Path, name: &str, content: &str) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, content)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn config_json<T: Serialize>(args: &T) -> serde_json::Value {
    let mut value = serde_json::to_value(args).expect("args serialize");
    if let Some(map) = value.as_object_mut() {
        map.insert(
            "tool_version".into(),
            serde_json::Value::String(env!("CARGO_PKG_VERSION").into()),
        );
    }
    value
}

fn node_labels_csv(g: &SignedGraph) -> String {
    let mut out = String::from("id,label\n");
    for (id, label) in g.labels().iter().enumerate() {
        out.push_str(&format!("{id},{label}\n"));
    }
    out
}

// ---------------------------------------------------------------------------
// subcommands

#[derive(Serialize)]
struct StatsReport {
    load: LoadSummary,
    stats: GraphStats,
}

fn stats_csv(report: &StatsReport) -> String {
    let s = &report.stats;
    let mut out = String::from("key,value\n");
    out.push_str(&format!("n,{}\n", s.n));
    out.push_str(&format!("l,{}\n", s.l));
    out.push_str(&format!("l_pos,{}\n", s.l_pos));
    out.push_str(&format!("l_neg,{}\n", s.l_neg));
    match s.neg_pos_ratio {
        Some(r) => out.push_str(&format!("neg_pos_ratio,{r}\n")),
        None => out.push_str("neg_pos_ratio,\n"),
    }
    out.push_str(&format!("mean_degree,{}\n", s.mean_degree));
    out.push_str(&format!("density,{}\n", s.density));
    out.push_str(&format!("dropped_self_loops,{}\n", report.load.dropped_self_loops));
    out
}

fn cmd_stats(args: StatsArgs) -> CliResult<()> {
    let (g, load) = load_input(&args.input)?;
    let report = StatsReport {
        load,
        stats: descriptive_stats(&g),
    };
    let rendered = match args.format {
        Format::Json => Envelope::new("stats", config_json(&args), None, &report).to_json(),
        Format::Csv => stats_csv(&report),
    };
    let name = match args.format {
        Format::Json => "stats.json",
        Format::Csv => "stats.csv",
    };
    emit(&args.out, name, &rendered)
}

fn cmd_partition(args: PartitionArgs) -> CliResult<()> {
    let (g, _) = load_input(&args.input)?;
    let (partition, summary, fit) = compute_partition(&g, &args.method, args.seed)?;
    let csv = partition.to_csv(&g)?;
    let score = Envelope::new("partition", config_json(&args), Some(args.seed), &summary).to_json();
    match &args.out {
        Some(dir) => {
            write_file(dir, "partition.csv", &csv)?;
            write_file(dir, "partition_score.json", &score)?;
            if let Some(fit) = fit {
                write_file(
                    dir,
                    "blockmodel_fit.json",
                    &Envelope::new("partition", config_json(&args), Some(args.seed), &fit)
                        .to_json(),
                )?;
            }
            Ok(())
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> CliResult<()> {
    if args.samples == 1 {
        return Err(CliError::Usage(
            "--samples must be 0 (skip) or at least 2".into(),
        ));
    }
    let config = config_json(&args);
    let seed = Some(args.seed);
    let (g, load) = load_input(&args.input)?;
    let (partition, partition_summary, fit) = compute_partition(&g, &args.method, args.seed)?;

    let densities = density_matrices(&g, &partition)?;
    // A single-block partition has no pairs; emit an empty classification
    // instead of failing the whole run.
    let single_block = partition.block_count() < 2;
    let (mut relations, census) = if single_block {
        (Vec::new(), None)
    } else {
        let (relations, census) = classify_all(&g, &partition, args.tol)?;
        (relations, Some(census))
    };
    let robustness = if args.bootstrap_k > 0 && !single_block {
        let matrix = bootstrap_certainty(&g, &partition, args.bootstrap_k, args.tol, args.seed)?;
        attach_robustness(&mut relations, &matrix);
        Some(matrix)
    } else {
        None
    };
    let frustration = frustration_report(&g, &partition, &relations)?;
    let triads = triad_census(&g);

    let dir = &args.out;
    write_file(
        dir,
        "run_meta.json",
        &Envelope::new("analyze", config.clone(), seed, serde_json::json!({})).to_json(),
    )?;
    write_file(
        dir,
        "stats.json",
        &Envelope::new(
            "analyze",
            config.clone(),
            seed,
            StatsReport {
                load,
                stats: descriptive_stats(&g),
            },
        )
        .to_json(),
    )?;
    write_file(dir, "node_labels.csv", &node_labels_csv(&g))?;
    write_file(dir, "partition.csv", &partition.to_csv(&g)?)?;
    write_file(
        dir,
        "partition_score.json",
        &Envelope::new("analyze", config.clone(), seed, &partition_summary).to_json(),
    )?;
    if let Some(fit) = &fit {
        write_file(
            dir,
            "blockmodel_fit.json",
            &Envelope::new("analyze", config.clone(), seed, fit).to_json(),
        )?;
    }
    write_file(
        dir,
        "densities.json",
        &Envelope::new("analyze", config.clone(), seed, &densities).to_json(),
    )?;
    let classification_payload = if single_block {
        serde_json::json!({
            "pairs": relations,
            "census": census,
            "note": "partition has a single block; nothing to classify",
        })
    } else {
        serde_json::json!({ "pairs": relations, "census": census })
    };
    write_file(
        dir,
        "classification.json",
        &Envelope::new("analyze", config.clone(), seed, classification_payload).to_json(),
    )?;
    write_file(
        dir,
        "frustration.json",
        &Envelope::new("analyze", config.clone(), seed, &frustration).to_json(),
    )?;
    write_file(
        dir,
        "triads.json",
        &Envelope::new("analyze", config.clone(), seed, &triads).to_json(),
    )?;
    if let Some(matrix) = robustness {
        write_file(
            dir,
            "robustness.json",
            &Envelope::new(
                "analyze",
                config.clone(),
                seed,
                serde_json::json!({ "bootstrap_k": args.bootstrap_k, "certainty": matrix }),
            )
            .to_json(),
        )?;
    }
    if args.samples >= 2 {
        let z = sign_shuffle_zscores(&g, args.samples, args.seed)?;
        write_file(
            dir,
            "zscores.json",
            &Envelope::new("analyze", config, seed, &z).to_json(),
        )?;
    }
    Ok(())
}

fn cmd_frustration(args: FrustrationArgs) -> CliResult<()> {
    let (g, _) = load_input(&args.input)?;
    let (partition, _, _) = compute_partition(&g, &args.method, args.seed)?;
    let relations = if partition.block_count() < 2 {
        Vec::new()
    } else {
        classify_all(&g, &partition, args.tol)?.0
    };
    let report = frustration_report(&g, &partition, &relations)?;
    let rendered =
        Envelope::new("frustration", config_json(&args), Some(args.seed), &report).to_json();
    emit(&args.out, "frustration.json", &rendered)
}

fn cmd_triads(args: TriadsArgs) -> CliResult<()> {
    let (g, _) = load_input(&args.input)?;
    let census = triad_census(&g);
    let rendered = Envelope::new("triads", config_json(&args), None, &census).to_json();
    emit(&args.out, "triads.json", &rendered)
}

fn cmd_null(args: NullArgs) -> CliResult<()> {
    if args.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let (g, _) = load_input(&args.input)?;
    match args.model {
        NullModel::SignShuffle => {
            let z = sign_shuffle_zscores(&g, args.samples, args.seed)?;
            let rendered = Envelope::new("null", config_json(&args), Some(args.seed), &z).to_json();
            emit(&args.out, "zscores.json", &rendered)
        }
        NullModel::Blockmodel => {
            let fit: BlockModelFit = match &args.partition {
                Some(path) => {
                    let partition = import_partition(&read_file(path)?, &g)?;
                    fit_with_partition(&g, &partition)?
                }
                None => fit_blockmodel(&g, args.bmax, args.seed, args.restarts)?,
            };
            let z = blockmodel_dob_zscore(&g, &fit, args.samples, args.seed)?;
            let rendered =
                Envelope::new("null", config_json(&args), Some(args.seed), &z).to_json();
            emit(&args.out, "dob_zscore.json", &rendered)
        }
    }
}

fn cmd_robustness(args: RobustnessArgs) -> CliResult<()> {
    if args.bootstrap_k == 0 {
        return Err(CliError::Usage("--bootstrap-k must be at least 1".into()));
    }
    let (g, _) = load_input(&args.input)?;
    let (partition, _, _) = compute_partition(&g, &args.method, args.seed)?;
    let matrix = bootstrap_certainty(&g, &partition, args.bootstrap_k, args.tol, args.seed)?;
    let (mut relations, _) = classify_all(&g, &partition, args.tol)?;
    attach_robustness(&mut relations, &matrix);
    let rendered = Envelope::new(
        "robustness",
        config_json(&args),
        Some(args.seed),
        serde_json::json!({
            "bootstrap_k": args.bootstrap_k,
            "certainty": matrix,
            "pairs": relations,
        }),
    )
    .to_json();
    emit(&args.out, "robustness.json", &rendered)
}

fn planted_edges_text(g: &SignedGraph) -> String {
    let mut out = String::from("# planted signed network: u v sign\n");
    for &(u, v, s) in g.edges() {
        out.push_str(&format!("{u} {v} {s}\n"));
    }
    out
}

fn cmd_synth(args: SynthArgs) -> CliResult<()> {
    let params = PlantedParams {
        n: args.n,
        groups: args.groups,
        p_pos_in: args.p_pos_in,
        p_neg_in: args.p_neg_in,
        p_pos_out: args.p_pos_out,
        p_neg_out: args.p_neg_out,
        seed: args.seed,
    };
    let (g, truth) = generate_planted(&params)?;
    write_file(&args.out, "planted_edges.txt", &planted_edges_text(&g))?;
    write_file(&args.out, "planted_partition.csv", &truth.to_csv(&g)?)?;
    write_file(
        &args.out,
        "run_meta.json",
        &Envelope::new("synth", config_json(&args), Some(args.seed), &params).to_json(),
    )?;
    Ok(())
}

fn parse_ratios(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad ratio '{t}'")))
        })
        .collect()
}

fn parse_methods(text: &str) -> CliResult<Vec<MethodId>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<MethodId>()
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect()
}

fn cmd_sweep(args: SweepArgs) -> CliResult<()> {
    let ratios = parse_ratios(&args.ratios)?;
    let methods = parse_methods(&args.methods)?;
    let base = PlantedParams {
        n: args.n,
        groups: args.groups,
        p_pos_in: args.p_pos_in,
        p_neg_in: 0.0,
        p_pos_out: args.p_pos_out,
        p_neg_out: args.p_neg_out,
        seed: args.seed,
    };
    let result = run_sweep(&base, &ratios, &methods, args.replicates, args.seed)?;
    write_file(&args.out, "sweep.csv", &result.to_csv())?;
    write_file(
        &args.out,
        "sweep_meta.json",
        &Envelope::new("sweep", config_json(&args), Some(args.seed), &base).to_json(),
    )?;
    Ok(())
}
