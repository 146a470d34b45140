//! `rpq`: run regular path queries, benchmark workloads and generate graphs.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad input (unknown vertex,
//! malformed pattern, graph or workload), 3 query timeout.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rpq_core::bench::{parse_workload, run_workload, write_csv, BenchConfig};
use rpq_core::generator::{write_generated, GenSpec};
use rpq_core::{parse_query, Algorithm, Dfa, EngineOptions, EvalError, LabeledGraph, Mode, ProductOrder, Query};

#[derive(Parser)]
#[command(
    name = "rpq",
    version,
    about = "Two-way regular path queries over sparse Boolean matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one query from a single source or towards a single destination.
    Query(QueryArgs),
    /// Run a TSV workload and print a CSV report.
    Bench(BenchArgs),
    /// Print a random edge list.
    Gen(GenArgs),
    /// Print the minimal automaton of a pattern.
    Compile(CompileArgs),
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, default_value = "hybrid", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    /// nnz(P) above which the hybrid evaluator switches to the masked iteration.
    #[arg(long, default_value_t = rpq_core::engine::DEFAULT_SWITCH_THRESHOLD)]
    threshold: usize,
    #[arg(long, default_value = "left", value_parser = parse_order)]
    product_order: ProductOrder,
    /// Per-query budget in milliseconds; 0 disables it.
    #[arg(long, default_value_t = 60_000)]
    timeout_ms: u64,
}

impl EngineArgs {
    fn options(&self) -> EngineOptions {
        EngineOptions {
            algorithm: self.algorithm,
            switch_threshold: self.threshold,
            product_order: self.product_order,
            timeout: (self.timeout_ms > 0).then(|| Duration::from_millis(self.timeout_ms)),
            check_invariants: false,
        }
    }
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn parse_order(s: &str) -> Result<ProductOrder, String> {
    s.parse()
}

#[derive(Args)]
struct QueryArgs {
    graph: PathBuf,
    /// Source vertex (single-source query).
    #[arg(long, conflicts_with = "sdr", required_unless_present = "sdr")]
    ssr: Option<String>,
    /// Destination vertex (single-destination query).
    #[arg(long)]
    sdr: Option<String>,
    pattern: String,
    /// Print the reachable vertex ids, sorted.
    #[arg(long)]
    list_vertices: bool,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct BenchArgs {
    graph: PathBuf,
    workload: PathBuf,
    /// Runs per entry; with 2 or more the first run is discarded as warm-up.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Evaluate entries concurrently.
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    vertices: usize,
    /// Edge counts per label, e.g. `a:50,b:10`.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    labels: Option<String>,
    /// `rpqbench`: seven labels with skewed counts, scaled to `--edges`.
    #[arg(long, value_parser = ["rpqbench"])]
    preset: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    edges: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CompileArgs {
    pattern: String,
}

enum Failure {
    Input(String),
    Timeout(String),
    Io(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

fn load_graph(path: &Path) -> Result<LabeledGraph, Failure> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    LabeledGraph::load(BufReader::new(file)).map_err(|e| match e {
        rpq_core::GraphError::Io(io) => Failure::Io(anyhow::Error::new(io).context(path.display().to_string())),
        other => Failure::Input(format!("{}: {other}", path.display())),
    })
}

fn cmd_query(args: QueryArgs) -> Result<(), Failure> {
    let g = load_graph(&args.graph)?;
    let (mode, endpoint) = match (&args.ssr, &args.sdr) {
        (Some(v), _) => (Mode::Ssr, v),
        (None, Some(v)) => (Mode::Sdr, v),
        (None, None) => unreachable!("clap requires one of --ssr/--sdr"),
    };
    let vertex = g.vertex_index(endpoint).map_err(|e| Failure::Input(e.to_string()))?;
    let query = Query::parse(&args.pattern, &g).map_err(|e| Failure::Input(e.to_string()))?;
    let result = query
        .evaluate(&g, mode, vertex, &args.engine.options())
        .map_err(|e| match e {
            EvalError::Timeout { .. } => Failure::Timeout(e.to_string()),
            other => Failure::Io(other.into()),
        })?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "count={}", result.reachable.len()).context("writing output")?;
    if args.list_vertices {
        let mut names: Vec<&str> = result
            .reachable
            .iter()
            .map(|&v| g.vertex_name(v).expect("engine returns indices in range"))
            .collect();
        names.sort_unstable();
        for name in names {
            writeln!(out, "{name}").context("writing output")?;
        }
    }
    eprintln!(
        "algorithm={} iterations={} time_ms={:.3}",
        result.algorithm,
        result.iterations,
        result.elapsed.as_secs_f64() * 1000.0
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let g = load_graph(&args.graph)?;
    let text =
        std::fs::read_to_string(&args.workload).with_context(|| format!("reading {}", args.workload.display()))?;
    let entries = parse_workload(&text).map_err(|e| Failure::Input(e.to_string()))?;
    let cfg = BenchConfig {
        opts: args.engine.options(),
        repeat: args.repeat,
        parallel: args.parallel,
    };
    let rows = run_workload(&g, &entries, &cfg);
    for row in &rows {
        if let Some(msg) = &row.message {
            eprintln!("{}: {msg}", row.id);
        }
    }
    write_csv(&rows, io::stdout().lock()).context("writing CSV")?;
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let spec = match (&args.labels, &args.preset) {
        (Some(labels), _) => GenSpec::parse(args.vertices, labels),
        (None, Some(_)) => GenSpec::rpqbench(args.vertices, args.edges),
        (None, None) => unreachable!("clap requires --labels or --preset"),
    }
    .map_err(|e| Failure::Input(e.to_string()))?;
    write_generated(&spec, args.seed, io::stdout().lock()).context("writing edge list")?;
    Ok(())
}

fn cmd_compile(args: CompileArgs) -> Result<(), Failure> {
    let ast = parse_query(&args.pattern).map_err(|e| Failure::Input(e.to_string()))?;
    let dfa = Dfa::minimal(&ast);
    let mut out = io::stdout().lock();
    let finals: Vec<String> = (0..dfa.nstates())
        .filter(|&q| dfa.is_final(q))
        .map(|q| q.to_string())
        .collect();
    writeln!(out, "states {}", dfa.nstates()).context("writing output")?;
    writeln!(out, "start {}", dfa.start()).context("writing output")?;
    writeln!(out, "final {}", finals.join(" ")).context("writing output")?;
    for (from, symbol, to) in dfa.transitions() {
        writeln!(out, "{from} {symbol} {to}").context("writing output")?;
    }
    Ok(())
}

/// Sizes the global rayon pool from `RPQ_THREADS`, if set.
fn init_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("RPQ_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("RPQ_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring thread pool")?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::Query(args) => cmd_query(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Compile(args) => cmd_compile(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Timeout(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
