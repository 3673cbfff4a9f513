//! `trigraph`: exact and approximate triangle counting from the command line.
//!
//! Exit codes: 0 on success, 2 for usage errors, 1 for runtime failures.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use trigraph::engines::{aggregate_clustering, run_engine, run_engine_with};
use trigraph::gen::{gen_gnp, gen_pa};
use trigraph::io::read_graph;
use trigraph::sink::{ListWriter, TriangleList, TriangleSink};
use trigraph::sparsify::{approx_count, mean_and_variance, variance_report};
use trigraph::stats::{graph_stats, GraphStats};
use trigraph::{
    estimate_p_opt, CostKind, EngineConfig, EngineKind, Error, ExecMode, Graph, OrderKind, OrderRank, PoptBase, RunReport,
    SparsifyConfig, SparsifyMode,
};

#[derive(Parser)]
#[command(name = "trigraph", version, about = "Exact and approximate triangle counting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count triangles and report per-rank work and messages as JSON.
    Count(RunArgs),
    /// Write every triangle as a `u v w` line.
    List(RunArgs),
    /// Write `v T_v C_v` lines; print a summary with the mean clustering coefficient.
    Cc(RunArgs),
    /// Approximate counts by edge sparsification, with empirical and analytic variance.
    Approx(ApproxArgs),
    /// Node, edge and triangle statistics.
    Stats(StatsArgs),
    /// Extrapolate the best rank count from one measured optimum.
    Popt(PoptArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Gnp,
    Pa,
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list, one `u v` pair per line; `#` starts a comment.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// Generate the input instead of reading it.
    #[arg(long, value_enum, requires_all = ["n", "d"])]
    gen: Option<GenKind>,
    /// Generated node count.
    #[arg(long)]
    n: Option<usize>,
    /// Generated average degree (an even integer for `pa`).
    #[arg(long)]
    d: Option<f64>,
    /// Seed for generation, random orderings and sparsification.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EngineArgs {
    /// seq, aop, anop-direct or anop-surrogate.
    #[arg(long, default_value = "anop-surrogate")]
    engine: EngineKind,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    ranks: u64,
    /// Cost function for partition balancing: N, D, DH, DDH, DH2, DPD, DPD-ALL, NOV.
    #[arg(long, default_value = "DPD")]
    balance: CostKind,
    /// id, degree, random, random:SEED or coreness.
    #[arg(long, default_value = "degree")]
    ordering: String,
}

#[derive(Args)]
struct OutputArgs {
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Human-readable output instead of compact JSON.
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ApproxArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Edge retention probability, in (0, 1].
    #[arg(long, value_parser = parse_probability)]
    q: f64,
    /// Independent runs; run `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
    /// per-partition or global.
    #[arg(long, default_value = "per-partition")]
    sparsify: SparsifyMode,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PoptArgs {
    /// Target node count.
    #[arg(long, value_parser = parse_positive)]
    n: f64,
    /// Target average degree.
    #[arg(long, value_parser = parse_positive)]
    d: f64,
    /// Node count of the measured graph.
    #[arg(long, value_parser = parse_positive)]
    base_n: f64,
    /// Average degree of the measured graph.
    #[arg(long, value_parser = parse_positive)]
    base_d: f64,
    /// Best rank count measured on it.
    #[arg(long, value_parser = parse_positive)]
    base_p: f64,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let q: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if q > 0.0 && q <= 1.0 {
        Ok(q)
    } else {
        Err(format!("{q} is not in (0, 1]"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{x} is not positive"))
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Count(a) => cmd_count(a),
        Command::List(a) => cmd_list(a),
        Command::Cc(a) => cmd_cc(a),
        Command::Approx(a) => cmd_approx(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Popt(a) => cmd_popt(a),
    }
}

fn load_graph(a: &GraphArgs) -> CliResult<Graph> {
    if let Some(path) = &a.input {
        return read_graph(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())));
    }
    let (n, d) = (a.n.unwrap_or_default(), a.d.unwrap_or_default());
    let graph = match a.gen {
        Some(GenKind::Gnp) => gen_gnp(n, d, a.seed)?,
        Some(GenKind::Pa) => {
            if d.fract() != 0.0 || d < 0.0 {
                return Err(Failure::Usage(format!("--d must be a non-negative integer for pa, got {d}")));
            }
            gen_pa(n, d as usize, a.seed)?
        }
        None => return Err(Failure::Usage("one of --input or --gen is required".into())),
    };
    Ok(graph)
}

fn engine_config(a: &EngineArgs, seed: u64) -> CliResult<EngineConfig> {
    let ordering = match a.ordering.as_str() {
        "random" => OrderKind::ByRandom(seed),
        s => s.parse()?,
    };
    Ok(EngineConfig::new(a.engine, a.ranks as usize)
        .with_cost(a.balance)
        .with_ordering(ordering)
        .with_mode(ExecMode::from_env()?))
}

/// Opens `--out` or stdout.
fn open_output(out: &Option<PathBuf>) -> CliResult<Box<dyn Write + Send>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn create(path: &Path) -> CliResult<File> {
    File::create(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(output: &OutputArgs, value: &T, pretty: impl FnOnce() -> String) -> CliResult {
    let text = if output.pretty {
        pretty()
    } else {
        serde_json::to_string(value).map_err(|e| Failure::Runtime(e.to_string()))?
    };
    let mut w = open_output(&output.out)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

/// Summary JSON for commands whose main output is a line file: stdout when
/// the lines went to `--out`, stderr otherwise.
fn emit_summary<T: Serialize>(output: &OutputArgs, value: &T) -> CliResult {
    let text = if output.pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(|e| Failure::Runtime(e.to_string()))?;
    if output.out.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    Ok(())
}

fn render_report(r: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "engine   {}", r.engine);
    let _ = writeln!(s, "ranks    {}", r.p);
    let _ = writeln!(s, "balance  {}", r.cost_kind);
    let _ = writeln!(s, "ordering {}", r.ordering);
    let _ = writeln!(s, "T        {}", r.total);
    let _ = writeln!(s, "{:>5} {:>12} {:>10} {:>10} {:>10} {:>14}", "rank", "T", "core", "dataSent", "dataRecv", "cost");
    for (i, x) in r.per_rank.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:>5} {:>12} {:>10} {:>10} {:>10} {:>14}",
            i, x.triangles, x.core_nodes, x.data_sent, x.data_recv, x.realized_cost
        );
    }
    s.truncate(s.trim_end().len());
    s
}

fn cmd_count(a: RunArgs) -> CliResult {
    let graph = load_graph(&a.graph)?;
    let report = run_engine(&graph, &engine_config(&a.engine, a.graph.seed)?)?;
    emit(&a.output, &report, || render_report(&report))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ListSummary {
    engine: EngineKind,
    p: usize,
    #[serde(rename = "T")]
    triangles: u64,
    lines: u64,
}

fn cmd_list(a: RunArgs) -> CliResult {
    let graph = load_graph(&a.graph)?;
    let cfg = engine_config(&a.engine, a.graph.seed)?;
    let out = open_output(&a.output.out)?;
    let (report, lines) = if cfg.engine == EngineKind::Seq {
        // one rank: stream straight to the output
        let slot = Mutex::new(Some(out));
        let (report, mut sinks) = run_engine_with(&graph, &cfg, |_| ListWriter::new(slot.lock().unwrap().take().expect("one sink")))?;
        let w = sinks.pop().expect("one sink");
        let lines = w.written();
        w.finish()?;
        (report, lines)
    } else {
        let (report, lists) = run_engine_with(&graph, &cfg, |_| TriangleList::default())?;
        let mut w = ListWriter::new(out);
        for [u, v, x] in lists.into_iter().flat_map(|l| l.triangles) {
            w.triangle(u, v, x);
        }
        let lines = w.written();
        w.finish()?;
        (report, lines)
    };
    let summary = ListSummary {
        engine: report.engine,
        p: report.p,
        triangles: report.total,
        lines,
    };
    emit_summary(&a.output, &summary)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CcSummary {
    engine: EngineKind,
    p: usize,
    n: usize,
    #[serde(rename = "T")]
    triangles: u64,
    mean_cc: f64,
}

fn cmd_cc(a: RunArgs) -> CliResult {
    let graph = load_graph(&a.graph)?;
    let cfg = engine_config(&a.engine, a.graph.seed)?;
    let (report, cc) = aggregate_clustering::<f64>(&graph, &cfg)?;
    let mut out = open_output(&a.output.out)?;
    for (v, (t, c)) in cc.triangles.iter().zip(&cc.coefficients).enumerate() {
        writeln!(out, "{v} {t} {c:?}")?;
    }
    out.flush()?;
    drop(out);
    let summary = CcSummary {
        engine: report.engine,
        p: report.p,
        n: cc.node_count(),
        triangles: report.total,
        mean_cc: cc.mean(),
    };
    emit_summary(&a.output, &summary)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ApproxReport {
    engine: EngineKind,
    p: usize,
    q: f64,
    runs: u64,
    seed: u64,
    sparsify: SparsifyMode,
    /// Exact count, the reference for the error columns.
    #[serde(rename = "T")]
    triangles: u64,
    estimates: Vec<f64>,
    mean: f64,
    sample_variance: f64,
    analytic_var: f64,
    analytic_var_prime: f64,
    k: u64,
    k_prime: u64,
    avg_error_pct: f64,
    max_error_pct: f64,
}

fn cmd_approx(a: ApproxArgs) -> CliResult {
    let graph = load_graph(&a.graph)?;
    let cfg = engine_config(&a.engine, a.graph.seed)?;
    let exact = run_engine(&graph, &cfg)?;
    let order = OrderRank::compute(&graph, cfg.ordering);
    let analytic = variance_report::<f64>(&graph, &order, &exact.plan, a.q)?;

    let mut estimates = Vec::with_capacity(a.runs as usize);
    for i in 0..a.runs {
        let sp = SparsifyConfig::new(a.q, a.graph.seed.wrapping_add(i), a.sparsify)?;
        let (est, _) = approx_count::<f64>(&graph, &cfg, sp)?;
        estimates.push(est.estimate);
    }
    let (mean, sample_variance) = if estimates.len() > 1 {
        mean_and_variance(&estimates)
    } else {
        (estimates[0], 0.0)
    };
    let t = exact.total as f64;
    let errors: Vec<f64> = estimates
        .iter()
        .map(|e| if t == 0.0 { if *e == 0.0 { 0.0 } else { f64::INFINITY } } else { 100.0 * (e - t).abs() / t })
        .collect();
    let report = ApproxReport {
        engine: exact.engine,
        p: exact.p,
        q: a.q,
        runs: a.runs,
        seed: a.graph.seed,
        sparsify: a.sparsify,
        triangles: exact.total,
        mean,
        sample_variance,
        analytic_var: analytic.var,
        analytic_var_prime: analytic.var_prime,
        k: analytic.k,
        k_prime: analytic.k_prime,
        avg_error_pct: errors.iter().sum::<f64>() / errors.len() as f64,
        max_error_pct: errors.iter().cloned().fold(0.0, f64::max),
        estimates,
    };
    emit(&a.output, &report, || {
        let mut s = String::new();
        let _ = writeln!(s, "T                 {}", report.triangles);
        let _ = writeln!(s, "q                 {}", report.q);
        let _ = writeln!(s, "runs              {}", report.runs);
        let _ = writeln!(s, "mean estimate     {:.3}", report.mean);
        let _ = writeln!(s, "sample variance   {:.3}", report.sample_variance);
        let _ = writeln!(s, "Var (closed form) {:.3}", report.analytic_var);
        let _ = writeln!(s, "Var' (closed form){:.3}", report.analytic_var_prime);
        let _ = writeln!(s, "k / k'            {} / {}", report.k, report.k_prime);
        let _ = writeln!(s, "avg error (%)     {:.4}", report.avg_error_pct);
        let _ = write!(s, "max error (%)     {:.4}", report.max_error_pct);
        s
    })
}

fn cmd_stats(a: StatsArgs) -> CliResult {
    let graph = load_graph(&a.graph)?;
    let stats = graph_stats(&graph);
    emit(&a.output, &stats, || render_stats(&stats))
}

fn render_stats(s: &GraphStats) -> String {
    format!(
        "n        {}\nm        {}\nT        {}\nNTC      {}\nk        {}\ndegree   min {} / max {} / mean {:.3} / median {}",
        s.n, s.m, s.triangles, s.ntc, s.k, s.degree.min, s.degree.max, s.degree.mean, s.degree.median
    )
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PoptReport {
    p_opt: u64,
}

fn cmd_popt(a: PoptArgs) -> CliResult {
    let base = PoptBase {
        n: a.base_n,
        dbar: a.base_d,
        p_opt: a.base_p,
    };
    let report = PoptReport {
        p_opt: estimate_p_opt(a.n, a.d, base)?,
    };
    emit(&a.output, &report, || format!("p_opt {}", report.p_opt))
}
