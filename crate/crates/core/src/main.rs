//! Command-line surface: feed ingestion, synthetic graph generation,
//! single-query answering, graph validation, and the benchmark harness.
//!
//! Structured output goes to stdout, diagnostics to stderr. Exit codes:
//! 0 success, 2 bad input, 3 no route, 4 data error.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use busnet::bench::{render_table, run_bench, BenchConfig};
use busnet::error::Error;
use busnet::graph::{DurationSecs, Timestamp};
use busnet::ingest::{
    build_graph, generate_synthetic, load_feed, load_graph, save_graph, IngestSummary,
    SyntheticSpec,
};
use busnet::planner::{plan, PlanMode, PlanOptions, PoiQuery, DEFAULT_POI_CAP};
use busnet::report::route_document;

#[derive(Parser)]
#[command(name = "busnet", about = "Time-dependent bus-network routing", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph from a GTFS static feed directory.
    Ingest(IngestArgs),
    /// Generate a synthetic network.
    Generate(GenerateArgs),
    /// Answer a multi-POI query and emit the route document.
    Query(QueryArgs),
    /// Run the seeded benchmark harness.
    Bench(BenchArgs),
    /// Check a persisted graph against the data-model invariants.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Directory holding stops.txt, routes.txt, trips.txt, stop_times.txt.
    #[arg(long)]
    feed: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Keep only trips with these service ids (repeatable; default: all).
    #[arg(long = "service-id")]
    service_ids: Vec<String>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 300)]
    vertices: usize,
    #[arg(long, default_value_t = 40)]
    lines: usize,
    #[arg(long = "stops-per-line", default_value_t = 10)]
    stops_per_line: usize,
    /// Seconds between consecutive trips of a line.
    #[arg(long, default_value_t = 180)]
    headway: u32,
    #[arg(long = "span-start", default_value = "06:00:00")]
    span_start: String,
    #[arg(long = "span-end", default_value = "22:00:00")]
    span_end: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    origin: String,
    /// Departure time, HH:MM[:SS] or raw seconds.
    #[arg(long)]
    depart: String,
    /// POI stop id (repeatable, comma-separable).
    #[arg(long = "poi", required = true, value_delimiter = ',')]
    pois: Vec<String>,
    /// Per-POI dwell as stop_id=seconds (repeatable).
    #[arg(long = "dwell")]
    dwells: Vec<String>,
    /// Uniform dwell seconds applied to POIs without an explicit --dwell.
    #[arg(long = "dwell-all", default_value_t = 0)]
    dwell_all: u32,
    /// naive | ea-star | ea-star-no-prune | ordered
    #[arg(long, default_value = "ea-star")]
    mode: String,
    #[arg(long, default_value_t = DEFAULT_POI_CAP)]
    cap: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [882usize, 3616, 12550])]
    scales: Vec<usize>,
    #[arg(long = "poi-counts", value_delimiter = ',', default_values_t = [1usize, 2, 3, 4, 5, 6])]
    poi_counts: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "08:00:00")]
    depart: String,
    /// naive | ea-star | ea-star-no-prune | ordered (comma-separable).
    #[arg(long, value_delimiter = ',', default_values_t = ["naive".to_string(), "ea-star".to_string()])]
    modes: Vec<String>,
    /// Run trials serially for clean timing.
    #[arg(long)]
    sequential: bool,
    #[arg(long, default_value_t = DEFAULT_POI_CAP)]
    cap: usize,
    /// Per-POI dwell seconds drawn uniformly from LO,HI (default: 0).
    #[arg(long = "dwell-range")]
    dwell_range: Option<String>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    graph: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnknownVertex(_)
        | Error::UnknownBus(_)
        | Error::InvalidQuery(_)
        | Error::InfeasibleSpec(_) => 2,
        Error::NoRoute(_) => 3,
        Error::Ingest(_)
        | Error::Format(_)
        | Error::Io(_)
        | Error::SubgraphTooSmall { .. } => 4,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Query(args) => cmd_query(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn cmd_ingest(args: IngestArgs) -> Result<(), Error> {
    let feed = load_feed(&args.feed)?;
    let filter: Option<HashSet<String>> = if args.service_ids.is_empty() {
        None
    } else {
        Some(args.service_ids.iter().cloned().collect())
    };
    let graph = build_graph(&feed, filter.as_ref())?;
    save_graph(&graph, &args.out)?;
    let summary = IngestSummary::of(&graph);
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    eprintln!(
        "ingested {} vertices, {} edges, {} schedule entries (v_max {:.2} m/s) -> {}",
        summary.vertices,
        summary.edges,
        summary.schedule_entries,
        summary.v_max,
        args.out.display()
    );
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Error> {
    let spec = SyntheticSpec {
        vertex_count: args.vertices,
        line_count: args.lines,
        stops_per_line: args.stops_per_line,
        headway: DurationSecs(args.headway),
        service_span: (
            Timestamp::parse(&args.span_start)?,
            Timestamp::parse(&args.span_end)?,
        ),
        seed: args.seed,
    };
    let graph = generate_synthetic(&spec)?;
    save_graph(&graph, &args.out)?;
    let summary = IngestSummary::of(&graph);
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    eprintln!(
        "generated {} vertices, {} edges -> {}",
        summary.vertices,
        summary.edges,
        args.out.display()
    );
    Ok(())
}

fn cmd_query(args: QueryArgs) -> Result<(), Error> {
    let graph = load_graph(&args.graph)?;
    let mode = PlanMode::parse(&args.mode)?;
    let origin = graph.resolve(&args.origin)?;
    let depart = Timestamp::parse(&args.depart)?;

    let mut pois = Vec::new();
    for p in &args.pois {
        pois.push(graph.resolve(p)?);
    }
    let mut dwell = HashMap::new();
    for &p in &pois {
        dwell.insert(p, DurationSecs(args.dwell_all));
    }
    for spec in &args.dwells {
        let (stop, secs) = spec.split_once('=').ok_or_else(|| {
            Error::InvalidQuery(format!("--dwell expects stop_id=seconds, got {spec:?}"))
        })?;
        let secs: u32 = secs
            .parse()
            .map_err(|_| Error::InvalidQuery(format!("bad dwell seconds in {spec:?}")))?;
        dwell.insert(graph.resolve(stop)?, DurationSecs(secs));
    }

    let query = PoiQuery::new(origin, depart, pois, dwell)?;
    let options = PlanOptions { mode, poi_cap: args.cap, record_pruned: false };
    let result = plan(&graph, &query, &options)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&route_document(&graph, &query, &result, mode)).unwrap()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Error> {
    let graph = load_graph(&args.graph)?;
    let mut modes = Vec::new();
    for m in &args.modes {
        modes.push(PlanMode::parse(m)?);
    }
    let dwell_range = match &args.dwell_range {
        None => None,
        Some(spec) => {
            let parsed = spec.split_once(',').and_then(|(lo, hi)| {
                Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?))
            });
            match parsed {
                Some((lo, hi)) if lo <= hi => Some((lo, hi)),
                _ => {
                    return Err(Error::InvalidQuery(format!(
                        "--dwell-range expects LO,HI seconds, got {spec:?}"
                    )))
                }
            }
        }
    };
    let config = BenchConfig {
        scales: args.scales,
        poi_counts: args.poi_counts,
        trials: args.trials,
        seed: args.seed,
        depart: Timestamp::parse(&args.depart)?,
        modes,
        sequential: args.sequential,
        poi_cap: args.cap,
        dwell_range,
    };
    let report = run_bench(&graph, &config)?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    eprintln!("{}", render_table(&report));
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Error> {
    let graph = load_graph(&args.graph)?;
    let violations = graph.validate();
    if violations.is_empty() {
        println!(
            "{}",
            json!({ "valid": true, "vertices": graph.vertex_count(), "edges": graph.edge_count() })
        );
        Ok(())
    } else {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        println!("{}", json!({ "valid": false, "violations": msgs }));
        Err(Error::Format(format!("{} invariant violations", msgs.len())))
    }
}
