//! `trajgram`: build, query, inspect, benchmark and verify trajectory indexes.
//!
//! Exit codes: 0 success, 1 build, query or verification failure, 2 usage error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use trajgram::ingest::{self, Format, NormalizeOptions};
use trajgram::oracle::OracleStore;
use trajgram::workload::{self, Answer, Query, QueryKind};
use trajgram::{synth, BuildOptions, Dataset, Point, QueryOptions, QueryStats, Region, TrajectoryIndex};

#[derive(Parser)]
#[command(name = "trajgram", version, about = "Grammar-compressed index over moving-object trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest raw records, build an index and save it.
    Build(BuildArgs),
    /// Run one query against a saved index.
    #[command(after_help = QUERY_HELP)]
    Query(QueryArgs),
    /// Print size statistics of a saved index.
    Stats {
        #[arg(long)]
        index: PathBuf,
    },
    /// Time a workload file, one query per line in `query` flag syntax.
    #[command(after_help = BENCH_HELP)]
    Bench {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        workload: PathBuf,
        /// Executions of every workload line.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        repeat: u32,
    },
    /// Build an index and a brute-force oracle from the same input and
    /// compare seeded random queries of every type.
    Verify(VerifyArgs),
    /// Write a synthetic dataset as `id,time,x,y` CSV.
    Generate(GenerateArgs),
}

const QUERY_HELP: &str = "\
Output columns, in order (CSV) or object keys, sorted (JSON):
  object         id,t,x,y          at most one row
  trajectory     id,t,x,y          by instant
  time-slice     id,x,y            by id
  time-interval  id                by id
  knn            rank,id,distance  by distance, then id
JSON output is {\"results\": [...], \"type\": \"<type>\"}.
Instants outside the indexed range give an empty result and a warning on stderr.";

const BENCH_HELP: &str = "\
CSV columns: type,count,mean_us,median_us,p95_us,results
  count    executions of queries of that type (lines x repeat)
  results  result rows of one pass over that type's lines
Rows appear in the order object, trajectory, time-slice, time-interval, knn;
types absent from the workload are omitted. Blank lines and lines starting
with '#' are skipped.";

#[derive(Args, Clone)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Csv)]
    format: InputFormat,
    /// The CSV input starts with a header row.
    #[arg(long)]
    header: bool,
    /// Coordinate units per cell side.
    #[arg(long, default_value_t = 1.0)]
    cell_size: f64,
    /// Seconds per instant.
    #[arg(long, default_value_t = 1.0)]
    time_step: f64,
    /// Coordinate units per second; faster records are dropped.
    #[arg(long)]
    speed_cap: Option<f64>,
    /// Samples this many instants apart or more are not interpolated.
    #[arg(long, default_value_t = 15)]
    gap: u64,
    /// Instants between snapshots.
    #[arg(long, default_value_t = 120)]
    period: u64,
    /// k²-tree arity.
    #[arg(long, default_value_t = 2)]
    k: u32,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    ingest: IngestArgs,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    ingest: IngestArgs,
    /// Random queries per type.
    #[arg(long, default_value_t = 200)]
    queries: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Scrambles the index's object ids before comparing.
    #[arg(long, hide = true)]
    corrupt_for_testing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Csv,
    Bin,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum QueryType {
    Object,
    Trajectory,
    TimeSlice,
    TimeInterval,
    Knn,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long = "type", value_enum)]
    kind: QueryType,
    #[arg(long)]
    id: Option<u32>,
    #[arg(long)]
    t: Option<u64>,
    #[arg(long)]
    t_begin: Option<u64>,
    #[arg(long)]
    t_end: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    x1: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    y1: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    x2: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    y2: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    px: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    py: Option<i64>,
    #[arg(long)]
    k_nn: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    out: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    /// Objects present throughout, moving up to two cells per axis.
    Walks,
    /// Objects looping over a few shared routes.
    Routes,
    /// Random walks with late starts, early ends and gaps.
    Events,
    /// The seven-object 16×16 example; build it with `--period 8 --gap 2`.
    Walkthrough,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Generator,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    objects: u32,
    #[arg(long, default_value_t = 1000)]
    instants: u64,
    /// Grid side in cells.
    #[arg(long, default_value_t = 1024)]
    side: u64,
    /// Routes shared by the `routes` generator.
    #[arg(long, default_value_t = 5)]
    routes: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Build(args) => build(&args),
        Command::Query(args) => query(&args),
        Command::Stats { index } => load_index(&index).and_then(|idx| print_stats(&idx)),
        Command::Bench { index, workload, repeat } => bench(&index, &workload, repeat),
        Command::Verify(args) => verify(&args),
        Command::Generate(args) => generate(&args),
    };
    match outcome {
        Ok(code) => code,
        // Output piped into `head` and the like.
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

impl IngestArgs {
    fn dataset(&self) -> Result<Dataset> {
        let format = match self.format {
            InputFormat::Csv => Format::Csv { header: self.header },
            InputFormat::Bin => Format::Binary,
        };
        let opts = NormalizeOptions {
            cell_size: self.cell_size,
            time_step: self.time_step,
            speed_cap: self.speed_cap,
            gap_threshold: self.gap,
            time_origin: None,
        };
        let file = File::open(&self.input).with_context(|| format!("opening {}", self.input.display()))?;
        ingest::load_dataset(BufReader::new(file), format, &opts).with_context(|| format!("reading {}", self.input.display()))
    }

    fn build_options(&self) -> BuildOptions {
        BuildOptions {
            period: self.period,
            k: self.k,
            ..BuildOptions::default()
        }
    }
}

fn build(args: &BuildArgs) -> Result<ExitCode> {
    let data = args.ingest.dataset()?;
    let idx = TrajectoryIndex::build(&data, args.ingest.build_options()).context("building the index")?;
    let file = File::create(&args.output).with_context(|| format!("creating {}", args.output.display()))?;
    let mut sink = BufWriter::new(file);
    idx.save(&mut sink).context("writing the index")?;
    sink.flush()?;
    print_stats(&idx)
}

fn load_index(path: &Path) -> Result<TrajectoryIndex> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    TrajectoryIndex::load(BufReader::new(file)).with_context(|| format!("loading {}", path.display()))
}

fn print_stats(idx: &TrajectoryIndex) -> Result<ExitCode> {
    let p = idx.params();
    let s = idx.stats();
    let mut out = io::stdout().lock();
    let rows: [(&str, String); 20] = [
        ("objects", p.objects.to_string()),
        ("instants", p.instants.to_string()),
        ("side", p.side.to_string()),
        ("period", p.period.to_string()),
        ("k", p.k.to_string()),
        ("max_speed", p.max_speed.to_string()),
        ("snapshots", s.snapshots.to_string()),
        ("rules", s.rules.to_string()),
        ("grammar_depth", s.grammar_depth.to_string()),
        ("movements", s.movements.to_string()),
        ("log_symbols", s.log_symbols.to_string()),
        ("snapshot_bytes", s.snapshot_bytes.to_string()),
        ("tree_bytes", s.tree_bytes.to_string()),
        ("log_stream_bytes", s.log_stream_bytes.to_string()),
        ("log_offset_bytes", s.log_offset_bytes.to_string()),
        ("side_array_bytes", s.side_array_bytes.to_string()),
        ("dictionary_bytes", s.dictionary_bytes.to_string()),
        ("overhead_bytes", s.overhead_bytes.to_string()),
        ("total_bytes", s.total_bytes.to_string()),
        ("ratio", format!("{:.4}", s.ratio())),
    ];
    for (key, value) in rows {
        writeln!(out, "{key}: {value}")?;
    }
    Ok(ExitCode::SUCCESS)
}

impl QueryArgs {
    fn descriptor(&self) -> Result<Query> {
        fn need<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
            match v {
                Some(v) => Ok(v),
                None => bail!("{kind} queries need --{flag}"),
            }
        }
        let region = |kind| -> Result<Region> {
            Ok(Region::new(need(self.x1, "x1", kind)?, need(self.y1, "y1", kind)?, need(self.x2, "x2", kind)?, need(self.y2, "y2", kind)?))
        };
        Ok(match self.kind {
            QueryType::Object => Query::Object {
                id: need(self.id, "id", "object")?,
                t: need(self.t, "t", "object")?,
            },
            QueryType::Trajectory => Query::Trajectory {
                id: need(self.id, "id", "trajectory")?,
                t_begin: need(self.t_begin, "t-begin", "trajectory")?,
                t_end: need(self.t_end, "t-end", "trajectory")?,
            },
            QueryType::TimeSlice => Query::TimeSlice {
                region: region("time-slice")?,
                t: need(self.t, "t", "time-slice")?,
            },
            QueryType::TimeInterval => Query::TimeInterval {
                region: region("time-interval")?,
                t_begin: need(self.t_begin, "t-begin", "time-interval")?,
                t_end: need(self.t_end, "t-end", "time-interval")?,
            },
            QueryType::Knn => Query::Knn {
                k: need(self.k_nn, "k-nn", "knn")?,
                point: Point::new(need(self.px, "px", "knn")?, need(self.py, "py", "knn")?),
                t: need(self.t, "t", "knn")?,
            },
        })
    }
}

fn query(args: &QueryArgs) -> Result<ExitCode> {
    let q = match args.descriptor() {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    let idx = load_index(&args.index)?;
    let p = idx.params();
    if !q.in_extent(p.instants) {
        eprintln!("warning: query instants fall outside the indexed range 0..{}", p.instants);
    }
    if let Query::TimeSlice { region, .. } | Query::TimeInterval { region, .. } = q {
        if region.clip(p.side).is_none() {
            eprintln!("warning: query region lies outside the {0}x{0} grid", p.side);
        }
    }
    let answer = idx.answer(&q, &QueryOptions::default(), &mut QueryStats::default())?;
    let mut out = BufWriter::new(io::stdout().lock());
    match args.out {
        OutputFormat::Csv => write_csv(&mut out, &q, &answer)?,
        OutputFormat::Json => {
            serde_json::to_writer(&mut out, &to_json(&q, &answer))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn object_id(q: &Query) -> u32 {
    match *q {
        Query::Object { id, .. } | Query::Trajectory { id, .. } => id,
        _ => 0,
    }
}

fn write_csv(out: &mut impl Write, q: &Query, answer: &Answer) -> io::Result<()> {
    let id = object_id(q);
    match answer {
        Answer::Position(p) => {
            writeln!(out, "id,t,x,y")?;
            if let (Some(p), Query::Object { t, .. }) = (p, q) {
                writeln!(out, "{id},{t},{},{}", p.x, p.y)?;
            }
        }
        Answer::Path(rows) => {
            writeln!(out, "id,t,x,y")?;
            for (t, p) in rows {
                writeln!(out, "{id},{t},{},{}", p.x, p.y)?;
            }
        }
        Answer::Located(rows) => {
            writeln!(out, "id,x,y")?;
            for (id, p) in rows {
                writeln!(out, "{id},{},{}", p.x, p.y)?;
            }
        }
        Answer::Ids(ids) => {
            writeln!(out, "id")?;
            for id in ids {
                writeln!(out, "{id}")?;
            }
        }
        Answer::Neighbors(rows) => {
            writeln!(out, "rank,id,distance")?;
            for (rank, n) in rows.iter().enumerate() {
                writeln!(out, "{},{},{}", rank + 1, n.id, n.distance())?;
            }
        }
    }
    Ok(())
}

fn to_json(q: &Query, answer: &Answer) -> serde_json::Value {
    let id = object_id(q);
    let results: Vec<serde_json::Value> = match answer {
        Answer::Position(p) => match (p, q) {
            (Some(p), Query::Object { t, .. }) => vec![json!({"id": id, "t": t, "x": p.x, "y": p.y})],
            _ => Vec::new(),
        },
        Answer::Path(rows) => rows.iter().map(|(t, p)| json!({"id": id, "t": t, "x": p.x, "y": p.y})).collect(),
        Answer::Located(rows) => rows.iter().map(|(id, p)| json!({"id": id, "x": p.x, "y": p.y})).collect(),
        Answer::Ids(ids) => ids.iter().map(|id| json!({"id": id})).collect(),
        Answer::Neighbors(rows) => rows
            .iter()
            .enumerate()
            .map(|(rank, n)| json!({"rank": rank + 1, "id": n.id, "distance": n.distance()}))
            .collect(),
    };
    json!({"type": q.kind().name(), "results": results})
}

fn read_workload(path: &Path) -> Result<Vec<Query>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut queries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let q = Query::parse(line).with_context(|| format!("{} line {}", path.display(), n + 1))?;
        queries.push(q);
    }
    Ok(queries)
}

fn bench(index: &Path, workload: &Path, repeat: u32) -> Result<ExitCode> {
    let queries = read_workload(workload)?;
    let idx = load_index(index)?;
    let opts = QueryOptions::default();
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "type,count,mean_us,median_us,p95_us,results")?;
    for kind in QueryKind::ALL {
        let mine: Vec<&Query> = queries.iter().filter(|q| q.kind() == kind).collect();
        if mine.is_empty() {
            continue;
        }
        let mut micros = Vec::with_capacity(mine.len() * repeat as usize);
        let mut results = 0;
        for pass in 0..repeat {
            for q in &mine {
                let mut stats = QueryStats::default();
                let start = Instant::now();
                let answer = idx.answer(q, &opts, &mut stats).with_context(|| format!("running {q}"))?;
                micros.push(start.elapsed().as_secs_f64() * 1e6);
                if pass == 0 {
                    results += answer.len();
                }
            }
        }
        micros.sort_by(f64::total_cmp);
        let mean = micros.iter().sum::<f64>() / micros.len() as f64;
        let median = percentile(&micros, 0.5);
        let p95 = percentile(&micros, 0.95);
        writeln!(out, "{kind},{},{mean:.3},{median:.3},{p95:.3},{results}", micros.len())?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

/// Nearest-rank percentile of sorted, non-empty samples.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

fn verify(args: &VerifyArgs) -> Result<ExitCode> {
    let data = args.ingest.dataset()?;
    let mut idx = TrajectoryIndex::build(&data, args.ingest.build_options()).context("building the index")?;
    if args.corrupt_for_testing {
        idx.corrupt_ids_for_testing();
    }
    let oracle = OracleStore::build(&data);
    match workload::verify(&idx, &oracle, &data, args.queries, args.seed, &QueryOptions::default()) {
        Ok(_) => {
            println!("PASS 5×{}", args.queries);
            Ok(ExitCode::SUCCESS)
        }
        Err(m) => {
            println!("FAIL seed {}", args.seed);
            println!("query: {}", m.query);
            println!("index: {:?}", m.index);
            println!("oracle: {:?}", m.oracle);
            Ok(ExitCode::FAILURE)
        }
    }
}

fn generate(args: &GenerateArgs) -> Result<ExitCode> {
    let data = match args.kind {
        Generator::Walks => synth::random_walks(args.seed, args.objects, args.instants, args.side),
        Generator::Routes => synth::shared_routes(args.seed, args.objects, args.routes, args.instants, args.side),
        Generator::Events => synth::walks_with_events(args.seed, args.objects, args.instants, args.side),
        Generator::Walkthrough => synth::walkthrough(),
    };
    let file = File::create(&args.output).with_context(|| format!("creating {}", args.output.display()))?;
    let mut out = BufWriter::new(file);
    for tr in &data.trajectories {
        for (t, p) in tr.samples() {
            writeln!(out, "{},{t},{},{}", tr.id, p.x, p.y)?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
