//! `evseq`: generate datasets, build indexes, run queries and benchmarks.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error,
//! 3 verification divergence.

mod bench;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evseq::event::{parse_tuples, write_tuples, Dictionary, EventGrid, GridConfig};
use evseq::generator::{gen_dataset, gen_queries, ActivityDist, DatasetStats, GenSpec, RNG_ALGORITHM};
use evseq::index_file::{IndexFile, MAGIC};
use evseq::level::Variant;
use evseq::query::{parse_queries, Query, QueryKind};
use evseq_oracle::NaiveGridOracle;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "evseq", version, about = "Compact indexes for day x employee x time activity data")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic shift-work dataset (TSV plus JSON sidecar).
    Gen(GenArgs),
    /// Generate a random query workload for a dataset or index.
    Workload(WorkloadArgs),
    /// Build an index file from a tuple TSV.
    Build(BuildArgs),
    /// Answer a query file against an index, one result per line.
    Query(QueryArgs),
    /// Time query workloads against index files and emit a JSON report.
    Bench(bench::BenchArgs),
    /// Cross-check all index variants against a brute-force scan.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GridFlags {
    #[arg(long)]
    days: Option<u32>,
    #[arg(long)]
    employees: Option<u32>,
    #[arg(long)]
    resolution: Option<u32>,
    #[arg(long)]
    activities: Option<u32>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 500)]
    days: u32,
    #[arg(long, default_value_t = 50)]
    employees: u32,
    #[arg(long, default_value_t = 720)]
    resolution: u32,
    #[arg(long, default_value_t = 16)]
    activities: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability that an employee works on a given day.
    #[arg(long, default_value_t = 0.8)]
    work_prob: f64,
    /// Fraction of the day covered by a shift.
    #[arg(long, default_value_t = 0.5)]
    shift_frac: f64,
    /// Mean activity run length in instants.
    #[arg(long, default_value_t = 30.0)]
    mean_run: f64,
    /// Draw activities from a Zipf law with this exponent instead of uniformly.
    #[arg(long)]
    zipf: Option<f64>,
    /// Output TSV; the sidecar goes to `<out>.json`.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct WorkloadArgs {
    /// Tuple TSV or index file providing the grid shape and activity names.
    #[arg(long)]
    from: PathBuf,
    /// Acc, C-1D-1E-1A, C-1D-aE-1A, C-rD-1E-1A, C-rD-aE-1A (or ACC, C1, C1A, CR, CRA).
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    tsv: PathBuf,
    /// wtrle, wtmap or baseline.
    #[arg(long, default_value = "wtmap")]
    variant: String,
    #[arg(long, short)]
    out: PathBuf,
    /// Activity dictionary (`code<TAB>name` lines).
    #[arg(long)]
    dict: Option<PathBuf>,
    #[command(flatten)]
    grid: GridFlags,
}

#[derive(Args)]
struct QueryArgs {
    index: PathBuf,
    queries: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    tsv: PathBuf,
    #[arg(long)]
    dict: Option<PathBuf>,
    /// Random queries per kind.
    #[arg(long, default_value_t = 10_000)]
    queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    grid: GridFlags,
}

pub(crate) enum Failure {
    Usage(String),
    Data(String),
    Divergence(String),
}

impl From<evseq::Error> for Failure {
    fn from(e: evseq::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

pub(crate) type CmdResult<T = ()> = std::result::Result<T, Failure>;

pub(crate) fn read_file(p: &Path) -> CmdResult<Vec<u8>> {
    fs::read(p).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))
}

pub(crate) fn read_text(p: &Path) -> CmdResult<String> {
    String::from_utf8(read_file(p)?).map_err(|_| Failure::Data(format!("{}: not UTF-8", p.display())))
}

pub(crate) fn write_file(p: &Path, bytes: &[u8]) -> CmdResult {
    fs::write(p, bytes).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))
}

pub(crate) fn load_index(p: &Path) -> CmdResult<IndexFile> {
    IndexFile::from_bytes(&read_file(p)?).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let res = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Workload(a) => cmd_workload(a),
        Cmd::Build(a) => cmd_build(a),
        Cmd::Query(a) => cmd_query(a),
        Cmd::Bench(a) => bench::cmd_bench(a),
        Cmd::Verify(a) => cmd_verify(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Divergence(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(3)
        }
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    rng: &'a str,
    spec: &'a GenSpec,
    stats: DatasetStats,
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let config = GridConfig::new(a.days, a.employees, a.resolution, a.activities)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let spec = GenSpec {
        config,
        seed: a.seed,
        work_prob: a.work_prob,
        shift_frac: a.shift_frac,
        mean_run: a.mean_run,
        activity_dist: a.zipf.map_or(ActivityDist::Uniform, ActivityDist::Zipf),
    };
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let tuples = gen_dataset(&spec)?;
    let stats = DatasetStats::measure(&tuples, &config);
    let extra = [("seed", spec.seed.to_string()), ("rng", RNG_ALGORITHM.to_string())];
    write_file(&a.out, write_tuples(&config, &extra, &tuples).as_bytes())?;
    let sidecar = Sidecar {
        rng: RNG_ALGORITHM,
        spec: &spec,
        stats,
    };
    let mut json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    json.push('\n');
    write_file(&sidecar_path(&a.out), json.as_bytes())?;
    eprintln!(
        "{} tuples, mean run {:.2}, worked fraction {:.4}",
        sidecar.stats.tuples, sidecar.stats.mean_run_length, sidecar.stats.worked_fraction
    );
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Grid shape: explicit flags win, then the TSV header, then the tuple maxima.
fn resolve_config(file_cfg: evseq::Result<GridConfig>, flags: &GridFlags) -> CmdResult<GridConfig> {
    let base = file_cfg.ok();
    let pick = |flag: Option<u32>, f: fn(&GridConfig) -> u32| flag.or(base.as_ref().map(f));
    let (Some(d), Some(e), Some(r), Some(a)) = (
        pick(flags.days, |c| c.days),
        pick(flags.employees, |c| c.employees),
        pick(flags.resolution, |c| c.resolution),
        pick(flags.activities, |c| c.activities),
    ) else {
        return Err(Failure::Usage("cannot determine the grid shape; pass --days etc.".into()));
    };
    GridConfig::new(d, e, r, a).map_err(|e| Failure::Usage(e.to_string()))
}

fn load_grid(tsv: &Path, dict: Option<&Path>, flags: &GridFlags) -> CmdResult<(EventGrid, Dictionary)> {
    let text = read_text(tsv)?;
    let file = parse_tuples(&text).map_err(|e| Failure::Data(format!("{}: {e}", tsv.display())))?;
    let dictionary = match dict {
        Some(p) => Dictionary::parse(&read_text(p)?).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?,
        None => Dictionary::default(),
    };
    let mut config = resolve_config(file.infer_config(), flags)?;
    if let Some(max) = dictionary.max_code() {
        if flags.activities.is_none() && file.header.is_none() {
            config.activities = config.activities.max(max);
        }
    }
    let grid = EventGrid::expand(&file.tuples, config).map_err(|e| Failure::Data(format!("{}: {e}", tsv.display())))?;
    Ok((grid, dictionary))
}

fn cmd_workload(a: WorkloadArgs) -> CmdResult {
    let kind: QueryKind = a.kind.parse().map_err(|e: evseq::Error| Failure::Usage(e.to_string()))?;
    let bytes = read_file(&a.from)?;
    let (config, dict) = if bytes.starts_with(MAGIC) {
        let f = IndexFile::from_bytes(&bytes)?;
        (*f.index.config(), f.dictionary)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| Failure::Data("dataset is not UTF-8".into()))?;
        let file = parse_tuples(&text).map_err(|e| Failure::Data(format!("{}: {e}", a.from.display())))?;
        (file.infer_config()?, Dictionary::default())
    };
    let qs = gen_queries(kind, a.count, &config, a.seed)?;
    let mut out = String::with_capacity(qs.len() * 16);
    for q in &qs {
        writeln!(out, "{}", q.format(&dict)).unwrap();
    }
    write_file(&a.out, out.as_bytes())
}

fn cmd_build(a: BuildArgs) -> CmdResult {
    let variant: Variant = a.variant.parse().map_err(|e: evseq::Error| Failure::Usage(e.to_string()))?;
    let (grid, dict) = load_grid(&a.tsv, a.dict.as_deref(), &a.grid)?;
    let file = IndexFile::build(&grid, variant, dict)?;
    let bytes = file.to_bytes();
    write_file(&a.out, &bytes)?;
    let c = grid.config();
    let mut report = format!(
        "variant\t{variant}\ncells\t{}\ngrid\t{}x{}x{} activities={}\n",
        c.len(),
        c.days,
        c.employees,
        c.resolution,
        c.activities
    );
    for (name, size) in file.index.component_sizes() {
        writeln!(report, "{name}\t{size}").unwrap();
    }
    writeln!(report, "index\t{}\nfile\t{}\nplain_tuples\t{}", file.index.size_bytes(), bytes.len(), c.plain_tuple_bytes()).unwrap();
    print!("{report}");
    Ok(())
}

/// Parses and range-checks a query file against an index, reporting the
/// first bad line.
pub(crate) fn load_queries(path: &Path, f: &IndexFile) -> CmdResult<Vec<Query>> {
    let text = read_text(path)?;
    let qs = parse_queries(&text, &f.dictionary).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let lines: Vec<usize> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'))
        .map(|(i, _)| i + 1)
        .collect();
    for (q, line) in qs.iter().zip(lines) {
        q.validate(f.index.config())
            .map_err(|e| Failure::Data(format!("{}: line {line}: {e}", path.display())))?;
    }
    Ok(qs)
}

fn cmd_query(a: QueryArgs) -> CmdResult {
    let f = load_index(&a.index)?;
    let qs = load_queries(&a.queries, &f)?;
    let mut answers = Vec::with_capacity(qs.len());
    for q in &qs {
        answers.push(f.index.answer(q)?);
    }
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    for (q, v) in qs.iter().zip(answers) {
        let r = match q {
            Query::Acc { .. } => writeln!(w, "{}", f.dictionary.display(v as u32)),
            _ => writeln!(w, "{v}"),
        };
        r.map_err(|e| Failure::Data(e.to_string()))?;
    }
    w.flush().map_err(|e| Failure::Data(e.to_string()))
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let (grid, dict) = load_grid(&a.tsv, a.dict.as_deref(), &a.grid)?;
    let oracle = NaiveGridOracle::new(grid.clone());
    let mut files = Vec::new();
    for v in Variant::ALL {
        let built = IndexFile::build(&grid, v, dict.clone())?;
        let bytes = built.to_bytes();
        let loaded = IndexFile::from_bytes(&bytes)?;
        if loaded != built {
            return Err(Failure::Divergence(format!("{v} index changes after a save/load cycle")));
        }
        files.push(loaded);
    }
    let mut checked = 0;
    for kind in QueryKind::ALL {
        for q in gen_queries(kind, a.queries, grid.config(), a.seed)? {
            let want = oracle.answer(&q)?;
            for f in &files {
                let got = f.index.answer(&q)?;
                if got != want {
                    return Err(Failure::Divergence(format!(
                        "{} answered {got}, scan says {want} for query: {}",
                        f.index.variant(),
                        q.format(&dict)
                    )));
                }
            }
            checked += 1;
        }
    }
    println!("ok: {checked} queries agree across wtrle, wtmap, baseline and the scan");
    Ok(())
}
