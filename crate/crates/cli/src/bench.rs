use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use evseq::index_file::IndexFile;
use evseq::query::Query;
use serde::Serialize;

use crate::{load_index, load_queries, write_file, CmdResult, Failure};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Args)]
pub struct BenchArgs {
    /// Index files to measure.
    #[arg(long = "index", required = true)]
    indexes: Vec<PathBuf>,
    /// Query files; each is timed against every index.
    #[arg(long = "workload", required = true)]
    workloads: Vec<PathBuf>,
    /// Passes over each workload.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Worker threads sharing each index (capped by EVSEQ_THREADS).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    schema_version: u32,
    reports: Vec<IndexReport>,
}

#[derive(Serialize)]
struct IndexReport {
    dataset: String,
    variant: String,
    sizes: BTreeMap<String, usize>,
    workloads: Vec<WorkloadReport>,
}

#[derive(Serialize)]
struct WorkloadReport {
    workload: String,
    kind: String,
    n: usize,
    median_us: f64,
    mean_us: f64,
}

/// Effective worker count: the flag, capped by `EVSEQ_THREADS` when set.
fn workers(flag: usize) -> usize {
    let cap = std::env::var("EVSEQ_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&c| c > 0);
    let n = flag.max(1);
    cap.map_or(n, |c| n.min(c))
}

/// Per-query latencies in nanoseconds over `reps` passes, answered by
/// `threads` workers sharing `index`.
pub fn time_queries(index: &IndexFile, queries: &[Query], reps: usize, threads: usize) -> CmdResult<Vec<u64>> {
    let chunk = queries.len().div_ceil(threads.max(1)).max(1);
    let per_worker = std::thread::scope(|s| {
        let handles: Vec<_> = queries
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || -> evseq::Result<Vec<u64>> {
                    let mut out = Vec::with_capacity(part.len() * reps);
                    for _ in 0..reps {
                        for q in part {
                            let t = Instant::now();
                            let v = index.index.answer(q)?;
                            let ns = t.elapsed().as_nanos() as u64;
                            std::hint::black_box(v);
                            out.push(ns);
                        }
                    }
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect::<Vec<_>>()
    });
    let mut all = Vec::new();
    for r in per_worker {
        all.extend(r?);
    }
    Ok(all)
}

/// Median and mean in microseconds; zeros for an empty sample.
pub fn summarize(mut ns: Vec<u64>) -> (f64, f64) {
    if ns.is_empty() {
        return (0.0, 0.0);
    }
    ns.sort_unstable();
    let mid = ns.len() / 2;
    let median = if ns.len() % 2 == 1 {
        ns[mid] as f64
    } else {
        (ns[mid - 1] + ns[mid]) as f64 / 2.0
    };
    let mean = ns.iter().map(|&x| x as f64).sum::<f64>() / ns.len() as f64;
    (median / 1000.0, mean / 1000.0)
}

fn stem(p: &std::path::Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn cmd_bench(a: BenchArgs) -> CmdResult {
    if a.reps == 0 {
        return Err(Failure::Usage("--reps must be at least 1".into()));
    }
    let threads = workers(a.threads);
    let mut reports = Vec::new();
    for ip in &a.indexes {
        let f = load_index(ip)?;
        let mut sizes: BTreeMap<String, usize> = f.index.component_sizes().into_iter().collect();
        sizes.insert("total".into(), f.index.size_bytes());
        let mut workloads = Vec::new();
        for wp in &a.workloads {
            let qs = load_queries(wp, &f)?;
            let mut kinds: Vec<&str> = qs.iter().map(|q| q.kind().name()).collect();
            kinds.dedup();
            let kind = match kinds.as_slice() {
                [] => "empty".to_string(),
                [k] => k.to_string(),
                _ => "mixed".to_string(),
            };
            let (median_us, mean_us) = summarize(time_queries(&f, &qs, a.reps, threads)?);
            workloads.push(WorkloadReport {
                workload: stem(wp),
                kind,
                n: qs.len(),
                median_us,
                mean_us,
            });
        }
        reports.push(IndexReport {
            dataset: stem(ip),
            variant: f.index.variant().to_string(),
            sizes,
            workloads,
        });
    }
    let report = Report {
        schema_version: SCHEMA_VERSION,
        reports,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    match &a.out {
        Some(p) => write_file(p, json.as_bytes()),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}
