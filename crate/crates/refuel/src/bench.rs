//! Timing harness and hardness analyses.
//!
//! Timing covers solve-internal work only; instance parsing happens before
//! the clock starts. Timeouts are cooperative deadline checks inside the
//! solvers, so a record can overshoot its budget by a few milliseconds.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::baselines::{astar, brute_force_mode, greedy_report, AstarOptions};
use crate::core::Instance;
use crate::error::{Error, Result};
use crate::gen::ManifestEntry;
use crate::scalar::NumericMode;
use crate::solver::{fast_schedule, Algo, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchStatus {
    Ok,
    Timeout,
    Skipped,
}

impl std::fmt::Display for BenchStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BenchStatus::Ok => "ok",
            BenchStatus::Timeout => "timeout",
            BenchStatus::Skipped => "skipped",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub instance: String,
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
    pub algo: Algo,
    pub mode: NumericMode,
    pub elapsed_s: Option<f64>,
    pub payoff: Option<f64>,
    pub leaves: Option<u64>,
    pub nodes: Option<u64>,
    pub status: BenchStatus,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub algos: Vec<Algo>,
    pub timeout: Duration,
    pub mode: NumericMode,
    pub prune: bool,
    /// Lifts the size guards of the baseline algorithms.
    pub override_guard: bool,
}

/// Runs every `(instance, algo)` pair with a wall-clock timeout. Records
/// come back in manifest order crossed with algo order; payoffs and
/// counters are deterministic for fixed seeds, only `elapsed_s` varies.
pub fn run_bench(manifest: &[ManifestEntry], config: &BenchConfig) -> Vec<BenchRecord> {
    let mut records = Vec::with_capacity(manifest.len() * config.algos.len());
    for entry in manifest {
        let instance = Instance::read_json(Path::new(&entry.path)).ok();
        for &algo in &config.algos {
            let mut record = BenchRecord {
                instance: entry.path.clone(),
                n: entry.n,
                sigma: entry.sigma,
                seed: entry.seed,
                algo,
                mode: config.mode,
                elapsed_s: None,
                payoff: None,
                leaves: None,
                nodes: None,
                status: BenchStatus::Skipped,
            };
            if let Some(instance) = &instance {
                let started = Instant::now();
                let deadline = Some(started + config.timeout);
                let outcome = match algo {
                    Algo::Fast => fast_schedule(
                        instance,
                        &SolveOptions {
                            mode: config.mode,
                            prune: config.prune,
                            deadline,
                        },
                    ),
                    Algo::Astar => astar(
                        instance,
                        &AstarOptions {
                            prune: config.prune,
                            override_guard: config.override_guard,
                            deadline,
                        },
                    ),
                    Algo::Brute => brute_force_mode(instance, config.mode, config.override_guard),
                    Algo::Greedy => greedy_report(instance),
                };
                match outcome {
                    Ok(report) => {
                        record.status = BenchStatus::Ok;
                        record.elapsed_s = Some(report.elapsed_ms / 1e3);
                        record.payoff = Some(report.payoff);
                        record.nodes = Some(report.nodes);
                        if algo == Algo::Fast {
                            record.leaves = Some(report.leaves);
                        }
                    }
                    Err(Error::Timeout) => {
                        record.status = BenchStatus::Timeout;
                        record.elapsed_s = Some(started.elapsed().as_secs_f64());
                    }
                    Err(_) => record.status = BenchStatus::Skipped,
                }
            }
            records.push(record);
        }
    }
    records
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedupRow {
    pub n: usize,
    pub mean_fast_s: Option<f64>,
    pub mean_astar_s: Option<f64>,
    /// Geometric mean of per-instance astar/fast time ratios.
    pub ratio: Option<f64>,
    pub pairs: usize,
    pub excluded: usize,
}

/// Per-size comparison of the fast solver against best-first search.
/// Instances where either side failed or timed out are excluded from the
/// ratio and counted in `excluded`.
pub fn speedup_report(records: &[BenchRecord]) -> Vec<SpeedupRow> {
    // (fast elapsed, astar elapsed), None when that side failed.
    type TimePair = (Option<f64>, Option<f64>);
    let mut by_instance: BTreeMap<(usize, &str), TimePair> = BTreeMap::new();
    for r in records {
        let slot = by_instance.entry((r.n, r.instance.as_str())).or_default();
        let elapsed = (r.status == BenchStatus::Ok)
            .then_some(r.elapsed_s)
            .flatten();
        match r.algo {
            Algo::Fast => slot.0 = elapsed,
            Algo::Astar => slot.1 = elapsed,
            _ => {}
        }
    }
    let mut by_size: BTreeMap<usize, Vec<TimePair>> = BTreeMap::new();
    for ((n, _), pair) in by_instance {
        by_size.entry(n).or_default().push(pair);
    }
    by_size
        .into_iter()
        .map(|(n, pairs)| {
            let complete: Vec<(f64, f64)> = pairs.iter().filter_map(|(f, a)| f.zip(*a)).collect();
            let excluded = pairs.len() - complete.len();
            if complete.is_empty() {
                return SpeedupRow {
                    n,
                    mean_fast_s: None,
                    mean_astar_s: None,
                    ratio: None,
                    pairs: 0,
                    excluded,
                };
            }
            let count = complete.len() as f64;
            let mean_fast = complete.iter().map(|(f, _)| f).sum::<f64>() / count;
            let mean_astar = complete.iter().map(|(_, a)| a).sum::<f64>() / count;
            // Clamp to the timer resolution so a ratio never divides by 0.
            let log_ratio = complete
                .iter()
                .map(|(f, a)| (a.max(1e-9) / f.max(1e-9)).ln())
                .sum::<f64>()
                / count;
            SpeedupRow {
                n,
                mean_fast_s: Some(mean_fast),
                mean_astar_s: Some(mean_astar),
                ratio: Some(log_ratio.exp()),
                pairs: complete.len(),
                excluded,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardnessRow {
    pub sigma: f64,
    pub leaves: u64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardnessReport {
    pub rows: Vec<HardnessRow>,
    /// Spearman rank correlation between log leaves and log elapsed;
    /// `None` with fewer than 3 data points, 0 when either side is
    /// constant (rank variance vanishes under average-tie ranking).
    pub spearman: Option<f64>,
}

/// Hardness analysis over fast-solver records carrying leaf counts.
pub fn hardness_report(records: &[BenchRecord]) -> HardnessReport {
    let rows: Vec<HardnessRow> = records
        .iter()
        .filter(|r| r.algo == Algo::Fast && r.status == BenchStatus::Ok)
        .filter_map(|r| {
            Some(HardnessRow {
                sigma: r.sigma,
                leaves: r.leaves?,
                elapsed_s: r.elapsed_s?,
            })
        })
        .collect();
    let spearman = if rows.len() < 3 {
        None
    } else {
        let ks: Vec<f64> = rows.iter().map(|r| (r.leaves as f64).ln()).collect();
        let ts: Vec<f64> = rows.iter().map(|r| r.elapsed_s.max(1e-9).ln()).collect();
        Some(pearson(&ranks(&ks), &ranks(&ts)))
    };
    HardnessReport { rows, spearman }
}

/// Average ranks; ties share the mean of their positions.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx).powi(2);
        vy += (y - my).powi(2);
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

pub fn write_records_csv(records: &[BenchRecord], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Manifest(e.to_string()))?;
    writer
        .write_record([
            "instance",
            "n",
            "sigma",
            "seed",
            "algo",
            "mode",
            "elapsed_s",
            "payoff",
            "leaves",
            "nodes",
            "status",
        ])
        .map_err(|e| Error::Manifest(e.to_string()))?;
    for r in records {
        writer
            .write_record([
                r.instance.clone(),
                r.n.to_string(),
                format!("{}", r.sigma),
                r.seed.to_string(),
                r.algo.to_string(),
                r.mode.to_string(),
                r.elapsed_s.map(|v| format!("{v}")).unwrap_or_default(),
                r.payoff.map(|v| format!("{v:.17}")).unwrap_or_default(),
                r.leaves.map(|v| v.to_string()).unwrap_or_default(),
                r.nodes.map(|v| v.to_string()).unwrap_or_default(),
                r.status.to_string(),
            ])
            .map_err(|e| Error::Manifest(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Manifest(e.to_string()))?;
    Ok(())
}

pub fn write_speedup_csv(rows: &[SpeedupRow], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Manifest(e.to_string()))?;
    writer
        .write_record([
            "n",
            "mean_fast_s",
            "mean_astar_s",
            "ratio",
            "pairs",
            "excluded",
        ])
        .map_err(|e| Error::Manifest(e.to_string()))?;
    for r in rows {
        writer
            .write_record([
                r.n.to_string(),
                r.mean_fast_s.map(|v| format!("{v}")).unwrap_or_default(),
                r.mean_astar_s.map(|v| format!("{v}")).unwrap_or_default(),
                r.ratio.map(|v| format!("{v}")).unwrap_or_default(),
                r.pairs.to_string(),
                r.excluded.to_string(),
            ])
            .map_err(|e| Error::Manifest(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Manifest(e.to_string()))?;
    Ok(())
}

pub fn write_hardness_csv(report: &HardnessReport, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Manifest(e.to_string()))?;
    writer
        .write_record(["sigma", "leaves", "elapsed_s"])
        .map_err(|e| Error::Manifest(e.to_string()))?;
    for r in &report.rows {
        writer
            .write_record([
                format!("{}", r.sigma),
                r.leaves.to_string(),
                format!("{}", r.elapsed_s),
            ])
            .map_err(|e| Error::Manifest(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Manifest(e.to_string()))?;
    Ok(())
}
