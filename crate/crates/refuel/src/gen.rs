//! Seeded random instance and dataset generation.
//!
//! Processing times are integers drawn uniformly from `1..=100`; weights
//! are `w = 2^x * p` with `x` normal with mean 0 and standard deviation
//! `sigma`. Randomness is a ChaCha8 stream keyed by the seed, with one
//! stream per instance index, so generation is reproducible and
//! order-independent. The generator algorithm itself is pinned by this
//! crate; cross-implementation bit equality is not a goal.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::core::{Instance, InstanceMeta, Job};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
    pub count: usize,
}

/// Generates the `index`-th instance of a configuration. The output is a
/// deterministic function of `(spec.seed, index)`.
pub fn generate_instance(spec: &GenSpec, index: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let mut jobs = Vec::with_capacity(spec.n);
    for id in 0..spec.n {
        let p: u64 = rng.random_range(1..=100);
        let w = if spec.sigma == 0.0 {
            p as f64
        } else {
            let normal = Normal::new(0.0, spec.sigma).expect("sigma >= 0");
            let x: f64 = normal.sample(&mut rng);
            x.exp2() * p as f64
        };
        jobs.push(Job::new(id, p, w).expect("generated jobs are valid"));
    }
    let mut instance = Instance::new(jobs).expect("ids are consecutive");
    instance.meta = InstanceMeta {
        n: spec.n,
        sigma: spec.sigma,
        seed: spec.seed,
    };
    instance
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    /// sigma 0.1, sizes 10, 20, ..., 140, 50 instances each.
    S1,
    /// sizes {100, 500, 1000, 2000, 3000} x sigma {0.100, 0.101, ..., 1.000}.
    S2,
    /// 500 jobs, 5 instances per sigma in {0.100, 0.101, ..., 1.000}.
    S3,
}

impl std::str::FromStr for DatasetKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "s1" | "S1" => Ok(DatasetKind::S1),
            "s2" | "S2" => Ok(DatasetKind::S2),
            "s3" | "S3" => Ok(DatasetKind::S3),
            other => Err(format!(
                "unknown dataset kind `{other}` (expected s1|s2|s3)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
    pub index: u64,
    pub path: String,
}

fn scaled(value: usize, scale: f64) -> usize {
    ((value as f64 * scale).ceil() as usize).max(1)
}

/// Configurations of a dataset kind after applying the scale factor to job
/// counts and per-configuration instance counts (rounded up); the sigma
/// grid and the list of size classes are unchanged.
pub fn dataset_configs(kind: DatasetKind, scale: f64, seed: u64) -> Vec<GenSpec> {
    let milli_sigmas = || (100..=1000u32).map(|k| k as f64 / 1000.0);
    match kind {
        DatasetKind::S1 => (1..=14)
            .map(|k| GenSpec {
                n: scaled(10 * k, scale),
                sigma: 0.1,
                seed,
                count: scaled(50, scale),
            })
            .collect(),
        DatasetKind::S2 => [100usize, 500, 1000, 2000, 3000]
            .iter()
            .flat_map(|&n| {
                milli_sigmas().map(move |sigma| GenSpec {
                    n: scaled(n, scale),
                    sigma,
                    seed,
                    count: scaled(1, scale),
                })
            })
            .collect(),
        DatasetKind::S3 => milli_sigmas()
            .map(|sigma| GenSpec {
                n: scaled(500, scale),
                sigma,
                seed,
                count: scaled(5, scale),
            })
            .collect(),
    }
}

/// Writes every instance of the configurations to `out_dir` along with a
/// `manifest.csv` listing them; returns the manifest entries. Instance
/// indices run globally across the dataset so each file has its own
/// random stream.
pub fn generate_dataset_from_specs(
    specs: &[GenSpec],
    out_dir: &Path,
) -> Result<Vec<ManifestEntry>> {
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut entries = Vec::new();
    let mut index = 0u64;
    for spec in specs {
        for _ in 0..spec.count {
            let instance = generate_instance(spec, index);
            let name = format!(
                "inst_n{:04}_sig{:.3}_i{:05}.json",
                spec.n, spec.sigma, index
            );
            let path: PathBuf = out_dir.join(&name);
            instance.write_json(&path)?;
            entries.push(ManifestEntry {
                n: spec.n,
                sigma: spec.sigma,
                seed: spec.seed,
                index,
                path: path.display().to_string(),
            });
            index += 1;
        }
    }
    write_manifest(&entries, &out_dir.join("manifest.csv"))?;
    Ok(entries)
}

pub fn generate_dataset(
    kind: DatasetKind,
    scale: f64,
    seed: u64,
    out_dir: &Path,
) -> Result<Vec<ManifestEntry>> {
    generate_dataset_from_specs(&dataset_configs(kind, scale, seed), out_dir)
}

pub fn write_manifest(entries: &[ManifestEntry], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Manifest(e.to_string()))?;
    writer
        .write_record(["n", "sigma", "seed", "index", "path"])
        .map_err(|e| Error::Manifest(e.to_string()))?;
    for entry in entries {
        writer
            .write_record([
                entry.n.to_string(),
                format!("{}", entry.sigma),
                entry.seed.to_string(),
                entry.index.to_string(),
                entry.path.clone(),
            ])
            .map_err(|e| Error::Manifest(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Manifest(e.to_string()))?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Manifest(e.to_string()))?;
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Manifest(e.to_string()))?;
        if record.len() != 5 {
            return Err(Error::Manifest(format!(
                "{}: expected 5 manifest columns, got {}",
                path.display(),
                record.len()
            )));
        }
        let parse = |k: usize, what: &str| -> Result<String> {
            record
                .get(k)
                .map(str::to_owned)
                .ok_or_else(|| Error::Manifest(format!("missing {what}")))
        };
        entries.push(ManifestEntry {
            n: parse(0, "n")?
                .parse()
                .map_err(|e| Error::Manifest(format!("bad n: {e}")))?,
            sigma: parse(1, "sigma")?
                .parse()
                .map_err(|e| Error::Manifest(format!("bad sigma: {e}")))?,
            seed: parse(2, "seed")?
                .parse()
                .map_err(|e| Error::Manifest(format!("bad seed: {e}")))?,
            index: parse(3, "index")?
                .parse()
                .map_err(|e| Error::Manifest(format!("bad index: {e}")))?,
            path: parse(4, "path")?,
        });
    }
    Ok(entries)
}
