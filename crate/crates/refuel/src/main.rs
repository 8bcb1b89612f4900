use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use refuel::baselines::{
    astar, brute_force_mode, count_potential_brute, greedy_report, AstarOptions,
};
use refuel::bench::{
    hardness_report, run_bench, speedup_report, write_hardness_csv, write_records_csv,
    write_speedup_csv, BenchConfig,
};
use refuel::core::{to_dropout_order, Instance, JobId};
use refuel::dominance::is_potential;
use refuel::gen::{
    dataset_configs, generate_dataset_from_specs, read_manifest, DatasetKind, GenSpec,
};
use refuel::solver::{enumerate_potential, fast_schedule, Algo, SolveOptions, SolveReport};
use refuel::{Error, NumericMode};

const EXIT_SIZE_GUARD: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;
const EXIT_INVALID: u8 = 5;

#[derive(Parser)]
#[command(
    name = "refuel",
    version,
    about = "Exact solver for the airplane refueling problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances or a whole dataset
    Gen(GenArgs),
    /// Solve an instance file
    Solve(SolveArgs),
    /// Check an order against the dominance rules
    Validate(ValidateArgs),
    /// Count the schedules compatible with the dominance rules
    Count(CountArgs),
    /// Time algorithms over a dataset manifest
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Dataset kind (s1|s2|s3); omit for a custom configuration
    #[arg(long, value_parser = parse_kind)]
    kind: Option<DatasetKind>,
    /// Scale factor for job counts and instance counts (rounded up)
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Jobs per instance (custom configurations)
    #[arg(long)]
    n: Option<usize>,
    /// Lognormal weight spread (custom configurations)
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Instances to generate (custom configurations)
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "fast", value_parser = parse_algo)]
    algo: Algo,
    #[arg(long, default_value = "fast", value_parser = parse_mode)]
    mode: NumericMode,
    /// Wall-clock limit in seconds
    #[arg(long)]
    timeout_s: Option<f64>,
    /// Enable incumbent/dominance pruning
    #[arg(long)]
    prune: bool,
    #[arg(long)]
    override_size_guard: bool,
    /// Print the drop-out order alongside the processing order
    #[arg(long)]
    emit_order: bool,
    #[arg(long)]
    emit_json: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated processing order of job ids
    #[arg(long)]
    order: String,
    #[arg(long)]
    emit_json: bool,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    input: PathBuf,
    /// Use the exhaustive counter instead of the recursive enumerator
    #[arg(long)]
    brute: bool,
    #[arg(long)]
    override_size_guard: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Comma-separated algorithms to time
    #[arg(long, default_value = "fast,astar", value_delimiter = ',', value_parser = parse_algo)]
    algos: Vec<Algo>,
    #[arg(long, default_value_t = 60.0)]
    timeout_s: f64,
    #[arg(long, default_value = "fast", value_parser = parse_mode)]
    mode: NumericMode,
    #[arg(long)]
    prune: bool,
    #[arg(long)]
    override_size_guard: bool,
    /// Output directory for records.csv, speedup.csv, hardness.csv
    #[arg(long)]
    out: PathBuf,
}

fn parse_algo(s: &str) -> Result<Algo, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<NumericMode, String> {
    s.parse()
}

fn parse_kind(s: &str) -> Result<DatasetKind, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Count(args) => cmd_count(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::SizeGuard { .. } => ExitCode::from(EXIT_SIZE_GUARD),
                Error::Timeout => ExitCode::from(EXIT_TIMEOUT),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, Error> {
    let specs = match args.kind {
        Some(kind) => dataset_configs(kind, args.scale, args.seed),
        None => {
            let n = args
                .n
                .ok_or_else(|| Error::Manifest("--n is required without --kind".to_string()))?;
            vec![GenSpec {
                n,
                sigma: args.sigma,
                seed: args.seed,
                count: args.count,
            }]
        }
    };
    let entries = generate_dataset_from_specs(&specs, &args.out)?;
    println!(
        "wrote {} instances and manifest.csv to {}",
        entries.len(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_timeout(timeout_s: Option<f64>) -> Option<std::time::Instant> {
    timeout_s.map(|s| std::time::Instant::now() + Duration::from_secs_f64(s))
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, Error> {
    let instance = Instance::read_json(&args.input)?;
    let deadline = parse_timeout(args.timeout_s);
    let report: SolveReport = match args.algo {
        Algo::Fast => fast_schedule(
            &instance,
            &SolveOptions {
                mode: args.mode,
                prune: args.prune,
                deadline,
            },
        )?,
        Algo::Astar => astar(
            &instance,
            &AstarOptions {
                prune: args.prune,
                override_guard: args.override_size_guard,
                deadline,
            },
        )?,
        Algo::Brute => brute_force_mode(&instance, args.mode, args.override_size_guard)?,
        Algo::Greedy => greedy_report(&instance)?,
    };
    if args.emit_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        println!("algo: {}", report.algo);
        println!("mode: {}", report.mode);
        println!("payoff: {:.12}", report.payoff);
        println!("order: {}", format_order(&report.order));
        if args.emit_order {
            println!(
                "dropout-order: {}",
                format_order(&to_dropout_order(&report.order))
            );
        }
        println!("leaves: {}", report.leaves);
        println!("branches: {}", report.branches);
        println!("nodes: {}", report.nodes);
        println!("elapsed_ms: {:.3}", report.elapsed_ms);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode, Error> {
    let instance = Instance::read_json(&args.input)?;
    let order = parse_order(&args.order)?;
    let report = is_potential(&instance, &order)?;
    if args.emit_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else if report.valid {
        println!("valid");
    } else {
        println!("invalid ({} violations)", report.violations.len());
        for v in &report.violations {
            println!("  {} before {}: {}", v.earlier, v.later, v.reason);
        }
    }
    if report.valid {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_INVALID))
    }
}

fn cmd_count(args: CountArgs) -> Result<ExitCode, Error> {
    let instance = Instance::read_json(&args.input)?;
    let count = if args.brute {
        count_potential_brute(&instance, args.override_size_guard)?
    } else {
        enumerate_potential(&instance, |_| {})?
    };
    println!("{count}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, Error> {
    let manifest = read_manifest(&args.manifest)?;
    let config = BenchConfig {
        algos: args.algos,
        timeout: Duration::from_secs_f64(args.timeout_s),
        mode: args.mode,
        prune: args.prune,
        override_guard: args.override_size_guard,
    };
    let records = run_bench(&manifest, &config);
    std::fs::create_dir_all(&args.out).map_err(|source| Error::Io {
        path: args.out.display().to_string(),
        source,
    })?;
    write_records_csv(&records, &args.out.join("records.csv"))?;
    let speedup = speedup_report(&records);
    write_speedup_csv(&speedup, &args.out.join("speedup.csv"))?;
    let hardness = hardness_report(&records);
    write_hardness_csv(&hardness, &args.out.join("hardness.csv"))?;
    let solved = records
        .iter()
        .filter(|r| r.status == refuel::bench::BenchStatus::Ok)
        .count();
    println!(
        "{} records ({} ok) written to {}",
        records.len(),
        solved,
        args.out.display()
    );
    if let Some(rho) = hardness.spearman {
        println!("hardness spearman(log leaves, log elapsed): {rho:.4}");
    }
    Ok(ExitCode::SUCCESS)
}

fn format_order(order: &[JobId]) -> String {
    order
        .iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_order(text: &str) -> Result<Vec<JobId>, Error> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<JobId>()
                .map_err(|_| Error::MalformedPermutation)
        })
        .collect()
}
