//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 invalid input (config, flags, failed validation),
//! 2 runtime failure (I/O, simulation errors).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::load_config;
use crate::decision::{decide_point, right_asset, DecisionReport};
use crate::experiment::{run_grid, run_point, ExperimentConfig, GridResults};
use crate::hedge::StrategyChoice;
use crate::manifest::RunManifest;
use crate::report::{render_decision_console, render_decision_csv, render_stats_csv, Precision};
use crate::validation;
use crate::Result;

/// Overrides the default output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "HEDGELAB_OUT_DIR";

pub const STATS_FILE: &str = "stats.csv";
pub const STATS_ROUNDED_FILE: &str = "stats_rounded.csv";
pub const DECISIONS_FILE: &str = "decisions.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(
    name = "hedgelab",
    version,
    about = "Delta hedging a two-asset blend with one asset"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a grid and write the statistics tables with a manifest.
    Simulate(RunArgs),
    /// Run a grid and additionally rank WA / RA / NA at alpha in {0, 1}.
    Decide(RunArgs),
    /// Time the Monte Carlo engine on a config.
    Bench(RunArgs),
    /// Run the built-in acceptance checks.
    Validate {
        /// Run a single criterion by number.
        #[arg(long)]
        only: Option<u8>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Thread count; never changes the output bytes.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Runtime(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Runtime(m) => m,
        }
    }
}

/// The files produced by one run, in write order, plus the console table.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutputs {
    pub files: Vec<(String, String)>,
    pub console: Option<String>,
}

/// Decision reports for every point with α ∈ {0, 1}; interior points only
/// contribute to the statistics tables.
pub fn decisions_for(
    config: &ExperimentConfig,
    results: &GridResults,
) -> Result<Vec<DecisionReport>> {
    let mut reports = Vec::new();
    for point in &results.points {
        if right_asset(point.params.portfolio.alpha).is_some() {
            reports.extend(decide_point(point, &config.lambdas, &config.cost_variants)?);
        }
    }
    Ok(reports)
}

/// Everything `simulate` or `decide` would write, computed in memory.
pub fn build_outputs(
    command: &str,
    config: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<RunOutputs> {
    let results = run_grid(config, workers)?;
    let mut files = vec![
        (
            STATS_FILE.to_string(),
            render_stats_csv(&results, Precision::Full),
        ),
        (
            STATS_ROUNDED_FILE.to_string(),
            render_stats_csv(&results, Precision::Rounded),
        ),
    ];
    let mut console = None;
    if command == "decide" {
        let reports = decisions_for(config, &results)?;
        files.push((DECISIONS_FILE.to_string(), render_decision_csv(&reports)?));
        console = Some(render_decision_console(&reports)?);
    }
    let mut names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
    names.push(MANIFEST_FILE);
    let manifest = RunManifest::new(command, config, &names).to_json();
    files.push((MANIFEST_FILE.to_string(), manifest));
    Ok(RunOutputs { files, console })
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn prepare(args: &RunArgs) -> std::result::Result<ExperimentConfig, Failure> {
    let mut config = load_config(&args.config)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    Ok(config)
}

fn write_all(dir: &Path, outputs: &RunOutputs) -> std::result::Result<(), Failure> {
    let io = |e: std::io::Error, p: &Path| Failure::Runtime(format!("{}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    for (name, content) in &outputs.files {
        let path = dir.join(name);
        fs::write(&path, content).map_err(|e| io(e, &path))?;
    }
    Ok(())
}

fn run_grid_command(command: &str, args: RunArgs) -> std::result::Result<(), Failure> {
    let config = prepare(&args)?;
    if command == "decide" {
        let both = [StrategyChoice::TradeAsset1, StrategyChoice::TradeAsset2];
        if !both.iter().all(|s| config.traded.contains(s)) {
            return Err(Failure::Invalid(
                "traded: decide needs both assets (traded = 1 and traded = 2)".into(),
            ));
        }
        if config.lambdas.is_empty() {
            return Err(Failure::Invalid(
                "lambda: decide needs at least one lambda".into(),
            ));
        }
    }
    let started = Instant::now();
    let workers = args.workers.map(|w| w as usize);
    let outputs =
        build_outputs(command, &config, workers).map_err(|e| Failure::Runtime(e.to_string()))?;
    let dir = out_dir(args.out);
    write_all(&dir, &outputs)?;
    if let Some(table) = &outputs.console {
        print!("{table}");
    }
    eprintln!(
        "{command}: wrote {} files to {} in {:.2}s",
        outputs.files.len(),
        dir.display(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn bench(args: RunArgs) -> std::result::Result<(), Failure> {
    let config = prepare(&args)?;
    config
        .validate()
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    let points = config
        .points()
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    let keys = config.strategy_keys();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers.unwrap_or(0) as usize)
        .build()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    println!("points,num_steps,n_sims,strategies,seconds,path_steps_per_sec");
    let mut total = 0.0;
    for p in &points {
        let started = Instant::now();
        pool.install(|| run_point(p, &keys))
            .map_err(|e| Failure::Runtime(e.to_string()))?;
        let secs = started.elapsed().as_secs_f64();
        total += secs;
        let work = (p.n_sims * p.grid.num_steps() as u64) as f64;
        println!(
            "1,{},{},{},{secs:.4},{:.3e}",
            p.grid.num_steps(),
            p.n_sims,
            keys.len(),
            work / secs
        );
    }
    println!(
        "{},all,{},{},{total:.4},",
        points.len(),
        config.n_sims,
        keys.len()
    );
    Ok(())
}

fn validate(only: Option<u8>) -> std::result::Result<(), Failure> {
    let outcomes = match only {
        Some(id) => vec![validation::run_one(id)
            .ok_or_else(|| Failure::Invalid(format!("no criterion {id}")))?],
        None => validation::run_all(),
    };
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        return Err(Failure::Invalid(format!(
            "{failed} acceptance criteria failed"
        )));
    }
    Ok(())
}

pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => run_grid_command("simulate", args),
        Command::Decide(args) => run_grid_command("decide", args),
        Command::Bench(args) => bench(args),
        Command::Validate { only } => validate(only),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("hedgelab: {}", f.message());
            f.exit_code()
        }
    }
}
