//! `harmlab` command-line driver.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! configuration errors (bad flags, unknown suite, invalid grid).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harmlab::fourier::{forward, inverse};
use harmlab::io::{export_field, import_field};
use harmlab::suite::run;
use harmlab::{generate, Format, GeneratorSpec, Grid, Parallelism, RunConfig, Side, SuiteName};

#[derive(Parser)]
#[command(name = "harmlab", version, about = "Harmonic-analysis checks on periodic grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite and print its JSON summary.
    Run(RunArgs),
    /// List the suite names and their tolerance keys.
    List,
    /// Sample a generator on a grid and write it as a field file.
    Generate {
        /// Generator as JSON, e.g. '{"kind":"gaussian","eps":1.0}'.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 16.0)]
        length: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply the forward (or inverse) transform to a field file.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        inverse: bool,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    suite: String,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 16.0)]
    length: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    ensemble: usize,
    /// Directory for report files; nothing is written when omitted.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long, default_value = "auto")]
    parallelism: String,
    /// Tolerance override, `key=value`; repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tol: Vec<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
}

enum Failure {
    Config(String),
    Checks,
}

impl From<harmlab::Error> for Failure {
    fn from(e: harmlab::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn config_from(args: RunArgs) -> Result<RunConfig, Failure> {
    let suite: SuiteName = args.suite.parse()?;
    let mut tol = BTreeMap::new();
    for entry in &args.tol {
        let (k, v) = entry
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--tol expects key=value, got `{entry}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Config(format!("--tol {k}: `{v}` is not a number")))?;
        tol.insert(k.trim().to_string(), v);
    }
    let config = RunConfig {
        suite,
        d: args.d,
        n: args.n,
        length: args.length,
        seed: args.seed,
        ensemble: args.ensemble,
        tol,
        out_dir: args.out_dir,
        format: args.format.parse::<Format>()?,
        parallelism: args.parallelism.parse::<Parallelism>()?,
        theta: args.theta,
        t: args.t,
    };
    config.validate()?;
    Ok(config)
}

fn run_command(args: RunArgs) -> Result<(), Failure> {
    let config = config_from(args)?;
    let out = run(&config)?;
    if let Some(dir) = &config.out_dir {
        out.write(dir, config.format)?;
    }
    match config.format {
        Format::Csv => print!("{}", out.reports_csv()),
        Format::Json | Format::Both => print!("{}", out.summary_json()),
    }
    if out.passed() {
        return Ok(());
    }
    for r in out.failures() {
        eprintln!("FAILED {}", serde_json::to_string(r).expect("report serialises"));
    }
    Err(Failure::Checks)
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run(args) => run_command(args),
        Command::List => {
            for &s in SuiteName::ALL {
                println!("{s}\t{}", s.tolerance_keys().join(","));
            }
            Ok(())
        }
        Command::Generate { spec, d, n, length, out } => {
            let spec: GeneratorSpec =
                serde_json::from_str(&spec).map_err(|e| Failure::Config(format!("bad generator JSON: {e}")))?;
            let grid = Grid::new(d, n, length)?;
            export_field(&generate(&grid, &spec)?, out)?;
            Ok(())
        }
        Command::Transform { input, out, inverse: inv } => {
            let field = import_field(input)?;
            let result = match (inv, field.side()) {
                (false, Side::Physical) => forward(&field)?,
                (true, Side::Frequency) => inverse(&field)?,
                (false, _) => return Err(Failure::Config("forward transform needs a physical field".into())),
                (true, _) => return Err(Failure::Config("inverse transform needs a frequency field".into())),
            };
            export_field(&result, out)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
