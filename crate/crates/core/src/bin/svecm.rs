//! Command-line driver.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use svecm::pipeline::{run_pipeline, run_until, PipelineConfig, Stage};
use svecm::save_csv;
use svecm::wsps::{simulate_with, ShockSequence, ShockSigmas, Sidecar, WageShock, WsPsParams};

#[derive(Parser, Debug)]
#[command(name = "svecm", version, about = "Structural VECM analysis of unemployment hysteresis")]
struct Cli {
    /// Key-value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed; overrides the config value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config value.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct DataArg {
    /// Data CSV used with default settings when no --config is given.
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ADF unit-root tests in levels and differences.
    Adf(DataArg),
    /// Lag selection and Johansen / S&L rank tests.
    Johansen(DataArg),
    /// Reduced-form VECM with the cointegration relation.
    Vecm(DataArg),
    /// Structural identification with bootstrap t-values.
    Svec(DataArg),
    /// Impulse responses as CSV and SVG.
    Irf(DataArg),
    /// Variance decompositions.
    Fevd(DataArg),
    /// Every stage, writing report.txt and all artifacts.
    Pipeline(DataArg),
    /// Simulate the wage-setting/price-setting model.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, default_value_t = 2000)]
    nobs: usize,
    /// Standard deviation of every structural shock.
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Hysteresis parameter; 0 is total hysteresis.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Let the wage shock cumulate into the levels.
    #[arg(long)]
    permanent_wage_shock: bool,
    /// CSV file name inside the output directory.
    #[arg(long, default_value = "simulated.csv")]
    output: String,
}

fn config(cli: &Cli, data: &DataArg) -> Result<PipelineConfig, String> {
    let mut cfg = match (&cli.config, &data.data) {
        (Some(path), _) => PipelineConfig::load(path).map_err(|e| format!("{}: {e}", path.display()))?,
        (None, Some(d)) => {
            let seed = cli.seed.ok_or("--seed is required without --config")?;
            PipelineConfig::new(d, seed)
        }
        (None, None) => return Err("either --config or --data is required".into()),
    };
    if let Some(d) = &data.data {
        cfg.data = d.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out_dir {
        cfg.out_dir = o.clone();
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> Result<(), String> {
    let seed = cli.seed.ok_or("simulate needs --seed")?;
    let out_dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out_dir).map_err(|e| e.to_string())?;
    let params = WsPsParams {
        lambda: args.lambda,
        ..WsPsParams::default()
    };
    let mode = if args.permanent_wage_shock {
        WageShock::Permanent
    } else {
        WageShock::Transitory
    };
    let sigmas = ShockSigmas::uniform(args.sigma);
    let initial = [0.0; 5];
    let shocks = ShockSequence::draw(args.nobs, sigmas, seed);
    let panel = simulate_with(&params, &shocks, initial, mode).map_err(|e| e.to_string())?;
    let csv_path = out_dir.join(&args.output);
    save_csv(&panel, &csv_path, "year").map_err(|e| e.to_string())?;
    let sidecar = Sidecar::new(params, mode, seed, args.nobs, sigmas, initial);
    let side_path = csv_path.with_extension("json");
    fs::write(&side_path, sidecar.to_json()).map_err(|e| e.to_string())?;
    println!("wrote {} and {}", csv_path.display(), side_path.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), String> {
    let (data, until) = match &cli.command {
        Command::Simulate(args) => return simulate(cli, args),
        Command::Pipeline(d) => {
            let cfg = config(cli, d)?;
            let out = run_pipeline(&cfg).map_err(|e| e.to_string())?;
            print!("{}", out.report);
            return Ok(());
        }
        Command::Adf(d) => (d, Stage::Adf),
        Command::Johansen(d) => (d, Stage::Rank),
        Command::Vecm(d) => (d, Stage::Vecm),
        Command::Svec(d) => (d, Stage::Svec),
        Command::Irf(d) => (d, Stage::Irf),
        Command::Fevd(d) => (d, Stage::Fevd),
    };
    let cfg = config(cli, data)?;
    let report = run_until(&cfg, until).map_err(|e| e.to_string())?;
    print!("{report}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
