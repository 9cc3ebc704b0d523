use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use arima_cli::commands::{Command, Format, RunConfig};
use arima_cli::dataset::{DatasetSpec, FillPolicy};
use arima_cli::fetch::{KEY_ENV, URL_ENV};
use arima_core::{FitConfig, Parallelism, Region};
use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "btc-arima", version, about = "ARIMA model selection and backtests for daily closing prices")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// `date,close` CSV input (output path for `fetch`)
    #[arg(long, global = true, default_value = "data/btc_usd_daily.csv")]
    data: PathBuf,

    /// First day of the analysed span
    #[arg(long, global = true, default_value = "2015-09-01")]
    start: NaiveDate,

    /// Length of the analysed span in days
    #[arg(long, global = true, default_value_t = 1096)]
    days: u32,

    /// Handling of missing days
    #[arg(long, global = true, value_enum, default_value_t = FillPolicy::ForwardFill)]
    fill: FillPolicy,

    /// Master seed for window sampling and residual initialization
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Window length
    #[arg(long, global = true, default_value_t = 9)]
    w: usize,

    /// Window lengths for `sweep-w`
    #[arg(long, global = true, value_delimiter = ',', default_value = "2,3,5,6,9")]
    w_list: Vec<usize>,

    /// Number of sampled window locations
    #[arg(long, global = true, default_value_t = 50)]
    locations: usize,

    /// Forecast repetitions per location
    #[arg(long, global = true, default_value_t = 40)]
    reps: usize,

    #[arg(long, global = true, value_enum, default_value_t = RegionArg::Full)]
    region: RegionArg,

    /// Exclude orders with p < q
    #[arg(long, global = true, value_enum, default_value_t = Switch::On)]
    pq_rule: Switch,

    /// Model index (30p + 3q + d) for `eval-locations`; defaults to the MSE-grid winner
    #[arg(long, global = true)]
    model_index: Option<usize>,

    /// Largest lag considered by the ADF test
    #[arg(long, global = true, default_value_t = arima_core::adf::DEFAULT_MAX_LAG)]
    adf_max_lag: usize,

    /// Lags reported in the ACF/PACF table
    #[arg(long, global = true, default_value_t = 100)]
    acf_lags: usize,

    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Output formats
    #[arg(long, global = true, value_enum, value_delimiter = ',', default_value = "csv,json,svg")]
    format: Vec<Format>,

    /// Price endpoint for `fetch`
    #[arg(long, global = true, env = URL_ENV)]
    fetch_url: Option<String>,

    /// Run every work item on the calling thread
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Stationarity report: ADF on raw/log/log-diff, ACF/PACF tables
    Preprocess,
    /// Fit every order and rank by residual sum of squares
    GridRss,
    /// Fit every order and rank by backtest MSE
    GridMse,
    /// Backtest MSE for every window position
    EvalLocations,
    /// Both grid winners for each window length
    SweepW,
    /// Download a raw price CSV
    Fetch,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum RegionArg {
    Full,
    FirstHalf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Switch {
    On,
    Off,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();

    let command = match cli.command {
        Cmd::Preprocess => Command::Preprocess,
        Cmd::GridRss => Command::GridRss,
        Cmd::GridMse => Command::GridMse,
        Cmd::EvalLocations => Command::EvalLocations,
        Cmd::SweepW => Command::SweepW,
        Cmd::Fetch => Command::Fetch,
    };
    let config = RunConfig {
        command,
        dataset: DatasetSpec {
            path: cli.data,
            start_date: cli.start,
            span_days: cli.days,
            fill_policy: cli.fill,
        },
        seed: cli.seed,
        window_len: cli.w,
        locations: cli.locations,
        reps: cli.reps,
        region: match cli.region {
            RegionArg::Full => Region::FullSpan,
            RegionArg::FirstHalf => Region::FirstHalf,
        },
        pq_rule: cli.pq_rule == Switch::On,
        w_list: cli.w_list,
        model_index: cli.model_index,
        adf_max_lag: cli.adf_max_lag,
        acf_lags: cli.acf_lags,
        fit: FitConfig::default(),
        formats: cli.format.into_iter().collect::<BTreeSet<_>>(),
        output_dir: cli.out,
        fetch_url: cli.fetch_url,
        api_key: std::env::var(KEY_ENV).ok(),
        parallelism: if cli.sequential {
            Parallelism::Sequential
        } else {
            Parallelism::Parallel
        },
    };

    match arima_cli::run_command(&config) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
