//! Command dispatch and report emission.

use std::collections::BTreeSet;
use std::path::PathBuf;

use arima_core::adf::{adf_test, AdfResult};
use arima_core::{
    acf, difference, fit, index_to_order, log_transform, mse_by_location, pacf, ArimaModel,
    EntryStatus, EvalConfig, FitConfig, FittedGrid, GridEntry, GridReport, Parallelism, Region,
    SweepRow, TimeSeries,
};
use chrono::Days;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dataset::{ingest_csv, DatasetSpec};
use crate::error::{CliError, Result};
use crate::fetch::{fetch_prices, FetchRequest};
use crate::report::{fmt_opt, fmt_sig, round_sig, sha256_hex, to_json, write_atomic, Table};
use crate::svg::{Chart, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Preprocess,
    GridRss,
    GridMse,
    EvalLocations,
    SweepW,
    Fetch,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Preprocess => "preprocess",
            Command::GridRss => "grid-rss",
            Command::GridMse => "grid-mse",
            Command::EvalLocations => "eval-locations",
            Command::SweepW => "sweep-w",
            Command::Fetch => "fetch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Everything a command needs. The serialized form (embedded in every
/// report) leaves out settings that cannot change results: output location,
/// scheduling and credentials.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub dataset: DatasetSpec,
    pub seed: u64,
    pub window_len: usize,
    pub locations: usize,
    pub reps: usize,
    pub region: Region,
    pub pq_rule: bool,
    pub w_list: Vec<usize>,
    /// Model for `eval-locations`; the MSE-grid winner when absent.
    pub model_index: Option<usize>,
    pub adf_max_lag: usize,
    pub acf_lags: usize,
    pub fit: FitConfig,
    #[serde(skip)]
    pub formats: BTreeSet<Format>,
    #[serde(skip)]
    pub output_dir: PathBuf,
    #[serde(skip)]
    pub fetch_url: Option<String>,
    #[serde(skip)]
    pub api_key: Option<String>,
    #[serde(skip)]
    pub parallelism: Parallelism,
}

impl RunConfig {
    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            window_len: self.window_len,
            num_locations: self.locations,
            reps: self.reps,
            region: self.region,
            master_seed: self.seed,
        }
    }

    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub results: Value,
}

struct Emitter<'a> {
    config: &'a RunConfig,
    files: Vec<PathBuf>,
}

impl Emitter<'_> {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.config.output_dir.join(name);
        write_atomic(&path, bytes)?;
        self.files.push(path);
        Ok(())
    }

    fn csv(&mut self, name: &str, table: &Table) -> Result<()> {
        if self.config.wants(Format::Csv) {
            self.write(name, &table.to_csv())?;
        }
        Ok(())
    }

    fn svg(&mut self, name: &str, chart: &Chart<'_>) -> Result<()> {
        if self.config.wants(Format::Svg) {
            self.write(name, chart.render().as_bytes())?;
        }
        Ok(())
    }
}

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(round_sig(v))
    } else {
        Value::Null
    }
}

fn opt_num(v: Option<f64>) -> Value {
    v.map(num).unwrap_or(Value::Null)
}

pub fn run_command(config: &RunConfig) -> Result<RunOutcome> {
    if config.formats.is_empty() {
        return Err(CliError::Config("at least one output format is required".into()));
    }
    let mut out = Emitter {
        config,
        files: Vec::new(),
    };

    if config.command == Command::Fetch {
        let results = run_fetch(config)?;
        finish(&mut out, &results, None)?;
        return Ok(RunOutcome {
            files: out.files,
            results,
        });
    }

    if config.command != Command::Preprocess {
        config.eval_config().validate()?;
    }
    let bytes = std::fs::read(&config.dataset.path).map_err(|e| CliError::io(&config.dataset.path, e))?;
    let prices = ingest_csv(&config.dataset)?;
    let dataset = json!({
        "path": config.dataset.path.to_string_lossy(),
        "sha256": sha256_hex(&bytes),
        "rows": prices.len(),
        "first_date": prices.dates()[0].to_string(),
        "last_date": prices.dates()[prices.len() - 1].to_string(),
    });

    let results = match config.command {
        Command::Preprocess => preprocess(config, &prices, &mut out)?,
        Command::GridRss => grid_rss(config, &prices, &mut out)?,
        Command::GridMse => grid_mse(config, &prices, &mut out)?,
        Command::EvalLocations => eval_locations(config, &prices, &mut out)?,
        Command::SweepW => sweep_w(config, &prices, &mut out)?,
        Command::Fetch => unreachable!("handled above"),
    };
    finish(&mut out, &results, Some(dataset))?;
    Ok(RunOutcome {
        files: out.files,
        results,
    })
}

fn finish(out: &mut Emitter<'_>, results: &Value, dataset: Option<Value>) -> Result<()> {
    if !out.config.wants(Format::Json) {
        return Ok(());
    }
    let report = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": out.config.command.name(),
        "seed": out.config.seed,
        "dataset": dataset,
        "config": out.config,
        "results": results,
    });
    out.write("report.json", &to_json(&report)?)
}

fn run_fetch(config: &RunConfig) -> Result<Value> {
    let url = config
        .fetch_url
        .as_deref()
        .ok_or_else(|| CliError::Config(format!("no endpoint: pass --fetch-url or set {}", crate::fetch::URL_ENV)))?;
    let req = FetchRequest {
        url,
        api_key: config.api_key.as_deref(),
        start: config.dataset.start_date,
        end: config.dataset.end_date(),
    };
    let rows = fetch_prices(&req, &config.dataset.path)?;
    log::info!("wrote {rows} rows to {}", config.dataset.path.display());
    Ok(json!({
        "path": config.dataset.path.to_string_lossy(),
        "rows": rows,
    }))
}

fn adf_json(r: &AdfResult) -> Value {
    json!({
        "statistic": num(r.statistic),
        "p_value": num(r.p_value),
        "critical_values": {
            "1%": num(r.critical_values.one_pct),
            "5%": num(r.critical_values.five_pct),
            "10%": num(r.critical_values.ten_pct),
        },
        "lags_used": r.lags_used,
        "nobs": r.nobs,
    })
}

fn preprocess(config: &RunConfig, prices: &TimeSeries, out: &mut Emitter<'_>) -> Result<Value> {
    let logged = log_transform(prices)?;
    let (log_diff, _) = difference(&logged, 1)?;

    let stages = [("raw", prices), ("log", &logged), ("log_diff", &log_diff)];
    let mut adf_table = Table::new(&["series", "statistic", "p_value", "crit_1pct", "crit_5pct", "crit_10pct", "lags_used", "nobs"]);
    let mut adf_results = serde_json::Map::new();
    for (name, series) in stages {
        let r = adf_test(series, config.adf_max_lag)?;
        adf_table.push(vec![
            name.into(),
            fmt_sig(r.statistic),
            fmt_sig(r.p_value),
            fmt_sig(r.critical_values.one_pct),
            fmt_sig(r.critical_values.five_pct),
            fmt_sig(r.critical_values.ten_pct),
            r.lags_used.to_string(),
            r.nobs.to_string(),
        ]);
        adf_results.insert(name.into(), adf_json(&r));
    }
    out.csv("adf.csv", &adf_table)?;

    let lags = config.acf_lags.min(log_diff.len() - 1);
    let acf_log = acf(&logged, lags)?;
    let pacf_log = pacf(&logged, lags)?;
    let acf_diff = acf(&log_diff, lags)?;
    let pacf_diff = pacf(&log_diff, lags)?;
    let mut corr = Table::new(&["lag", "acf_log", "pacf_log", "acf_log_diff", "pacf_log_diff"]);
    for k in 0..=lags {
        let p = |v: &[f64]| if k == 0 { String::new() } else { fmt_sig(v[k - 1]) };
        corr.push(vec![k.to_string(), fmt_sig(acf_log[k]), p(&pacf_log), fmt_sig(acf_diff[k]), p(&pacf_diff)]);
    }
    out.csv("acf_pacf.csv", &corr)?;

    let mut series = Table::new(&["day_index", "date", "close", "log_close", "log_diff"]);
    for (i, (d, v)) in prices.dates().iter().zip(prices.values()).enumerate() {
        let diff = if i == 0 { String::new() } else { fmt_sig(log_diff.values()[i - 1]) };
        series.push(vec![i.to_string(), d.to_string(), fmt_sig(*v), fmt_sig(logged.values()[i]), diff]);
    }
    out.csv("series.csv", &series)?;

    let line = |v: &[f64], offset: usize| -> Vec<(f64, Option<f64>)> {
        v.iter().enumerate().map(|(i, y)| ((i + offset) as f64, Some(*y))).collect()
    };
    out.svg("fig1_raw.svg", &Chart { title: "Closing price", x_label: "day", y_label: "USD", log_y: false, series: vec![Series { label: "close", points: line(prices.values(), 0) }] })?;
    out.svg("fig2_log.svg", &Chart { title: "Log closing price", x_label: "day", y_label: "log USD", log_y: false, series: vec![Series { label: "log close", points: line(logged.values(), 0) }] })?;
    out.svg("fig3_log_diff.svg", &Chart { title: "First difference of log price", x_label: "day", y_label: "log return", log_y: false, series: vec![Series { label: "log diff", points: line(log_diff.values(), 1) }] })?;
    out.svg("fig4_acf_pacf.svg", &Chart {
        title: "ACF / PACF of the log-differenced series",
        x_label: "lag",
        y_label: "correlation",
        log_y: false,
        series: vec![
            Series { label: "acf", points: line(&acf_diff, 0) },
            Series { label: "pacf", points: line(&pacf_diff, 1) },
        ],
    })?;

    Ok(json!({
        "adf": adf_results,
        "acf_lags": lags,
    }))
}

fn fit_grid(config: &RunConfig, prices: &TimeSeries) -> Result<FittedGrid> {
    let logged = log_transform(prices)?;
    Ok(FittedGrid::fit(&logged, &config.fit, config.pq_rule, config.parallelism)?)
}

fn order_cells(e: &GridEntry) -> Vec<String> {
    let o = e.order;
    vec![
        e.index.to_string(),
        o.p.to_string(),
        o.q.to_string(),
        o.d.to_string(),
        format!("({},{},{})", o.p, o.q, o.d),
        format!("({},{},{})", o.p, o.d, o.q),
    ]
}

const ORDER_HEADER: [&str; 6] = ["index", "p", "q", "d", "order_pqd", "order_pdq"];

fn status_name(s: EntryStatus) -> &'static str {
    match s {
        EntryStatus::Ok => "ok",
        EntryStatus::ExcludedByPqRule => "excluded_by_pq_rule",
        EntryStatus::FitFailed => "fit_failed",
        EntryStatus::EvalFailed => "eval_failed",
    }
}

fn grid_table(report: &GridReport, metric: &str, grid: &FittedGrid) -> Table {
    let mut header: Vec<&str> = ORDER_HEADER.to_vec();
    header.extend(["status", metric, "converged", "invertible"]);
    let mut t = Table::new(&header);
    for e in &report.entries {
        let mut row = order_cells(e);
        let model = grid.model(e.index);
        row.push(status_name(e.status).into());
        row.push(fmt_opt(e.metric));
        row.push(model.map(|m| m.converged.to_string()).unwrap_or_default());
        row.push(model.map(|m| m.invertible.to_string()).unwrap_or_default());
        t.push(row);
    }
    t
}

fn entry_json(e: Option<&GridEntry>) -> Value {
    match e {
        None => Value::Null,
        Some(e) => json!({
            "index": e.index,
            "p": e.order.p,
            "q": e.order.q,
            "d": e.order.d,
            "order_pqd": format!("({},{},{})", e.order.p, e.order.q, e.order.d),
            "order_pdq": format!("({},{},{})", e.order.p, e.order.d, e.order.q),
            "metric": opt_num(e.metric),
            "status": status_name(e.status),
        }),
    }
}

fn model_json(m: &ArimaModel) -> Value {
    json!({
        "ar_coeffs": m.ar_coeffs.iter().map(|v| num(*v)).collect::<Vec<_>>(),
        "ma_coeffs": m.ma_coeffs.iter().map(|v| num(*v)).collect::<Vec<_>>(),
        "intercept": num(m.intercept),
        "innovation_variance": num(m.innovation_variance),
        "fit_rss": num(m.fit_rss),
        "converged": m.converged,
        "invertible": m.invertible,
    })
}

fn status_counts(report: &GridReport) -> Value {
    let count = |s| report.entries.iter().filter(|e| e.status == s).count();
    json!({
        "ok": count(EntryStatus::Ok),
        "excluded_by_pq_rule": count(EntryStatus::ExcludedByPqRule),
        "fit_failed": count(EntryStatus::FitFailed),
        "eval_failed": count(EntryStatus::EvalFailed),
    })
}

fn grid_chart<'a>(title: &'a str, y_label: &'a str, report: &GridReport) -> Chart<'a> {
    Chart {
        title,
        x_label: "model index (30p + 3q + d)",
        y_label,
        log_y: true,
        series: vec![Series {
            label: y_label,
            points: report.entries.iter().map(|e| (e.index as f64, e.metric)).collect(),
        }],
    }
}

fn grid_rss(config: &RunConfig, prices: &TimeSeries, out: &mut Emitter<'_>) -> Result<Value> {
    let grid = fit_grid(config, prices)?;
    let report = grid.rss_report();
    out.csv("fig5_rss.csv", &grid_table(&report, "rss", &grid))?;
    out.svg("fig5_rss.svg", &grid_chart("Fit RSS by model index", "RSS", &report))?;
    let best_model = report.best.as_ref().and_then(|b| grid.model(b.index));
    Ok(json!({
        "strategy": "rss",
        "best": entry_json(report.best.as_ref()),
        "best_model": best_model.map(model_json),
        "counts": status_counts(&report),
    }))
}

fn grid_mse(config: &RunConfig, prices: &TimeSeries, out: &mut Emitter<'_>) -> Result<Value> {
    let grid = fit_grid(config, prices)?;
    let eval = config.eval_config();
    let report = grid.mse_report(prices, &eval, config.parallelism)?;
    let rss = grid.rss_report();
    out.csv("fig6_mse.csv", &grid_table(&report, "mse", &grid))?;
    out.svg("fig6_mse.svg", &grid_chart("Backtest MSE by model index", "MSE (USD^2)", &report))?;

    let rss_winner = rss.best.as_ref().and_then(|b| report.entry(b.index));
    let ratio = match (rss_winner.and_then(|e| e.metric), report.best.as_ref().and_then(|b| b.metric)) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    };
    Ok(json!({
        "strategy": "mse",
        "eval": eval,
        "window_starts": arima_core::sample_windows(prices.len(), &eval)?,
        "best": entry_json(report.best.as_ref()),
        "best_model": report.best.as_ref().and_then(|b| grid.model(b.index)).map(model_json),
        "rss_best": entry_json(rss.best.as_ref()),
        "rss_best_mse": opt_num(rss_winner.and_then(|e| e.metric)),
        "rss_to_mse_winner_ratio": opt_num(ratio),
        "counts": status_counts(&report),
    }))
}

fn eval_locations(config: &RunConfig, prices: &TimeSeries, out: &mut Emitter<'_>) -> Result<Value> {
    let (index, model) = match config.model_index {
        Some(index) => {
            let order = index_to_order(index)?;
            (index, fit(order, &log_transform(prices)?, &config.fit)?)
        }
        None => {
            let grid = fit_grid(config, prices)?;
            let report = grid.mse_report(prices, &config.eval_config(), config.parallelism)?;
            let best = report
                .best
                .ok_or_else(|| CliError::Config("no model could be scored".into()))?;
            (best.index, grid.model(best.index).expect("scored entry").clone())
        }
    };
    let seed = arima_core::seed::derive_seed(config.seed, index as u64);
    let curve = mse_by_location(&model, prices, config.window_len, config.reps, seed, config.parallelism)?;

    let start = prices.start_date();
    let mut t = Table::new(&["day_index", "date", "mse"]);
    for (d, m) in curve.day_index.iter().zip(&curve.mse) {
        t.push(vec![d.to_string(), (start + Days::new(*d as u64)).to_string(), fmt_sig(*m)]);
    }
    out.csv("fig7_location.csv", &t)?;
    out.svg("fig7_location.svg", &Chart {
        title: "Backtest MSE by forecast day",
        x_label: "day index",
        y_label: "MSE (USD^2)",
        log_y: true,
        series: vec![Series {
            label: "mse",
            points: curve.day_index.iter().zip(&curve.mse).map(|(d, m)| (*d as f64, Some(*m))).collect(),
        }],
    })?;

    let n = prices.len();
    let argmax = curve.argmax_day();
    Ok(json!({
        "model_index": index,
        "order_pdq": model.order.to_string(),
        "model": model_json(&model),
        "window_len": config.window_len,
        "reps": config.reps,
        "argmax_day_index": argmax,
        "argmax_date": argmax.map(|d| (start + Days::new(d as u64)).to_string()),
        "mean_first_half": num(curve.mean_between(0, n / 2)),
        "mean_second_half": num(curve.mean_between(n / 2, n)),
    }))
}

fn sweep_w(config: &RunConfig, prices: &TimeSeries, out: &mut Emitter<'_>) -> Result<Value> {
    let grid = fit_grid(config, prices)?;
    let rows = grid.sweep(prices, &config.w_list, &config.eval_config(), config.parallelism);

    let mut t = Table::new(&[
        "w", "rss_index", "rss_order_pqd", "rss_order_pdq", "mse_index", "mse_order_pqd", "mse_order_pdq", "avg_mse", "error",
    ]);
    let pqd = |o: Option<arima_core::ArimaOrder>| o.map(|o| format!("({},{},{})", o.p, o.q, o.d)).unwrap_or_default();
    let pdq = |o: Option<arima_core::ArimaOrder>| o.map(|o| o.to_string()).unwrap_or_default();
    for r in &rows {
        t.push(vec![
            r.w.to_string(),
            r.rss_best_index.map(|i| i.to_string()).unwrap_or_default(),
            pqd(r.rss_best_order),
            pdq(r.rss_best_order),
            r.mse_best_index.map(|i| i.to_string()).unwrap_or_default(),
            pqd(r.mse_best_order),
            pdq(r.mse_best_order),
            fmt_opt(r.avg_mse),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    let stem = match config.region {
        Region::FullSpan => "table1",
        Region::FirstHalf => "table2",
    };
    out.csv(&format!("{stem}.csv"), &t)?;
    out.svg(&format!("{stem}.svg"), &Chart {
        title: "Average MSE of the MSE-selected model by window length",
        x_label: "window length w",
        y_label: "avg MSE (USD^2)",
        log_y: true,
        series: vec![Series { label: "avg mse", points: rows.iter().map(|r| (r.w as f64, r.avg_mse)).collect() }],
    })?;
    Ok(json!({
        "region": config.region,
        "rows": rows.iter().map(sweep_row_json).collect::<Vec<_>>(),
    }))
}

fn sweep_row_json(r: &SweepRow) -> Value {
    json!({
        "w": r.w,
        "rss_best_index": r.rss_best_index,
        "rss_best_order_pdq": r.rss_best_order.map(|o| o.to_string()),
        "mse_best_index": r.mse_best_index,
        "mse_best_order_pdq": r.mse_best_order.map(|o| o.to_string()),
        "avg_mse": opt_num(r.avg_mse),
        "window_starts": r.window_starts,
        "window_mse": r.window_mse.iter().map(|v| num(*v)).collect::<Vec<_>>(),
        "error": r.error,
    })
}
