//! Backtest harness: window sampling, MSE by window location, and sweeps
//! over the window length.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::arima::{window_errors, ArimaModel, ArimaOrder, FitConfig};
use crate::error::{Error, Result};
use crate::grid::{EntryStatus, FittedGrid};
use crate::parallel::Parallelism;
use crate::seed::{derive_seed, rng};
use crate::series::{log_transform, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    FullSpan,
    /// The first `floor(n / 2)` days; the target day must fall inside too.
    FirstHalf,
}

impl Region {
    pub fn end(self, series_len: usize) -> usize {
        match self {
            Region::FullSpan => series_len,
            Region::FirstHalf => series_len / 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub window_len: usize,
    pub num_locations: usize,
    pub reps: usize,
    pub region: Region,
    pub master_seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            window_len: 9,
            num_locations: 50,
            reps: 40,
            region: Region::FullSpan,
            master_seed: 42,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_len < 2 {
            return Err(Error::InvalidConfig("window length must be at least 2".into()));
        }
        if self.num_locations == 0 || self.reps == 0 {
            return Err(Error::InvalidConfig(
                "locations and reps must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn with_window(&self, window_len: usize) -> Self {
        Self {
            window_len,
            ..self.clone()
        }
    }
}

// keeps the window stream apart from the per-index grid seeds
const WINDOW_STREAM: u64 = u64::MAX;

/// Sorted window starts, drawn uniformly without replacement from the
/// starts whose window and target day both lie inside the region.
pub fn sample_windows(series_len: usize, eval: &EvalConfig) -> Result<Vec<usize>> {
    eval.validate()?;
    let w = eval.window_len;
    if series_len <= w + 1 {
        return Err(Error::SeriesTooShort {
            len: series_len,
            required: w + 2,
        });
    }
    let end = eval.region.end(series_len);
    let available = end.saturating_sub(w);
    if available < eval.num_locations {
        return Err(Error::RegionTooSmall {
            available,
            requested: eval.num_locations,
        });
    }
    let mut r = rng(derive_seed(eval.master_seed, WINDOW_STREAM));
    let mut starts = sample(&mut r, available, eval.num_locations).into_vec();
    starts.sort_unstable();
    Ok(starts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationCurve {
    /// Index of the forecast (target) day, counted from the first day of
    /// the series.
    pub day_index: Vec<usize>,
    pub mse: Vec<f64>,
}

impl LocationCurve {
    /// Mean MSE over targets with `lo <= day_index < hi`.
    pub fn mean_between(&self, lo: usize, hi: usize) -> f64 {
        let (sum, count) = self
            .day_index
            .iter()
            .zip(&self.mse)
            .filter(|(d, _)| (lo..hi).contains(*d))
            .fold((0.0, 0usize), |(s, c), (_, m)| (s + m, c + 1));
        sum / count as f64
    }

    pub fn argmax_day(&self) -> Option<usize> {
        self.mse
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| self.day_index[i])
    }
}

/// Slides a window of length `w` over every admissible position of
/// `prices` and records the mean squared error of `reps` forecasts each.
pub fn mse_by_location(
    model: &ArimaModel,
    prices: &TimeSeries,
    w: usize,
    reps: usize,
    seed: u64,
    parallelism: Parallelism,
) -> Result<LocationCurve> {
    if w < model.order.d + 1 {
        return Err(Error::WindowTooShort { w, d: model.order.d });
    }
    let n = prices.len();
    if n <= w {
        return Err(Error::SeriesTooShort { len: n, required: w + 1 });
    }
    let starts: Vec<usize> = (0..n - w).collect();
    let mse = window_errors(model, prices, &starts, w, reps, true, seed, parallelism)?;
    Ok(LocationCurve {
        day_index: starts.iter().map(|s| s + w).collect(),
        mse,
    })
}

/// One window length: both grid winners and the backtest error of the MSE
/// winner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub w: usize,
    pub rss_best_index: Option<usize>,
    pub rss_best_order: Option<ArimaOrder>,
    pub mse_best_index: Option<usize>,
    pub mse_best_order: Option<ArimaOrder>,
    pub avg_mse: Option<f64>,
    /// Window starts used for this row.
    pub window_starts: Vec<usize>,
    /// Per-window mean squared errors of the MSE winner; `avg_mse` is their
    /// mean.
    pub window_mse: Vec<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(w: usize, err: Error) -> Self {
        Self {
            w,
            rss_best_index: None,
            rss_best_order: None,
            mse_best_index: None,
            mse_best_order: None,
            avg_mse: None,
            window_starts: Vec::new(),
            window_mse: Vec::new(),
            error: Some(err.to_string()),
        }
    }
}

impl FittedGrid {
    /// Scores this grid for each window length in `w_list`. A failing
    /// length yields a row carrying the error rather than aborting.
    pub fn sweep(
        &self,
        prices: &TimeSeries,
        w_list: &[usize],
        eval_base: &EvalConfig,
        parallelism: Parallelism,
    ) -> Vec<SweepRow> {
        let rss = self.rss_report();
        w_list
            .iter()
            .map(|&w| {
                let eval = eval_base.with_window(w);
                match self.sweep_row(prices, &eval, parallelism) {
                    Ok(mut row) => {
                        row.rss_best_index = rss.best.as_ref().map(|b| b.index);
                        row.rss_best_order = rss.best.as_ref().map(|b| b.order);
                        row
                    }
                    Err(e) => SweepRow::failed(w, e),
                }
            })
            .collect()
    }

    fn sweep_row(&self, prices: &TimeSeries, eval: &EvalConfig, parallelism: Parallelism) -> Result<SweepRow> {
        let report = self.mse_report(prices, eval, parallelism)?;
        let best = report
            .best
            .as_ref()
            .filter(|b| b.status == EntryStatus::Ok)
            .ok_or_else(|| Error::InvalidConfig(format!("no model scored for w = {}", eval.window_len)))?;
        let starts = sample_windows(prices.len(), eval)?;
        let model = self.model(best.index).expect("ok entry has a model");
        let window_mse = window_errors(
            model,
            prices,
            &starts,
            eval.window_len,
            eval.reps,
            true,
            derive_seed(eval.master_seed, best.index as u64),
            parallelism,
        )?;
        Ok(SweepRow {
            w: eval.window_len,
            rss_best_index: None,
            rss_best_order: None,
            mse_best_index: Some(best.index),
            mse_best_order: Some(best.order),
            avg_mse: best.metric,
            window_starts: starts,
            window_mse,
            error: None,
        })
    }
}

/// Fits the grid once on `log(prices)` and sweeps the window lengths.
pub fn sweep_window_lengths(
    prices: &TimeSeries,
    w_list: &[usize],
    eval_base: &EvalConfig,
    config: &FitConfig,
    pq_rule: bool,
    parallelism: Parallelism,
) -> Result<Vec<SweepRow>> {
    if let Some(&w) = w_list.iter().find(|&&w| w < 2) {
        return Err(Error::InvalidConfig(format!("window length {w} is below 2")));
    }
    let logged = log_transform(prices)?;
    let grid = FittedGrid::fit(&logged, config, pq_rule, parallelism)?;
    Ok(grid.sweep(prices, w_list, eval_base, parallelism))
}
