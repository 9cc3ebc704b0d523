//! The `(p, q, d)` search grid and both selection strategies.
//!
//! Orders are enumerated by nested loops over `p` in 0..=9, `q` in 0..=9 and
//! `d` in 0..=2, so the index of `(p, q, d)` is `30p + 3q + d`.

use serde::{Deserialize, Serialize};

use crate::arima::{fit, window_errors, ArimaModel, ArimaOrder, FitConfig, MAX_D, MAX_P, MAX_Q};
use crate::error::{Error, Result};
use crate::eval::{sample_windows, EvalConfig};
use crate::parallel::Parallelism;
use crate::seed::derive_seed;
use crate::series::{log_transform, TimeSeries};

pub const GRID_SIZE: usize = (MAX_P + 1) * (MAX_Q + 1) * (MAX_D + 1);

pub fn model_index(order: ArimaOrder) -> Result<usize> {
    let ArimaOrder { p, d, q } = order;
    if p > MAX_P || q > MAX_Q || d > MAX_D {
        return Err(Error::OutOfGrid { p, q, d });
    }
    Ok(30 * p + 3 * q + d)
}

pub fn index_to_order(index: usize) -> Result<ArimaOrder> {
    if index >= GRID_SIZE {
        return Err(Error::IndexOutOfGrid(index));
    }
    Ok(ArimaOrder {
        p: index / 30,
        q: (index % 30) / 3,
        d: index % 3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Ok,
    ExcludedByPqRule,
    FitFailed,
    /// Fitted, but the backtest produced a non-finite error.
    EvalFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub index: usize,
    pub order: ArimaOrder,
    pub metric: Option<f64>,
    pub status: EntryStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Rss,
    Mse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub strategy: Strategy,
    pub entries: Vec<GridEntry>,
    /// Lowest metric among `Ok` entries, ties to the smaller index. `None`
    /// only when no entry could be scored.
    pub best: Option<GridEntry>,
    pub eval_config: Option<EvalConfig>,
}

impl GridReport {
    fn new(strategy: Strategy, entries: Vec<GridEntry>, eval_config: Option<EvalConfig>) -> Self {
        let mut best: Option<&GridEntry> = None;
        for e in entries.iter().filter(|e| e.status == EntryStatus::Ok) {
            let m = e.metric.expect("ok entries carry a metric");
            if best.is_none_or(|b| m < b.metric.expect("ok")) {
                best = Some(e);
            }
        }
        let best = best.cloned();
        Self {
            strategy,
            entries,
            best,
            eval_config,
        }
    }

    pub fn entry(&self, index: usize) -> Option<&GridEntry> {
        self.entries.get(index)
    }
}

/// All 300 orders in index sequence. With `pq_rule`, orders with `p < q`
/// are marked excluded.
pub fn enumerate_grid(pq_rule: bool) -> Vec<GridEntry> {
    (0..GRID_SIZE)
        .map(|index| {
            let order = index_to_order(index).expect("in range");
            let status = if pq_rule && order.p < order.q {
                EntryStatus::ExcludedByPqRule
            } else {
                EntryStatus::Ok
            };
            GridEntry {
                index,
                order,
                metric: None,
                status,
            }
        })
        .collect()
}

/// One grid entry after fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedEntry {
    pub index: usize,
    pub order: ArimaOrder,
    pub status: EntryStatus,
    pub model: Option<ArimaModel>,
    pub failure: Option<String>,
}

/// Every admissible order fitted once on the full series. Both strategies
/// and every window length score the same fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedGrid {
    pub entries: Vec<FittedEntry>,
    pub pq_rule: bool,
    pub config: FitConfig,
}

impl FittedGrid {
    /// Fits every non-excluded order to `series` (transform space, before
    /// differencing).
    pub fn fit(
        series: &TimeSeries,
        config: &FitConfig,
        pq_rule: bool,
        parallelism: Parallelism,
    ) -> Result<Self> {
        config.validate()?;
        let grid = enumerate_grid(pq_rule);
        let entries = parallelism.map(&grid, |g| {
            if g.status == EntryStatus::ExcludedByPqRule {
                return FittedEntry {
                    index: g.index,
                    order: g.order,
                    status: g.status,
                    model: None,
                    failure: None,
                };
            }
            match fit(g.order, series, config) {
                Ok(model) => FittedEntry {
                    index: g.index,
                    order: g.order,
                    status: EntryStatus::Ok,
                    model: Some(model),
                    failure: None,
                },
                Err(e) => FittedEntry {
                    index: g.index,
                    order: g.order,
                    status: EntryStatus::FitFailed,
                    model: None,
                    failure: Some(e.to_string()),
                },
            }
        });
        Ok(Self {
            entries,
            pq_rule,
            config: *config,
        })
    }

    pub fn model(&self, index: usize) -> Option<&ArimaModel> {
        self.entries.get(index).and_then(|e| e.model.as_ref())
    }

    pub fn rss_report(&self) -> GridReport {
        let entries = self
            .entries
            .iter()
            .map(|f| GridEntry {
                index: f.index,
                order: f.order,
                metric: f.model.as_ref().map(|m| m.fit_rss),
                status: f.status,
            })
            .collect();
        GridReport::new(Strategy::Rss, entries, None)
    }

    /// Backtests every fitted model on the same sampled windows of `prices`
    /// (the untransformed series the grid was fitted to after a log).
    pub fn mse_report(
        &self,
        prices: &TimeSeries,
        eval: &EvalConfig,
        parallelism: Parallelism,
    ) -> Result<GridReport> {
        let starts = sample_windows(prices.len(), eval)?;
        let entries = parallelism.map(&self.entries, |f| {
            let Some(model) = f.model.as_ref() else {
                return GridEntry {
                    index: f.index,
                    order: f.order,
                    metric: None,
                    status: f.status,
                };
            };
            let seed = derive_seed(eval.master_seed, f.index as u64);
            let mse = window_errors(
                model,
                prices,
                &starts,
                eval.window_len,
                eval.reps,
                true,
                seed,
                Parallelism::Sequential,
            )
            .ok()
            .map(|errs| errs.iter().sum::<f64>() / errs.len() as f64)
            .filter(|m| m.is_finite());
            GridEntry {
                index: f.index,
                order: f.order,
                status: if mse.is_some() {
                    EntryStatus::Ok
                } else {
                    EntryStatus::EvalFailed
                },
                metric: mse,
            }
        });
        Ok(GridReport::new(Strategy::Mse, entries, Some(eval.clone())))
    }
}

/// Fits every admissible order to `series` (already in log space) and
/// ranks by conditional residual sum of squares.
pub fn rss_grid_search(
    series: &TimeSeries,
    config: &FitConfig,
    pq_rule: bool,
    parallelism: Parallelism,
) -> Result<GridReport> {
    Ok(FittedGrid::fit(series, config, pq_rule, parallelism)?.rss_report())
}

/// Fits every admissible order to `log(prices)` and ranks by one-day-ahead
/// price MSE over windows sampled per `eval`.
pub fn mse_grid_search(
    prices: &TimeSeries,
    eval: &EvalConfig,
    config: &FitConfig,
    pq_rule: bool,
    parallelism: Parallelism,
) -> Result<GridReport> {
    eval.validate()?;
    let logged = log_transform(prices)?;
    FittedGrid::fit(&logged, config, pq_rule, parallelism)?.mse_report(prices, eval, parallelism)
}
