//! ARIMA forecasting toolkit for daily price series.
//!
//! The pipeline runs in four stages:
//!
//! - [`series`]: daily series container, log/differencing transforms with exact
//!   inversion, sample ACF/PACF and the augmented Dickey-Fuller test ([`adf`]).
//! - [`arima`]: conditional-sum-of-squares estimation driven by a Nelder-Mead
//!   simplex ([`optim`]) and one-step-ahead forecasts from a short price window.
//! - [`grid`]: the 10x10x3 `(p, q, d)` grid with its `30p + 3q + d` index, and
//!   the two selection strategies (fit RSS and backtest MSE).
//! - [`eval`]: window sampling, MSE-by-location curves and window-length sweeps.
//!
//! Every stochastic step takes an explicit seed and derives child seeds from it,
//! so results do not depend on thread scheduling. See [`Parallelism`].

pub mod adf;
pub mod arima;
pub mod correlation;
pub mod error;
pub mod eval;
pub mod grid;
mod linalg;
pub mod optim;
mod parallel;
pub mod seed;
pub mod series;

pub use adf::{adf_test, AdfResult};
pub use arima::{
    css_residuals, fit, forecast_next, mse_of_model, ArimaModel, ArimaOrder, FitConfig,
    Initialization,
};
pub use correlation::{acf, pacf};
pub use error::{Error, Result};
pub use eval::{
    mse_by_location, sample_windows, sweep_window_lengths, EvalConfig, LocationCurve, Region,
    SweepRow,
};
pub use grid::{
    enumerate_grid, index_to_order, model_index, mse_grid_search, rss_grid_search, EntryStatus,
    FittedGrid, GridEntry, GridReport, Strategy,
};
pub use parallel::Parallelism;
pub use series::{
    difference, inverse_difference, inverse_transform, log_transform, transform, TimeSeries,
    TransformState,
};
