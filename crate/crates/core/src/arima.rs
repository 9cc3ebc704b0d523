//! ARIMA(p, d, q) models: conditional-sum-of-squares fitting and one-step
//! forecasts from a short price window.
//!
//! Model on the `d`-times differenced series `x`:
//!
//! ```text
//! x_t = c + sum_i phi_i * x_{t-i} + sum_j theta_j * e_{t-j} + e_t
//! ```

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Ols;
use crate::optim::NelderMead;
use crate::parallel::Parallelism;
use crate::seed::{derive_seed, rng};
use crate::series::{difference_values, TimeSeries, TransformState};

pub const MAX_P: usize = 9;
pub const MAX_Q: usize = 9;
pub const MAX_D: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub fn new(p: usize, d: usize, q: usize) -> Result<Self> {
        if p > MAX_P || q > MAX_Q || d > MAX_D {
            return Err(Error::OutOfGrid { p, q, d });
        }
        Ok(Self { p, d, q })
    }

    /// Intercept plus AR and MA coefficients.
    pub fn num_params(&self) -> usize {
        1 + self.p + self.q
    }
}

/// Formats as `(p,d,q)`.
impl fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.d, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    pub ar_coeffs: Vec<f64>,
    pub ma_coeffs: Vec<f64>,
    pub intercept: f64,
    /// `fit_rss / residual_count`, in differenced transform-space units.
    pub innovation_variance: f64,
    pub fit_rss: f64,
    pub residual_count: usize,
    pub converged: bool,
    /// Every root of the MA polynomial lies outside the unit circle.
    pub invertible: bool,
}

impl ArimaModel {
    /// Model with the given coefficients and no fit statistics.
    pub fn with_coefficients(
        order: ArimaOrder,
        intercept: f64,
        ar_coeffs: Vec<f64>,
        ma_coeffs: Vec<f64>,
        innovation_variance: f64,
    ) -> Result<Self> {
        if ar_coeffs.len() != order.p || ma_coeffs.len() != order.q {
            return Err(Error::InvalidConfig(format!(
                "ARIMA{order} needs {} AR and {} MA coefficients",
                order.p, order.q
            )));
        }
        let invertible = ma_invertible(&ma_coeffs);
        Ok(Self {
            order,
            ar_coeffs,
            ma_coeffs,
            intercept,
            innovation_variance,
            fit_rss: 0.0,
            residual_count: 0,
            converged: true,
            invertible,
        })
    }

    fn params(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.order.num_params());
        v.push(self.intercept);
        v.extend(&self.ar_coeffs);
        v.extend(&self.ma_coeffs);
        v
    }

    /// Whether a forecast from a window leaving `m` differenced values
    /// consumes random pre-window draws.
    pub fn needs_random_init(&self, m: usize) -> bool {
        self.order.q > 0 || self.order.p > m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initialization {
    /// Single simplex run from zero coefficients, intercept at the mean.
    Zeros,
    /// Simplex run from a Hannan-Rissanen regression estimate, plus a
    /// restart from zeros; the better result is kept.
    HannanRissanen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Iteration cap per simplex run; `None` means 500 per parameter.
    pub max_iterations: Option<usize>,
    /// Relative objective spread at which the simplex stops.
    pub tolerance: f64,
    pub initialization: Initialization,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: None,
            tolerance: 1e-10,
            initialization: Initialization::HannanRissanen,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn iteration_cap(&self, num_params: usize) -> usize {
        self.max_iterations.unwrap_or(500 * num_params)
    }
}

/// Conditional residuals for `t = p..n`; residuals before `p` are taken as
/// zero. `series` must already be differenced `model.order.d` times.
pub fn css_residuals(model: &ArimaModel, series: &TimeSeries) -> Result<Vec<f64>> {
    let x = series.values();
    let p = model.order.p;
    if x.len() <= p {
        return Err(Error::SeriesTooShort {
            len: x.len(),
            required: p + 1,
        });
    }
    let mut e = vec![0.0; x.len()];
    residual_recursion(x, p, model.order.q, &model.params(), &mut e);
    Ok(e.split_off(p))
}

/// Fills `e[p..]` with conditional residuals and returns their sum of
/// squares, or `inf` once the recursion blows up.
fn residual_recursion(x: &[f64], p: usize, q: usize, params: &[f64], e: &mut [f64]) -> f64 {
    let c = params[0];
    let phi = &params[1..1 + p];
    let theta = &params[1 + p..1 + p + q];
    let mut ssr = 0.0;
    for t in p..x.len() {
        let mut pred = c;
        for (i, f) in phi.iter().enumerate() {
            pred += f * x[t - 1 - i];
        }
        for (j, th) in theta.iter().enumerate() {
            if t > p + j {
                pred += th * e[t - 1 - j];
            }
        }
        let r = x[t] - pred;
        e[t] = r;
        ssr += r * r;
        if ssr.is_nan() || ssr >= 1e300 {
            return f64::INFINITY;
        }
    }
    ssr
}

fn css_objective(x: &[f64], p: usize, q: usize, params: &[f64], scratch: &mut [f64]) -> f64 {
    if params.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    residual_recursion(x, p, q, params, scratch)
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Fits `order` to `series` (transform space, not yet differenced) by
/// minimizing the conditional sum of squares.
pub fn fit(order: ArimaOrder, series: &TimeSeries, config: &FitConfig) -> Result<ArimaModel> {
    config.validate()?;
    ArimaOrder::new(order.p, order.d, order.q)?;
    let n = series.len();
    if n <= order.d || n - order.d <= order.p + order.q + 1 {
        return Err(Error::SeriesTooShort {
            len: n,
            required: order.d + order.p + order.q + 2,
        });
    }
    let (x, _) = difference_values(series.values(), order.d);
    fit_differenced(order, &x, config)
}

pub(crate) fn fit_differenced(order: ArimaOrder, x: &[f64], config: &FitConfig) -> Result<ArimaModel> {
    let ArimaOrder { p, q, .. } = order;
    let count = x.len() - p;
    let mu = mean(x);

    if p == 0 && q == 0 {
        let rss: f64 = x.iter().map(|v| (v - mu) * (v - mu)).sum();
        return Ok(ArimaModel {
            order,
            ar_coeffs: Vec::new(),
            ma_coeffs: Vec::new(),
            intercept: mu,
            innovation_variance: rss / count as f64,
            fit_rss: rss,
            residual_count: count,
            converged: true,
            invertible: true,
        });
    }

    let k = order.num_params();
    let mut zero_start = vec![0.0; k];
    zero_start[0] = mu;
    let sd = (x.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / x.len() as f64).sqrt();
    let mut steps = vec![0.1; k];
    steps[0] = (0.1 * sd).max(1e-3 * mu.abs()).max(1e-8);

    let mut starts = Vec::with_capacity(2);
    if config.initialization == Initialization::HannanRissanen {
        if let Some(hr) = hannan_rissanen(x, p, q) {
            starts.push(hr);
        }
    }
    starts.push(zero_start.clone());

    let nm = NelderMead::new(config.iteration_cap(k), config.tolerance);
    let mut scratch = vec![0.0; x.len()];
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for start in &starts {
        let m = nm.minimize(|v| css_objective(x, p, q, v, &mut scratch), start, &steps);
        if best.as_ref().is_none_or(|(_, v, _)| m.value < *v) {
            best = Some((m.x, m.value, m.converged));
        }
    }
    let (params, rss, converged) = best.expect("at least one start");
    if !rss.is_finite() {
        return Err(Error::OptimizerFailure {
            order: order.to_string(),
        });
    }
    let ma_coeffs = params[1 + p..].to_vec();
    Ok(ArimaModel {
        order,
        ar_coeffs: params[1..1 + p].to_vec(),
        invertible: ma_invertible(&ma_coeffs),
        ma_coeffs,
        intercept: params[0],
        innovation_variance: rss / count as f64,
        fit_rss: rss,
        residual_count: count,
        converged,
    })
}

/// Two-stage regression start: a long autoregression supplies residual
/// estimates, which then enter an OLS fit of the ARMA equation.
fn hannan_rissanen(x: &[f64], p: usize, q: usize) -> Option<Vec<f64>> {
    let n = x.len();
    let long = if q == 0 { 0 } else { (p + q).max(10).min(n / 4) };
    let resid: Vec<f64> = if q == 0 {
        Vec::new()
    } else {
        let rows = n.checked_sub(long)?;
        let y = DVector::from_iterator(rows, x[long..].iter().copied());
        let m = DMatrix::from_fn(rows, long + 1, |r, c| if c == 0 { 1.0 } else { x[long + r - c] });
        let ols = Ols::fit(&y, &m).ok()?;
        let fitted = &m * &ols.beta;
        let mut e = vec![0.0; n];
        for r in 0..rows {
            e[long + r] = y[r] - fitted[r];
        }
        e
    };
    let first = (long + q).max(p);
    let rows = n.checked_sub(first)?;
    if rows <= 1 + p + q {
        return None;
    }
    let y = DVector::from_iterator(rows, x[first..].iter().copied());
    let m = DMatrix::from_fn(rows, 1 + p + q, |r, c| {
        let t = first + r;
        match c {
            0 => 1.0,
            c if c <= p => x[t - c],
            c => resid[t - (c - p)],
        }
    });
    let ols = Ols::fit(&y, &m).ok()?;
    let start: Vec<f64> = ols.beta.iter().copied().collect();
    start.iter().all(|v| v.is_finite()).then_some(start)
}

/// True when `1 + theta_1 z + ... + theta_q z^q` has no roots on or inside
/// the unit circle.
pub fn ma_invertible(theta: &[f64]) -> bool {
    let q = theta.len();
    if q == 0 {
        return true;
    }
    // reciprocal roots are the eigenvalues of the companion matrix of
    // z^q + theta_1 z^(q-1) + ... + theta_q
    let mut companion = DMatrix::<f64>::zeros(q, q);
    for j in 0..q {
        companion[(0, j)] = -theta[j];
    }
    for i in 1..q {
        companion[(i, i - 1)] = 1.0;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .all(|z| z.norm() < 1.0)
}

/// One-step-ahead price forecast for the day after `window`.
///
/// The window (raw prices) is log-transformed when `state.log_applied` and
/// differenced `model.order.d` times. AR lags and MA residuals that fall
/// before the window are drawn from `N(0, innovation_variance)` using `seed`.
/// The forecast is integrated and exponentiated back to price space.
pub fn forecast_next(
    model: &ArimaModel,
    window: &TimeSeries,
    state: &TransformState,
    seed: u64,
) -> Result<f64> {
    let d = model.order.d;
    if state.diff_order != d {
        return Err(Error::InvalidConfig(format!(
            "transform differences {} times but model is ARIMA{}",
            state.diff_order, model.order
        )));
    }
    forecast_values(model, window.values(), state.log_applied, seed)
}

pub(crate) fn forecast_values(model: &ArimaModel, window: &[f64], log: bool, seed: u64) -> Result<f64> {
    let ArimaOrder { p, d, q } = model.order;
    let w = window.len();
    if w < d + 1 {
        return Err(Error::WindowTooShort { w, d });
    }
    let y: Vec<f64> = if log {
        if let Some(index) = window.iter().position(|v| *v <= 0.0) {
            return Err(Error::NonPositiveValue {
                index,
                value: window[index],
            });
        }
        window.iter().map(|v| v.ln()).collect()
    } else {
        window.to_vec()
    };

    // last value of every differencing level, for integration
    let mut tails = Vec::with_capacity(d);
    let mut x = y;
    for _ in 0..d {
        tails.push(*x.last().expect("non-empty"));
        x = x.windows(2).map(|v| v[1] - v[0]).collect();
    }
    let m = x.len();

    let (pre_x, pre_e) = if model.needs_random_init(m) {
        let sd = model.innovation_variance.max(0.0).sqrt();
        let normal = Normal::new(0.0, sd).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut r = rng(seed);
        let pre_x: Vec<f64> = (0..p).map(|_| normal.sample(&mut r)).collect();
        let pre_e: Vec<f64> = (0..q).map(|_| normal.sample(&mut r)).collect();
        (pre_x, pre_e)
    } else {
        (Vec::new(), Vec::new())
    };
    // value at (possibly negative) time t, pre-window slot -t-1 otherwise
    let x_at = |t: isize| -> f64 {
        if t >= 0 {
            x[t as usize]
        } else {
            pre_x[(-t - 1) as usize]
        }
    };

    let c = model.intercept;
    let mut e = Vec::new();
    if q > 0 {
        e.reserve(m);
        for t in 0..m as isize {
            let mut pred = c;
            for (i, f) in model.ar_coeffs.iter().enumerate() {
                pred += f * x_at(t - 1 - i as isize);
            }
            for (j, th) in model.ma_coeffs.iter().enumerate() {
                let k = t - 1 - j as isize;
                pred += th * if k >= 0 { e[k as usize] } else { pre_e[(-k - 1) as usize] };
            }
            e.push(x[t as usize] - pred);
        }
    }
    let mut next = c;
    let mt = m as isize;
    for (i, f) in model.ar_coeffs.iter().enumerate() {
        next += f * x_at(mt - 1 - i as isize);
    }
    for (j, th) in model.ma_coeffs.iter().enumerate() {
        let k = mt - 1 - j as isize;
        next += th * if k >= 0 { e[k as usize] } else { pre_e[(-k - 1) as usize] };
    }

    for tail in tails.iter().rev() {
        next += tail;
    }
    Ok(if log { next.exp() } else { next })
}

/// Per-location mean squared price error: for each start, `reps` forecasts
/// of the price at `start + w` from the window `[start, start + w)`.
#[allow(clippy::too_many_arguments)]
pub fn window_errors(
    model: &ArimaModel,
    prices: &TimeSeries,
    starts: &[usize],
    w: usize,
    reps: usize,
    log: bool,
    seed: u64,
    parallelism: Parallelism,
) -> Result<Vec<f64>> {
    let values = prices.values();
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    if w < model.order.d + 1 {
        return Err(Error::WindowTooShort { w, d: model.order.d });
    }
    if let Some(&bad) = starts.iter().find(|&&s| s + w + 1 > values.len()) {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            required: bad + w + 1,
        });
    }
    let random = model.needs_random_init(w - model.order.d);
    let per_location = parallelism.map(starts, |&start| -> Result<f64> {
        let window = &values[start..start + w];
        let target = values[start + w];
        let loc_seed = derive_seed(seed, start as u64);
        if !random {
            let err = forecast_values(model, window, log, loc_seed)? - target;
            return Ok(err * err);
        }
        let mut total = 0.0;
        for rep in 0..reps {
            let err = forecast_values(model, window, log, derive_seed(loc_seed, rep as u64))? - target;
            total += err * err;
        }
        Ok(total / reps as f64)
    });
    per_location.into_iter().collect()
}

/// Grand mean squared price error over `starts` and `reps` (USD^2 for a
/// price series).
#[allow(clippy::too_many_arguments)]
pub fn mse_of_model(
    model: &ArimaModel,
    prices: &TimeSeries,
    starts: &[usize],
    w: usize,
    reps: usize,
    log: bool,
    seed: u64,
) -> Result<f64> {
    if starts.is_empty() {
        return Err(Error::InvalidConfig("no evaluation windows".into()));
    }
    let errs = window_errors(model, prices, starts, w, reps, log, seed, Parallelism::Sequential)?;
    Ok(errs.iter().sum::<f64>() / errs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use rand_distr::StandardNormal;

    fn ts(values: Vec<f64>) -> TimeSeries {
        TimeSeries::from_values(NaiveDate::from_ymd_opt(2015, 9, 1).unwrap(), values).unwrap()
    }

    fn order(p: usize, d: usize, q: usize) -> ArimaOrder {
        ArimaOrder::new(p, d, q).unwrap()
    }

    /// ARMA(1,1) path with zero pre-sample values; returns (series, innovations).
    fn arma11(phi: f64, theta: f64, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut r = rng(seed);
        let e: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
        let mut x = vec![0.0; n];
        for t in 0..n {
            let prev_x = if t > 0 { x[t - 1] } else { 0.0 };
            let prev_e = if t > 0 { e[t - 1] } else { 0.0 };
            x[t] = phi * prev_x + theta * prev_e + e[t];
        }
        (x, e)
    }

    #[test]
    fn zero_model_residuals_are_shifted_series() {
        let x = vec![0.3, -1.2, 4.0, 2.5, 0.0, 7.1];
        for (p, q) in [(0, 0), (2, 0), (3, 2)] {
            let m = ArimaModel::with_coefficients(order(p, 0, q), 0.0, vec![0.0; p], vec![0.0; q], 1.0).unwrap();
            assert_eq!(css_residuals(&m, &ts(x.clone())).unwrap(), x[p..].to_vec());
        }
    }

    #[test]
    fn ar1_exact_recursion() {
        let m = ArimaModel::with_coefficients(order(1, 0, 0), 0.0, vec![0.5], vec![], 1.0).unwrap();
        assert_eq!(css_residuals(&m, &ts(vec![1.0, 0.5, 0.25])).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn residuals_need_more_than_p_points() {
        let m = ArimaModel::with_coefficients(order(3, 0, 0), 0.0, vec![0.0; 3], vec![], 1.0).unwrap();
        assert_eq!(
            css_residuals(&m, &ts(vec![1.0, 2.0, 3.0])).unwrap_err(),
            Error::SeriesTooShort { len: 3, required: 4 }
        );
    }

    #[test]
    fn true_model_recovers_innovations() {
        let (x, e) = arma11(0.6, 0.4, 1000, 5);
        let m = ArimaModel::with_coefficients(order(1, 0, 1), 0.0, vec![0.6], vec![0.4], 1.0).unwrap();
        let r = css_residuals(&m, &ts(x)).unwrap();
        // r[k] is the residual at t = k + 1
        let burn = 50;
        let sq: f64 = r[burn..].iter().zip(&e[burn + 1..]).map(|(a, b)| (a - b).powi(2)).sum();
        let rms = (sq / (r.len() - burn) as f64).sqrt();
        assert!(rms < 0.02, "rms {rms}");
    }

    #[test]
    fn white_noise_model_is_closed_form() {
        let x = vec![1.0, 4.0, 2.0, 8.0, 5.0];
        let m = fit(order(0, 0, 0), &ts(x.clone()), &FitConfig::default()).unwrap();
        let mean = x.iter().sum::<f64>() / 5.0;
        assert_eq!(m.intercept, mean);
        assert_eq!(m.fit_rss, x.iter().map(|v| (v - mean).powi(2)).sum::<f64>());
        assert_eq!(m.innovation_variance, m.fit_rss / 5.0);
    }

    #[test]
    fn recovers_ar1() {
        let (x, _) = arma11(0.5, 0.0, 1000, 17);
        let m = fit(order(1, 0, 0), &ts(x), &FitConfig::default()).unwrap();
        assert!((m.ar_coeffs[0] - 0.5).abs() < 0.1, "{:?}", m.ar_coeffs);
        assert!(m.converged);
    }

    #[test]
    fn recovers_ma1() {
        let (x, _) = arma11(0.0, 0.4, 1000, 23);
        let m = fit(order(0, 0, 1), &ts(x), &FitConfig::default()).unwrap();
        assert!((m.ma_coeffs[0] - 0.4).abs() < 0.15, "{:?}", m.ma_coeffs);
        assert!(m.invertible);
    }

    #[test]
    fn differencing_is_applied_before_fitting() {
        // integrated AR(1): fitting (1,1,0) to the levels matches (1,0,0) on the increments
        let (dx, _) = arma11(0.5, 0.0, 400, 3);
        let mut levels = vec![100.0];
        for v in &dx {
            levels.push(levels.last().unwrap() + v);
        }
        let a = fit(order(1, 1, 0), &ts(levels), &FitConfig::default()).unwrap();
        let b = fit(order(1, 0, 0), &ts(dx), &FitConfig::default()).unwrap();
        assert!((a.ar_coeffs[0] - b.ar_coeffs[0]).abs() < 1e-9);
        assert!((a.fit_rss - b.fit_rss).abs() < 1e-9 * b.fit_rss);
    }

    #[test]
    fn fit_never_worse_than_mean_baseline() {
        let (x, _) = arma11(0.3, -0.2, 300, 8);
        for (p, d, q) in [(1, 0, 1), (2, 1, 2), (3, 0, 0), (0, 2, 3), (5, 1, 5)] {
            let cfg = FitConfig { max_iterations: Some(50), ..FitConfig::default() };
            let m = fit(order(p, d, q), &ts(x.clone()), &cfg).unwrap();
            let (dx, _) = difference_values(&x, d);
            let mu = mean(&dx);
            let baseline: f64 = dx[p..].iter().map(|v| (v - mu).powi(2)).sum();
            assert!(m.fit_rss <= baseline, "{p},{d},{q}: {} > {baseline}", m.fit_rss);
            assert_eq!(m.innovation_variance, m.fit_rss / m.residual_count as f64);
            assert_eq!(m.residual_count, dx.len() - p);
        }
    }

    #[test]
    fn fit_rejects_short_series() {
        let err = fit(order(2, 1, 2), &ts(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), &FitConfig::default()).unwrap_err();
        assert_eq!(err, Error::SeriesTooShort { len: 6, required: 7 });
    }

    #[test]
    fn zeros_initialization_only_uses_one_start() {
        let (x, _) = arma11(0.5, 0.0, 500, 2);
        let cfg = FitConfig { initialization: Initialization::Zeros, ..FitConfig::default() };
        let m = fit(order(1, 0, 0), &ts(x), &cfg).unwrap();
        assert!((m.ar_coeffs[0] - 0.5).abs() < 0.1);
    }

    #[test]
    fn invertibility() {
        assert!(ma_invertible(&[]));
        assert!(ma_invertible(&[0.5]));
        assert!(!ma_invertible(&[2.0]));
        assert!(!ma_invertible(&[-1.0]));
        // (1 + 0.5z)(1 - 0.4z) = 1 + 0.1z - 0.2z^2
        assert!(ma_invertible(&[0.1, -0.2]));
        // (1 + 2z)(1 + 0.1z)
        assert!(!ma_invertible(&[2.1, 0.2]));
    }

    fn identity_state(d: usize, log: bool) -> TransformState {
        TransformState {
            log_applied: log,
            diff_order: d,
            retained_heads: vec![0.0; d],
        }
    }

    #[test]
    fn constant_model_forecasts_intercept() {
        let m = ArimaModel::with_coefficients(order(0, 0, 0), 12.5, vec![], vec![], 1.0).unwrap();
        for window in [vec![1.0, 2.0], vec![100.0, -3.0, 7.0]] {
            let f = forecast_next(&m, &ts(window), &identity_state(0, false), 9).unwrap();
            assert_eq!(f, 12.5);
        }
    }

    #[test]
    fn random_walk_carries_last_value() {
        let m = ArimaModel::with_coefficients(order(1, 1, 0), 0.0, vec![0.0], vec![], 1.0).unwrap();
        let f = forecast_next(&m, &ts(vec![3.0, 9.0, 4.0]), &identity_state(1, false), 1).unwrap();
        assert_eq!(f, 4.0);
    }

    #[test]
    fn seed_only_matters_with_random_initialization() {
        let window = ts(vec![230.0, 228.1, 231.5, 240.2, 238.0, 236.4]);
        let state = identity_state(1, true);
        let ar = ArimaModel::with_coefficients(order(2, 1, 0), 0.001, vec![0.2, -0.1], vec![], 1e-3).unwrap();
        assert_eq!(
            forecast_next(&ar, &window, &state, 1).unwrap(),
            forecast_next(&ar, &window, &state, 2).unwrap()
        );
        let ma = ArimaModel::with_coefficients(order(2, 1, 1), 0.001, vec![0.2, -0.1], vec![0.5], 1e-3).unwrap();
        let a = forecast_next(&ma, &window, &state, 1).unwrap();
        assert_eq!(a, forecast_next(&ma, &window, &state, 1).unwrap());
        assert_ne!(a, forecast_next(&ma, &window, &state, 2).unwrap());
        // AR order beyond the differenced window also draws
        let long = ArimaModel::with_coefficients(order(7, 1, 0), 0.0, vec![0.1; 7], vec![], 1e-3).unwrap();
        assert_ne!(
            forecast_next(&long, &window, &state, 1).unwrap(),
            forecast_next(&long, &window, &state, 2).unwrap()
        );
    }

    #[test]
    fn forecast_matches_transform_and_inverse() {
        use crate::series::{inverse_transform, transform};
        let window = ts(vec![410.0, 415.5, 409.2, 420.8, 431.0, 428.3, 433.9]);
        let m = ArimaModel::with_coefficients(order(2, 2, 0), 0.0005, vec![-0.4, -0.2], vec![], 1e-3).unwrap();
        let (x, state) = transform(&window, true, 2).unwrap();
        let v = x.values();
        let n = v.len();
        let next = 0.0005 - 0.4 * v[n - 1] - 0.2 * v[n - 2];
        let mut extended = v.to_vec();
        extended.push(next);
        let back = inverse_transform(&TimeSeries::from_values(x.start_date(), extended).unwrap(), &state).unwrap();
        let expected = *back.values().last().unwrap();
        let got = forecast_next(&m, &window, &state, 0).unwrap();
        assert!((got - expected).abs() <= 1e-9 * expected, "{got} vs {expected}");
    }

    #[test]
    fn window_too_short() {
        let m = ArimaModel::with_coefficients(order(0, 2, 0), 0.0, vec![], vec![], 1.0).unwrap();
        assert_eq!(
            forecast_next(&m, &ts(vec![1.0, 2.0]), &identity_state(2, false), 0).unwrap_err(),
            Error::WindowTooShort { w: 2, d: 2 }
        );
    }

    #[test]
    fn constant_price_has_zero_mse() {
        let p = 6500.0f64;
        let prices = ts(vec![p; 40]);
        let m = ArimaModel::with_coefficients(order(0, 0, 0), p.ln(), vec![], vec![], 0.0).unwrap();
        let mse = mse_of_model(&m, &prices, &[0, 5, 20], 9, 40, true, 1).unwrap();
        assert!(mse < 1e-20, "{mse}");
    }

    #[test]
    fn reps_irrelevant_without_random_initialization() {
        let (dx, _) = arma11(0.1, 0.0, 200, 4);
        let prices = ts(dx.iter().scan(5.0, |acc, v| { *acc += 0.02 * v; Some(acc.exp()) }).collect());
        let m = ArimaModel::with_coefficients(order(1, 1, 0), 0.0, vec![0.1], vec![], 4e-4).unwrap();
        let starts = [3, 50, 120, 180];
        assert_eq!(
            mse_of_model(&m, &prices, &starts, 9, 1, true, 7).unwrap(),
            mse_of_model(&m, &prices, &starts, 9, 40, true, 7).unwrap()
        );
    }

    #[test]
    fn three_window_brute_force() {
        let (dx, _) = arma11(0.0, 0.3, 100, 12);
        let prices = ts(dx.iter().scan(7.0, |acc, v| { *acc += 0.03 * v; Some(acc.exp()) }).collect());
        let m = ArimaModel::with_coefficients(order(1, 1, 1), 0.0, vec![0.2], vec![0.3], 9e-4).unwrap();
        let starts = [0usize, 30, 77];
        let (w, reps, seed) = (5usize, 4usize, 99u64);
        let mut total = 0.0;
        let state = identity_state(1, true);
        for &s in &starts {
            let window = prices.slice(s, w).unwrap();
            let target = prices.values()[s + w];
            let loc = derive_seed(seed, s as u64);
            for rep in 0..reps {
                let f = forecast_next(&m, &window, &state, derive_seed(loc, rep as u64)).unwrap();
                total += (f - target).powi(2);
            }
        }
        let brute = total / (starts.len() * reps) as f64;
        let got = mse_of_model(&m, &prices, &starts, w, reps, true, seed).unwrap();
        assert!((got - brute).abs() <= 1e-12 * brute);
    }

    #[test]
    fn window_past_series_end_rejected() {
        let m = ArimaModel::with_coefficients(order(0, 1, 0), 0.0, vec![], vec![], 1.0).unwrap();
        let prices = ts(vec![1.0; 12]);
        assert!(mse_of_model(&m, &prices, &[3], 9, 1, true, 0).is_err());
        assert!(mse_of_model(&m, &prices, &[2], 9, 1, true, 0).is_ok());
    }
}
