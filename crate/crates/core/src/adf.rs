//! Augmented Dickey-Fuller unit-root test (constant, no trend).
//!
//! The regression is
//!
//! ```text
//! dx_t = a + g * x_{t-1} + sum_{i=1..k} b_i * dx_{t-i} + e_t
//! ```
//!
//! and the statistic is the t-ratio on `g`. The lag count `k` is the AIC
//! minimizer over `0..=max_lag`, with every candidate fitted on the common
//! sample that `max_lag` leaves; the chosen `k` is then refitted on the full
//! sample. P-values use MacKinnon's (1994) approximate asymptotic
//! distribution; critical values use MacKinnon's (2010) finite-sample
//! response surfaces.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::linalg::Ols;
use crate::series::TimeSeries;

pub const DEFAULT_MAX_LAG: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    #[serde(rename = "1%")]
    pub one_pct: f64,
    #[serde(rename = "5%")]
    pub five_pct: f64,
    #[serde(rename = "10%")]
    pub ten_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub critical_values: CriticalValues,
    pub lags_used: usize,
    /// Observations in the final regression.
    pub nobs: usize,
}

// MacKinnon (2010), constant only, one series: b0 + b1/T + b2/T^2 + b3/T^3
const CRIT_SURFACE: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];

// MacKinnon (1994), constant only, one series
const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;
const SMALL_P: [f64; 3] = [2.1659, 1.4412, 0.038269];
const LARGE_P: [f64; 4] = [1.7339, 0.93202, -0.12745, -0.010368];

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Critical values for a regression on `nobs` observations.
pub fn critical_values(nobs: usize) -> CriticalValues {
    let inv = 1.0 / nobs as f64;
    let [one_pct, five_pct, ten_pct] = CRIT_SURFACE.map(|c| poly(&c, inv));
    CriticalValues {
        one_pct,
        five_pct,
        ten_pct,
    }
}

/// Approximate p-value of a Dickey-Fuller t-statistic.
pub fn p_value(stat: f64) -> f64 {
    if stat > TAU_MAX {
        return 1.0;
    }
    if stat < TAU_MIN {
        return 0.0;
    }
    let z = if stat <= TAU_STAR {
        poly(&SMALL_P, stat)
    } else {
        poly(&LARGE_P, stat)
    };
    Normal::standard().cdf(z)
}

/// Design for `lags` lagged differences over the last `nobs` usable points.
/// Columns: constant, x_{t-1}, dx_{t-1}, ..., dx_{t-lags}.
fn design(x: &[f64], dx: &[f64], lags: usize, nobs: usize) -> (DVector<f64>, DMatrix<f64>) {
    let first = dx.len() - nobs;
    let y = DVector::from_iterator(nobs, dx[first..].iter().copied());
    let mut m = DMatrix::zeros(nobs, lags + 2);
    for r in 0..nobs {
        let t = first + r; // dx[t] = x[t+1] - x[t]
        m[(r, 0)] = 1.0;
        m[(r, 1)] = x[t];
        for i in 1..=lags {
            m[(r, i + 1)] = dx[t - i];
        }
    }
    (y, m)
}

pub fn adf_test(ts: &TimeSeries, max_lag: usize) -> Result<AdfResult> {
    let x = ts.values();
    if x.len() < max_lag + 10 {
        return Err(Error::SeriesTooShort {
            len: x.len(),
            required: max_lag + 10,
        });
    }
    if x.iter().all(|v| *v == x[0]) {
        return Err(Error::SingularRegression);
    }
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();

    let common = dx.len() - max_lag;
    let mut best: Option<(f64, usize)> = None;
    for lags in 0..=max_lag {
        let (y, m) = design(x, &dx, lags, common);
        let aic = Ols::fit(&y, &m)?.aic();
        // strict comparison keeps the smaller lag on ties
        if best.is_none_or(|(b, _)| aic < b) {
            best = Some((aic, lags));
        }
    }
    let lags_used = best.map(|(_, k)| k).unwrap_or(0);

    let nobs = dx.len() - lags_used;
    let (y, m) = design(x, &dx, lags_used, nobs);
    let fit = Ols::fit(&y, &m)?;
    let statistic = fit.t_value(1);
    if !statistic.is_finite() {
        return Err(Error::SingularRegression);
    }
    Ok(AdfResult {
        statistic,
        p_value: p_value(statistic),
        critical_values: critical_values(nobs),
        lags_used,
        nobs,
    })
}
