//! Sample autocorrelation and partial autocorrelation.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Biased (divide-by-n) sample autocovariances for lags `0..=max_lag`.
pub(crate) fn autocovariances(values: &[f64], max_lag: usize) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    (0..=max_lag)
        .map(|k| {
            centered[..centered.len() - k]
                .iter()
                .zip(&centered[k..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n
        })
        .collect()
}

fn check_lag(ts: &TimeSeries, max_lag: usize) -> Result<()> {
    if ts.len() < 2 {
        return Err(Error::SeriesTooShort {
            len: ts.len(),
            required: 2,
        });
    }
    if max_lag >= ts.len() {
        return Err(Error::LagTooLarge {
            max_lag,
            len: ts.len(),
        });
    }
    Ok(())
}

/// Sample autocorrelation for lags `0..=max_lag`; element 0 is exactly 1.
pub fn acf(ts: &TimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    check_lag(ts, max_lag)?;
    let values = ts.values();
    let gamma = autocovariances(values, max_lag);
    if gamma[0] <= 0.0 || values.iter().all(|v| *v == values[0]) {
        return Err(Error::ConstantSeries);
    }
    let g0 = gamma[0];
    Ok(gamma
        .iter()
        .enumerate()
        .map(|(k, g)| if k == 0 { 1.0 } else { (g / g0).clamp(-1.0, 1.0) })
        .collect())
}

/// Partial autocorrelation for lags `1..=max_lag` (element `k - 1` holds lag
/// `k`), via the Durbin-Levinson recursion on the sample ACF.
pub fn pacf(ts: &TimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    check_lag(ts, max_lag)?;
    let rho = match acf(ts, max_lag) {
        Ok(rho) => rho,
        Err(Error::ConstantSeries) => return Err(Error::DegenerateToeplitz { lag: 0 }),
        Err(e) => return Err(e),
    };
    durbin_levinson(&rho, max_lag)
}

/// Last-coefficient sequence of the Durbin-Levinson recursion.
pub(crate) fn durbin_levinson(rho: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(max_lag);
    let mut phi: Vec<f64> = Vec::with_capacity(max_lag);
    let mut v = 1.0f64;
    for k in 1..=max_lag {
        let num = rho[k] - phi.iter().enumerate().map(|(j, p)| p * rho[k - 1 - j]).sum::<f64>();
        if v.abs() < 1e-12 {
            return Err(Error::DegenerateToeplitz { lag: k });
        }
        let kk = num / v;
        let prev = phi.clone();
        for j in 0..prev.len() {
            phi[j] = prev[j] - kk * prev[prev.len() - 1 - j];
        }
        phi.push(kk);
        v *= 1.0 - kk * kk;
        out.push(kk);
    }
    Ok(out)
}
