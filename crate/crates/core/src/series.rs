//! Daily series container and the stationarity transforms.

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered daily observations on consecutive calendar days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series, checking that dates advance by exactly one day and
    /// that every value is finite.
    ///
    /// A single observation is accepted: differencing a short forecast window
    /// can legitimately leave one value.
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch {
                dates: dates.len(),
                values: values.len(),
            });
        }
        if values.is_empty() {
            return Err(Error::SeriesTooShort { len: 0, required: 1 });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        for (i, pair) in dates.windows(2).enumerate() {
            if pair[0].checked_add_days(Days::new(1)) != Some(pair[1]) {
                return Err(Error::NonConsecutiveDates { index: i + 1 });
            }
        }
        Ok(Self { dates, values })
    }

    /// Series starting at `start` with one value per day.
    pub fn from_values(start: NaiveDate, values: Vec<f64>) -> Result<Self> {
        let dates = (0..values.len() as u64)
            .map(|k| start + Days::new(k))
            .collect();
        Self::new(dates, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn start_date(&self) -> NaiveDate {
        self.dates[0]
    }

    /// Contiguous sub-series `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        let end = start + len;
        if len == 0 || end > self.len() {
            return Err(Error::SeriesTooShort {
                len: self.len(),
                required: end.max(1),
            });
        }
        Ok(Self {
            dates: self.dates[start..end].to_vec(),
            values: self.values[start..end].to_vec(),
        })
    }

    /// Rejects non-positive values, as required of a raw price series.
    pub fn ensure_positive(&self) -> Result<()> {
        match self.values.iter().position(|&v| v <= 0.0) {
            Some(index) => Err(Error::NonPositiveValue {
                index,
                value: self.values[index],
            }),
            None => Ok(()),
        }
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.len());
        Self {
            dates: self.dates.clone(),
            values,
        }
    }
}

/// What was done to a series, with enough retained data to undo it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformState {
    pub log_applied: bool,
    pub diff_order: usize,
    /// `retained_heads[k]` is the first value of the series after `k`
    /// differencing passes (in log space when `log_applied`).
    pub retained_heads: Vec<f64>,
}

impl TransformState {
    pub fn identity() -> Self {
        Self {
            log_applied: false,
            diff_order: 0,
            retained_heads: Vec::new(),
        }
    }
}

/// Element-wise natural logarithm.
pub fn log_transform(ts: &TimeSeries) -> Result<TimeSeries> {
    ts.ensure_positive()?;
    Ok(ts.with_values(ts.values.iter().map(|v| v.ln()).collect()))
}

/// `order`-th finite difference. The result is `order` observations shorter
/// and keeps the dates of the surviving (trailing) observations.
pub fn difference(ts: &TimeSeries, order: usize) -> Result<(TimeSeries, TransformState)> {
    if ts.len() <= order {
        return Err(Error::SeriesTooShort {
            len: ts.len(),
            required: order + 1,
        });
    }
    let (values, heads) = difference_values(&ts.values, order);
    let series = TimeSeries {
        dates: ts.dates[order..].to_vec(),
        values,
    };
    let state = TransformState {
        log_applied: false,
        diff_order: order,
        retained_heads: heads,
    };
    Ok((series, state))
}

/// Undoes [`difference`], restoring the `diff_order` leading observations.
pub fn inverse_difference(diffed: &TimeSeries, state: &TransformState) -> Result<TimeSeries> {
    if state.retained_heads.len() != state.diff_order {
        return Err(Error::StateMismatch {
            heads: state.retained_heads.len(),
            order: state.diff_order,
        });
    }
    let values = integrate_values(&diffed.values, &state.retained_heads);
    let first = diffed.dates[0]
        .checked_sub_days(Days::new(state.diff_order as u64))
        .expect("date underflow");
    TimeSeries::from_values(first, values)
}

/// Optional log followed by `order`-fold differencing.
pub fn transform(ts: &TimeSeries, log: bool, order: usize) -> Result<(TimeSeries, TransformState)> {
    let base = if log { log_transform(ts)? } else { ts.clone() };
    let (series, mut state) = difference(&base, order)?;
    state.log_applied = log;
    Ok((series, state))
}

/// Inverse of [`transform`]: integrates, then exponentiates if needed.
pub fn inverse_transform(ts: &TimeSeries, state: &TransformState) -> Result<TimeSeries> {
    let mut out = inverse_difference(ts, state)?;
    if state.log_applied {
        out.values.iter_mut().for_each(|v| *v = v.exp());
    }
    Ok(out)
}

/// Differences `values` `order` times, returning the result and the first
/// element seen at each level.
pub(crate) fn difference_values(values: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut current = values.to_vec();
    let mut heads = Vec::with_capacity(order);
    for _ in 0..order {
        heads.push(current[0]);
        current = current.windows(2).map(|w| w[1] - w[0]).collect();
    }
    (current, heads)
}

/// Cumulative-sum inverse of [`difference_values`].
pub(crate) fn integrate_values(diffed: &[f64], heads: &[f64]) -> Vec<f64> {
    let mut current = diffed.to_vec();
    for &head in heads.iter().rev() {
        let mut level = Vec::with_capacity(current.len() + 1);
        level.push(head);
        let mut acc = head;
        for d in &current {
            acc += d;
            level.push(acc);
        }
        current = level;
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn day0() -> NaiveDate {
        NaiveDate::from_ymd_opt(2015, 9, 1).unwrap()
    }

    fn ts(values: &[f64]) -> TimeSeries {
        TimeSeries::from_values(day0(), values.to_vec()).unwrap()
    }

    #[test]
    fn log_of_one_and_e() {
        let out = log_transform(&ts(&[1.0, std::f64::consts::E])).unwrap();
        assert_eq!(out.values()[0], 0.0);
        assert!((out.values()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_rejects_non_positive() {
        let err = log_transform(&ts(&[3.0, 0.0, 1.0])).unwrap_err();
        assert_eq!(err, Error::NonPositiveValue { index: 1, value: 0.0 });
    }

    #[test]
    fn difference_examples() {
        let (c, _) = difference(&ts(&[5.0, 5.0, 5.0, 5.0]), 1).unwrap();
        assert_eq!(c.values(), &[0.0, 0.0, 0.0]);
        let (r, _) = difference(&ts(&[1.0, 2.0, 3.0, 4.0]), 1).unwrap();
        assert_eq!(r.values(), &[1.0, 1.0, 1.0]);
        let (q, state) = difference(&ts(&[0.0, 1.0, 4.0, 9.0, 16.0]), 2).unwrap();
        assert_eq!(q.values(), &[2.0, 2.0, 2.0]);
        assert_eq!(state.retained_heads, vec![0.0, 1.0]);
        assert_eq!(q.start_date(), day0() + Days::new(2));
    }

    #[test]
    fn difference_requires_length_above_order() {
        let err = difference(&ts(&[1.0, 2.0]), 2).unwrap_err();
        assert_eq!(err, Error::SeriesTooShort { len: 2, required: 3 });
    }

    #[test]
    fn inverse_difference_is_cumulative_sum() {
        let diffed = TimeSeries::from_values(day0() + Days::new(1), vec![1.0, 1.0, 1.0]).unwrap();
        let state = TransformState {
            log_applied: false,
            diff_order: 1,
            retained_heads: vec![1.0],
        };
        let out = inverse_difference(&diffed, &state).unwrap();
        assert_eq!(out.values(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(out.start_date(), day0());
    }

    #[test]
    fn inverse_difference_rejects_mismatched_state() {
        let state = TransformState {
            log_applied: false,
            diff_order: 2,
            retained_heads: vec![1.0],
        };
        let err = inverse_difference(&ts(&[1.0, 2.0]), &state).unwrap_err();
        assert_eq!(err, Error::StateMismatch { heads: 1, order: 2 });
    }

    #[test]
    fn order_two_round_trip_matches_direct_recomputation() {
        // second difference computed straight from the definition
        let values: Vec<f64> = (0..100).map(|k| ((k * 37 % 101) as f64).sin() * 50.0).collect();
        let (diffed, state) = difference(&ts(&values), 2).unwrap();
        for (t, d) in diffed.values().iter().enumerate() {
            let direct = values[t + 2] - 2.0 * values[t + 1] + values[t];
            assert!((d - direct).abs() < 1e-12);
        }
        let back = inverse_difference(&diffed, &state).unwrap();
        for (a, b) in back.values().iter().zip(&values) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_gaps_and_non_finite() {
        let dates = vec![day0(), day0() + Days::new(2)];
        assert_eq!(
            TimeSeries::new(dates, vec![1.0, 2.0]).unwrap_err(),
            Error::NonConsecutiveDates { index: 1 }
        );
        assert_eq!(
            TimeSeries::from_values(day0(), vec![1.0, f64::NAN]).unwrap_err(),
            Error::NonFiniteValue { index: 1 }
        );
    }

    proptest! {
        #[test]
        fn transform_round_trip(
            values in prop::collection::vec(1e-3f64..1e5, 4..200),
            order in 0usize..=2,
            log in any::<bool>(),
        ) {
            let series = ts(&values);
            let (out, state) = transform(&series, log, order).unwrap();
            let back = inverse_transform(&out, &state).unwrap();
            prop_assert_eq!(back.dates(), series.dates());
            // integration error scales with the series magnitude, not with
            // each element; in log space the exponent keeps it relative
            let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in back.values().iter().zip(&values) {
                let tol = if log { 1e-9 * b.abs() } else { 1e-9 * scale };
                prop_assert!((a - b).abs() <= tol, "{} vs {}", a, b);
            }
        }

        #[test]
        fn exp_log_round_trip(values in prop::collection::vec(1e-6f64..1e6, 1..100)) {
            let out = log_transform(&ts(&values)).unwrap();
            for (l, v) in out.values().iter().zip(&values) {
                prop_assert!((l.exp() - v).abs() <= 1e-12 * v);
            }
        }
    }
}
