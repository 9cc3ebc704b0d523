use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value {value} at position {index} is not strictly positive")]
    NonPositiveValue { index: usize, value: f64 },

    #[error("value at position {index} is not finite")]
    NonFiniteValue { index: usize },

    #[error("series has {len} observations, need at least {required}")]
    SeriesTooShort { len: usize, required: usize },

    #[error("dates must be consecutive days; break at position {index}")]
    NonConsecutiveDates { index: usize },

    #[error("dates and values differ in length ({dates} vs {values})")]
    LengthMismatch { dates: usize, values: usize },

    #[error("transform state holds {heads} retained values for differencing order {order}")]
    StateMismatch { heads: usize, order: usize },

    #[error("lag {max_lag} is too large for a series of length {len}")]
    LagTooLarge { max_lag: usize, len: usize },

    #[error("series is constant; autocorrelation is undefined")]
    ConstantSeries,

    #[error("Durbin-Levinson recursion hit a vanishing prediction variance at lag {lag}")]
    DegenerateToeplitz { lag: usize },

    #[error("regression design matrix is singular")]
    SingularRegression,

    #[error("optimizer found no finite objective value for ARIMA{order}")]
    OptimizerFailure { order: String },

    #[error("window of length {w} is too short for differencing order {d}")]
    WindowTooShort { w: usize, d: usize },

    #[error("order ({p},{q},{d}) lies outside the search grid")]
    OutOfGrid { p: usize, q: usize, d: usize },

    #[error("index {0} lies outside the search grid (0..300)")]
    IndexOutOfGrid(usize),

    #[error("region admits {available} window starts, need {requested}")]
    RegionTooSmall { available: usize, requested: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
