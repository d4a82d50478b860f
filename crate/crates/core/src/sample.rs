//! Aligned predictive-regression samples.
//!
//! A [`RegressionSample`] holds pairs `(y_t, x_{t-1})` for `t = 1..T`. Raw data
//! arrives as two contemporaneous columns; [`build_sample`] lags the predictor.

use crate::error::{Error, Result};

/// Smallest effective sample size accepted anywhere in the crate.
pub const MIN_OBSERVATIONS: usize = 4;

/// Response values `y_1..y_T` paired with lagged predictor values `x_0..x_{T-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSample {
    y: Vec<f64>,
    x_lag: Vec<f64>,
}

impl RegressionSample {
    /// Wraps already-aligned vectors, `x_lag[i]` being the predictor that
    /// forecasts `y[i]`.
    pub fn new(y: Vec<f64>, x_lag: Vec<f64>) -> Result<Self> {
        if y.len() != x_lag.len() {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: x_lag.len(),
            });
        }
        if y.len() < MIN_OBSERVATIONS {
            return Err(Error::TooShort {
                got: y.len(),
                need: MIN_OBSERVATIONS,
            });
        }
        check_finite("y", &y)?;
        check_finite("x", &x_lag)?;
        Ok(Self { y, x_lag })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x_lag(&self) -> &[f64] {
        &self.x_lag
    }

    /// Effective sample size `T`.
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.y, self.x_lag)
    }

    /// Same predictor, response multiplied by `c`.
    pub fn scale_y(&self, c: f64) -> Result<Self> {
        Self::new(self.y.iter().map(|v| c * v).collect(), self.x_lag.clone())
    }

    /// Same response, predictor multiplied by `c`.
    pub fn scale_x(&self, c: f64) -> Result<Self> {
        Self::new(self.y.clone(), self.x_lag.iter().map(|v| c * v).collect())
    }
}

fn check_finite(column: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { column, index }),
        None => Ok(()),
    }
}

/// Aligns two contemporaneous columns into regression pairs.
///
/// Row `i` of the raw data is period `i+1`. The result pairs `raw_y[i]` with
/// `raw_x[i-1]` for `i = 1..N`, so `T = N - 1`.
pub fn build_sample(raw_y: &[f64], raw_x: &[f64]) -> Result<RegressionSample> {
    if raw_y.len() != raw_x.len() {
        return Err(Error::LengthMismatch {
            left: raw_y.len(),
            right: raw_x.len(),
        });
    }
    check_finite("y", raw_y)?;
    check_finite("x", raw_x)?;
    let n = raw_y.len();
    if n < MIN_OBSERVATIONS + 1 {
        return Err(Error::TooShort {
            got: n.saturating_sub(1),
            need: MIN_OBSERVATIONS,
        });
    }
    RegressionSample::new(raw_y[1..].to_vec(), raw_x[..n - 1].to_vec())
}

/// Recursive demeaning of both series with strictly past means.
///
/// Position `i >= 1` of the output holds
/// `x_lag[i] - mean(x_lag[..i])` and `y[i] - mean(y[..i])`; the first pair has
/// no past and is dropped, so `T` shrinks by one.
///
/// Subtracting the past mean of `y` introduces a predictable component in the
/// response whenever predictor and return shocks are correlated. The null
/// distribution of the sign statistic then shifts; prefer
/// [`recursive_demean_predictor`] for testing.
pub fn recursive_demean(sample: &RegressionSample) -> Result<RegressionSample> {
    ensure_demean_len(sample)?;
    let x = past_mean_deviations(&sample.x_lag);
    let y = past_mean_deviations(&sample.y);
    RegressionSample::new(y, x)
}

/// Recursive demeaning of the predictor only.
///
/// `x_lag[i] - mean(x_lag[..i])` stays measurable with respect to information
/// at `t-1`, so `sgn` of it remains a valid adapted instrument. The response is
/// passed through untouched (first pair dropped to keep alignment).
pub fn recursive_demean_predictor(sample: &RegressionSample) -> Result<RegressionSample> {
    ensure_demean_len(sample)?;
    let x = past_mean_deviations(&sample.x_lag);
    RegressionSample::new(sample.y[1..].to_vec(), x)
}

/// Subtracts full-sample means from both series; equivalent to fitting an
/// intercept before a no-intercept regression.
pub fn demean_full(sample: &RegressionSample) -> RegressionSample {
    let t = sample.len() as f64;
    let my = sample.y.iter().sum::<f64>() / t;
    let mx = sample.x_lag.iter().sum::<f64>() / t;
    RegressionSample {
        y: sample.y.iter().map(|v| v - my).collect(),
        x_lag: sample.x_lag.iter().map(|v| v - mx).collect(),
    }
}

/// Demeaning applied before a test statistic is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Demean {
    None,
    /// Predictor minus its strictly past mean; see [`recursive_demean_predictor`].
    #[default]
    Recursive,
    /// Both series minus their strictly past means; see [`recursive_demean`].
    RecursiveBoth,
    /// Full-sample means; see [`demean_full`].
    Full,
}

impl Demean {
    pub fn name(self) -> &'static str {
        match self {
            Demean::None => "none",
            Demean::Recursive => "recursive",
            Demean::RecursiveBoth => "recursive-both",
            Demean::Full => "full",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "none" => Some(Demean::None),
            "recursive" => Some(Demean::Recursive),
            "recursive-both" => Some(Demean::RecursiveBoth),
            "full" => Some(Demean::Full),
            _ => None,
        }
    }

    /// Number of leading pairs the transform drops.
    pub fn dropped(self) -> usize {
        match self {
            Demean::Recursive | Demean::RecursiveBoth => 1,
            Demean::None | Demean::Full => 0,
        }
    }

    pub fn apply(self, sample: &RegressionSample) -> Result<RegressionSample> {
        match self {
            Demean::None => Ok(sample.clone()),
            Demean::Recursive => recursive_demean_predictor(sample),
            Demean::RecursiveBoth => recursive_demean(sample),
            Demean::Full => Ok(demean_full(sample)),
        }
    }
}

fn ensure_demean_len(sample: &RegressionSample) -> Result<()> {
    if sample.len() < MIN_OBSERVATIONS + 1 {
        return Err(Error::TooShort {
            got: sample.len().saturating_sub(1),
            need: MIN_OBSERVATIONS,
        });
    }
    Ok(())
}

fn past_mean_deviations(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() - 1);
    let mut running = values[0];
    for (i, &v) in values.iter().enumerate().skip(1) {
        out.push(v - running / i as f64);
        running += v;
    }
    out
}
