//! Slope estimators: OLS, the sign-instrument (Cauchy) estimator and the
//! general nonlinear IV family they both belong to.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sample::RegressionSample;

/// Sign with the convention `sgn(0) = +1`.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Instrument-generating function `γ`.
#[derive(Clone)]
pub enum GammaTransform {
    Sign,
    Identity,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl GammaTransform {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        GammaTransform::Custom(Arc::new(f))
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            GammaTransform::Sign => sgn(x),
            GammaTransform::Identity => x,
            GammaTransform::Custom(f) => f(x),
        }
    }
}

impl fmt::Debug for GammaTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaTransform::Sign => f.write_str("Sign"),
            GammaTransform::Identity => f.write_str("Identity"),
            GammaTransform::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// `β̂ = Σ x_{t-1} y_t / Σ x²_{t-1}`, no intercept.
pub fn ols_fit(sample: &RegressionSample) -> Result<f64> {
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&y, &x) in sample.y().iter().zip(sample.x_lag()) {
        sxy += x * y;
        sxx += x * x;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateRegressor);
    }
    Ok(sxy / sxx)
}

/// `β̌ = Σ sgn(x_{t-1}) y_t / Σ |x_{t-1}|`.
pub fn cauchy_fit(sample: &RegressionSample) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (&y, &x) in sample.y().iter().zip(sample.x_lag()) {
        num += sgn(x) * y;
        den += x.abs();
    }
    if den == 0.0 {
        return Err(Error::DegenerateRegressor);
    }
    Ok(num / den)
}

/// `β̃(γ) = Σ γ(x_{t-1}) y_t / Σ γ(x_{t-1}) x_{t-1}`.
///
/// Reduces to [`ols_fit`] for `Identity` and [`cauchy_fit`] for `Sign`,
/// bit for bit.
pub fn nonlinear_iv_fit(sample: &RegressionSample, gamma: &GammaTransform) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (&y, &x) in sample.y().iter().zip(sample.x_lag()) {
        let g = gamma.apply(x);
        num += g * y;
        den += g * x;
    }
    if den == 0.0 || !den.is_finite() {
        return Err(Error::DegenerateInstrument);
    }
    Ok(num / den)
}

/// `û_t = y_t - β x_{t-1}`.
pub fn residuals(sample: &RegressionSample, beta: f64) -> Vec<f64> {
    sample
        .y()
        .iter()
        .zip(sample.x_lag())
        .map(|(&y, &x)| y - beta * x)
        .collect()
}
