//! Robust testing for return predictability.
//!
//! The sign of the lagged predictor is used as an instrument, and each return
//! is standardized by a one-sided kernel estimate of its volatility. The
//! resulting statistic is asymptotically standard normal under the null of no
//! predictability, whether the predictor is stationary, near-integrated or
//! integrated, and under persistent, breaking or switching volatility.
//!
//! Modules:
//! - [`sample`]: aligned `(y_t, x_{t-1})` samples and demeaning
//! - [`kernels`]: one-sided kernels and bandwidth rules
//! - [`estimators`]: OLS, sign-IV and nonlinear IV slopes
//! - [`volatility`]: kernel volatility path and its decomposition
//! - [`inference`]: test statistics and critical values
//! - [`dgp`]: discrete- and continuous-time simulation designs
//! - [`montecarlo`]: size tables and size-adjusted power curves

pub mod dgp;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod kernels;
pub mod montecarlo;
pub mod normal;
pub mod sample;
pub mod seed;
pub mod volatility;

pub use error::{Error, Result};
pub use estimators::{cauchy_fit, nonlinear_iv_fit, ols_fit, sgn, GammaTransform};
pub use inference::{
    ols_t_stat, size_adjusted_cv, size_adjusted_cv_for, tau_nonlinear, tau_oracle, tau_sigma_hat,
    Alternative, Method, TestOutcome, TestSettings,
};
pub use kernels::{BandwidthSpec, KernelFamily, KernelSpec};
pub use normal::NormalDist;
pub use sample::{build_sample, recursive_demean, Demean, recursive_demean_predictor, RegressionSample};
pub use seed::Seed;
pub use volatility::{Alignment, PathKind, VolatilityPath};
