//! Test statistics for `H0: β = 0` and their normal reference distribution.
//!
//! The main statistic is the volatility-corrected sign statistic
//!
//! ```text
//! τ(σ̂) = T^{-1/2} Σ_t sgn(x_{t-1}) y_t / σ̂(r_t)
//! ```
//!
//! which is asymptotically standard normal under the null whatever the
//! persistence of the predictor. [`tau_oracle`] plugs in the true volatility,
//! [`tau_nonlinear`] generalizes the instrument, and [`ols_t_stat`] is the
//! textbook t-ratio kept for comparison.

use crate::error::{Error, Result};
use crate::estimators::{nonlinear_iv_fit, ols_fit, residuals, sgn, GammaTransform};
use crate::kernels::{BandwidthSpec, KernelSpec};
use crate::normal::NormalDist;
use crate::sample::RegressionSample;
use crate::volatility::{variance_path, volatility_path, Alignment, VolatilityPath};

/// Nominal levels reported by default.
pub const DEFAULT_LEVELS: [f64; 3] = [0.01, 0.05, 0.10];

/// Relative floor below which an estimated variance counts as degenerate.
pub const VOLATILITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Alternative {
    #[default]
    TwoSided,
    /// `β > 0`: reject for large statistics.
    Greater,
    /// `β < 0`: reject for small statistics.
    Less,
}

impl Alternative {
    pub fn name(self) -> &'static str {
        match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Greater => "greater",
            Alternative::Less => "less",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "two-sided" => Some(Alternative::TwoSided),
            "greater" => Some(Alternative::Greater),
            "less" => Some(Alternative::Less),
            _ => None,
        }
    }

    pub fn p_value(self, stat: f64) -> f64 {
        let n = NormalDist;
        match self {
            Alternative::TwoSided => (2.0 * n.sf(stat.abs())).min(1.0),
            Alternative::Greater => n.sf(stat),
            Alternative::Less => n.cdf(stat),
        }
    }

    /// Maps a statistic so that rejection is always "large value".
    #[inline]
    pub fn orient(self, stat: f64) -> f64 {
        match self {
            Alternative::TwoSided => stat.abs(),
            Alternative::Greater => stat,
            Alternative::Less => -stat,
        }
    }

    /// Normal critical value on the oriented scale.
    pub fn critical_value(self, level: f64) -> f64 {
        let n = NormalDist;
        match self {
            Alternative::TwoSided => n.quantile(1.0 - level / 2.0),
            Alternative::Greater | Alternative::Less => n.quantile(1.0 - level),
        }
    }

    #[inline]
    pub fn rejects(self, stat: f64, critical: f64) -> bool {
        self.orient(stat) > critical
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    TauSigmaHat,
    TauOracle,
    TauNonlinearIv,
    OlsT,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::TauSigmaHat => "tau_sigma_hat",
            Method::TauOracle => "tau_oracle",
            Method::TauNonlinearIv => "tau_nonlinear_iv",
            Method::OlsT => "ols_t",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything needed to compute and report a test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSettings {
    pub kernel: KernelSpec,
    pub bandwidth: BandwidthSpec,
    pub alignment: Alignment,
    pub alternative: Alternative,
    pub levels: Vec<f64>,
}

impl Default for TestSettings {
    fn default() -> Self {
        Self {
            kernel: KernelSpec::default(),
            bandwidth: BandwidthSpec::default(),
            alignment: Alignment::default(),
            alternative: Alternative::default(),
            levels: DEFAULT_LEVELS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub bandwidth: Option<f64>,
    pub beta_ols: Option<f64>,
    pub beta_iv: Option<f64>,
    pub volatility: Option<VolatilityPath>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub method: Method,
    pub alternative: Alternative,
    /// `(level, rejected)` for each requested level.
    pub rejected_at: Vec<(f64, bool)>,
    pub diagnostics: Diagnostics,
}

impl TestOutcome {
    fn new(statistic: f64, method: Method, settings: &TestSettings, diagnostics: Diagnostics) -> Self {
        let alt = settings.alternative;
        let p_value = alt.p_value(statistic);
        let rejected_at = settings
            .levels
            .iter()
            .map(|&level| (level, p_value < level))
            .collect();
        Self {
            statistic,
            p_value,
            method,
            alternative: alt,
            rejected_at,
            diagnostics,
        }
    }

    pub fn rejected(&self, level: f64) -> Option<bool> {
        self.rejected_at
            .iter()
            .find(|(l, _)| (l - level).abs() < 1e-12)
            .map(|&(_, r)| r)
    }
}

fn all_zero(values: &[f64]) -> bool {
    values.iter().all(|&v| v == 0.0)
}

/// `Σ sgn(x_{t-1}) y_t / σ̂(r_t)` scaled by `T^{-1/2}`, given the variance path.
fn sign_statistic(sample: &RegressionSample, variances: &[f64], floor: f64) -> Result<f64> {
    let mut sum = 0.0;
    for (i, ((&y, &x), &v)) in sample.y().iter().zip(sample.x_lag()).zip(variances).enumerate() {
        if !(v > floor) {
            return Err(Error::DegenerateVolatility {
                index: i,
                value: v,
                floor,
            });
        }
        sum += sgn(x) * y / v.sqrt();
    }
    Ok(sum / (sample.len() as f64).sqrt())
}

/// The feasible statistic alone; the allocation-light path used by the
/// Monte Carlo engine.
pub fn tau_sigma_hat_statistic(
    sample: &RegressionSample,
    kernel: KernelSpec,
    h: f64,
    alignment: Alignment,
) -> Result<f64> {
    if all_zero(sample.y()) {
        return Ok(0.0);
    }
    let beta = ols_fit(sample)?;
    let sq: Vec<f64> = residuals(sample, beta).iter().map(|u| u * u).collect();
    let max_sq = sq.iter().cloned().fold(0.0, f64::max);
    let var = variance_path(&sq, kernel, h, alignment)?;
    sign_statistic(sample, &var, VOLATILITY_FLOOR * max_sq)
}

/// Feasible robust test `τ(σ̂)` with OLS residuals and a one-sided kernel
/// volatility estimate.
pub fn tau_sigma_hat(sample: &RegressionSample, settings: &TestSettings) -> Result<TestOutcome> {
    let h = settings.bandwidth.resolve(sample.len())?;
    let beta = ols_fit(sample)?;
    let statistic = tau_sigma_hat_statistic(sample, settings.kernel, h, settings.alignment)?;
    let volatility = if all_zero(sample.y()) {
        None
    } else {
        Some(volatility_path(sample, beta, settings.kernel, h, settings.alignment)?)
    };
    let diagnostics = Diagnostics {
        bandwidth: Some(h),
        beta_ols: Some(beta),
        beta_iv: crate::estimators::cauchy_fit(sample).ok(),
        volatility,
    };
    Ok(TestOutcome::new(statistic, Method::TauSigmaHat, settings, diagnostics))
}

pub fn tau_oracle_statistic(sample: &RegressionSample, true_vol: &VolatilityPath) -> Result<f64> {
    if true_vol.len() != sample.len() {
        return Err(Error::LengthMismatch {
            left: sample.len(),
            right: true_vol.len(),
        });
    }
    let mut sum = 0.0;
    for ((&y, &x), &v) in sample.y().iter().zip(sample.x_lag()).zip(true_vol.values()) {
        if !(v > 0.0) {
            return Err(Error::ZeroVolatility { r: 0.0 });
        }
        sum += sgn(x) * y / v;
    }
    Ok(sum / (sample.len() as f64).sqrt())
}

/// Infeasible `τ(v)` using the true volatility `v_t` of each observation.
pub fn tau_oracle(
    sample: &RegressionSample,
    true_vol: &VolatilityPath,
    settings: &TestSettings,
) -> Result<TestOutcome> {
    let statistic = tau_oracle_statistic(sample, true_vol)?;
    Ok(TestOutcome::new(statistic, Method::TauOracle, settings, Diagnostics::default()))
}

/// `Σγ(x)y / (Σγ²(x))^{1/2}`, which equals
/// `Σγ(x)x / (Σγ²(x))^{1/2} · β̃(γ)` whenever `Σγ(x)x ≠ 0`.
pub fn tau_nonlinear_statistic(sample: &RegressionSample, gamma: &GammaTransform) -> Result<f64> {
    let (mut num, mut g2) = (0.0, 0.0);
    for (&y, &x) in sample.y().iter().zip(sample.x_lag()) {
        let g = gamma.apply(x);
        num += g * y;
        g2 += g * g;
    }
    if g2 == 0.0 || !g2.is_finite() {
        return Err(Error::DegenerateInstrument);
    }
    Ok(num / g2.sqrt())
}

/// Nonlinear IV statistic `τ̃(γ)` without volatility correction.
pub fn tau_nonlinear(
    sample: &RegressionSample,
    gamma: &GammaTransform,
    settings: &TestSettings,
) -> Result<TestOutcome> {
    let statistic = tau_nonlinear_statistic(sample, gamma)?;
    let diagnostics = Diagnostics {
        beta_iv: nonlinear_iv_fit(sample, gamma).ok(),
        ..Diagnostics::default()
    };
    Ok(TestOutcome::new(statistic, Method::TauNonlinearIv, settings, diagnostics))
}

/// `β̂ / (s (Σx²)^{-1/2})` with `s² = Σû²/(T-1)`.
///
/// A perfect fit gives `±∞` (sign of `β̂`); an all-zero response gives 0.
pub fn ols_t_statistic(sample: &RegressionSample) -> Result<f64> {
    let beta = ols_fit(sample)?;
    let sxx: f64 = sample.x_lag().iter().map(|x| x * x).sum();
    let ssr: f64 = residuals(sample, beta).iter().map(|u| u * u).sum();
    let s = (ssr / (sample.len() - 1) as f64).sqrt();
    if s == 0.0 {
        return Ok(if beta == 0.0 {
            0.0
        } else {
            beta.signum() * f64::INFINITY
        });
    }
    Ok(beta / (s / sxx.sqrt()))
}

/// Conventional homoskedastic OLS t-test, normal critical values.
pub fn ols_t_stat(sample: &RegressionSample, settings: &TestSettings) -> Result<TestOutcome> {
    let statistic = ols_t_statistic(sample)?;
    let diagnostics = Diagnostics {
        beta_ols: ols_fit(sample).ok(),
        ..Diagnostics::default()
    };
    Ok(TestOutcome::new(statistic, Method::OlsT, settings, diagnostics))
}

/// Minimum number of null draws for an empirical critical value.
pub const MIN_NULL_DRAWS: usize = 1000;

/// Empirical `(1 - level)` quantile of `|stat|` under the null.
pub fn size_adjusted_cv(null_statistics: &[f64], level: f64) -> Result<f64> {
    size_adjusted_cv_for(null_statistics, level, Alternative::TwoSided)
}

/// Empirical critical value on the oriented scale of `alternative`.
///
/// Chosen so that at most `⌊level·n⌋` null draws lie strictly above it
/// (exactly that many without ties).
pub fn size_adjusted_cv_for(null_statistics: &[f64], level: f64, alternative: Alternative) -> Result<f64> {
    if null_statistics.len() < MIN_NULL_DRAWS {
        return Err(Error::InsufficientNullDraws {
            got: null_statistics.len(),
            need: MIN_NULL_DRAWS,
        });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidConfig(format!("level {level} outside (0, 1)")));
    }
    let mut oriented: Vec<f64> = null_statistics.iter().map(|&s| alternative.orient(s)).collect();
    oriented.sort_by(f64::total_cmp);
    let n = oriented.len();
    let above = ((level * n as f64) + 1e-9).floor() as usize;
    Ok(oriented[n - above - 1])
}
