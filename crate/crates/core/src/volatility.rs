//! One-sided kernel estimation of the residual volatility path.
//!
//! `σ̂²(r) = Σ û²_t K_h(r - t/T) / Σ K_h(r - t/T)` for `r >= h`, and
//! `σ̂²(r) = σ̂²(h)` on `[0, h)`. With a one-sided kernel the estimate at `r`
//! only involves residuals with `t/T <= r`.

use crate::error::{Error, Result};
use crate::estimators::{ols_fit, residuals};
use crate::kernels::{index_weight, window_range, KernelSpec};
use crate::sample::RegressionSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Estimated,
    TrueSimulated,
}

/// Volatility attached to each observation `t = 1..T`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityPath {
    values: Vec<f64>,
    kind: PathKind,
}

impl VolatilityPath {
    pub fn new(values: Vec<f64>, kind: PathKind) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::ZeroVolatility {
                r: i as f64 / values.len() as f64,
            });
        }
        Ok(Self { values, kind })
    }

    /// Constant path `v_t = level`.
    pub fn constant(level: f64, len: usize, kind: PathKind) -> Result<Self> {
        Self::new(vec![level; len], kind)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| c * v).collect(), self.kind)
    }
}

/// Point at which the volatility for observation `t` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Alignment {
    /// `r_t = t/T`: the window ends at (and includes) observation `t`. The
    /// weight of `û_t` enters only through `û_t²`, which keeps the sign
    /// statistic's summands conditionally symmetric.
    #[default]
    Current,
    /// `r_t = (t-1)/T`: the window ends at `t-1`.
    Lagged,
}

impl Alignment {
    pub fn name(self) -> &'static str {
        match self {
            Alignment::Current => "current",
            Alignment::Lagged => "lagged",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "current" => Some(Alignment::Current),
            "lagged" => Some(Alignment::Lagged),
            _ => None,
        }
    }

    /// Index-scale position `r_t·T` for 1-based observation `t`.
    #[inline]
    pub fn position(self, t: usize) -> f64 {
        match self {
            Alignment::Current => t as f64,
            Alignment::Lagged => (t - 1) as f64,
        }
    }
}

/// Kernel-weighted mean of `values` at index position `pos` (window `span`).
/// `None` when the total weight is zero.
#[inline]
fn smooth_at(values: &[f64], kernel: KernelSpec, pos: f64, span: f64) -> Option<f64> {
    let (lo, hi) = window_range(pos, span, values.len())?;
    let (mut num, mut den) = (0.0, 0.0);
    for t in lo..=hi {
        let w = index_weight(kernel, pos, span, t);
        num += w * values[t - 1];
        den += w;
    }
    (den > 0.0).then(|| num / den)
}

fn check_squares(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        Some(index) => Err(Error::NonFinite {
            column: "residuals_sq",
            index,
        }),
        None => Ok(()),
    }
}

/// `σ̂²(r)` from squared residuals, with the boundary rule on `[0, h)`.
pub fn volatility_estimate(residuals_sq: &[f64], r: f64, kernel: KernelSpec, h: f64) -> Result<f64> {
    check_squares(residuals_sq)?;
    let n = residuals_sq.len() as f64;
    let r = r.max(h);
    let value = smooth_at(residuals_sq, kernel, r * n, h * n).ok_or(Error::EmptyWindow { r })?;
    if value == 0.0 {
        return Err(Error::ZeroVolatility { r });
    }
    Ok(value)
}

/// `σ̂²` at every observation's evaluation point.
///
/// Entries may be zero; callers decide how to treat degenerate windows.
pub fn variance_path(
    residuals_sq: &[f64],
    kernel: KernelSpec,
    h: f64,
    alignment: Alignment,
) -> Result<Vec<f64>> {
    check_squares(residuals_sq)?;
    let n = residuals_sq.len();
    let span = h * n as f64;
    let boundary = smooth_at(residuals_sq, kernel, span, span).ok_or(Error::EmptyWindow { r: h })?;
    (1..=n)
        .map(|t| {
            let pos = alignment.position(t);
            if pos < span {
                Ok(boundary)
            } else {
                smooth_at(residuals_sq, kernel, pos, span).ok_or(Error::EmptyWindow {
                    r: pos / n as f64,
                })
            }
        })
        .collect()
}

/// Estimated volatility `σ̂(r_t)` for residuals `û_t = y_t - β x_{t-1}`.
pub fn volatility_path(
    sample: &RegressionSample,
    beta: f64,
    kernel: KernelSpec,
    h: f64,
    alignment: Alignment,
) -> Result<VolatilityPath> {
    let sq: Vec<f64> = residuals(sample, beta).iter().map(|u| u * u).collect();
    let var = variance_path(&sq, kernel, h, alignment)?;
    let n = sample.len() as f64;
    let values = var
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v > 0.0 {
                Ok(v.sqrt())
            } else {
                Err(Error::ZeroVolatility {
                    r: alignment.position(i + 1) / n,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    VolatilityPath::new(values, PathKind::Estimated)
}

/// The four pieces of `σ̂²(r)` when the data-generating process is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolatilityComponents {
    /// Kernel average of the conditional variance `v_t²`.
    pub conditional: f64,
    /// Kernel average of the martingale part `v_t²(ε_t² - 1)`.
    pub martingale: f64,
    /// `(β̂-β)²` times the kernel average of `x²_{t-1}`.
    pub slope_sq: f64,
    /// `-2(β̂-β)` times the kernel average of `x_{t-1}u_t`.
    pub cross: f64,
}

impl VolatilityComponents {
    pub fn total(&self) -> f64 {
        self.conditional + self.martingale + self.slope_sq + self.cross
    }
}

/// Splits `σ̂²(r)` into bias, variance and slope-estimation pieces, with `β̂`
/// the full-sample OLS slope.
pub fn decompose_volatility(
    sample: &RegressionSample,
    true_beta: f64,
    true_vol: &VolatilityPath,
    true_eps: &[f64],
    kernel: KernelSpec,
    h: f64,
    r: f64,
) -> Result<VolatilityComponents> {
    let beta_hat = ols_fit(sample)?;
    decompose_with_estimate(sample, beta_hat, true_beta, true_vol, true_eps, kernel, h, r)
}

/// [`decompose_volatility`] with a caller-supplied slope estimate.
#[allow(clippy::too_many_arguments)]
pub fn decompose_with_estimate(
    sample: &RegressionSample,
    beta_hat: f64,
    true_beta: f64,
    true_vol: &VolatilityPath,
    true_eps: &[f64],
    kernel: KernelSpec,
    h: f64,
    r: f64,
) -> Result<VolatilityComponents> {
    let n = sample.len();
    for len in [true_vol.len(), true_eps.len()] {
        if len != n {
            return Err(Error::LengthMismatch { left: n, right: len });
        }
    }
    let r = r.max(h);
    let (pos, span) = (r * n as f64, h * n as f64);
    let (lo, hi) = window_range(pos, span, n).ok_or(Error::EmptyWindow { r })?;

    let (x, y, v) = (sample.x_lag(), sample.y(), true_vol.values());
    let d = beta_hat - true_beta;
    let mut acc = [0.0f64; 4];
    let mut den = 0.0;
    for t in lo..=hi {
        let w = index_weight(kernel, pos, span, t);
        let i = t - 1;
        let v2 = v[i] * v[i];
        let u = y[i] - true_beta * x[i];
        acc[0] += w * v2;
        acc[1] += w * v2 * (true_eps[i] * true_eps[i] - 1.0);
        acc[2] += w * x[i] * x[i];
        acc[3] += w * x[i] * u;
        den += w;
    }
    if den == 0.0 {
        return Err(Error::EmptyWindow { r });
    }
    Ok(VolatilityComponents {
        conditional: acc[0] / den,
        martingale: acc[1] / den,
        slope_sq: d * d * acc[2] / den,
        cross: -2.0 * d * acc[3] / den,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelFamily;

    fn uniform() -> KernelSpec {
        KernelSpec::new(KernelFamily::Uniform)
    }

    #[test]
    fn constant_squares_give_constant_estimate() {
        let sq = vec![2.5; 50];
        for family in KernelFamily::ALL {
            for &r in &[0.0, 0.1, 0.33, 0.9, 1.0] {
                let v = volatility_estimate(&sq, r, KernelSpec::new(family), 0.2).unwrap();
                assert!((v - 2.5).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn boundary_rule_copies_value_at_h() {
        let sq: Vec<f64> = (1..=40).map(|t| (t as f64).sqrt()).collect();
        let k = KernelSpec::new(KernelFamily::Epanechnikov);
        assert_eq!(
            volatility_estimate(&sq, 0.2, k, 0.3).unwrap(),
            volatility_estimate(&sq, 0.3, k, 0.3).unwrap()
        );
    }

    #[test]
    fn uniform_window_mean() {
        // T = 10, h = 0.3, r = 0.5: t ∈ {2,3,4,5}
        let sq: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(volatility_estimate(&sq, 0.5, uniform(), 0.3).unwrap(), 3.5);
    }

    #[test]
    fn zero_window_is_flagged() {
        let mut sq = vec![1.0; 20];
        sq[5..10].iter_mut().for_each(|v| *v = 0.0);
        let err = volatility_estimate(&sq, 0.5, uniform(), 0.2).unwrap_err();
        assert!(matches!(err, Error::ZeroVolatility { .. }));
    }

    #[test]
    fn exact_fit_has_zero_volatility() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.7).sin()).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.5 * v).collect();
        let s = RegressionSample::new(y, x).unwrap();
        let err = volatility_path(&s, 1.5, KernelSpec::default(), 0.2, Alignment::Lagged).unwrap_err();
        assert!(matches!(err, Error::ZeroVolatility { .. }));
    }

    #[test]
    fn first_entry_uses_boundary_value() {
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).cos()).collect();
        let y: Vec<f64> = (0..40).map(|i| (i as f64 * 1.91).sin() + 0.1).collect();
        let s = RegressionSample::new(y, x).unwrap();
        let k = KernelSpec::new(KernelFamily::Quartic);
        let path = volatility_path(&s, 0.2, k, 0.25, Alignment::Lagged).unwrap();
        let sq: Vec<f64> = residuals(&s, 0.2).iter().map(|u| u * u).collect();
        let at_h = volatility_estimate(&sq, 0.25, k, 0.25).unwrap().sqrt();
        assert_eq!(path.values()[0], at_h);
    }

    #[test]
    fn alignments_differ_by_one_index() {
        let sq: Vec<f64> = (1..=60).map(|t| 1.0 + (t % 7) as f64).collect();
        let k = KernelSpec::new(KernelFamily::HalfEpanechnikov);
        let cur = variance_path(&sq, k, 0.2, Alignment::Current).unwrap();
        let lag = variance_path(&sq, k, 0.2, Alignment::Lagged).unwrap();
        // past the boundary region, lagged entry t+1 equals current entry t
        for t in 13..59 {
            assert_eq!(lag[t], cur[t - 1]);
        }
    }

    #[test]
    fn future_perturbation_is_invisible() {
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.61).sin()).collect();
        let y: Vec<f64> = (0..50).map(|i| (i as f64 * 1.3).cos()).collect();
        let s = RegressionSample::new(y.clone(), x.clone()).unwrap();
        let k = KernelSpec::new(KernelFamily::Epanechnikov);
        let base = volatility_path(&s, 0.3, k, 0.2, Alignment::Lagged).unwrap();
        for s_idx in [25usize, 40, 49] {
            let mut y2 = y.clone();
            y2[s_idx] += 10.0;
            let p = volatility_path(&RegressionSample::new(y2, x.clone()).unwrap(), 0.3, k, 0.2, Alignment::Lagged)
                .unwrap();
            // observation s_idx+1 (1-based); lagged entries t <= s_idx+1 only see t-1 < s_idx+1
            for t in 11..=(s_idx + 1) {
                assert_eq!(p.values()[t - 1], base.values()[t - 1], "t = {t}");
            }
        }
    }

    #[test]
    fn forced_true_slope_kills_estimation_terms() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.4).sin()).collect();
        let eps: Vec<f64> = (0..30).map(|i| (i as f64 * 2.1).cos()).collect();
        let y: Vec<f64> = x.iter().zip(&eps).map(|(x, e)| 0.5 * x + e).collect();
        let s = RegressionSample::new(y, x).unwrap();
        let v = VolatilityPath::constant(1.0, 30, PathKind::TrueSimulated).unwrap();
        let c = decompose_with_estimate(&s, 0.5, 0.5, &v, &eps, uniform(), 0.3, 0.8).unwrap();
        assert_eq!(c.slope_sq, 0.0);
        assert_eq!(c.cross, 0.0);
    }

    #[test]
    fn balanced_shocks_cancel_martingale_part() {
        // window at r = 0.5, h = 0.2, T = 20 covers t = 6..=10; ε² averages to 1 there
        let mut eps = vec![0.3; 20];
        for (i, e) in [0.0, 2f64.sqrt(), 0.0, 2f64.sqrt(), 1.0].iter().enumerate() {
            eps[5 + i] = *e;
        }
        let x: Vec<f64> = (0..20).map(|i| i as f64 - 9.5).collect();
        let s = RegressionSample::new(eps.clone(), x).unwrap();
        let v = VolatilityPath::constant(1.0, 20, PathKind::TrueSimulated).unwrap();
        let c = decompose_volatility(&s, 0.0, &v, &eps, uniform(), 0.2, 0.5).unwrap();
        assert!(c.martingale.abs() < 1e-15, "{}", c.martingale);
    }
}
