//! One-sided kernels on `[0, 1]` and bandwidth rules.
//!
//! A kernel weight `K_h(r - t/T) = K((r - t/T)/h)` is positive only for
//! `t/T ∈ [r - h, r]`, so a smoother built from these weights at `r` never
//! looks at observations after `r`.
//!
//! Internally positions are measured on the index scale (`pos = r·T`,
//! `span = h·T`), which keeps window endpoints exact on the `t/T` grid.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    /// `6s(1-s)`; vanishes at both ends.
    Epanechnikov,
    /// `30s²(1-s)²`; vanishes at both ends.
    Quartic,
    /// `1` on `[0,1]`; jumps at both ends.
    Uniform,
    /// `1.5(1-s²)`; largest weight on the most recent observation, jumps at 0.
    HalfEpanechnikov,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 4] = [
        KernelFamily::Epanechnikov,
        KernelFamily::Quartic,
        KernelFamily::Uniform,
        KernelFamily::HalfEpanechnikov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Quartic => "quartic",
            KernelFamily::Uniform => "uniform",
            KernelFamily::HalfEpanechnikov => "half-epanechnikov",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Smallest `K̄` with `|K(r)-K(s)| <= K̄|r-s|` on the whole line, if any.
    pub fn lipschitz_bound(self) -> Option<f64> {
        match self {
            KernelFamily::Epanechnikov => Some(6.0),
            // max |60 s(1-s)(1-2s)| at s = (3 ± √3)/6
            KernelFamily::Quartic => Some(10.0 / 3f64.sqrt()),
            KernelFamily::Uniform | KernelFamily::HalfEpanechnikov => None,
        }
    }

    /// `∫₀¹ K(s)² ds`.
    pub fn square_integral(self) -> f64 {
        match self {
            KernelFamily::Epanechnikov => 1.2,
            KernelFamily::Quartic => 10.0 / 7.0,
            KernelFamily::Uniform => 1.0,
            KernelFamily::HalfEpanechnikov => 1.2,
        }
    }

    #[inline]
    fn eval_inside(self, s: f64) -> f64 {
        match self {
            KernelFamily::Epanechnikov => 6.0 * s * (1.0 - s),
            KernelFamily::Quartic => {
                let q = s * (1.0 - s);
                30.0 * q * q
            }
            KernelFamily::Uniform => 1.0,
            KernelFamily::HalfEpanechnikov => 1.5 * (1.0 - s * s),
        }
    }
}

impl std::fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
}

impl KernelSpec {
    pub fn new(family: KernelFamily) -> Self {
        Self { family }
    }

    /// Accepts only kernels that are Lipschitz on the whole real line.
    pub fn strict(family: KernelFamily) -> Result<Self> {
        match family.lipschitz_bound() {
            Some(_) => Ok(Self { family }),
            None => Err(Error::NonLipschitzKernel(family.name())),
        }
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.family.lipschitz_bound()
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self::new(KernelFamily::HalfEpanechnikov)
    }
}

/// `K(s)`, exactly zero outside the closed interval `[0, 1]`.
#[inline]
pub fn kernel_value(spec: KernelSpec, s: f64) -> f64 {
    if (0.0..=1.0).contains(&s) {
        spec.family.eval_inside(s)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthSpec {
    Explicit(f64),
    /// `h = c·T^{-α}`.
    Rate { c: f64, alpha: f64 },
}

impl Default for BandwidthSpec {
    fn default() -> Self {
        BandwidthSpec::Rate {
            c: 1.0,
            alpha: 1.0 / 3.0,
        }
    }
}

impl BandwidthSpec {
    /// Resolves `h` for sample size `t` and checks `0 < h < 1`, `h·T >= 2`.
    pub fn resolve(&self, t: usize) -> Result<f64> {
        let h = match *self {
            BandwidthSpec::Explicit(h) => h,
            BandwidthSpec::Rate { c, alpha } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidBandwidth(format!("rate constant c = {c}")));
                }
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::InvalidBandwidth(format!("rate exponent α = {alpha}")));
                }
                c * (t as f64).powf(-alpha)
            }
        };
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidBandwidth(format!("h = {h} outside (0, 1)")));
        }
        if h * (t as f64) < 2.0 {
            return Err(Error::InvalidBandwidth(format!(
                "h·T = {:.3} < 2 for T = {t}",
                h * t as f64
            )));
        }
        Ok(h)
    }

    /// Whether the rule sits inside the admissible rate band `0 < α < 1/2`.
    /// Explicit bandwidths are not judged.
    pub fn in_admissible_band(&self) -> bool {
        match *self {
            BandwidthSpec::Explicit(_) => true,
            BandwidthSpec::Rate { alpha, .. } => alpha > 0.0 && alpha < 0.5,
        }
    }
}

/// Which power of the kernel a window sum uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelPower {
    One,
    Two,
}

/// Index range `lo..=hi` (1-based) of `t` with `t ∈ [pos - span, pos]`,
/// clipped to `1..=n`. `None` when empty.
#[inline]
pub(crate) fn window_range(pos: f64, span: f64, n: usize) -> Option<(usize, usize)> {
    let lo = (pos - span).ceil().max(1.0);
    let hi = pos.floor().min(n as f64);
    if hi < lo {
        None
    } else {
        Some((lo as usize, hi as usize))
    }
}

/// Weight of index `t` at position `pos` with window length `span`.
#[inline]
pub(crate) fn index_weight(spec: KernelSpec, pos: f64, span: f64, t: usize) -> f64 {
    kernel_value(spec, (pos - t as f64) / span)
}

/// Weights `w_t = K_h(r - t/T)` for `t = 1..T`.
///
/// Errors with [`Error::EmptyWindow`] if `r >= h` and every weight is zero.
pub fn weight_row(spec: KernelSpec, h: f64, r: f64, t: usize) -> Result<Vec<f64>> {
    let n = t as f64;
    let (pos, span) = (r * n, h * n);
    let mut w = vec![0.0; t];
    if let Some((lo, hi)) = window_range(pos, span, t) {
        for i in lo..=hi {
            w[i - 1] = index_weight(spec, pos, span, i);
        }
    }
    if r >= h && w.iter().all(|&v| v == 0.0) {
        return Err(Error::EmptyWindow { r });
    }
    Ok(w)
}

/// `(hT)^{-1} Σ_t K_h(r - t/T)^p`.
pub fn normalized_kernel_sum(spec: KernelSpec, h: f64, r: f64, t: usize, power: KernelPower) -> f64 {
    let n = t as f64;
    let (pos, span) = (r * n, h * n);
    let Some((lo, hi)) = window_range(pos, span, t) else {
        return 0.0;
    };
    let sum: f64 = (lo..=hi)
        .map(|i| {
            let k = index_weight(spec, pos, span, i);
            match power {
                KernelPower::One => k,
                KernelPower::Two => k * k,
            }
        })
        .sum();
    sum / span
}

/// `sup_{r ∈ grid} |(hT)^{-1} Σ_t K_h(r - t/T) - 1|`.
pub fn riemann_sum_error(spec: KernelSpec, h: f64, t: usize, grid: &[f64]) -> f64 {
    riemann_sum_error_pow(spec, h, t, grid, KernelPower::One)
}

/// Same as [`riemann_sum_error`] for `K^p`, compared with `∫₀¹ K^p`.
pub fn riemann_sum_error_pow(
    spec: KernelSpec,
    h: f64,
    t: usize,
    grid: &[f64],
    power: KernelPower,
) -> f64 {
    let target = match power {
        KernelPower::One => 1.0,
        KernelPower::Two => spec.family.square_integral(),
    };
    grid.iter()
        .map(|&r| (normalized_kernel_sum(spec, h, r, t, power) - target).abs())
        .fold(0.0, f64::max)
}
