use rand::{Rng, RngExt};
use rand_distr::StandardNormal;

use super::{SimulatedDataset, DEFAULT_SHOCK_CORRELATION};
use crate::error::{Error, Result};
use crate::sample::RegressionSample;
use crate::volatility::{PathKind, VolatilityPath};

/// Trading days per month under the default daily step.
pub const MONTHLY_STRIDE: usize = 21;

const GBM_VARIANCE_FLOOR: f64 = 1e-8;

/// Scale of the GBM variance diffusion term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GbmDiffusion {
    /// `ω̄/√T`
    #[default]
    OmegaOverSqrtT,
    /// `ω̄²/√T`
    OmegaSqOverSqrtT,
}

impl GbmDiffusion {
    pub fn name(&self) -> &'static str {
        match self {
            GbmDiffusion::OmegaOverSqrtT => "omega",
            GbmDiffusion::OmegaSqOverSqrtT => "omega-sq",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "omega" => Some(GbmDiffusion::OmegaOverSqrtT),
            "omega-sq" => Some(GbmDiffusion::OmegaSqOverSqrtT),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousVol {
    Cnst,
    /// Level `σ0` before `t/T = break_frac`, `σ1` from then on.
    Sb { sigma0: f64, sigma1: f64, break_frac: f64 },
    /// Variance follows a geometric Brownian motion started at 1.
    Gbm { omega_bar: f64, rho_w1z: f64, diffusion: GbmDiffusion },
    /// Two-state chain whose transition matrix decays from the identity
    /// towards `base` at rate `λ̄/T`.
    Rs {
        lambda_bar: f64,
        sigma0: f64,
        sigma1: f64,
        base: [[f64; 2]; 2],
        decay: [[f64; 2]; 2],
    },
}

impl ContinuousVol {
    pub fn sb_default() -> Self {
        ContinuousVol::Sb {
            sigma0: 1.0,
            sigma1: 4.0,
            break_frac: 0.8,
        }
    }

    pub fn gbm_default(diffusion: GbmDiffusion) -> Self {
        ContinuousVol::Gbm {
            omega_bar: 9.0,
            rho_w1z: -0.4,
            diffusion,
        }
    }

    pub fn rs_default() -> Self {
        ContinuousVol::Rs {
            lambda_bar: 60.0,
            sigma0: 1.0,
            sigma1: 4.0,
            base: [[0.8, 0.2], [0.8, 0.2]],
            decay: [[0.2, -0.2], [-0.8, 0.8]],
        }
    }

    pub fn label(&self) -> String {
        match self {
            ContinuousVol::Cnst => "CNST".into(),
            ContinuousVol::Sb { .. } => "SB".into(),
            ContinuousVol::Gbm {
                diffusion: GbmDiffusion::OmegaOverSqrtT,
                ..
            } => "GBM".into(),
            ContinuousVol::Gbm {
                diffusion: GbmDiffusion::OmegaSqOverSqrtT,
                ..
            } => "GBM-sq".into(),
            ContinuousVol::Rs { .. } => "RS".into(),
        }
    }
}

/// Probability of state 1 under the stationary law of `p`.
fn invariant_state1(p: &[[f64; 2]; 2]) -> f64 {
    let up = p[0][1];
    let down = p[1][0];
    if up + down == 0.0 {
        0.0
    } else {
        up / (up + down)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Daily,
    /// Keep every `n`-th step, summing return increments in between.
    Stride(usize),
}

impl Sampling {
    fn stride(self) -> usize {
        match self {
            Sampling::Daily => 1,
            Sampling::Stride(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousDgpConfig {
    /// Span in years, `T`.
    pub years: usize,
    /// Euler step in years.
    pub delta: f64,
    pub beta_bar: f64,
    pub kappa_bar: f64,
    pub rho_w1w2: f64,
    pub vol: ContinuousVol,
    pub sampling: Sampling,
}

impl ContinuousDgpConfig {
    pub fn new(years: usize, beta_bar: f64, kappa_bar: f64, vol: ContinuousVol) -> Self {
        Self {
            years,
            delta: 1.0 / 252.0,
            beta_bar,
            kappa_bar,
            rho_w1w2: DEFAULT_SHOCK_CORRELATION,
            vol,
            sampling: Sampling::Stride(MONTHLY_STRIDE),
        }
    }

    /// Number of Euler steps.
    pub fn steps(&self) -> usize {
        (self.years as f64 / self.delta).round() as usize
    }

    /// Number of regression pairs after sampling.
    pub fn observations(&self) -> usize {
        self.steps() / self.sampling.stride()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.years == 0 {
            return bad("years must be positive".into());
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad(format!("delta = {}", self.delta));
        }
        let steps = self.years as f64 / self.delta;
        if (steps - steps.round()).abs() > 1e-6 * steps.max(1.0) {
            return bad(format!("years/delta = {steps} is not an integer"));
        }
        let stride = self.sampling.stride();
        if stride == 0 {
            return bad("sampling stride must be positive".into());
        }
        if !self.steps().is_multiple_of(stride) {
            return bad(format!("{} steps not divisible by stride {stride}", self.steps()));
        }
        if self.observations() < 10 {
            return bad(format!("only {} sampled observations", self.observations()));
        }
        if !(self.kappa_bar >= 0.0 && self.kappa_bar.is_finite() && self.beta_bar.is_finite()) {
            return bad("kappa_bar must be non-negative and beta_bar finite".into());
        }
        if !(self.rho_w1w2.abs() < 1.0) {
            return bad(format!("|rho_w1w2| = {} >= 1", self.rho_w1w2.abs()));
        }
        match self.vol {
            ContinuousVol::Cnst => {}
            ContinuousVol::Sb {
                sigma0,
                sigma1,
                break_frac,
            } => {
                if !(sigma0 > 0.0 && sigma1 > 0.0 && break_frac > 0.0 && break_frac < 1.0) {
                    return bad("SB needs positive levels and a break inside (0, 1)".into());
                }
            }
            ContinuousVol::Gbm { omega_bar, rho_w1z, .. } => {
                if !(omega_bar >= 0.0 && omega_bar.is_finite()) {
                    return bad(format!("omega_bar = {omega_bar}"));
                }
                if !(rho_w1z.abs() < 1.0) {
                    return bad(format!("|rho_w1z| = {} >= 1", rho_w1z.abs()));
                }
            }
            ContinuousVol::Rs {
                lambda_bar,
                sigma0,
                sigma1,
                base,
                decay,
            } => {
                if !(lambda_bar >= 0.0 && sigma0 > 0.0 && sigma1 > 0.0) {
                    return bad("RS needs lambda_bar >= 0 and positive levels".into());
                }
                for w in [0.0, 1.0] {
                    for i in 0..2 {
                        let row = [base[i][0] + decay[i][0] * w, base[i][1] + decay[i][1] * w];
                        if row.iter().any(|p| !(-1e-12..=1.0 + 1e-12).contains(p))
                            || (row[0] + row[1] - 1.0).abs() > 1e-9
                        {
                            return bad("RS transition rows must be probability vectors".into());
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Euler–Maruyama simulation at step `δ` over `[0, T]`, sampled per
/// `config.sampling`. The regression pairs each sampled return increment
/// with the predictor at the start of its interval.
pub fn simulate_continuous<R: Rng + ?Sized>(config: &ContinuousDgpConfig, rng: &mut R) -> Result<SimulatedDataset> {
    config.validate()?;
    let big_t = config.years as f64;
    let delta = config.delta;
    let sqrt_delta = delta.sqrt();
    let steps = config.steps();
    let stride = config.sampling.stride();
    let n_obs = steps / stride;
    let slope = config.beta_bar / big_t;
    let mean_rev = config.kappa_bar / big_t;
    let rho = config.rho_w1w2;
    let rho_c = (1.0 - rho * rho).sqrt();

    let mut var: f64 = 1.0;
    let mut state1 = match &config.vol {
        ContinuousVol::Rs { base, .. } => rng.random::<f64>() < invariant_state1(base),
        _ => false,
    };

    let mut y = Vec::with_capacity(n_obs);
    let mut x_lag = Vec::with_capacity(n_obs);
    let mut vol = Vec::with_capacity(n_obs);
    let mut eps = Vec::with_capacity(n_obs);

    let mut x = 0.0;
    let (mut dy, mut du, mut qv) = (0.0, 0.0, 0.0f64);
    let mut x_start = x;
    for k in 0..steps {
        let t_k = k as f64 * delta;
        let sigma = match config.vol {
            ContinuousVol::Cnst => 1.0,
            ContinuousVol::Sb {
                sigma0,
                sigma1,
                break_frac,
            } => {
                if t_k / big_t >= break_frac {
                    sigma1
                } else {
                    sigma0
                }
            }
            ContinuousVol::Gbm { .. } => var.sqrt(),
            ContinuousVol::Rs { sigma0, sigma1, .. } => {
                if state1 {
                    sigma1
                } else {
                    sigma0
                }
            }
        };

        let w1: f64 = rng.sample(StandardNormal);
        let e2: f64 = rng.sample(StandardNormal);
        let w2 = rho * w1 + rho_c * e2;

        let shock = sigma * sqrt_delta * w1;
        dy += slope * x * delta + shock;
        du += shock;
        qv += sigma * sigma * delta;
        x += -mean_rev * x * delta + sigma * sqrt_delta * w2;

        match config.vol {
            ContinuousVol::Gbm {
                omega_bar,
                rho_w1z,
                diffusion,
            } => {
                let e3: f64 = rng.sample(StandardNormal);
                let z = rho_w1z * w1 + (1.0 - rho_w1z * rho_w1z).sqrt() * e3;
                let scale = match diffusion {
                    GbmDiffusion::OmegaOverSqrtT => omega_bar / big_t.sqrt(),
                    GbmDiffusion::OmegaSqOverSqrtT => omega_bar * omega_bar / big_t.sqrt(),
                };
                var += 0.5 * (omega_bar * omega_bar / big_t) * var * delta + scale * var * sqrt_delta * z;
                if !var.is_finite() {
                    return Err(Error::VolatilityUnderflow { step: k + 1 });
                }
                if var < GBM_VARIANCE_FLOOR {
                    var = 2.0 * GBM_VARIANCE_FLOOR - var;
                }
            }
            ContinuousVol::Rs {
                lambda_bar,
                base,
                decay,
                ..
            } => {
                let w = (-lambda_bar * t_k / big_t).exp();
                let row = usize::from(state1);
                let p_to_1 = base[row][1] + decay[row][1] * w;
                state1 = rng.random::<f64>() < p_to_1;
            }
            _ => {}
        }

        if (k + 1) % stride == 0 {
            let v = qv.sqrt();
            y.push(dy);
            x_lag.push(x_start);
            vol.push(v);
            eps.push(du / v);
            x_start = x;
            dy = 0.0;
            du = 0.0;
            qv = 0.0;
        }
    }

    Ok(SimulatedDataset {
        sample: RegressionSample::new(y, x_lag)?,
        true_vol: VolatilityPath::new(vol, PathKind::TrueSimulated)?,
        true_eps: eps,
        true_beta: slope * delta * stride as f64,
        x_last: x,
        description: format!(
            "continuous {} years={} delta={} stride={} beta_bar={} kappa_bar={} rho={}",
            config.vol.label(),
            config.years,
            delta,
            stride,
            config.beta_bar,
            config.kappa_bar,
            rho
        ),
    })
}
