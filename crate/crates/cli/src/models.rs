//! Volatility designs selectable from the command line.

use clap::Args;
use serde::Deserialize;

use predrobust::dgp::{
    ContinuousDgpConfig, ContinuousVol, DgpConfig, DiscreteDgpConfig, DiscreteVol, GbmDiffusion, Sampling,
};

use crate::config::Echo;
use crate::usage;

pub const DISCRETE_MODELS: [&str; 5] = ["cnst", "sb", "arch", "garch", "igarch"];
pub const CONTINUOUS_MODELS: [&str; 5] = ["cnst", "sb", "rs", "gbm", "gbm-sq"];

/// Design flags shared by `simulate` and `reproduce --power`; the `[model]`
/// table of a config file uses the same keys.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelArgs {
    /// Volatility design. Discrete: cnst, sb, arch, garch, igarch. Continuous: cnst, sb, rs, gbm, gbm-sq
    #[arg(long)]
    pub model: Option<String>,
    /// Number of regression pairs (discrete-time design)
    #[arg(long = "T", value_name = "T")]
    #[serde(rename = "T")]
    pub t: Option<usize>,
    /// Span in years (continuous-time design, monthly sampling)
    #[arg(long)]
    pub years: Option<usize>,
    /// Local-to-unity parameter: the predictor's root is 1 - kappa/T
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Correlation of return and predictor shocks [default: -0.98]
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    /// Volatility before the break (sb) or in the low state (rs) [default: 1]
    #[arg(long)]
    pub sigma0: Option<f64>,
    /// Volatility after the break (sb) or in the high state (rs) [default: 4]
    #[arg(long)]
    pub sigma1: Option<f64>,
    /// Break date as a fraction of the sample (sb) [default: 0.8]
    #[arg(long)]
    pub break_frac: Option<f64>,
    /// ARCH coefficient (arch, garch, igarch)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// GARCH persistence coefficient (garch) [default: 0.8]
    #[arg(long)]
    pub garch_beta: Option<f64>,
    /// Volatility-of-volatility scale (gbm, gbm-sq) [default: 9]
    #[arg(long)]
    pub omega: Option<f64>,
    /// Correlation of return and variance shocks (gbm, gbm-sq) [default: -0.4]
    #[arg(long, allow_hyphen_values = true)]
    pub rho_w1z: Option<f64>,
    /// Speed at which regime persistence decays (rs) [default: 60]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Euler step in years (continuous) [default: 1/252]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Keep every Euler step instead of monthly sampling (continuous)
    #[arg(long)]
    #[serde(default)]
    pub daily: bool,
}

impl ModelArgs {
    /// Flags first, then the config file.
    pub fn or(self, file: &ModelArgs) -> ModelArgs {
        ModelArgs {
            model: self.model.or_else(|| file.model.clone()),
            t: self.t.or(file.t),
            years: self.years.or(file.years),
            kappa: self.kappa.or(file.kappa),
            rho: self.rho.or(file.rho),
            sigma0: self.sigma0.or(file.sigma0),
            sigma1: self.sigma1.or(file.sigma1),
            break_frac: self.break_frac.or(file.break_frac),
            alpha: self.alpha.or(file.alpha),
            garch_beta: self.garch_beta.or(file.garch_beta),
            omega: self.omega.or(file.omega),
            rho_w1z: self.rho_w1z.or(file.rho_w1z),
            lambda: self.lambda.or(file.lambda),
            delta: self.delta.or(file.delta),
            daily: self.daily || file.daily,
        }
    }

    pub fn dgp(&self, beta_bar: f64) -> anyhow::Result<DgpConfig> {
        let name = self
            .model
            .as_deref()
            .ok_or_else(|| usage("missing required flag --model"))?
            .to_ascii_lowercase();
        let kappa = self.kappa.unwrap_or(0.0);
        let sigma0 = self.sigma0.unwrap_or(1.0);
        let sigma1 = self.sigma1.unwrap_or(4.0);
        let break_frac = self.break_frac.unwrap_or(0.8);
        let dgp = match (self.t, self.years) {
            (Some(_), Some(_)) => return Err(usage("give either --T or --years, not both")),
            (None, None) => {
                return Err(usage(
                    "missing required flag --T (discrete design) or --years (continuous design)",
                ))
            }
            (Some(t), None) => {
                let vol = match name.as_str() {
                    "cnst" => DiscreteVol::Cnst,
                    "sb" => DiscreteVol::Sb { sigma0, sigma1, break_frac },
                    "arch" => DiscreteVol::Garch {
                        alpha: self.alpha.unwrap_or(0.5773),
                        beta: 0.0,
                    },
                    "garch" => DiscreteVol::Garch {
                        alpha: self.alpha.unwrap_or(0.1),
                        beta: self.garch_beta.unwrap_or(0.8),
                    },
                    "igarch" => {
                        let alpha = self.alpha.unwrap_or(0.1);
                        DiscreteVol::Garch { alpha, beta: 1.0 - alpha }
                    }
                    m if CONTINUOUS_MODELS.contains(&m) => {
                        return Err(usage(format!("model `{m}` is a continuous-time design; use --years")))
                    }
                    m => return Err(unknown_model(m)),
                };
                let mut c = DiscreteDgpConfig::new(t, beta_bar, kappa, vol);
                if let Some(r) = self.rho {
                    c.rho_eps_eta = r;
                }
                DgpConfig::Discrete(c)
            }
            (None, Some(years)) => {
                let vol = match name.as_str() {
                    "cnst" => ContinuousVol::Cnst,
                    "sb" => ContinuousVol::Sb { sigma0, sigma1, break_frac },
                    "rs" => match ContinuousVol::rs_default() {
                        ContinuousVol::Rs { lambda_bar, base, decay, .. } => ContinuousVol::Rs {
                            lambda_bar: self.lambda.unwrap_or(lambda_bar),
                            sigma0,
                            sigma1,
                            base,
                            decay,
                        },
                        other => other,
                    },
                    "gbm" | "gbm-sq" => ContinuousVol::Gbm {
                        omega_bar: self.omega.unwrap_or(9.0),
                        rho_w1z: self.rho_w1z.unwrap_or(-0.4),
                        diffusion: if name == "gbm" {
                            GbmDiffusion::OmegaOverSqrtT
                        } else {
                            GbmDiffusion::OmegaSqOverSqrtT
                        },
                    },
                    m if DISCRETE_MODELS.contains(&m) => {
                        return Err(usage(format!("model `{m}` is a discrete-time design; use --T")))
                    }
                    m => return Err(unknown_model(m)),
                };
                let mut c = ContinuousDgpConfig::new(years, beta_bar, kappa, vol);
                if let Some(r) = self.rho {
                    c.rho_w1w2 = r;
                }
                if let Some(d) = self.delta {
                    c.delta = d;
                }
                if self.daily {
                    c.sampling = Sampling::Daily;
                }
                DgpConfig::Continuous(c)
            }
        };
        dgp.validate().map_err(|e| usage(e.to_string()))?;
        Ok(dgp)
    }
}

fn unknown_model(m: &str) -> anyhow::Error {
    usage(format!(
        "unknown model `{m}` (discrete: {}; continuous: {})",
        DISCRETE_MODELS.join(", "),
        CONTINUOUS_MODELS.join(", ")
    ))
}

pub fn echo_dgp(echo: &mut Echo, dgp: &DgpConfig) {
    echo.add("model", dgp.model_label());
    match dgp {
        DgpConfig::Discrete(c) => {
            echo.add("design", "discrete");
            echo.add("T", c.t);
            echo.add("kappa", c.kappa_bar);
            echo.add("beta", c.beta_bar);
            echo.add("rho", c.rho_eps_eta);
            echo.add("volatility", format!("{:?}", c.vol));
        }
        DgpConfig::Continuous(c) => {
            echo.add("design", "continuous");
            echo.add("years", c.years);
            echo.add("observations", c.observations());
            echo.add("delta", c.delta);
            echo.add("sampling", format!("{:?}", c.sampling));
            echo.add("kappa", c.kappa_bar);
            echo.add("beta", c.beta_bar);
            echo.add("rho", c.rho_w1w2);
            echo.add("volatility", format!("{:?}", c.vol));
        }
    }
}
