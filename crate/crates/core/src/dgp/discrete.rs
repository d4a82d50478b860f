use rand::Rng;

use super::{correlated_pair, SimulatedDataset, DEFAULT_SHOCK_CORRELATION};
use crate::error::{Error, Result};
use crate::sample::RegressionSample;
use crate::volatility::{PathKind, VolatilityPath};

/// Volatility of both shocks in the discrete design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiscreteVol {
    Cnst,
    /// `σ_t = σ0 + (σ1 - σ0)·1{t/T >= break_frac}`.
    Sb { sigma0: f64, sigma1: f64, break_frac: f64 },
    /// `σ²_t = 1 + α u²_{t-1} + β σ²_{t-1}`, separately for each shock.
    Garch { alpha: f64, beta: f64 },
}

impl DiscreteVol {
    pub fn sb_default() -> Self {
        DiscreteVol::Sb {
            sigma0: 1.0,
            sigma1: 4.0,
            break_frac: 0.8,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            DiscreteVol::Cnst => "CNST".into(),
            DiscreteVol::Sb { .. } => "SB".into(),
            DiscreteVol::Garch { alpha, beta: 0.0 } => format!("ARCH({alpha})"),
            DiscreteVol::Garch { alpha, beta } if (alpha + beta - 1.0).abs() < 1e-12 => {
                format!("IGARCH({alpha},{beta})")
            }
            DiscreteVol::Garch { alpha, beta } => format!("GARCH({alpha},{beta})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDgpConfig {
    /// Number of regression pairs `T`.
    pub t: usize,
    /// Slope is `β̄/T`.
    pub beta_bar: f64,
    /// Autoregressive root is `1 - κ̄/T`.
    pub kappa_bar: f64,
    pub rho_eps_eta: f64,
    pub vol: DiscreteVol,
    /// Use the standardized shock `ε²_{t-1}` in the GARCH α term instead of
    /// the scaled `u²_{t-1}`.
    pub garch_raw_innovation: bool,
    /// Presample GARCH steps discarded before `t = 1`.
    pub burn_in: usize,
}

impl DiscreteDgpConfig {
    pub fn new(t: usize, beta_bar: f64, kappa_bar: f64, vol: DiscreteVol) -> Self {
        Self {
            t,
            beta_bar,
            kappa_bar,
            rho_eps_eta: DEFAULT_SHOCK_CORRELATION,
            vol,
            garch_raw_innovation: false,
            burn_in: 200,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.t < 10 {
            return bad(format!("T = {} < 10", self.t));
        }
        if !(self.kappa_bar >= 0.0 && self.kappa_bar.is_finite()) {
            return bad(format!("kappa_bar = {}", self.kappa_bar));
        }
        if !self.beta_bar.is_finite() {
            return bad("beta_bar not finite".into());
        }
        if !(self.rho_eps_eta.abs() < 1.0) {
            return bad(format!("|rho| = {} >= 1", self.rho_eps_eta.abs()));
        }
        match self.vol {
            DiscreteVol::Cnst => {}
            DiscreteVol::Sb {
                sigma0,
                sigma1,
                break_frac,
            } => {
                if !(sigma0 > 0.0 && sigma1 > 0.0) {
                    return bad("SB volatilities must be positive".into());
                }
                if !(break_frac > 0.0 && break_frac < 1.0) {
                    return bad(format!("break fraction {break_frac} outside (0, 1)"));
                }
            }
            DiscreteVol::Garch { alpha, beta } => {
                if !(alpha >= 0.0 && beta >= 0.0) {
                    return bad("GARCH coefficients must be non-negative".into());
                }
            }
        }
        Ok(())
    }
}

struct GarchState {
    var: f64,
}

impl GarchState {
    fn new(alpha: f64, beta: f64) -> Self {
        let persistence = alpha + beta;
        Self {
            var: if persistence < 1.0 { 1.0 / (1.0 - persistence) } else { 1.0 },
        }
    }

    #[inline]
    fn advance(&mut self, alpha: f64, beta: f64, shock: f64, raw: bool) {
        let innov = if raw { shock * shock } else { self.var * shock * shock };
        self.var = 1.0 + alpha * innov + beta * self.var;
    }
}

/// `y_t = (β̄/T) x_{t-1} + σ_{ε,t} ε_t`, `x_t = (1 - κ̄/T) x_{t-1} + σ_{η,t} η_t`,
/// `x_0 = 0`, for `t = 1..T`.
pub fn simulate_discrete<R: Rng + ?Sized>(config: &DiscreteDgpConfig, rng: &mut R) -> Result<SimulatedDataset> {
    config.validate()?;
    let n = config.t;
    let nf = n as f64;
    let beta = config.beta_bar / nf;
    let root = 1.0 - config.kappa_bar / nf;
    let rho = config.rho_eps_eta;

    let mut garch = match config.vol {
        DiscreteVol::Garch { alpha, beta } => {
            let mut eps = GarchState::new(alpha, beta);
            let mut eta = GarchState::new(alpha, beta);
            for _ in 0..config.burn_in {
                let (e, h) = correlated_pair(rng, rho);
                eps.advance(alpha, beta, e, config.garch_raw_innovation);
                eta.advance(alpha, beta, h, config.garch_raw_innovation);
            }
            Some((alpha, beta, eps, eta))
        }
        _ => None,
    };

    let mut y = Vec::with_capacity(n);
    let mut x_lag = Vec::with_capacity(n);
    let mut vol = Vec::with_capacity(n);
    let mut eps_out = Vec::with_capacity(n);
    let mut x = 0.0;
    for t in 1..=n {
        let (e, h) = correlated_pair(rng, rho);
        let (sig_e, sig_h) = match (&config.vol, &garch) {
            (DiscreteVol::Cnst, _) => (1.0, 1.0),
            (
                &DiscreteVol::Sb {
                    sigma0,
                    sigma1,
                    break_frac,
                },
                _,
            ) => {
                let s = if t as f64 / nf >= break_frac { sigma1 } else { sigma0 };
                (s, s)
            }
            (DiscreteVol::Garch { .. }, Some((_, _, ge, gh))) => (ge.var.sqrt(), gh.var.sqrt()),
            (DiscreteVol::Garch { .. }, None) => unreachable!(),
        };
        y.push(beta * x + sig_e * e);
        x_lag.push(x);
        vol.push(sig_e);
        eps_out.push(e);
        x = root * x + sig_h * h;
        if let Some((a, b, ge, gh)) = garch.as_mut() {
            ge.advance(*a, *b, e, config.garch_raw_innovation);
            gh.advance(*a, *b, h, config.garch_raw_innovation);
            if !(ge.var.is_finite() && gh.var.is_finite()) {
                return Err(Error::VolatilityUnderflow { step: t });
            }
        }
    }

    Ok(SimulatedDataset {
        sample: RegressionSample::new(y, x_lag)?,
        true_vol: VolatilityPath::new(vol, PathKind::TrueSimulated)?,
        true_eps: eps_out,
        true_beta: beta,
        x_last: x,
        description: format!(
            "discrete {} T={} beta_bar={} kappa_bar={} rho={}",
            config.vol.label(),
            n,
            config.beta_bar,
            config.kappa_bar,
            rho
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::Seed;

    #[test]
    fn zero_slope_returns_are_centered() {
        let cfg = DiscreteDgpConfig::new(1000, 0.0, 0.0, DiscreteVol::Cnst);
        let seed = Seed::new(5);
        let mut sum = 0.0;
        let mut count = 0usize;
        for rep in 0..1000 {
            let d = simulate_discrete(&cfg, &mut seed.substream(0, rep)).unwrap();
            sum += d.sample.y().iter().sum::<f64>();
            count += d.sample.len();
        }
        let mean = sum / count as f64;
        assert!(mean.abs() < 0.01, "{mean}");
    }

    #[test]
    fn random_walk_variance() {
        // x_T of a unit-variance random walk has variance T
        let cfg = DiscreteDgpConfig::new(200, 0.0, 0.0, DiscreteVol::Cnst);
        let seed = Seed::new(6);
        let reps = 10_000;
        let finals: Vec<f64> = (0..reps)
            .map(|r| simulate_discrete(&cfg, &mut seed.substream(0, r)).unwrap().x_last)
            .collect();
        let var = finals.iter().map(|x| x * x).sum::<f64>() / reps as f64;
        let ratio = var / 200.0;
        assert!((0.9..=1.1).contains(&ratio), "{ratio}");
    }

    #[test]
    fn structural_break_variance_ratio() {
        let cfg = DiscreteDgpConfig::new(500, 0.0, 0.0, DiscreteVol::sb_default());
        let seed = Seed::new(7);
        let (mut late, mut nl, mut early, mut ne) = (0.0, 0usize, 0.0, 0usize);
        for rep in 0..400 {
            let d = simulate_discrete(&cfg, &mut seed.substream(0, rep)).unwrap();
            for (i, y) in d.sample.y().iter().enumerate() {
                if (i + 1) as f64 / 500.0 >= 0.8 {
                    late += y * y;
                    nl += 1;
                } else {
                    early += y * y;
                    ne += 1;
                }
            }
        }
        let ratio = (late / nl as f64) / (early / ne as f64);
        assert!((14.0..=18.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn garch_long_run_mean() {
        let (alpha, beta) = (0.1, 0.8);
        let mut state = GarchState::new(alpha, beta);
        let mut rng = Seed::new(8).rng();
        let steps = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..steps {
            acc += state.var;
            let (e, _) = correlated_pair(&mut rng, 0.0);
            state.advance(alpha, beta, e, false);
        }
        let ratio = acc / steps as f64 * (1.0 - alpha - beta);
        assert!((0.95..=1.05).contains(&ratio), "{ratio}");
    }

    #[test]
    fn volatility_is_positive_for_every_model() {
        let models = [
            DiscreteVol::Cnst,
            DiscreteVol::sb_default(),
            DiscreteVol::Garch { alpha: 0.5773, beta: 0.0 },
            DiscreteVol::Garch { alpha: 0.9, beta: 0.1 },
            DiscreteVol::Garch { alpha: 0.1, beta: 0.9 },
        ];
        for vol in models {
            let cfg = DiscreteDgpConfig::new(600, 0.0, 5.0, vol);
            for rep in 0..50 {
                let d = simulate_discrete(&cfg, &mut Seed::new(9).substream(1, rep)).unwrap();
                assert!(d.true_vol.values().iter().all(|v| *v > 0.0 && v.is_finite()));
            }
        }
    }

    #[test]
    fn returns_decompose_into_truth() {
        let cfg = DiscreteDgpConfig::new(60, 12.0, 5.0, DiscreteVol::Garch { alpha: 0.3, beta: 0.5 });
        let d = simulate_discrete(&cfg, &mut Seed::new(10).rng()).unwrap();
        for i in 0..60 {
            let rebuilt = d.true_beta * d.sample.x_lag()[i] + d.true_vol.values()[i] * d.true_eps[i];
            assert_eq!(rebuilt, d.sample.y()[i]);
        }
        assert_eq!(d.sample.x_lag()[0], 0.0);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = DiscreteDgpConfig::new(5, 0.0, 0.0, DiscreteVol::Cnst);
        assert!(cfg.validate().is_err());
        cfg.t = 60;
        cfg.rho_eps_eta = 1.0;
        assert!(cfg.validate().is_err());
        cfg.rho_eps_eta = -0.5;
        cfg.vol = DiscreteVol::Garch { alpha: -0.1, beta: 0.5 };
        assert!(cfg.validate().is_err());
        cfg.vol = DiscreteVol::Sb { sigma0: 1.0, sigma1: 4.0, break_frac: 1.0 };
        assert!(cfg.validate().is_err());
    }
}
