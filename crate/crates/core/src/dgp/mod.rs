//! Simulation designs for predictive regressions.
//!
//! Both designs pair a near-integrated predictor with returns whose shocks are
//! strongly negatively correlated with the predictor's shocks, and let the
//! common volatility be constant, break, follow a GARCH recursion, a
//! geometric Brownian motion, or switch regimes.

mod continuous;
mod discrete;

use std::io::{self, Write};

use rand::{Rng, RngExt};
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::sample::RegressionSample;
use crate::seed::Seed;
use crate::volatility::VolatilityPath;

pub use continuous::{
    simulate_continuous, ContinuousDgpConfig, ContinuousVol, GbmDiffusion, Sampling, MONTHLY_STRIDE,
};
pub use discrete::{simulate_discrete, DiscreteDgpConfig, DiscreteVol};

/// Correlation between return and predictor shocks used throughout the designs.
pub const DEFAULT_SHOCK_CORRELATION: f64 = -0.98;

/// `(z1, z2)` standard normal with correlation `rho`.
#[inline]
pub fn correlated_pair<R: Rng + ?Sized>(rng: &mut R, rho: f64) -> (f64, f64) {
    let z1: f64 = rng.sample(StandardNormal);
    let w: f64 = rng.sample(StandardNormal);
    (z1, rho * z1 + (1.0 - rho * rho).sqrt() * w)
}

/// A simulated sample together with its ground truth.
#[derive(Debug, Clone)]
pub struct SimulatedDataset {
    pub sample: RegressionSample,
    /// Conditional standard deviation of each `y_t`.
    pub true_vol: VolatilityPath,
    /// Standardized return shocks, `u_t / v_t`.
    pub true_eps: Vec<f64>,
    /// Slope actually used, `β̄/T`.
    pub true_beta: f64,
    /// Predictor at the final date (not part of any pair).
    pub x_last: f64,
    pub description: String,
}

impl SimulatedDataset {
    /// Writes rows `t = 0..T` with contemporaneous `y_t`, `x_t` and `v_t`.
    ///
    /// Row 0 carries `y_0 = 0` and an empty volatility, so reading the `y`
    /// and `x` columns back through [`crate::build_sample`] reproduces
    /// [`Self::sample`] exactly.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,y,x,true_vol")?;
        let x = self.sample.x_lag();
        writeln!(out, "0,0,{},", x[0])?;
        let n = self.sample.len();
        for t in 1..=n {
            let x_t = if t < n { x[t] } else { self.x_last };
            writeln!(
                out,
                "{t},{},{},{}",
                self.sample.y()[t - 1],
                x_t,
                self.true_vol.values()[t - 1]
            )?;
        }
        Ok(())
    }
}

/// Either simulation design.
#[derive(Debug, Clone, PartialEq)]
pub enum DgpConfig {
    Discrete(DiscreteDgpConfig),
    Continuous(ContinuousDgpConfig),
}

impl DgpConfig {
    pub fn simulate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SimulatedDataset> {
        match self {
            DgpConfig::Discrete(c) => simulate_discrete(c, rng),
            DgpConfig::Continuous(c) => simulate_continuous(c, rng),
        }
    }

    pub fn simulate_seeded(&self, seed: Seed) -> Result<SimulatedDataset> {
        self.simulate(&mut seed.rng())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DgpConfig::Discrete(c) => c.validate(),
            DgpConfig::Continuous(c) => c.validate(),
        }
    }

    pub fn beta_bar(&self) -> f64 {
        match self {
            DgpConfig::Discrete(c) => c.beta_bar,
            DgpConfig::Continuous(c) => c.beta_bar,
        }
    }

    pub fn kappa_bar(&self) -> f64 {
        match self {
            DgpConfig::Discrete(c) => c.kappa_bar,
            DgpConfig::Continuous(c) => c.kappa_bar,
        }
    }

    pub fn with_beta_bar(&self, beta_bar: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            DgpConfig::Discrete(c) => c.beta_bar = beta_bar,
            DgpConfig::Continuous(c) => c.beta_bar = beta_bar,
        }
        out
    }

    /// Sample-size label: observations for discrete designs, years for
    /// continuous ones.
    pub fn size_label(&self) -> usize {
        match self {
            DgpConfig::Discrete(c) => c.t,
            DgpConfig::Continuous(c) => c.years,
        }
    }

    pub fn model_label(&self) -> String {
        match self {
            DgpConfig::Discrete(c) => c.vol.label(),
            DgpConfig::Continuous(c) => c.vol.label(),
        }
    }
}
