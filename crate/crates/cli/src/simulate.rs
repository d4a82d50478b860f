//! `predrobust simulate`: write a simulated dataset as CSV.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use serde::Deserialize;

use predrobust::dgp::{ContinuousVol, DgpConfig, DiscreteVol, SimulatedDataset};
use predrobust::Seed;

use crate::config::{resolve_seed, seed_note, Echo, FileConfig};
use crate::models::{echo_dgp, ModelArgs};
use crate::{usage, Outcome};

/// Options that may also come from the `[simulate]` table of a config file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateOpts {
    /// Predictability under the alternative: the slope is beta/T [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Output CSV path
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub opts: SimulateOpts,

    /// Master seed; drawn from entropy and printed when omitted
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Break fraction of an SB design, if any.
fn sb_break(dgp: &DgpConfig) -> Option<(f64, f64, f64)> {
    match dgp {
        DgpConfig::Discrete(c) => match c.vol {
            DiscreteVol::Sb { sigma0, sigma1, break_frac } => Some((sigma0, sigma1, break_frac)),
            _ => None,
        },
        DgpConfig::Continuous(c) => match c.vol {
            ContinuousVol::Sb { sigma0, sigma1, break_frac } => Some((sigma0, sigma1, break_frac)),
            _ => None,
        },
    }
}

fn mean_sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>() / v.len() as f64
}

/// Late over early mean squares of returns and of the true volatility.
fn variance_ratio(data: &SimulatedDataset, break_frac: f64) -> Option<(f64, f64)> {
    let n = data.sample.len();
    let cut = (break_frac * n as f64).ceil() as usize;
    if cut < 2 || cut + 2 > n {
        return None;
    }
    let y = data.sample.y();
    let v = data.true_vol.values();
    // skip the interval that straddles the break
    let (early, late) = (..cut - 1, cut + 1..);
    Some((
        mean_sq(&y[late.clone()]) / mean_sq(&y[early]),
        mean_sq(&v[late]) / mean_sq(&v[early]),
    ))
}

pub fn run(args: SimulateArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let model = args.model.or(&file.model);
    let beta = args.opts.beta.or(file.simulate.beta).unwrap_or(0.0);
    let out = args
        .opts
        .out
        .or_else(|| file.simulate.out.clone())
        .ok_or_else(|| usage("missing required flag --out"))?;
    let dgp = model.dgp(beta)?;
    let (seed, chosen) = resolve_seed(args.seed, file);

    let mut echo = Echo::new("simulate");
    echo_dgp(&mut echo, &dgp);
    echo.add("seed", seed_note(seed, chosen));
    echo.add("out", out.display());
    echo.print();

    let data = dgp.simulate_seeded(Seed::new(seed))?;
    let f = File::create(&out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut w = BufWriter::new(f);
    data.write_csv(&mut w)
        .and_then(|_| w.flush())
        .with_context(|| format!("cannot write {}", out.display()))?;
    println!("wrote {} rows ({} regression pairs) to {}", data.sample.len() + 1, data.sample.len(), out.display());

    if let Some((s0, s1, frac)) = sb_break(&dgp) {
        if let Some((sample, truth)) = variance_ratio(&data, frac) {
            println!(
                "smoke check: late/early variance ratio = {sample:.2} (true volatility {truth:.2}, design {:.2})",
                (s1 / s0).powi(2)
            );
        }
    }
    Ok(Outcome::Done)
}
