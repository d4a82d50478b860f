//! `predrobust test`: the robust test on observed data.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use serde::Deserialize;

use predrobust::inference::DEFAULT_LEVELS;
use predrobust::volatility::{PathKind, VolatilityPath};
use predrobust::{
    build_sample, ols_t_stat, tau_nonlinear, tau_oracle, tau_sigma_hat, Alignment, Alternative, BandwidthSpec,
    Demean, GammaTransform, KernelFamily, KernelSpec, RegressionSample, TestOutcome, TestSettings,
};

use crate::config::{check_levels, join, parse_named, Echo, FileConfig};
use crate::input::{read_series, InputError, Series};
use crate::{usage, Outcome};

const METHODS: [&str; 4] = ["tau", "ols", "nonlinear", "oracle"];

/// Options that may also come from the `[test]` table of a config file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestOpts {
    /// One-sided kernel: half-epanechnikov, epanechnikov, quartic, uniform
    #[arg(long)]
    pub kernel: Option<String>,
    /// Fixed bandwidth h in (0, 1)
    #[arg(long, conflicts_with = "bandwidth_rate")]
    pub bandwidth: Option<f64>,
    /// Bandwidth rule h = C * T^(-ALPHA) [default: 1 0.3333]
    #[arg(long, num_args = 2, value_names = ["C", "ALPHA"])]
    pub bandwidth_rate: Option<Vec<f64>>,
    /// Volatility evaluation point: current (t/T) or lagged ((t-1)/T)
    #[arg(long)]
    pub alignment: Option<String>,
    /// Demeaning before the sign statistic: none, recursive, recursive-both, full [default: recursive]
    #[arg(long)]
    pub demean: Option<String>,
    /// Comma-separated methods: tau, ols, nonlinear, oracle (needs a true_vol column). The first is primary [default: tau,ols]
    #[arg(long, value_delimiter = ',')]
    pub method: Option<Vec<String>>,
    /// Comma-separated nominal levels [default: 0.01,0.05,0.1]
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// two-sided, greater or less [default: two-sided]
    #[arg(long)]
    pub alternative: Option<String>,
    /// Level used by --gate [default: 0.05]
    #[arg(long)]
    pub primary_level: Option<f64>,
    /// Exit with status 2 when the primary method rejects at the primary level
    #[arg(long)]
    #[serde(default)]
    pub gate: bool,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// CSV with `y` and `x` header columns, one row per period in time order
    pub csv: PathBuf,

    #[command(flatten)]
    pub opts: TestOpts,

    /// Write the estimated volatility path as CSV (`-` for stdout)
    #[arg(long, value_name = "PATH")]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum TestMethod {
    Tau,
    Ols,
    Nonlinear,
    Oracle,
}

impl TestMethod {
    fn from_name(s: &str) -> Option<Self> {
        match s {
            "tau" | "tau_sigma_hat" => Some(TestMethod::Tau),
            "ols" | "ols_t" => Some(TestMethod::Ols),
            "nonlinear" | "tau_nonlinear_iv" => Some(TestMethod::Nonlinear),
            "oracle" | "tau_oracle" => Some(TestMethod::Oracle),
            _ => None,
        }
    }
}

struct Resolved {
    settings: TestSettings,
    demean: Demean,
    methods: Vec<TestMethod>,
    primary_level: f64,
    gate: bool,
}

fn resolve(opts: TestOpts, file: &TestOpts) -> anyhow::Result<Resolved> {
    let kernel_names: Vec<&str> = KernelFamily::ALL.iter().map(|k| k.name()).collect();
    let kernel = match opts.kernel.as_ref().or(file.kernel.as_ref()) {
        Some(k) => KernelSpec::new(parse_named("kernel", k, KernelFamily::from_name, &kernel_names)?),
        None => KernelSpec::default(),
    };
    let rate = |v: &Vec<f64>| match v.as_slice() {
        &[c, alpha] => Ok(BandwidthSpec::Rate { c, alpha }),
        _ => Err(usage("bandwidth_rate needs exactly two numbers: C and ALPHA")),
    };
    let bandwidth = match (&opts.bandwidth, &opts.bandwidth_rate, &file.bandwidth, &file.bandwidth_rate) {
        (Some(h), _, _, _) => BandwidthSpec::Explicit(*h),
        (None, Some(r), _, _) => rate(r)?,
        (None, None, Some(_), Some(_)) => {
            return Err(usage("config file sets both bandwidth and bandwidth_rate"))
        }
        (None, None, Some(h), None) => BandwidthSpec::Explicit(*h),
        (None, None, None, Some(r)) => rate(r)?,
        (None, None, None, None) => BandwidthSpec::default(),
    };
    let alignment = match opts.alignment.as_ref().or(file.alignment.as_ref()) {
        Some(a) => parse_named("alignment", a, Alignment::from_name, &["current", "lagged"])?,
        None => Alignment::default(),
    };
    let demean = match opts.demean.as_ref().or(file.demean.as_ref()) {
        Some(d) => parse_named(
            "demeaning",
            d,
            Demean::from_name,
            &["none", "recursive", "recursive-both", "full"],
        )?,
        None => Demean::Recursive,
    };
    let alternative = match opts.alternative.as_ref().or(file.alternative.as_ref()) {
        Some(a) => parse_named("alternative", a, Alternative::from_name, &["two-sided", "greater", "less"])?,
        None => Alternative::TwoSided,
    };
    let method_names = opts
        .method
        .or_else(|| file.method.clone())
        .unwrap_or_else(|| vec!["tau".into(), "ols".into()]);
    let mut methods = Vec::new();
    for name in &method_names {
        let m = parse_named("method", name.trim(), TestMethod::from_name, &METHODS)?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(usage("no method selected"));
    }
    let mut levels = opts.levels.or_else(|| file.levels.clone()).unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
    check_levels(&levels)?;
    let primary_level = opts.primary_level.or(file.primary_level).unwrap_or(0.05);
    check_levels(&[primary_level])?;
    if !levels.iter().any(|l| (l - primary_level).abs() < 1e-12) {
        levels.push(primary_level);
    }
    Ok(Resolved {
        settings: TestSettings {
            kernel,
            bandwidth,
            alignment,
            alternative,
            levels,
        },
        demean,
        methods,
        primary_level,
        gate: opts.gate || file.gate,
    })
}

fn bandwidth_label(b: &BandwidthSpec) -> String {
    match b {
        BandwidthSpec::Explicit(h) => format!("{h}"),
        BandwidthSpec::Rate { c, alpha } => format!("{c} * T^(-{alpha})"),
    }
}

/// True volatility of each retained pair, when the file carries it.
fn oracle_path(series: &Series, demean: Demean, len: usize) -> anyhow::Result<VolatilityPath> {
    let vols = series
        .true_vol
        .as_ref()
        .ok_or_else(|| usage("method `oracle` needs a `true_vol` column"))?;
    let skip = 1 + demean.dropped();
    let values = vols[skip..]
        .iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| anyhow::anyhow!("true_vol missing at data row {}", i + skip + 1)))
        .collect::<anyhow::Result<Vec<f64>>>()?;
    debug_assert_eq!(values.len(), len);
    Ok(VolatilityPath::new(values, PathKind::TrueSimulated)?)
}

fn write_diagnostics(
    target: &PathBuf,
    path: &VolatilityPath,
    alignment: Alignment,
    first_row: usize,
) -> anyhow::Result<()> {
    let mut out: Box<dyn Write> = if target.as_os_str() == "-" {
        Box::new(io::stdout().lock())
    } else {
        let f = File::create(target).with_context(|| format!("cannot create {}", target.display()))?;
        Box::new(BufWriter::new(f))
    };
    let n = path.len() as f64;
    writeln!(out, "row,r,sigma_hat")?;
    for (i, v) in path.values().iter().enumerate() {
        writeln!(out, "{},{:.6},{}", first_row + i, alignment.position(i + 1) / n, v)?;
    }
    out.flush()?;
    Ok(())
}

pub fn run(args: TestArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let r = resolve(args.opts, &file.test)?;
    let mut echo = Echo::new("test");
    echo.add("input", args.csv.display());
    echo.add("kernel", r.settings.kernel.family());
    echo.add("bandwidth", bandwidth_label(&r.settings.bandwidth));
    echo.add("alignment", r.settings.alignment.name());
    echo.add("demean", r.demean.name());
    echo.add(
        "methods",
        r.methods.iter().map(|m| format!("{m:?}").to_lowercase()).collect::<Vec<_>>().join(","),
    );
    echo.add("alternative", r.settings.alternative.name());
    echo.add("levels", join(&r.settings.levels));
    echo.add("primary_level", r.primary_level);
    echo.add("gate", r.gate);
    echo.print();

    let series = read_series(&args.csv)?;
    let raw = build_sample(&series.y, &series.x).map_err(InputError::from_core)?;
    let tau_sample = r.demean.apply(&raw).map_err(InputError::from_core)?;
    // the t-test always carries an intercept unless demeaning is switched off
    let ols_sample = match r.demean {
        Demean::None => raw.clone(),
        _ => Demean::Full.apply(&raw).map_err(InputError::from_core)?,
    };
    println!("rows = {}", series.y.len());
    println!("pairs = {} ({} after {} demeaning)", raw.len(), tau_sample.len(), r.demean.name());

    let mut outcomes: Vec<TestOutcome> = Vec::new();
    let mut vol_path = None;
    for m in &r.methods {
        let outcome = match m {
            TestMethod::Tau => {
                let o = tau_sigma_hat(&tau_sample, &r.settings).map_err(InputError::from_core)?;
                let h = o.diagnostics.bandwidth.unwrap_or(f64::NAN);
                println!("bandwidth h = {h:.4} (h*T = {:.1})", h * tau_sample.len() as f64);
                vol_path = o.diagnostics.volatility.clone();
                o
            }
            TestMethod::Ols => ols_t_stat(&ols_sample, &r.settings).map_err(InputError::from_core)?,
            TestMethod::Nonlinear => tau_nonlinear(&tau_sample, &GammaTransform::Sign, &r.settings)
                .map_err(InputError::from_core)?,
            TestMethod::Oracle => {
                let path = oracle_path(&series, r.demean, tau_sample.len())?;
                tau_oracle(&tau_sample, &path, &r.settings).map_err(InputError::from_core)?
            }
        };
        outcomes.push(outcome);
    }
    print_estimates(&tau_sample, &ols_sample);
    print_outcomes(&outcomes, &r.settings.levels);

    if let Some(target) = &args.diagnostics {
        let path = match vol_path {
            Some(p) => p,
            None => tau_sigma_hat(&tau_sample, &r.settings)
                .map_err(InputError::from_core)?
                .diagnostics
                .volatility
                .ok_or_else(|| InputError::DegenerateInput("returns are identically zero".into()))?,
        };
        write_diagnostics(target, &path, r.settings.alignment, 1 + r.demean.dropped())?;
    }

    let primary = &outcomes[0];
    let rejected = primary.rejected(r.primary_level).unwrap_or(false);
    println!(
        "primary: {} {} H0 at level {}",
        primary.method,
        if rejected { "rejects" } else { "does not reject" },
        r.primary_level
    );
    Ok(if r.gate && rejected { Outcome::Rejected } else { Outcome::Done })
}

fn print_estimates(tau_sample: &RegressionSample, ols_sample: &RegressionSample) {
    if let Ok(b) = predrobust::ols_fit(ols_sample) {
        println!("beta_ols = {b:.6}");
    }
    if let Ok(b) = predrobust::cauchy_fit(tau_sample) {
        println!("beta_sign_iv = {b:.6}");
    }
}

fn print_outcomes(outcomes: &[TestOutcome], levels: &[f64]) {
    println!();
    print!("{:<18} {:>11} {:>9}", "method", "statistic", "p_value");
    for l in levels {
        print!(" {:>8}", format!("rej@{l}"));
    }
    println!();
    for o in outcomes {
        print!("{:<18} {:>11.4} {:>9.4}", o.method.name(), o.statistic, o.p_value);
        for l in levels {
            let mark = match o.rejected(*l) {
                Some(true) => "yes",
                Some(false) => "no",
                None => "-",
            };
            print!(" {mark:>8}");
        }
        println!();
    }
    println!();
}
