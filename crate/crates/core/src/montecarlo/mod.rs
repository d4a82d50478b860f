//! Replication harness: empirical size tables and size-adjusted power curves.
//!
//! Replication `r` of grid cell `c` always draws from `Seed::substream(c, r)`,
//! so a table is bit-identical whatever the worker count, and the first `n`
//! replications of a longer run match a run with `reps = n`.

pub mod reference;

use std::fmt::Write as _;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::dgp::{
    ContinuousDgpConfig, ContinuousVol, DgpConfig, DiscreteDgpConfig, DiscreteVol, GbmDiffusion,
};
use crate::error::{Error, Result};
use crate::estimators::GammaTransform;
use crate::inference::{
    ols_t_statistic, size_adjusted_cv_for, tau_nonlinear_statistic, tau_oracle_statistic,
    tau_sigma_hat_statistic, Alternative, TestSettings, DEFAULT_LEVELS,
};
use crate::sample::Demean;
use crate::seed::Seed;
use crate::volatility::{PathKind, VolatilityPath};

pub use reference::TableId;

pub const DEFAULT_REPS: usize = 10_000;
pub const MIN_REPS: usize = 100;
/// Failed replications tolerated before a run aborts.
pub const MAX_FAILURE_RATE: f64 = 0.01;

/// A statistic evaluated on every replication.
#[derive(Debug, Clone)]
pub enum McMethod {
    TauSigmaHat,
    TauOracle,
    OlsT,
    TauNonlinearIv(GammaTransform),
}

impl McMethod {
    pub fn name(&self) -> &'static str {
        match self {
            McMethod::TauSigmaHat => "tau_sigma_hat",
            McMethod::TauOracle => "tau_oracle",
            McMethod::OlsT => "ols_t",
            McMethod::TauNonlinearIv(_) => "tau_nonlinear_iv",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "tau_sigma_hat" | "tau" => Some(McMethod::TauSigmaHat),
            "tau_oracle" | "oracle" => Some(McMethod::TauOracle),
            "ols_t" | "ols" => Some(McMethod::OlsT),
            "tau_nonlinear_iv" | "nonlinear" => Some(McMethod::TauNonlinearIv(GammaTransform::Sign)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct McConfig {
    pub dgp: DgpConfig,
    pub reps: usize,
    pub methods: Vec<McMethod>,
    /// Kernel, bandwidth, alignment, alternative and nominal levels.
    pub settings: TestSettings,
    /// Preprocessing for the `τ` family.
    pub demean: Demean,
    /// Preprocessing for the OLS t-test.
    pub ols_demean: Demean,
    pub master_seed: u64,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
    /// Grid-cell key mixed into every replication seed.
    pub cell: u64,
}

impl McConfig {
    /// Defaults used for the replication tables: upper-tail alternative,
    /// recursive predictor demeaning for `τ`, an intercept for OLS.
    pub fn new(dgp: DgpConfig) -> Self {
        Self {
            dgp,
            reps: DEFAULT_REPS,
            methods: vec![McMethod::OlsT, McMethod::TauSigmaHat],
            settings: TestSettings {
                alternative: Alternative::Greater,
                levels: DEFAULT_LEVELS.to_vec(),
                ..TestSettings::default()
            },
            demean: Demean::Recursive,
            ols_demean: Demean::Full,
            master_seed: 1,
            workers: 0,
            cell: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < MIN_REPS {
            return Err(Error::InvalidConfig(format!("reps = {} < {MIN_REPS}", self.reps)));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no methods selected".into()));
        }
        if self.settings.levels.is_empty() || self.settings.levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
            return Err(Error::InvalidConfig("levels must lie in (0, 1)".into()));
        }
        self.dgp.validate()
    }
}

/// Statistics of every method across replications.
#[derive(Debug, Clone, PartialEq)]
pub struct Draws {
    pub methods: Vec<&'static str>,
    /// `stats[m]` holds method `m` on each successful replication, in
    /// replication order.
    pub stats: Vec<Vec<f64>>,
    pub failed: usize,
    pub first_error: Option<String>,
}

impl Draws {
    pub fn of(&self, method: &str) -> Option<&[f64]> {
        let i = self.methods.iter().position(|m| *m == method)?;
        Some(&self.stats[i])
    }

    pub fn successful(&self) -> usize {
        self.stats.first().map_or(0, Vec::len)
    }
}

fn replicate(config: &McConfig, dgp: &DgpConfig, rep: u64) -> Result<Vec<f64>> {
    let mut rng = Seed::new(config.master_seed).substream(config.cell, rep);
    let data = dgp.simulate(&mut rng)?;
    let needs_tau = config.methods.iter().any(|m| !matches!(m, McMethod::OlsT));
    let needs_ols = config.methods.iter().any(|m| matches!(m, McMethod::OlsT));
    let tau_sample = if needs_tau { Some(config.demean.apply(&data.sample)?) } else { None };
    let ols_sample = if needs_ols { Some(config.ols_demean.apply(&data.sample)?) } else { None };

    let mut out = Vec::with_capacity(config.methods.len());
    for method in &config.methods {
        let stat = match method {
            McMethod::OlsT => ols_t_statistic(ols_sample.as_ref().expect("ols sample"))?,
            McMethod::TauSigmaHat => {
                let s = tau_sample.as_ref().expect("tau sample");
                let h = config.settings.bandwidth.resolve(s.len())?;
                tau_sigma_hat_statistic(s, config.settings.kernel, h, config.settings.alignment)?
            }
            McMethod::TauOracle => {
                let s = tau_sample.as_ref().expect("tau sample");
                let skip = config.demean.dropped();
                let vol = VolatilityPath::new(data.true_vol.values()[skip..].to_vec(), PathKind::TrueSimulated)?;
                tau_oracle_statistic(s, &vol)?
            }
            McMethod::TauNonlinearIv(gamma) => {
                tau_nonlinear_statistic(tau_sample.as_ref().expect("tau sample"), gamma)?
            }
        };
        out.push(stat);
    }
    Ok(out)
}

fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

fn collect_draws(config: &McConfig, dgp: &DgpConfig) -> Result<Draws> {
    let results: Vec<Result<Vec<f64>>> = in_pool(config.workers, || {
        (0..config.reps as u64)
            .into_par_iter()
            .map(|rep| replicate(config, dgp, rep))
            .collect()
    })?;
    let mut stats = vec![Vec::with_capacity(config.reps); config.methods.len()];
    let mut failed = 0;
    let mut first_error = None;
    for r in results {
        match r {
            Ok(values) => {
                for (col, v) in stats.iter_mut().zip(values) {
                    col.push(v);
                }
            }
            Err(e) => {
                failed += 1;
                first_error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    if failed as f64 > MAX_FAILURE_RATE * config.reps as f64 {
        return Err(Error::TooManyFailures {
            failed,
            total: config.reps,
            first: first_error.unwrap_or_default(),
        });
    }
    Ok(Draws {
        methods: config.methods.iter().map(McMethod::name).collect(),
        stats,
        failed,
        first_error,
    })
}

/// Statistics of every method across `config.reps` replications.
pub fn simulate_draws(config: &McConfig) -> Result<Draws> {
    config.validate()?;
    collect_draws(config, &config.dgp)
}

/// Binomial standard error of a rejection percentage, in percentage points.
pub fn mc_standard_error(pct: f64, n: usize) -> f64 {
    let p = pct / 100.0;
    100.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn reject_pct(stats: &[f64], alternative: Alternative, critical: f64) -> f64 {
    if stats.is_empty() {
        return f64::NAN;
    }
    let hits = stats.iter().filter(|&&s| alternative.rejects(s, critical)).count();
    100.0 * hits as f64 / stats.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeCell {
    pub model: String,
    pub method: String,
    pub kappa: f64,
    /// Observations for discrete designs, years for continuous ones.
    pub size: usize,
    pub level: f64,
    pub reject_pct: f64,
    pub mc_se: f64,
    /// Successful replications (the denominator).
    pub reps: usize,
    pub failed: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SizeTable {
    pub cells: Vec<SizeCell>,
}

pub const SIZE_CSV_HEADER: &str = "model,method,kappa,T,level,reject_pct,mc_se,reps,seed";

impl SizeTable {
    pub fn get(&self, model: &str, method: &str, kappa: f64, size: usize, level: f64) -> Option<&SizeCell> {
        self.cells.iter().find(|c| {
            c.model == model
                && c.method == method
                && c.kappa == kappa
                && c.size == size
                && (c.level - level).abs() < 1e-12
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{SIZE_CSV_HEADER}")?;
        for c in &self.cells {
            writeln!(
                out,
                "{},{},{},{},{},{:.4},{:.4},{},{}",
                c.model, c.method, c.kappa, c.size, c.level, c.reject_pct, c.mc_se, c.reps, c.seed
            )?;
        }
        Ok(())
    }
}

/// Rejection rates under the configured DGP at normal critical values.
///
/// The slope is forced to zero.
pub fn run_size(config: &McConfig) -> Result<SizeTable> {
    config.validate()?;
    let dgp = config.dgp.with_beta_bar(0.0);
    let draws = collect_draws(config, &dgp)?;
    let alt = config.settings.alternative;
    let mut table = SizeTable::default();
    for (m, stats) in draws.methods.iter().zip(&draws.stats) {
        for &level in &config.settings.levels {
            let pct = reject_pct(stats, alt, alt.critical_value(level));
            table.cells.push(SizeCell {
                model: dgp.model_label(),
                method: (*m).to_string(),
                kappa: dgp.kappa_bar(),
                size: dgp.size_label(),
                level,
                reject_pct: pct,
                mc_se: mc_standard_error(pct, stats.len()),
                reps: stats.len(),
                failed: draws.failed,
                seed: config.master_seed,
            });
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerPoint {
    pub method: String,
    pub level: f64,
    pub beta_bar: f64,
    pub reject_pct: f64,
    pub mc_se: f64,
    /// Size-adjusted critical value on the oriented scale.
    pub critical_value: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub model: String,
    pub kappa: f64,
    pub size: usize,
    pub seed: u64,
    pub beta_grid: Vec<f64>,
    pub points: Vec<PowerPoint>,
}

pub const POWER_CSV_HEADER: &str = "model,method,kappa,T,beta_bar,level,reject_pct,mc_se,critical_value,reps,seed";

/// `0, 2, ..., 20`.
pub fn default_beta_grid() -> Vec<f64> {
    (0..=10).map(|i| 2.0 * i as f64).collect()
}

impl PowerCurve {
    /// Rates of `method` at `level` in grid order.
    pub fn series(&self, method: &str, level: f64) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.method == method && (p.level - level).abs() < 1e-12)
            .map(|p| (p.beta_bar, p.reject_pct))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{POWER_CSV_HEADER}")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{:.4},{:.4},{:.6},{},{}",
                self.model,
                p.method,
                self.kappa,
                self.size,
                p.beta_bar,
                p.level,
                p.reject_pct,
                p.mc_se,
                p.critical_value,
                p.reps,
                self.seed
            )?;
        }
        Ok(())
    }

    /// Line chart of every method at `level`.
    pub fn to_svg(&self, level: f64) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const PAD: f64 = 50.0;
        let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
        let bmax = self.beta_grid.iter().cloned().fold(0.0, f64::max).max(1e-9);
        let px = |b: f64| PAD + (W - 2.0 * PAD) * b / bmax;
        let py = |pct: f64| H - PAD - (H - 2.0 * PAD) * pct / 100.0;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{} kappa={} T={} level={}</text>"#,
            W / 2.0,
            self.model,
            self.kappa,
            self.size,
            level
        );
        let _ = writeln!(
            svg,
            r#"<polyline points="{},{} {},{} {},{}" fill="none" stroke="black"/>"#,
            PAD,
            PAD,
            PAD,
            H - PAD,
            W - PAD,
            H - PAD
        );
        for tick in [0.0, 25.0, 50.0, 75.0, 100.0] {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{tick}</text>"#,
                PAD - 6.0,
                py(tick) + 3.0
            );
        }
        for &b in &self.beta_grid {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{b}</text>"#,
                px(b),
                H - PAD + 14.0
            );
        }
        let mut methods: Vec<&str> = Vec::new();
        for p in &self.points {
            if !methods.contains(&p.method.as_str()) {
                methods.push(&p.method);
            }
        }
        for (i, m) in methods.iter().enumerate() {
            let color = colors[i % colors.len()];
            let pts: Vec<String> = self
                .series(m, level)
                .iter()
                .map(|&(b, r)| format!("{:.2},{:.2}", px(b), py(r)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                pts.join(" ")
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{m}</text>"#,
                W - PAD - 110.0,
                PAD + 16.0 * (i as f64 + 1.0)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Size-adjusted power over `beta_grid`.
///
/// The `β̄ = 0` draws fix an empirical critical value per method and level;
/// every grid point reuses the same replication streams, so the curves are
/// computed with common random numbers.
pub fn run_power(config: &McConfig, beta_grid: &[f64]) -> Result<PowerCurve> {
    config.validate()?;
    if !beta_grid.contains(&0.0) {
        return Err(Error::InvalidConfig("beta grid must contain 0".into()));
    }
    let alt = config.settings.alternative;
    let null = collect_draws(config, &config.dgp.with_beta_bar(0.0))?;
    let mut cvs = Vec::new();
    for stats in &null.stats {
        let per_level: Result<Vec<f64>> = config
            .settings
            .levels
            .iter()
            .map(|&l| size_adjusted_cv_for(stats, l, alt))
            .collect();
        cvs.push(per_level?);
    }

    let mut points = Vec::new();
    for &b in beta_grid {
        let draws = if b == 0.0 {
            null.clone()
        } else {
            collect_draws(config, &config.dgp.with_beta_bar(b))?
        };
        for (m, (stats, cv_row)) in draws.methods.iter().zip(draws.stats.iter().zip(&cvs)) {
            for (&level, &cv) in config.settings.levels.iter().zip(cv_row) {
                let pct = reject_pct(stats, alt, cv);
                points.push(PowerPoint {
                    method: (*m).to_string(),
                    level,
                    beta_bar: b,
                    reject_pct: pct,
                    mc_se: mc_standard_error(pct, stats.len()),
                    critical_value: cv,
                    reps: stats.len(),
                });
            }
        }
    }
    Ok(PowerCurve {
        model: config.dgp.model_label(),
        kappa: config.dgp.kappa_bar(),
        size: config.dgp.size_label(),
        seed: config.master_seed,
        beta_grid: beta_grid.to_vec(),
        points,
    })
}

/// Volatility designs of a replication table, in row order.
pub fn table_models(table: TableId) -> Vec<ModelSpec> {
    match table {
        TableId::Table1 => vec![
            ModelSpec::Continuous(ContinuousVol::Cnst),
            ModelSpec::Continuous(ContinuousVol::sb_default()),
            ModelSpec::Continuous(ContinuousVol::rs_default()),
            ModelSpec::Continuous(ContinuousVol::gbm_default(GbmDiffusion::OmegaOverSqrtT)),
            ModelSpec::Continuous(ContinuousVol::gbm_default(GbmDiffusion::OmegaSqOverSqrtT)),
        ],
        TableId::Table2 => vec![
            ModelSpec::Discrete(DiscreteVol::Cnst),
            ModelSpec::Discrete(DiscreteVol::sb_default()),
            ModelSpec::Discrete(DiscreteVol::Garch { alpha: 0.5773, beta: 0.0 }),
            ModelSpec::Discrete(DiscreteVol::Garch { alpha: 0.7325, beta: 0.0 }),
            ModelSpec::Discrete(DiscreteVol::Garch { alpha: 0.9, beta: 0.1 }),
            ModelSpec::Discrete(DiscreteVol::Garch { alpha: 0.1, beta: 0.9 }),
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Discrete(DiscreteVol),
    Continuous(ContinuousVol),
}

impl ModelSpec {
    pub fn dgp(&self, size: usize, kappa_bar: f64) -> DgpConfig {
        match *self {
            ModelSpec::Discrete(vol) => DgpConfig::Discrete(DiscreteDgpConfig::new(size, 0.0, kappa_bar, vol)),
            ModelSpec::Continuous(vol) => {
                DgpConfig::Continuous(ContinuousDgpConfig::new(size, 0.0, kappa_bar, vol))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            ModelSpec::Discrete(v) => v.label(),
            ModelSpec::Continuous(v) => v.label(),
        }
    }
}

/// Seed key of a table cell; distinct for every (table, model, κ̄, size).
pub fn cell_key(table: TableId, model_idx: usize, kappa_idx: usize, size_idx: usize) -> u64 {
    1_000 * table.number() as u64 + 100 * model_idx as u64 + 10 * kappa_idx as u64 + size_idx as u64
}

/// Options shared by every cell of a reproduced table.
#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub reps: usize,
    pub master_seed: u64,
    pub workers: usize,
    pub methods: Vec<McMethod>,
    pub settings: TestSettings,
    pub demean: Demean,
    pub ols_demean: Demean,
    /// Restrict to these model labels; empty means all.
    pub models: Vec<String>,
}

impl ReproduceOptions {
    pub fn new(reps: usize, master_seed: u64) -> Self {
        let base = McConfig::new(ModelSpec::Discrete(DiscreteVol::Cnst).dgp(60, 0.0));
        Self {
            reps,
            master_seed,
            workers: 0,
            methods: base.methods,
            settings: base.settings,
            demean: base.demean,
            ols_demean: base.ols_demean,
            models: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub model: String,
    pub method: String,
    pub kappa: f64,
    pub size: usize,
    pub reference: f64,
    pub ours: f64,
    pub mc_se: f64,
}

impl Deviation {
    pub fn abs_diff(&self) -> f64 {
        (self.ours - self.reference).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub model: String,
    pub kappa: f64,
    pub size: usize,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct TableReproduction {
    pub table_id: TableId,
    pub table: SizeTable,
    pub deviations: Vec<Deviation>,
    /// Cells that could not be estimated, with the reason.
    pub failures: Vec<CellFailure>,
    pub runtime: Duration,
    pub reps: usize,
    pub seed: u64,
    pub alternative: Alternative,
}

impl TableReproduction {
    pub fn deviation(&self, model: &str, method: &str, kappa: f64, size: usize) -> Option<&Deviation> {
        self.deviations
            .iter()
            .find(|d| d.model == model && d.method == method && d.kappa == kappa && d.size == size)
    }

    /// Markdown comparison against the published 5% sizes.
    pub fn markdown(&self) -> String {
        let mut md = String::new();
        let _ = writeln!(md, "# Size reproduction, table {}\n", self.table_id.number());
        let _ = writeln!(
            md,
            "reps = {}, seed = {}, alternative = {}, runtime = {:.1}s\n",
            self.reps,
            self.seed,
            self.alternative.name(),
            self.runtime.as_secs_f64()
        );
        let _ = writeln!(md, "| model | method | kappa | T | reference | ours | abs diff | MC SE |");
        let _ = writeln!(md, "|---|---|---|---|---|---|---|---|");
        for d in &self.deviations {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {:.1} | {:.2} | {:.2} | {:.2} |",
                d.model,
                d.method,
                d.kappa,
                d.size,
                d.reference,
                d.ours,
                d.abs_diff(),
                d.mc_se
            );
        }
        let _ = writeln!(md);
        let max = self.deviations.iter().map(Deviation::abs_diff).fold(0.0, f64::max);
        let _ = writeln!(md, "Largest absolute deviation: {max:.2} pp.\n");
        if !self.failures.is_empty() {
            let _ = writeln!(md, "Cells without a result:\n");
            for f in &self.failures {
                let _ = writeln!(md, "- {} kappa={} T={}: {}", f.model, f.kappa, f.size, f.error);
            }
            let _ = writeln!(md);
        }
        for name in reference::NOT_IMPLEMENTED {
            let _ = writeln!(md, "- {name}: not implemented");
        }
        md
    }
}

/// Runs every (model, κ̄, size) cell of a replication table at the 5% level
/// and compares the result with the published values.
pub fn reproduce_table(table_id: TableId, options: &ReproduceOptions) -> Result<TableReproduction> {
    let start = Instant::now();
    let mut table = SizeTable::default();
    let mut deviations = Vec::new();
    let mut failures = Vec::new();
    let sizes = table_id.sizes();
    for (mi, model) in table_models(table_id).iter().enumerate() {
        let label = model.label();
        if !options.models.is_empty() && !options.models.iter().any(|m| m.eq_ignore_ascii_case(&label)) {
            continue;
        }
        for (ki, &kappa) in reference::KAPPAS.iter().enumerate() {
            for (si, &size) in sizes.iter().enumerate() {
                let mut settings = options.settings.clone();
                if !settings.levels.iter().any(|l| (l - 0.05).abs() < 1e-12) {
                    settings.levels.push(0.05);
                }
                let config = McConfig {
                    dgp: model.dgp(size, kappa),
                    reps: options.reps,
                    methods: options.methods.clone(),
                    settings,
                    demean: options.demean,
                    ols_demean: options.ols_demean,
                    master_seed: options.master_seed,
                    workers: options.workers,
                    cell: cell_key(table_id, mi, ki, si),
                };
                let cells = match run_size(&config) {
                    Ok(c) => c,
                    Err(e @ Error::TooManyFailures { .. }) => {
                        failures.push(CellFailure {
                            model: label.clone(),
                            kappa,
                            size,
                            error: e.to_string(),
                        });
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                for c in &cells.cells {
                    if (c.level - 0.05).abs() > 1e-12 {
                        continue;
                    }
                    if let Some(value) = reference::lookup(table_id, &c.model, &c.method, ki, si) {
                        deviations.push(Deviation {
                            model: c.model.clone(),
                            method: c.method.clone(),
                            kappa,
                            size,
                            reference: value,
                            ours: c.reject_pct,
                            mc_se: c.mc_se,
                        });
                    }
                }
                table.cells.extend(cells.cells);
            }
        }
    }
    Ok(TableReproduction {
        table_id,
        table,
        deviations,
        failures,
        runtime: start.elapsed(),
        reps: options.reps,
        seed: options.master_seed,
        alternative: options.settings.alternative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnst(t: usize) -> DgpConfig {
        ModelSpec::Discrete(DiscreteVol::Cnst).dgp(t, 0.0)
    }

    #[test]
    fn oracle_size_near_nominal() {
        let mut cfg = McConfig::new(cnst(60));
        cfg.reps = 2000;
        cfg.methods = vec![McMethod::TauOracle];
        let t = run_size(&cfg).unwrap();
        let c = t.get("CNST", "tau_oracle", 0.0, 60, 0.05).unwrap();
        assert!((c.reject_pct - 5.0).abs() < 3.0 * c.mc_se, "{c:?}");
    }

    #[test]
    fn reps_below_minimum_rejected() {
        let mut cfg = McConfig::new(cnst(60));
        cfg.reps = 99;
        assert!(matches!(run_size(&cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn prefix_replications_match() {
        let mut cfg = McConfig::new(cnst(60));
        cfg.reps = 100;
        let a = simulate_draws(&cfg).unwrap();
        cfg.reps = 200;
        let b = simulate_draws(&cfg).unwrap();
        for m in 0..a.stats.len() {
            assert_eq!(a.stats[m][..], b.stats[m][..100]);
        }
    }

    #[test]
    fn power_at_zero_is_nominal() {
        let mut cfg = McConfig::new(cnst(60));
        cfg.reps = 1000;
        cfg.settings.levels = vec![0.05];
        let curve = run_power(&cfg, &[0.0, 10.0]).unwrap();
        for m in ["ols_t", "tau_sigma_hat"] {
            let s = curve.series(m, 0.05);
            assert_eq!(s[0], (0.0, 5.0));
            assert!(s[1].1 > 5.0);
        }
        assert!(curve.to_svg(0.05).starts_with("<svg"));
    }

    #[test]
    fn power_needs_zero_and_enough_draws() {
        let mut cfg = McConfig::new(cnst(60));
        cfg.reps = 500;
        assert!(matches!(run_power(&cfg, &[5.0]), Err(Error::InvalidConfig(_))));
        assert!(matches!(
            run_power(&cfg, &[0.0, 5.0]),
            Err(Error::InsufficientNullDraws { .. })
        ));
    }

    #[test]
    fn standard_error_formula() {
        assert!((mc_standard_error(5.0, 10_000) - 0.217_944_947).abs() < 1e-8);
        assert_eq!(mc_standard_error(0.0, 100), 0.0);
    }

    #[test]
    fn cell_keys_distinct() {
        let mut keys = std::collections::HashSet::new();
        for t in [TableId::Table1, TableId::Table2] {
            for m in 0..6 {
                for k in 0..3 {
                    for s in 0..3 {
                        assert!(keys.insert(cell_key(t, m, k, s)));
                    }
                }
            }
        }
    }
}
