//! `predrobust reproduce`: size tables and size-adjusted power curves.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use serde::Deserialize;

use predrobust::inference::MIN_NULL_DRAWS;
use predrobust::montecarlo::{
    default_beta_grid, reproduce_table, run_power, McConfig, McMethod, ReproduceOptions, TableId, DEFAULT_REPS,
    MIN_REPS,
};
use predrobust::Alternative;

use crate::config::{check_levels, join, parse_named, resolve_seed, resolve_workers, seed_note, Echo, FileConfig};
use crate::models::{echo_dgp, ModelArgs};
use crate::{usage, Outcome};

/// Options that may also come from the `[reproduce]` table of a config file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReproduceOpts {
    /// Replications per cell [default: 10000]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Directory for CSV, markdown and SVG output [default: .]
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Comma-separated methods: ols, tau, oracle, nonlinear [default: ols,tau]
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// two-sided, greater or less [default: greater]
    #[arg(long)]
    pub alternative: Option<String>,
    /// Comma-separated nominal levels [default: 0.01,0.05,0.1]
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// Restrict a table to these model labels, e.g. CNST,SB
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<String>>,
    /// Comma-separated beta grid for power curves; must contain 0 [default: 0,2,...,20]
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Also write the power curve as SVG
    #[arg(long)]
    #[serde(default)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Size table to reproduce (1: continuous-time designs, 2: discrete-time designs)
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2), required_unless_present = "power", conflicts_with = "power")]
    pub table: Option<u8>,

    /// Size-adjusted power curve for one design (needs --model, --T or --years)
    #[arg(long)]
    pub power: bool,

    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub opts: ReproduceOpts,

    /// Master seed; drawn from entropy and printed when omitted
    #[arg(long)]
    pub seed: Option<u64>,

    /// Worker threads, 0 for all cores (env PREDROBUST_WORKERS)
    #[arg(long)]
    pub workers: Option<usize>,
}

fn file_stem(label: &str) -> String {
    label
        .to_ascii_lowercase()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' })
        .collect::<String>()
        .trim_matches('_')
        .to_string()
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> anyhow::Result<()> {
    let f = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(f);
    body(&mut w)
        .and_then(|_| w.flush())
        .with_context(|| format!("cannot write {}", path.display()))
}

pub fn run(args: ReproduceArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let fo = &file.reproduce;
    let reps = args.opts.reps.or(fo.reps).unwrap_or(DEFAULT_REPS);
    if reps < MIN_REPS {
        return Err(usage(format!("--reps must be at least {MIN_REPS}, got {reps}")));
    }
    if args.power && reps < MIN_NULL_DRAWS {
        return Err(usage(format!(
            "power curves need --reps of at least {MIN_NULL_DRAWS} for the size-adjusted critical values"
        )));
    }
    let out_dir = args.opts.out_dir.or_else(|| fo.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let method_names = args
        .opts
        .methods
        .or_else(|| fo.methods.clone())
        .unwrap_or_else(|| vec!["ols".into(), "tau".into()]);
    let methods = method_names
        .iter()
        .map(|m| parse_named("method", m.trim(), McMethod::from_name, &["ols", "tau", "oracle", "nonlinear"]))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let alternative = match args.opts.alternative.as_ref().or(fo.alternative.as_ref()) {
        Some(a) => parse_named("alternative", a, Alternative::from_name, &["two-sided", "greater", "less"])?,
        None => Alternative::Greater,
    };
    let levels = args
        .opts
        .levels
        .or_else(|| fo.levels.clone())
        .unwrap_or_else(|| predrobust::inference::DEFAULT_LEVELS.to_vec());
    check_levels(&levels)?;
    let (seed, chosen) = resolve_seed(args.seed, file);
    let workers = resolve_workers(args.workers, file)?;

    let mut echo = Echo::new("reproduce");
    echo.add("reps", reps);
    echo.add("seed", seed_note(seed, chosen));
    echo.add("workers", workers);
    echo.add("methods", methods.iter().map(McMethod::name).collect::<Vec<_>>().join(","));
    echo.add("alternative", alternative.name());
    echo.add("levels", join(&levels));
    echo.add("out_dir", out_dir.display());

    if args.power {
        let grid = args.opts.grid.or_else(|| fo.grid.clone()).unwrap_or_else(default_beta_grid);
        if !grid.contains(&0.0) {
            return Err(usage("--grid must contain 0"));
        }
        let model = args.model.or(&file.model);
        let dgp = model.dgp(0.0)?;
        echo.add("mode", "power");
        echo_dgp(&mut echo, &dgp);
        echo.add("grid", join(&grid));
        echo.add("svg", args.opts.svg || fo.svg);
        echo.print();

        let mut config = McConfig::new(dgp);
        config.reps = reps;
        config.methods = methods;
        config.settings.alternative = alternative;
        config.settings.levels = levels.clone();
        config.master_seed = seed;
        config.workers = workers;
        let curve = run_power(&config, &grid)?;

        fs::create_dir_all(&out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
        let stem = format!("power_{}_k{}_T{}", file_stem(&curve.model), curve.kappa, curve.size);
        let csv_path = out_dir.join(format!("{stem}.csv"));
        write_file(&csv_path, |w| curve.write_csv(w))?;
        println!("wrote {}", csv_path.display());
        let level = if levels.iter().any(|l| (l - 0.05).abs() < 1e-12) { 0.05 } else { levels[0] };
        if args.opts.svg || fo.svg {
            let svg_path = out_dir.join(format!("{stem}.svg"));
            write_file(&svg_path, |w| w.write_all(curve.to_svg(level).as_bytes()))?;
            println!("wrote {}", svg_path.display());
        }
        println!("\nsize-adjusted rejection rates (%) at level {level}");
        let names: Vec<&str> = config.methods.iter().map(McMethod::name).collect();
        print!("{:>8}", "beta");
        for n in &names {
            print!(" {n:>14}");
        }
        println!();
        for &b in &grid {
            print!("{b:>8}");
            for n in &names {
                let rate = curve.series(n, level).into_iter().find(|(g, _)| *g == b).map(|(_, r)| r);
                print!(" {:>14.2}", rate.unwrap_or(f64::NAN));
            }
            println!();
        }
        return Ok(Outcome::Done);
    }

    let table_id = args
        .table
        .and_then(TableId::from_number)
        .ok_or_else(|| usage("give --table 1|2 or --power"))?;
    let only = args.opts.only.or_else(|| fo.only.clone()).unwrap_or_default();
    echo.add("mode", format!("table {}", table_id.number()));
    if !only.is_empty() {
        echo.add("only", only.join(","));
    }
    echo.print();

    let mut options = ReproduceOptions::new(reps, seed);
    options.workers = workers;
    options.methods = methods;
    options.settings.alternative = alternative;
    options.settings.levels = levels;
    options.models = only;
    let result = reproduce_table(table_id, &options)?;

    fs::create_dir_all(&out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let n = table_id.number();
    let csv_path = out_dir.join(format!("table{n}_size.csv"));
    write_file(&csv_path, |w| result.table.write_csv(w))?;
    let md = result.markdown();
    let md_path = out_dir.join(format!("table{n}_report.md"));
    write_file(&md_path, |w| w.write_all(md.as_bytes()))?;
    print!("{md}");
    println!("\nwrote {}\nwrote {}", csv_path.display(), md_path.display());
    Ok(Outcome::Done)
}
