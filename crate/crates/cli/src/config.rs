//! Optional TOML defaults, seed and worker resolution, and the config echo.
//!
//! Precedence is flag, then config file, then built-in default. The worker
//! count also honors `PREDROBUST_WORKERS`, which sits between the flag and
//! the file.

use std::collections::hash_map::RandomState;
use std::fmt::Display;
use std::hash::BuildHasher;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde::Deserialize;

use crate::models::ModelArgs;
use crate::reproduce::ReproduceOpts;
use crate::simulate::SimulateOpts;
use crate::test_cmd::TestOpts;
use crate::usage;

pub const WORKERS_ENV: &str = "PREDROBUST_WORKERS";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub model: ModelArgs,
    pub test: TestOpts,
    pub simulate: SimulateOpts,
    pub reproduce: ReproduceOpts,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).map_err(|e| usage(format!("config file {}: {}", path.display(), e.message())))
    }
}

/// Seed from the flag or file; otherwise a fresh one that is printed so the
/// run can be repeated.
pub fn resolve_seed(flag: Option<u64>, file: &FileConfig) -> (u64, bool) {
    match flag.or(file.seed) {
        Some(s) => (s, false),
        None => {
            let nanos = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_nanos())
                .unwrap_or_default();
            // keep it short enough to retype
            (RandomState::new().hash_one(nanos) >> 32, true)
        }
    }
}

pub fn resolve_workers(flag: Option<usize>, file: &FileConfig) -> anyhow::Result<usize> {
    if let Some(w) = flag {
        return Ok(w);
    }
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        return v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{WORKERS_ENV}={v} is not a non-negative integer")));
    }
    Ok(file.workers.unwrap_or(0))
}

pub fn parse_named<T>(what: &str, value: &str, parse: impl Fn(&str) -> Option<T>, allowed: &[&str]) -> anyhow::Result<T> {
    parse(value).ok_or_else(|| usage(format!("unknown {what} `{value}` (expected one of: {})", allowed.join(", "))))
}

pub fn check_levels(levels: &[f64]) -> anyhow::Result<()> {
    if levels.is_empty() || levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
        return Err(usage("levels must lie strictly between 0 and 1"));
    }
    Ok(())
}

/// `key = value` lines printed before any work starts.
pub struct Echo(Vec<(String, String)>);

impl Echo {
    pub fn new(command: &str) -> Self {
        Self(vec![("command".into(), command.into())])
    }

    pub fn add(&mut self, key: &str, value: impl Display) {
        self.0.push((key.into(), value.to_string()));
    }

    pub fn print(&self) {
        println!("# resolved configuration");
        for (k, v) in &self.0 {
            println!("{k} = {v}");
        }
        println!();
    }
}

pub fn seed_note(seed: u64, chosen: bool) -> String {
    if chosen {
        format!("{seed} (chosen from entropy; pass --seed {seed} to repeat)")
    } else {
        seed.to_string()
    }
}

pub fn join<T: Display>(values: &[T]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}
