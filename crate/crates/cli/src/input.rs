//! Reading `y`/`x` series from CSV.

use std::fmt;
use std::fs::File;
use std::io;
use std::path::Path;

use predrobust::Error as CoreError;

#[derive(Debug)]
pub enum InputError {
    FileNotFound(String),
    Io(String, io::Error),
    Parse { line: u64, msg: String },
    TooShort { got: usize, need: usize },
    DegenerateInput(String),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::FileNotFound(p) => write!(f, "file not found: {p} (check the path)"),
            InputError::Io(p, e) => write!(f, "cannot read {p}: {e}"),
            InputError::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            InputError::TooShort { got, need } => write!(
                f,
                "too short: {got} usable (y_t, x_t-1) pairs, need at least {need}; supply more rows"
            ),
            InputError::DegenerateInput(m) => {
                write!(f, "degenerate input: {m}; check that x and y vary over the sample")
            }
        }
    }
}

impl std::error::Error for InputError {}

impl InputError {
    /// Maps data-dependent failures of the core library.
    pub fn from_core(e: CoreError) -> anyhow::Error {
        match e {
            CoreError::TooShort { got, need } => InputError::TooShort { got, need }.into(),
            CoreError::DegenerateRegressor
            | CoreError::DegenerateInstrument
            | CoreError::DegenerateVolatility { .. }
            | CoreError::ZeroVolatility { .. }
            | CoreError::EmptyWindow { .. } => InputError::DegenerateInput(e.to_string()).into(),
            other => other.into(),
        }
    }
}

/// Contemporaneous columns, one entry per data row.
#[derive(Debug)]
pub struct Series {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    /// `true_vol` when the file has that column (simulated data).
    pub true_vol: Option<Vec<Option<f64>>>,
}

fn parse_cell(raw: &str, column: &str, line: u64) -> Result<f64, InputError> {
    let v: f64 = raw.parse().map_err(|_| InputError::Parse {
        line,
        msg: format!("`{raw}` in column `{column}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(InputError::Parse {
            line,
            msg: format!("non-finite value `{raw}` in column `{column}`"),
        });
    }
    Ok(v)
}

pub fn read_series(path: &Path) -> Result<Series, InputError> {
    let shown = path.display().to_string();
    let file = File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => InputError::FileNotFound(shown.clone()),
        _ => InputError::Io(shown.clone(), e),
    })?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line());
        InputError::Parse { line, msg: e.to_string() }
    };
    let headers = reader.headers().map_err(csv_err)?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let (Some(iy), Some(ix)) = (find("y"), find("x")) else {
        return Err(InputError::Parse {
            line: 1,
            msg: "header must contain `y` and `x` columns".into(),
        });
    };
    let iv = find("true_vol");

    let mut series = Series {
        y: Vec::new(),
        x: Vec::new(),
        true_vol: iv.map(|_| Vec::new()),
    };
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        series.y.push(parse_cell(field(iy), "y", line)?);
        series.x.push(parse_cell(field(ix), "x", line)?);
        if let (Some(i), Some(vols)) = (iv, series.true_vol.as_mut()) {
            let raw = field(i);
            vols.push(if raw.is_empty() { None } else { Some(parse_cell(raw, "true_vol", line)?) });
        }
    }
    Ok(series)
}
