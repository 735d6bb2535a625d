use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use finsler_core::{FinslerError, FinslerMetric, MetricDescriptor, ModelMetric};

use crate::{Common, Format};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Domain(FinslerError),
    Io(io::Error),
}

impl CliError {
    /// 2 for configuration problems, 3 for failures of the computation.
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Domain(FinslerError::InvalidDescriptor(_)) => 2,
            CliError::Domain(_) | CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<FinslerError> for CliError {
    fn from(e: FinslerError) -> Self {
        CliError::Domain(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// `--metric` is inline JSON, a path to a JSON file or a bare name.
pub fn descriptor(common: &Common) -> CliResult<MetricDescriptor> {
    let arg = common.metric.trim();
    let text = if arg.starts_with('{') {
        arg.to_string()
    } else if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| CliError::Config(format!("cannot read {arg}: {e}")))?
    } else {
        return Ok(MetricDescriptor::named(arg, common.dim));
    };
    MetricDescriptor::from_json(&text).map_err(|e| CliError::Config(e.to_string()))
}

pub fn metric(common: &Common) -> CliResult<ModelMetric> {
    descriptor(common)?.build().map_err(|e| CliError::Config(e.to_string()))
}

pub fn vector(name: &str, v: &[f64], dim: usize) -> CliResult<Vec<f64>> {
    if v.len() != dim {
        return Err(CliError::Config(format!("--{name} needs {dim} components, got {}", v.len())));
    }
    if v.iter().any(|c| !c.is_finite()) {
        return Err(CliError::Config(format!("--{name} has a non-finite component")));
    }
    Ok(v.to_vec())
}

pub fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("--{name} must be positive, got {v}")))
    }
}

pub fn non_negative(name: &str, v: f64) -> CliResult<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("--{name} must be non-negative, got {v}")))
    }
}

/// Start point and direction: the origin and `e1` unless given.
pub fn start(m: &ModelMetric, point: &Option<Vec<f64>>, direction: &Option<Vec<f64>>) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let n = m.dim();
    let x = match point {
        Some(p) => vector("point", p, n)?,
        None => vec![0.0; n],
    };
    let y = match direction {
        Some(d) => vector("direction", d, n)?,
        None => {
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            e
        }
    };
    Ok((x, y))
}

pub fn format(common: &Common, default: Format) -> Format {
    common.format.unwrap_or(default)
}

pub fn output(common: &Common) -> CliResult<Box<dyn Write>> {
    Ok(match &common.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: serde::Serialize>(common: &Common, value: &T) -> CliResult<()> {
    let mut w = output(common)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
