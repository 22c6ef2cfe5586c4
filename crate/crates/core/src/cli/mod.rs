//! Command-line front end: config ingestion, case studies and data export.

pub mod cases;
pub mod commands;
pub mod config;
pub mod fits;
pub mod presets;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

pub(crate) use crate::diagnostics::num;
use crate::error::{Error, Result};
pub use config::ModelConfig;

/// Environment variable for the default output directory.
pub const OUT_DIR_ENV: &str = "QBATH_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "qbath", version, about = "Weak-coupling open quantum system dynamics and validity diagnostics")]
pub struct Cli {
    /// Model configuration (TOML, `schema = 1`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; falls back to `run.out_dir`, then $QBATH_OUT_DIR, then `qbath-out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Dotted `key=value` override applied on top of the config, repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate J(ω) for each requested temperature.
    Spectral,
    /// Scalar memory-kernel model with all five solvers.
    Toy,
    /// Propagate the configured model.
    Solve,
    /// Timescale report and validity verdict.
    Diagnose,
    /// Built-in case studies.
    Case {
        #[arg(value_enum)]
        which: CaseKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseKind {
    Photonic,
    Kondo,
    Thermalization,
}

/// A headline number with its reference value and tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Headline {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// Relative deviation when `relative`, absolute otherwise.
    pub deviation: f64,
    pub relative: bool,
    pub pass: bool,
}

impl Headline {
    pub fn absolute(name: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        let deviation = (value - expected).abs();
        Self { name: name.into(), value, expected, tolerance, deviation, relative: false, pass: deviation <= tolerance }
    }

    pub fn relative(name: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        let deviation = (value / expected - 1.0).abs();
        Self { name: name.into(), value, expected, tolerance, deviation, relative: true, pass: deviation <= tolerance }
    }

    /// Passes when `value > bound`; the deviation is the margin.
    pub fn above(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: bound,
            tolerance: 0.0,
            deviation: value - bound,
            relative: false,
            pass: value > bound,
        }
    }

    /// Passes when `value < bound`.
    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: bound,
            tolerance: 0.0,
            deviation: bound - value,
            relative: false,
            pass: value < bound,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CaseStudyResult {
    pub name: String,
    pub files: Vec<String>,
    pub headlines: Vec<Headline>,
    /// Informational numbers without a pass/fail.
    pub values: Vec<(String, f64)>,
}

impl CaseStudyResult {
    pub fn new(name: &str) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn headline(&self, name: &str) -> Option<&Headline> {
        self.headlines.iter().find(|h| h.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn all_pass(&self) -> bool {
        self.headlines.iter().all(|h| h.pass)
    }

    pub fn to_json(&self) -> Value {
        let headlines: Vec<Value> = self
            .headlines
            .iter()
            .map(|h| {
                json!({
                    "name": h.name,
                    "value": num(h.value),
                    "expected": num(h.expected),
                    "tolerance": num(h.tolerance),
                    "deviation": num(h.deviation),
                    "relative": h.relative,
                    "pass": h.pass,
                })
            })
            .collect();
        let values: serde_json::Map<String, Value> = self.values.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
        json!({ "name": self.name, "files": self.files, "headlines": headlines, "values": values })
    }

    pub fn summary(&self) -> String {
        let mut out = format!("{}\n", self.name);
        for h in &self.headlines {
            out.push_str(&format!(
                "  {:<40} {:>24} expected {:>24} deviation {:>12} [{}]\n",
                h.name,
                crate::master::format_float(h.value),
                crate::master::format_float(h.expected),
                crate::master::format_float(h.deviation),
                if h.pass { "pass" } else { "FAIL" }
            ));
        }
        out
    }
}

/// Output directory that records every file written into it.
pub struct Output {
    pub dir: PathBuf,
    pub written: Vec<String>,
}

impl Output {
    pub fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir, written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), contents)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, v: &Value) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.write(name, &s)
    }
}

/// Write `res` (with the file list) as `summary` and return it.
pub(crate) fn finish(mut res: CaseStudyResult, out: &mut Output, summary: &str) -> Result<CaseStudyResult> {
    out.written.push(summary.to_string());
    res.files = out.written.clone();
    out.written.pop();
    out.write_json(summary, &res.to_json())?;
    Ok(res)
}

/// Parsed config plus the directory that relative paths resolve against.
pub struct Loaded {
    pub config: ModelConfig,
    pub base_dir: PathBuf,
}

pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Loaded> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            let config = ModelConfig::parse(&text, overrides)
                .map_err(|e| Error::Config(format!("{}: {}", p.display(), strip_prefix(e))))?;
            let base_dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
            Ok(Loaded { config, base_dir })
        }
        None => Ok(Loaded { config: ModelConfig::empty(overrides)?, base_dir: PathBuf::from(".") }),
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

fn out_dir(cli: &Cli, loaded: &Loaded) -> PathBuf {
    if let Some(o) = &cli.out {
        return o.clone();
    }
    if let Some(o) = &loaded.config.run.out_dir {
        return loaded.base_dir.join(o);
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from("qbath-out"),
    }
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let loaded = load(cli.config.as_deref(), &cli.overrides)?;
    let mut out = Output::new(out_dir(cli, &loaded))?;
    let result = match &cli.command {
        Command::Diagnose => {
            let (text, code) = commands::cmd_diagnose(&loaded, &mut out)?;
            print!("{text}");
            return Ok(code);
        }
        Command::Spectral => commands::cmd_spectral(&loaded, &mut out)?,
        Command::Toy => commands::cmd_toy(&loaded, &mut out)?,
        Command::Solve => commands::cmd_solve(&loaded, &mut out)?,
        Command::Case { which } => match which {
            CaseKind::Photonic => cases::cmd_case_photonic(&loaded, &mut out)?,
            CaseKind::Kondo => cases::cmd_case_kondo(&loaded, &mut out)?,
            CaseKind::Thermalization => cases::cmd_case_thermalization(&loaded, &mut out)?,
        },
    };
    print!("{}", result.summary());
    Ok(if result.all_pass() { 0 } else { 2 })
}
