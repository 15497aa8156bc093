//! Run configuration: defaults, `key = value` files and flag overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use graphflow::mesh::MAX_DISK_LEVEL;
use graphflow::problems::{Ic2Variant, PROBLEM_KEYS};

pub const OUT_ENV: &str = "GRAPHFLOW_OUT";
pub const DEFAULT_OUT: &str = "graphflow-out";

/// A configuration mistake; reported with usage exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauSetting {
    HSquared,
    Value(f64),
}

/// Fully resolved settings of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub level: usize,
    pub levels: Vec<usize>,
    pub t_final: Option<f64>,
    pub tau: TauSetting,
    pub out: PathBuf,
    pub tol: f64,
    pub ic2: Ic2Variant,
}

/// Raw string settings from one source (flags or file).
pub type Settings = BTreeMap<String, String>;

pub const KEYS: [&str; 8] = [
    "problem",
    "level",
    "levels",
    "T",
    "tau",
    "out",
    "tol",
    "ic2-variant",
];

fn canonical_key(key: &str) -> Option<&'static str> {
    let k = key.trim().replace('_', "-");
    KEYS.iter()
        .copied()
        .find(|c| *c == k || (k == "t" && *c == "T"))
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Settings, UsageError> {
    let mut out = Settings::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected `key = value`", n + 1)))?;
        let key = canonical_key(k)
            .ok_or_else(|| usage(format!("config line {}: unknown key `{}`", n + 1, k.trim())))?;
        out.insert(key.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Parses `a:b` (inclusive) or a single level.
pub fn parse_levels(s: &str) -> Result<Vec<usize>, UsageError> {
    let bad = || usage(format!("invalid level range `{s}` (expected a:b)"));
    let (a, b) = match s.split_once(':') {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let a = s.trim().parse().map_err(|_| bad())?;
            (a, a)
        }
    };
    if a > b {
        return Err(bad());
    }
    check_level(b)?;
    Ok((a..=b).collect())
}

fn check_level(level: usize) -> Result<usize, UsageError> {
    if level > MAX_DISK_LEVEL {
        Err(usage(format!(
            "level {level} exceeds the maximum {MAX_DISK_LEVEL}"
        )))
    } else {
        Ok(level)
    }
}

pub fn parse_tau(s: &str) -> Result<TauSetting, UsageError> {
    if s.eq_ignore_ascii_case("h2") {
        return Ok(TauSetting::HSquared);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(TauSetting::Value(v)),
        _ => Err(usage(format!(
            "invalid tau `{s}` (expected h2 or a positive number)"
        ))),
    }
}

fn parse_positive(key: &str, s: &str) -> Result<f64, UsageError> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(usage(format!("invalid {key} `{s}`"))),
    }
}

fn parse_nonnegative(key: &str, s: &str) -> Result<f64, UsageError> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(usage(format!("invalid {key} `{s}`"))),
    }
}

/// Merges sources with precedence flags > file > defaults.
pub fn resolve(
    flags: &Settings,
    file: &Settings,
    env_out: Option<String>,
) -> Result<RunConfig, UsageError> {
    let get = |k: &str| flags.get(k).or_else(|| file.get(k)).map(String::as_str);

    let problem = get("problem").unwrap_or("example1").to_string();
    if !PROBLEM_KEYS.contains(&problem.as_str()) {
        return Err(usage(format!(
            "unknown problem `{problem}` (expected one of {})",
            PROBLEM_KEYS.join(", ")
        )));
    }
    let level = match get("level") {
        Some(s) => check_level(
            s.parse()
                .map_err(|_| usage(format!("invalid level `{s}`")))?,
        )?,
        None => 2,
    };
    let levels = parse_levels(get("levels").unwrap_or("2:4"))?;
    let t_final = get("T").map(|s| parse_nonnegative("T", s)).transpose()?;
    let tau = parse_tau(get("tau").unwrap_or("h2"))?;
    let out = get("out")
        .map(PathBuf::from)
        .or_else(|| env_out.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let tol = match get("tol") {
        Some(s) => parse_positive("tol", s)?,
        None => graphflow::fem::DEFAULT_TOL,
    };
    let ic2 = get("ic2-variant")
        .unwrap_or("literal")
        .parse::<Ic2Variant>()
        .map_err(|e| usage(e.to_string()))?;
    Ok(RunConfig {
        problem,
        level,
        levels,
        t_final,
        tau,
        out,
        tol,
        ic2,
    })
}
