//! Run configuration: flags, optional TOML file, and validation into typed values.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use shrinker_core::gallery::ProfileTable;
use shrinker_core::{Cap, Orientation, ParamGrid, RadialProfile, SpiralCurve, SurfaceKind, SurfaceSpec};

#[derive(Debug, Parser)]
#[command(name = "shrinker", version, about = "Self-shrinker geometry experiments")]
pub struct Cli {
    /// TOML file with the same keys as the flags (plus `command`); flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<CommandArg>,
}

#[derive(Debug, Subcommand)]
pub enum CommandArg {
    /// Per-node frame quantities on a parameter grid.
    Frames(Params),
    /// Residuals and convergence of the support-function identities.
    Identities(Params),
    /// Tangent-plane coverage raster and omission certificate.
    Omission(Params),
    /// Profile conditions, curvature, tangent-line chain and trapped length of a spiral.
    Spiral(Params),
    /// Exactness of the round shrinkers `𝕊ᵖ(√(2p)) × ℝⁿ⁻ᵖ`.
    Canonical(Params),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Frames,
    Identities,
    Omission,
    Spiral,
    Canonical,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Frames => "frames",
            Command::Identities => "identities",
            Command::Omission => "omission",
            Command::Spiral => "spiral",
            Command::Canonical => "canonical",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Command::Frames => &["surface", "orientation", "grid", "ranges"],
            Command::Identities => &["surface", "orientation", "grid", "ranges", "refine", "checks"],
            Command::Omission => &[
                "surface", "orientation", "grid", "ranges", "t", "box", "cells", "cover-tol", "point",
            ],
            Command::Spiral => &["profile", "d", "t", "s", "horizon", "trap", "trap-t", "checks", "relaxed"],
            Command::Canonical => &["p", "n", "grid"],
        }
    }
}

/// Every configurable key. Unset keys fall back to the config file, then to defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,

    /// Surface and parameters, e.g. `sphere:r=2`, `torus:R=2,r=0.5`, `spiral-cylinder:arctan,m=1,a=1`.
    #[arg(long)]
    pub surface: Option<String>,

    /// `inward`, `outward` or `as-computed`.
    #[arg(long)]
    pub orientation: Option<String>,

    /// Node counts per parameter, e.g. `81x81`.
    #[arg(long)]
    pub grid: Option<String>,

    /// Parameter box, e.g. `-1:1,-1:1`; defaults to the surface's regular chart box.
    #[arg(long, allow_hyphen_values = true)]
    pub ranges: Option<String>,

    /// Number of successive grid halvings (`--refine` alone means one).
    #[arg(long, num_args = 0..=1, default_missing_value = "1")]
    pub refine: Option<usize>,

    /// Comma-separated subset of checks, or `all`.
    #[arg(long)]
    pub checks: Option<String>,

    /// Radial profile, e.g. `arctan:m=1,a=1`, `exp`, `zero`, `poly:c0=0,c2=1`, `table:path=b.csv`.
    #[arg(long)]
    pub profile: Option<String>,

    /// Base radius of the spiral.
    #[arg(long)]
    pub d: Option<f64>,

    /// Curve parameter window `lo:hi[:count]`.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,

    /// Tangent-line parameter window `lo:hi:count`.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,

    /// Horizon for the limit conditions; defaults to `max |t|`.
    #[arg(long)]
    pub horizon: Option<f64>,

    /// Radius of the trapping disk.
    #[arg(long)]
    pub trap: Option<f64>,

    /// Increasing end parameters for the trapped length, e.g. `50,100,200,400`.
    #[arg(long = "trap-t")]
    pub trap_t: Option<String>,

    /// Raster box `lo:hi,lo:hi[,lo:hi]`.
    #[arg(long = "box", allow_hyphen_values = true)]
    #[serde(rename = "box")]
    pub raster_box: Option<String>,

    /// Cells per axis, `400` or `400x300`.
    #[arg(long)]
    pub cells: Option<String>,

    /// Coverage tolerance; defaults to 1.5 cell diagonals.
    #[arg(long)]
    pub cover_tol: Option<f64>,

    /// Base point for an omission certificate, e.g. `0,0,0`.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,

    /// Restrict the tangent-line chain to `t > 0` (exp profile regime).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub relaxed: Option<bool>,

    /// Sphere factor dimensions, e.g. `0,1,2`.
    #[arg(long)]
    pub p: Option<String>,

    /// Hypersurface dimension.
    #[arg(long)]
    pub n: Option<usize>,

    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Comma-separated subset of `csv,json,svg`.
    #[arg(long)]
    pub formats: Option<String>,

    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

macro_rules! merge_fields {
    ($flags:expr, $file:expr, $($f:ident),*) => {
        Params { $($f: $flags.$f.or($file.$f)),* }
    };
}

impl Params {
    fn merged(self, file: Params) -> Params {
        merge_fields!(
            self, file, command, surface, orientation, grid, ranges, refine, checks, profile, d, t, s, horizon,
            trap, trap_t, raster_box, cells, cover_tol, point, relaxed, p, n, out, formats, threads
        )
    }

    /// Keys set to a value, in kebab case, for provenance and validation.
    pub fn set_keys(&self) -> Vec<(String, serde_json::Value)> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(map)) => map.into_iter().filter(|(_, v)| !v.is_null()).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error in `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

pub fn bad(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Flags merged over the config file, with the command resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: Params,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, ConfigError> {
        let (flag_cmd, flags) = match cli.command {
            Some(CommandArg::Frames(p)) => (Some(Command::Frames), p),
            Some(CommandArg::Identities(p)) => (Some(Command::Identities), p),
            Some(CommandArg::Omission(p)) => (Some(Command::Omission), p),
            Some(CommandArg::Spiral(p)) => (Some(Command::Spiral), p),
            Some(CommandArg::Canonical(p)) => (Some(Command::Canonical), p),
            None => (None, Params::default()),
        };
        let file = match &cli.config {
            Some(path) => load_file(path)?,
            None => Params::default(),
        };
        let file_cmd = file.command;
        let mut params = flags.merged(file);
        let command = match (flag_cmd, file_cmd) {
            (Some(a), Some(b)) if a != b => {
                return Err(bad(
                    "command",
                    format!("subcommand `{}` contradicts config file command `{}`", a.name(), b.name()),
                ))
            }
            (Some(c), _) | (None, Some(c)) => c,
            (None, None) => return Err(bad("command", "no subcommand given and none in the config file")),
        };
        params.command = Some(command);
        let config = Self { command, params };
        config.check_keys()?;
        Ok(config)
    }

    fn check_keys(&self) -> Result<(), ConfigError> {
        let common = ["command", "out", "formats", "threads"];
        for (key, _) in self.params.set_keys() {
            if !common.contains(&key.as_str()) && !self.command.keys().contains(&key.as_str()) {
                return Err(bad(&key, format!("not used by `{}`", self.command.name())));
            }
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.params.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn formats(&self) -> Result<Formats, ConfigError> {
        let mut f = Formats { csv: false, json: false, svg: false };
        let text = self.params.formats.as_deref().unwrap_or("csv,json,svg");
        for item in text.split(',').map(str::trim) {
            match item {
                "csv" => f.csv = true,
                "json" => f.json = true,
                "svg" => f.svg = true,
                other => return Err(bad("formats", format!("unknown format `{other}`"))),
            }
        }
        Ok(f)
    }

    pub fn threads(&self) -> Result<Option<usize>, ConfigError> {
        match self.params.threads {
            Some(0) => Err(bad("threads", "must be at least 1")),
            t => Ok(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

fn load_file(path: &Path) -> Result<Params, ConfigError> {
    let field = format!("config file {}", path.display());
    let text = std::fs::read_to_string(path).map_err(|e| bad(&field, e.to_string()))?;
    toml::from_str(&text).map_err(|e| bad(&field, e.to_string().trim_end().to_string()))
}

fn number(field: &str, s: &str) -> Result<f64, ConfigError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| bad(field, format!("`{s}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(field, format!("`{s}` is not finite")))
    }
}

fn count(field: &str, s: &str) -> Result<usize, ConfigError> {
    s.trim()
        .parse()
        .map_err(|_| bad(field, format!("`{s}` is not a non-negative integer")))
}

/// `lo:hi` or `lo:hi:count`.
pub fn window(field: &str, s: &str) -> Result<(f64, f64, Option<usize>), ConfigError> {
    let parts: Vec<&str> = s.split(':').collect();
    let (lo, hi, n) = match parts.as_slice() {
        [lo, hi] => (number(field, lo)?, number(field, hi)?, None),
        [lo, hi, n] => (number(field, lo)?, number(field, hi)?, Some(count(field, n)?)),
        _ => return Err(bad(field, format!("expected lo:hi[:count], got `{s}`"))),
    };
    if !(hi > lo) {
        return Err(bad(field, format!("empty window {lo}:{hi}")));
    }
    if n.is_some_and(|n| n < 2) {
        return Err(bad(field, "count must be at least 2"));
    }
    Ok((lo, hi, n))
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * step }).collect()
}

/// Window sampled with its count, or at spacing `default_step` when no count is given.
pub fn sampled_window(field: &str, s: &str, default_step: f64) -> Result<Vec<f64>, ConfigError> {
    let (lo, hi, n) = window(field, s)?;
    let n = n.unwrap_or(((hi - lo) / default_step).round() as usize + 1);
    Ok(linspace(lo, hi, n))
}

/// `a:b,c:d,...`.
pub fn boxes(field: &str, s: &str) -> Result<Vec<(f64, f64)>, ConfigError> {
    s.split(',')
        .map(|w| window(field, w).map(|(lo, hi, _)| (lo, hi)))
        .collect()
}

/// `81x81`, `201`.
pub fn counts(field: &str, s: &str) -> Result<Vec<usize>, ConfigError> {
    s.split('x').map(|c| count(field, c)).collect()
}

pub fn number_list(field: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',').map(|c| number(field, c)).collect()
}

/// `name:k=v,k=v` into the name and the key/value pairs; bare items have an empty value.
fn named(field: &str, s: &str) -> Result<(String, Vec<(String, String)>), ConfigError> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut kv = Vec::new();
    for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let (k, v) = item.split_once('=').unwrap_or((item, ""));
        if kv.iter().any(|(key, _): &(String, String)| key == k) {
            return Err(bad(field, format!("`{k}` given twice")));
        }
        kv.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok((name.trim().to_string(), kv))
}

struct Keys<'a> {
    field: &'a str,
    what: String,
    kv: Vec<(String, String)>,
}

impl Keys<'_> {
    fn take(&mut self, key: &str) -> Option<String> {
        let pos = self.kv.iter().position(|(k, _)| k == key)?;
        Some(self.kv.remove(pos).1)
    }

    fn num(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.take(key).map(|v| number(self.field, &v)).transpose()
    }

    fn req(&mut self, key: &str) -> Result<f64, ConfigError> {
        self.num(key)?
            .ok_or_else(|| bad(self.field, format!("{} needs `{key}=`", self.what)))
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.kv.first() {
            Some((k, _)) => Err(bad(self.field, format!("unknown key `{k}` for {}", self.what))),
            None => Ok(()),
        }
    }
}

/// Parses a profile from its name and key/value pairs, consuming the keys it uses.
fn profile_from(field: &str, name: &str, keys: &mut Keys) -> Result<RadialProfile, ConfigError> {
    let invalid = |e: shrinker_core::GeomError| bad(field, e.to_string());
    match name {
        "arctan" => RadialProfile::arctan(keys.req("m")?, keys.req("a")?).map_err(invalid),
        "exp" => Ok(RadialProfile::Exp),
        "zero" => Ok(RadialProfile::Zero),
        "poly" => {
            let mut coeffs = Vec::new();
            while let Some(pos) = keys.kv.iter().position(|(k, _)| k.starts_with('c') && k[1..].parse::<usize>().is_ok()) {
                let (k, v) = keys.kv.remove(pos);
                let idx: usize = k[1..].parse().unwrap_or(0);
                if coeffs.len() <= idx {
                    coeffs.resize(idx + 1, 0.0);
                }
                coeffs[idx] = number(field, &v)?;
            }
            RadialProfile::poly(coeffs).map_err(invalid)
        }
        "table" => {
            let path = keys
                .take("path")
                .ok_or_else(|| bad(field, "table profile needs `path=`"))?;
            load_table(field, Path::new(&path))
        }
        other => Err(bad(field, format!("unknown profile `{other}`"))),
    }
}

/// CSV with columns `t,b,db,ddb`; lines starting with `#` are ignored.
fn load_table(field: &str, path: &Path) -> Result<RadialProfile, ConfigError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| bad(field, format!("{}: {e}", path.display())))?;
    let mut cols: [Vec<f64>; 4] = Default::default();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(field, format!("{}: {e}", path.display())))?;
        if record.len() != 4 {
            return Err(bad(field, format!("{} row {}: expected t,b,db,ddb", path.display(), line + 1)));
        }
        for (col, value) in cols.iter_mut().zip(record.iter()) {
            col.push(number(field, value)?);
        }
    }
    let [t, b, db, ddb] = cols;
    ProfileTable::new(t, b, db, ddb)
        .map(RadialProfile::Table)
        .map_err(|e| bad(field, e.to_string()))
}

pub fn parse_profile(s: &str) -> Result<RadialProfile, ConfigError> {
    let field = "profile";
    let (name, kv) = named(field, s)?;
    let mut keys = Keys { field, what: format!("profile `{name}`"), kv };
    let p = profile_from(field, &name, &mut keys)?;
    keys.finish()?;
    Ok(p)
}

pub fn parse_orientation(s: Option<&str>) -> Result<Orientation, ConfigError> {
    s.unwrap_or("inward").parse().map_err(|e: shrinker_core::GeomError| bad("orientation", e.to_string()))
}

pub fn parse_surface(s: &str, orientation: Orientation) -> Result<SurfaceSpec, ConfigError> {
    let field = "surface";
    let (name, mut kv) = named(field, s)?;
    let cap = match kv.iter().position(|(k, _)| k == "cap") {
        Some(pos) => match kv.remove(pos).1.as_str() {
            "north" => Cap::North,
            "south" => Cap::South,
            other => return Err(bad(field, format!("cap must be north or south, got `{other}`"))),
        },
        None => Cap::North,
    };
    let mut keys = Keys { field, what: format!("surface `{name}`"), kv };
    let kind = match name.as_str() {
        "sphere" => SurfaceKind::Sphere { radius: keys.req("r")?, cap },
        "ellipsoid" => SurfaceKind::Ellipsoid {
            axes: [keys.req("a")?, keys.req("b")?, keys.req("c")?],
            cap,
        },
        "torus" => SurfaceKind::Torus {
            major: keys.req("R")?,
            minor: keys.req("r")?,
        },
        "cylinder" => SurfaceKind::Cylinder { radius: keys.req("r")? },
        "plane" => SurfaceKind::Plane { offset: keys.num("d")?.unwrap_or(0.0) },
        "circle" => SurfaceKind::Circle { radius: keys.req("r")? },
        "line" => SurfaceKind::Line { offset: keys.num("d")?.unwrap_or(0.0) },
        "spiral" | "spiral-cylinder" => {
            let profile_name = match keys.kv.first() {
                Some((k, v)) if v.is_empty() => k.clone(),
                _ => return Err(bad(field, format!("{name} needs a profile name first, e.g. `{name}:arctan,m=1,a=1`"))),
            };
            keys.kv.remove(0);
            let profile = profile_from(field, &profile_name, &mut keys)?;
            let d = keys.num("d")?.unwrap_or(1.0);
            let curve = SpiralCurve::new(profile, d).map_err(|e| bad(field, e.to_string()))?;
            if name == "spiral" {
                SurfaceKind::Spiral { curve }
            } else {
                SurfaceKind::SpiralCylinder { curve }
            }
        }
        other => return Err(bad(field, format!("unknown surface `{other}`"))),
    };
    keys.finish()?;
    SurfaceSpec::new(kind, orientation).map_err(|e| bad(field, e.to_string()))
}

/// Grid over `ranges` (or the surface's default box) with the given counts.
pub fn parse_grid(
    counts_text: Option<&str>,
    ranges_text: Option<&str>,
    default_ranges: Vec<(f64, f64)>,
    default_count: usize,
) -> Result<ParamGrid, ConfigError> {
    let ranges = match ranges_text {
        Some(r) => boxes("ranges", r)?,
        None => default_ranges,
    };
    let n = match counts_text {
        Some(c) => counts("grid", c)?,
        None => vec![default_count; ranges.len()],
    };
    if n.len() != ranges.len() {
        return Err(bad(
            "grid",
            format!("{} counts for a {}-parameter surface", n.len(), ranges.len()),
        ));
    }
    ParamGrid::new(ranges, n).map_err(|e| bad("grid", e.to_string()))
}
