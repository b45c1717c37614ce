//! Run configuration shared by the command-line front end and the examples.
//!
//! Files are flat `key = value` text with `#` comments. Angles accept
//! radians or multiples of π such as `2pi/3`, `0.75pi` or `pi`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{SectorLabel, Sign};
use crate::scissor::GridSpec;
use crate::skeleton::{WireAngles, DEFAULT_MARGIN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!(
                "unknown format {other:?} (csv|json)"
            ))),
        }
    }
}

/// `a:b:steps` with the endpoints parsed as angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub n_nodes: usize,
    pub map_scale: f64,
    pub margin: f64,
    pub theta: Option<f64>,
    pub theta_range: Option<Range>,
    /// Hamiltonian sectors to report; all four by default.
    pub sectors: Vec<SectorLabel>,
    pub lambda: f64,
    /// Pairwise angles `(θ12, θ13, θ23)` of the three-wire star.
    pub angles: (f64, f64, f64),
    pub k_range: Range,
    pub grid: GridSpec,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = 2.0 * PI / 3.0;
        RunConfig {
            n_nodes: 400,
            map_scale: 1.0,
            margin: DEFAULT_MARGIN,
            theta: None,
            theta_range: None,
            sectors: SectorLabel::ALL.to_vec(),
            lambda: -1.0,
            angles: (t, t, t),
            k_range: Range {
                start: 0.75,
                end: 1.5,
                steps: 16,
            },
            grid: GridSpec::default(),
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

impl RunConfig {
    /// Defaults overlaid with the entries of a `key = value` file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected key = value",
                    lineno + 1
                )));
            };
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Set one option by name; keys use `_` or `-` interchangeably.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.replace('-', "_").as_str() {
            "n_nodes" => self.n_nodes = parse_num(value)?,
            "map_scale" => self.map_scale = parse_num(value)?,
            "margin" => self.margin = parse_num(value)?,
            "theta" => self.theta = Some(parse_angle(value)?),
            "theta_range" => self.theta_range = Some(parse_range(value)?),
            "sector" | "sectors" => self.sectors = parse_sectors(value)?,
            "lambda" => self.lambda = parse_num(value)?,
            "angles" => self.angles = parse_angles(value)?,
            "k_range" => self.k_range = parse_range(value)?,
            "grid" => self.grid = parse_grid(value)?,
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(16..=4096).contains(&self.n_nodes) {
            return Err(Error::Config(format!(
                "n_nodes must be in [16, 4096], got {}",
                self.n_nodes
            )));
        }
        if !(self.map_scale > 0.0) || !self.map_scale.is_finite() {
            return Err(Error::Config(format!(
                "map_scale must be positive, got {}",
                self.map_scale
            )));
        }
        if !(self.margin > 0.0) || !self.margin.is_finite() {
            return Err(Error::Config(format!(
                "margin must be positive, got {}",
                self.margin
            )));
        }
        if let Some(t) = self.theta {
            if !(t > 0.0 && t < PI) {
                return Err(Error::Config(format!("theta must lie in (0, π), got {t}")));
            }
        }
        if let Some(r) = self.theta_range {
            if !(r.start > 0.0 && r.end < PI && r.start <= r.end && r.steps >= 1) {
                return Err(Error::Config(format!(
                    "theta range {r:?} must lie in (0, π)"
                )));
            }
        }
        if self.sectors.is_empty() {
            return Err(Error::Config("no sectors selected".into()));
        }
        Ok(())
    }

    pub fn wire_angles(&self) -> Result<WireAngles> {
        let (a, b, c) = self.angles;
        WireAngles::new(a, b, c)
    }

    /// Angles to sweep: the explicit range, else the single angle, else the default grid.
    pub fn thetas(&self) -> Result<Vec<f64>> {
        if let Some(r) = self.theta_range {
            return crate::scissor::theta_grid(r.start, r.end, r.steps);
        }
        if let Some(t) = self.theta {
            return Ok(vec![t]);
        }
        Ok(crate::scissor::default_theta_grid())
    }
}

fn parse_num<T: FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {s:?} as a number")))
}

/// Radians, or a multiple of π: `pi`, `-pi/4`, `2pi/3`, `0.75pi`, `2*pi/3`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s
        .trim()
        .to_ascii_lowercase()
        .replace('π', "pi")
        .replace(' ', "");
    let bad = || Error::Config(format!("cannot parse angle {s:?}"));
    let Some((coef, rest)) = t.split_once("pi") else {
        return match t.split_once('/') {
            Some((num, den)) => {
                Ok(num.parse::<f64>().map_err(|_| bad())?
                    / den.parse::<f64>().map_err(|_| bad())?)
            }
            None => t.parse().map_err(|_| bad()),
        };
    };
    let coef = coef.trim_end_matches('*');
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => coef.parse::<f64>().map_err(|_| bad())?,
    };
    let d = match rest {
        "" => 1.0,
        _ => rest
            .strip_prefix('/')
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    let v = c * PI / d;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// `a:b:steps`.
pub fn parse_range(s: &str) -> Result<Range> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(Error::Config(format!("expected a:b:steps, got {s:?}")));
    };
    let range = Range {
        start: parse_angle(a)?,
        end: parse_angle(b)?,
        steps: parse_num(n)?,
    };
    if range.steps == 0 || range.start > range.end {
        return Err(Error::Config(format!("empty range {s:?}")));
    }
    Ok(range)
}

fn parse_sign(s: &str) -> Result<Sign> {
    match s.trim() {
        "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
        "-" | "-1" | "minus" => Ok(Sign::Minus),
        other => Err(Error::Config(format!("cannot parse parity {other:?}"))),
    }
}

/// `a,b` for one sector, `all`, or several sectors separated by `;`.
pub fn parse_sectors(s: &str) -> Result<Vec<SectorLabel>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(SectorLabel::ALL.to_vec());
    }
    s.split(';')
        .map(|one| {
            let (a, b) = one
                .split_once(',')
                .ok_or_else(|| Error::Config(format!("expected sector as a,b, got {one:?}")))?;
            Ok(SectorLabel::new(parse_sign(a)?, parse_sign(b)?))
        })
        .collect()
}

/// `θ12,θ13,θ23`.
pub fn parse_angles(s: &str) -> Result<(f64, f64, f64)> {
    let v: Vec<f64> = s.split(',').map(parse_angle).collect::<Result<_>>()?;
    match v[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => Err(Error::Config(format!("expected three angles, got {s:?}"))),
    }
}

/// `half_width:points`, a square grid centred at the crossing.
pub fn parse_grid(s: &str) -> Result<GridSpec> {
    let (w, n) = s
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("expected half_width:points, got {s:?}")))?;
    let (w, n): (f64, usize) = (parse_num(w)?, parse_num(n)?);
    if !(w > 0.0) || n == 0 {
        return Err(Error::Config(format!("invalid grid {s:?}")));
    }
    Ok(GridSpec::square(w, n))
}
