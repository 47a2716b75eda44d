//! Flat `key = value` experiment configuration.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use maplace_core::geometry::DEFAULT_U_MAX;
use maplace_core::search::DEFAULT_SEARCH_BUDGET;

use crate::error::{CliError, Result};

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
pub const DEFAULT_FREQUENCY: f64 = 28e9;
pub const DEFAULT_HALF_APERTURE_WL: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignKind {
    Proposed,
    ProposedAsymptotic,
    Ula,
    SparseUla,
    TwoEdge,
    Exhaustive,
    PositionsFile,
}

impl DesignKind {
    pub const ALL: [DesignKind; 7] = [
        DesignKind::Proposed,
        DesignKind::ProposedAsymptotic,
        DesignKind::Ula,
        DesignKind::SparseUla,
        DesignKind::TwoEdge,
        DesignKind::Exhaustive,
        DesignKind::PositionsFile,
    ];

    /// Designs compared by `benchmark` when none are listed.
    pub const BENCHMARK: [DesignKind; 5] = [
        DesignKind::Proposed,
        DesignKind::TwoEdge,
        DesignKind::SparseUla,
        DesignKind::Ula,
        DesignKind::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DesignKind::Proposed => "proposed",
            DesignKind::ProposedAsymptotic => "proposed-asymptotic",
            DesignKind::Ula => "ula",
            DesignKind::SparseUla => "sparse-ula",
            DesignKind::TwoEdge => "two-edge",
            DesignKind::Exhaustive => "exhaustive",
            DesignKind::PositionsFile => "positions-file",
        }
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DesignKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        DesignKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown design `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(CliError::Config(format!("unknown output format `{s}`"))),
        }
    }
}

/// Raw settings as read from a config file and command-line flags.
///
/// Unset optional fields fall back to the defaults when resolved.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    pub wavelength: Option<f64>,
    pub frequency: Option<f64>,
    /// Half-aperture in meters.
    pub half_aperture: Option<f64>,
    /// Half-aperture in wavelengths.
    pub half_aperture_wl: Option<f64>,
    pub n: Option<usize>,
    pub snapshots: Option<u32>,
    pub snr_db: Option<f64>,
    pub n_u: Option<usize>,
    pub n_r: Option<usize>,
    pub u_max: Option<f64>,
    pub design: Option<DesignKind>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
    /// Candidate pitch for exhaustive search, meters.
    pub pitch: Option<f64>,
    pub symmetry_prune: Option<bool>,
    pub search_budget: Option<u128>,
}

/// Fully validated settings with every default applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub wavelength: f64,
    pub half_aperture: f64,
    pub n: usize,
    pub snapshots: u32,
    pub snr_db: f64,
    pub n_u: usize,
    pub n_r: usize,
    pub u_max: f64,
    pub design: DesignKind,
    pub format: OutputFormat,
    pub seed: u64,
    pub pitch: f64,
    pub symmetry_prune: bool,
    pub search_budget: u128,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

fn parse_bool(key: &str, value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("invalid boolean `{value}` for `{key}`")),
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|(line, message)| CliError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        })
    }

    /// Parses config text. Errors carry the 1-based line number.
    pub fn parse(text: &str) -> std::result::Result<Self, (usize, String)> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| (idx + 1, format!("expected `key = value`, got `{line}`")))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|m| (idx + 1, m))?;
        }
        Ok(cfg)
    }

    /// Sets one key. Accepts `-` and `_` interchangeably.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let key = key.replace('-', "_");
        let k = key.as_str();
        match k {
            "wavelength" => self.wavelength = Some(parse_value(k, value)?),
            "frequency" => self.frequency = Some(parse_value(k, value)?),
            "half_aperture" => self.half_aperture = Some(parse_value(k, value)?),
            "half_aperture_wl" => self.half_aperture_wl = Some(parse_value(k, value)?),
            "n" => self.n = Some(parse_value(k, value)?),
            "snapshots" => self.snapshots = Some(parse_value(k, value)?),
            "snr_db" => self.snr_db = Some(parse_value(k, value)?),
            "n_u" => self.n_u = Some(parse_value(k, value)?),
            "n_r" => self.n_r = Some(parse_value(k, value)?),
            "u_max" => self.u_max = Some(parse_value(k, value)?),
            "design" => self.design = Some(value.parse().map_err(|e: CliError| e.to_string())?),
            "format" => self.format = Some(value.parse().map_err(|e: CliError| e.to_string())?),
            "seed" => self.seed = Some(parse_value(k, value)?),
            "pitch" => self.pitch = Some(parse_value(k, value)?),
            "symmetry_prune" => self.symmetry_prune = Some(parse_bool(k, value)?),
            "search_budget" => self.search_budget = Some(parse_value(k, value)?),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overridden_by(self, other: &ExperimentConfig) -> Self {
        // A wavelength given on the command line wins over a file frequency
        // and vice versa, so the pair is overridden together.
        let (wavelength, frequency) = if other.wavelength.is_some() || other.frequency.is_some() {
            (other.wavelength, other.frequency)
        } else {
            (self.wavelength, self.frequency)
        };
        let (half_aperture, half_aperture_wl) =
            if other.half_aperture.is_some() || other.half_aperture_wl.is_some() {
                (other.half_aperture, other.half_aperture_wl)
            } else {
                (self.half_aperture, self.half_aperture_wl)
            };
        ExperimentConfig {
            wavelength,
            frequency,
            half_aperture,
            half_aperture_wl,
            n: other.n.or(self.n),
            snapshots: other.snapshots.or(self.snapshots),
            snr_db: other.snr_db.or(self.snr_db),
            n_u: other.n_u.or(self.n_u),
            n_r: other.n_r.or(self.n_r),
            u_max: other.u_max.or(self.u_max),
            design: other.design.or(self.design),
            format: other.format.or(self.format),
            seed: other.seed.or(self.seed),
            pitch: other.pitch.or(self.pitch),
            symmetry_prune: other.symmetry_prune.or(self.symmetry_prune),
            search_budget: other.search_budget.or(self.search_budget),
        }
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let bad = |msg: &str| CliError::Config(msg.to_string());
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(CliError::Config(format!(
                    "`{name}` must be positive and finite, got {v}"
                )))
            }
        };

        let wavelength = match (self.wavelength, self.frequency) {
            (Some(_), Some(_)) => {
                return Err(bad("`wavelength` and `frequency` are mutually exclusive"))
            }
            (Some(l), None) => positive("wavelength", l)?,
            (None, Some(f)) => SPEED_OF_LIGHT / positive("frequency", f)?,
            (None, None) => SPEED_OF_LIGHT / DEFAULT_FREQUENCY,
        };
        let half_aperture = match (self.half_aperture, self.half_aperture_wl) {
            (Some(_), Some(_)) => {
                return Err(bad(
                    "`half_aperture` and `half_aperture_wl` are mutually exclusive",
                ))
            }
            (Some(a), None) => positive("half_aperture", a)?,
            (None, Some(w)) => positive("half_aperture_wl", w)? * wavelength,
            (None, None) => DEFAULT_HALF_APERTURE_WL * wavelength,
        };
        let n = self.n.unwrap_or(25);
        if n == 0 {
            return Err(bad("`n` must be at least 1"));
        }
        let snapshots = self.snapshots.unwrap_or(1024);
        if snapshots == 0 {
            return Err(bad("`snapshots` must be at least 1"));
        }
        let snr_db = self.snr_db.unwrap_or(5.0);
        if !snr_db.is_finite() {
            return Err(bad("`snr_db` must be finite"));
        }
        let n_u = self.n_u.unwrap_or(201);
        let n_r = self.n_r.unwrap_or(201);
        if n_u == 0 || n_r == 0 {
            return Err(bad("grid resolutions must be at least 1"));
        }
        let u_max = self.u_max.unwrap_or(DEFAULT_U_MAX);
        if !(0.0..1.0).contains(&u_max) {
            return Err(bad("`u_max` must lie in [0, 1)"));
        }
        let pitch = match self.pitch {
            Some(p) => positive("pitch", p)?,
            None => wavelength / 2.0,
        };
        Ok(Resolved {
            wavelength,
            half_aperture,
            n,
            snapshots,
            snr_db,
            n_u,
            n_r,
            u_max,
            design: self.design.unwrap_or(DesignKind::Proposed),
            format: self.format.unwrap_or_default(),
            seed: self.seed.unwrap_or(0),
            pitch,
            symmetry_prune: self.symmetry_prune.unwrap_or(false),
            search_budget: self.search_budget.unwrap_or(DEFAULT_SEARCH_BUDGET),
        })
    }
}
