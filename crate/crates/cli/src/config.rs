use std::path::{Path, PathBuf};
use std::sync::Arc;

use levyft::nufft::{NufftSettings, DEFAULT_EPSILON, DEFAULT_HALF_WIDTH};
use levyft::solver::LevyModel;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;
pub const I_MIN: u32 = 7;
pub const I_MAX: u32 = 14;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("no time values given")]
    NoTimes,
    #[error("time values must be finite and > 0, got {0}")]
    BadTime(f64),
    #[error("exponent i = {0} outside {I_MIN}..={I_MAX}")]
    ExponentRange(u32),
    #[error("need at least {need} exponents, got {got}")]
    TooFewExponents { need: usize, got: usize },
    #[error("need 0 < x_l < x_u, got x_l = {x_l}, x_u = {x_u}")]
    Window { x_l: f64, x_u: f64 },
    #[error("cannot parse exponent range '{0}' (use 11, 7..12 or 7,9,11)")]
    Range(String),
    #[error("unknown model '{0}' (use vg, nig or custom:gamma=<1|2>,mu=exp(<rate>)|gauss(<sigma>))")]
    Model(String),
    #[error("config file {path}: {msg}")]
    File { path: PathBuf, msg: String },
    #[error("config schema_version {0} not supported (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("repetitions must be at least 1")]
    Reps,
}

/// Model named on the command line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Vg,
    Nig,
    Custom { gamma: u8, mu: CustomMu },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CustomMu {
    /// `e^{-rate y}`
    Exp { rate: f64 },
    /// `e^{-y^2 / 2 sigma^2}`
    Gauss { sigma: f64 },
}

impl ModelSpec {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let bad = || ConfigError::Model(s.to_string());
        match s.trim() {
            "vg" => return Ok(ModelSpec::Vg),
            "nig" => return Ok(ModelSpec::Nig),
            _ => {}
        }
        let body = s.trim().strip_prefix("custom:").ok_or_else(bad)?;
        let mut gamma = None;
        let mut mu = None;
        for part in body.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "gamma" => gamma = Some(value.trim().parse::<u8>().map_err(|_| bad())?),
                "mu" => mu = Some(parse_mu(value.trim()).ok_or_else(bad)?),
                _ => return Err(bad()),
            }
        }
        match (gamma, mu) {
            (Some(g @ (1 | 2)), Some(mu)) => Ok(ModelSpec::Custom { gamma: g, mu }),
            _ => Err(bad()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ModelSpec::Vg => "vg".into(),
            ModelSpec::Nig => "nig".into(),
            ModelSpec::Custom { gamma, mu } => match mu {
                CustomMu::Exp { rate } => format!("custom-g{gamma}-exp{rate}"),
                CustomMu::Gauss { sigma } => format!("custom-g{gamma}-gauss{sigma}"),
            },
        }
    }

    pub fn build(&self) -> LevyModel {
        match *self {
            ModelSpec::Vg => LevyModel::vg(),
            ModelSpec::Nig => LevyModel::nig(),
            ModelSpec::Custom { gamma, mu } => {
                let f: Arc<dyn Fn(f64) -> f64 + Send + Sync> = match mu {
                    CustomMu::Exp { rate } => Arc::new(move |y: f64| (-rate * y).exp()),
                    CustomMu::Gauss { sigma } => {
                        Arc::new(move |y: f64| (-y * y / (2.0 * sigma * sigma)).exp())
                    }
                };
                LevyModel::new(self.name(), gamma, f).expect("gamma checked at parse time")
            }
        }
    }
}

fn parse_mu(s: &str) -> Option<CustomMu> {
    let (head, rest) = s.split_once('(')?;
    let arg: f64 = rest.strip_suffix(')')?.trim().parse().ok()?;
    if !(arg > 0.0 && arg.is_finite()) {
        return None;
    }
    match head.trim() {
        "exp" => Some(CustomMu::Exp { rate: arg }),
        "gauss" => Some(CustomMu::Gauss { sigma: arg }),
        _ => None,
    }
}

/// `11`, `7..12` (inclusive) or `7,9,11`.
pub fn parse_range(s: &str) -> Result<Vec<u32>, ConfigError> {
    let bad = || ConfigError::Range(s.to_string());
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| bad()))
        .collect()
}

/// Keys accepted in a TOML config file. Every key is optional; flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub schema_version: u32,
    pub model: Option<String>,
    pub t: Option<Vec<f64>>,
    pub i_range: Option<String>,
    pub x_l: Option<f64>,
    pub x_u: Option<f64>,
    pub d: Option<f64>,
    pub b: Option<f64>,
    pub eps: Option<f64>,
    pub out: Option<PathBuf>,
    pub reps: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let file_err = |msg: String| ConfigError::File {
            path: path.to_path_buf(),
            msg,
        };
        let text = std::fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
        let cfg: FileConfig = toml::from_str(&text).map_err(|e| file_err(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Schema(cfg.schema_version));
        }
        Ok(cfg)
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub model: Option<String>,
    pub t: Option<Vec<f64>>,
    pub i_range: Option<String>,
    pub x_l: Option<f64>,
    pub x_u: Option<f64>,
    pub d: Option<f64>,
    pub b: Option<f64>,
    pub eps: Option<f64>,
    pub out: Option<PathBuf>,
    pub reps: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub t_values: Vec<f64>,
    pub exponent_i: Vec<u32>,
    pub x_l: f64,
    pub x_u: f64,
    pub d: f64,
    pub nufft: NufftSettings,
    pub output_dir: PathBuf,
    pub reps: usize,
}

impl RunConfig {
    /// Merge file and flags over the defaults, then validate.
    pub fn resolve(
        file: Option<FileConfig>,
        flags: Overrides,
        default_range: &str,
        min_exponents: usize,
    ) -> Result<Self, ConfigError> {
        let file = file.unwrap_or(FileConfig {
            schema_version: SCHEMA_VERSION,
            ..Default::default()
        });
        let model = flags.model.or(file.model).unwrap_or_else(|| "vg".into());
        let range = flags.i_range.or(file.i_range).unwrap_or_else(|| default_range.into());
        let cfg = RunConfig {
            model: ModelSpec::parse(&model)?,
            t_values: flags.t.or(file.t).unwrap_or_else(|| vec![1.0, 2.0, 3.0]),
            exponent_i: parse_range(&range)?,
            x_l: flags.x_l.or(file.x_l).unwrap_or(2.0),
            x_u: flags.x_u.or(file.x_u).unwrap_or(5.0),
            d: flags.d.or(file.d).unwrap_or(1.0),
            nufft: NufftSettings {
                epsilon: flags.eps.or(file.eps).unwrap_or(DEFAULT_EPSILON),
                b: flags.b.or(file.b).unwrap_or(DEFAULT_HALF_WIDTH),
            },
            output_dir: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            reps: flags.reps.or(file.reps).unwrap_or(5),
        };
        cfg.validate(min_exponents)?;
        Ok(cfg)
    }

    pub fn validate(&self, min_exponents: usize) -> Result<(), ConfigError> {
        if self.t_values.is_empty() {
            return Err(ConfigError::NoTimes);
        }
        if let Some(&t) = self.t_values.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(ConfigError::BadTime(t));
        }
        if let Some(&i) = self.exponent_i.iter().find(|i| !(I_MIN..=I_MAX).contains(*i)) {
            return Err(ConfigError::ExponentRange(i));
        }
        if self.exponent_i.len() < min_exponents {
            return Err(ConfigError::TooFewExponents {
                need: min_exponents,
                got: self.exponent_i.len(),
            });
        }
        if !(self.x_l > 0.0 && self.x_l < self.x_u) {
            return Err(ConfigError::Window {
                x_l: self.x_l,
                x_u: self.x_u,
            });
        }
        if self.reps == 0 {
            return Err(ConfigError::Reps);
        }
        Ok(())
    }
}
