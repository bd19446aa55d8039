use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use emitter_chain::greens::{ChainGeometry, DipoleOrientation, MAGIC_ANGLE};
use emitter_chain::hamiltonians::AlternationStrength;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Dispersion,
    EpScan,
    Scaling,
    Edge,
    Deform,
    Walk,
    Winding,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Self::Dispersion,
        Self::EpScan,
        Self::Scaling,
        Self::Edge,
        Self::Deform,
        Self::Walk,
        Self::Winding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Dispersion => "dispersion",
            Self::EpScan => "ep-scan",
            Self::Scaling => "scaling",
            Self::Edge => "edge",
            Self::Deform => "deform",
            Self::Walk => "walk",
            Self::Winding => "winding",
        }
    }

    fn needs_chain(self) -> bool {
        matches!(self, Self::EpScan | Self::Edge | Self::Deform | Self::Walk)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::UnknownExperiment(s.to_string()))
    }
}

/// The alternation h: a fixed value, or c·N^{−α} resolved per chain length.
/// Written as a number, or as text such as "N^-0.25", "20*N^-1" or "20/N".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HSpecText", into = "HSpecText")]
pub enum HSpec {
    Fixed(f64),
    Scaled { coefficient: f64, alpha: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum HSpecText {
    Number(f64),
    Text(String),
}

impl Default for HSpec {
    fn default() -> Self {
        Self::Fixed(0.0)
    }
}

impl TryFrom<HSpecText> for HSpec {
    type Error = String;

    fn try_from(raw: HSpecText) -> std::result::Result<Self, String> {
        match raw {
            HSpecText::Number(h) => Ok(Self::Fixed(h)),
            HSpecText::Text(s) => s.parse(),
        }
    }
}

impl From<HSpec> for HSpecText {
    fn from(h: HSpec) -> Self {
        match h {
            HSpec::Fixed(v) => Self::Number(v),
            other => Self::Text(other.to_string()),
        }
    }
}

impl FromStr for HSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || format!("cannot read h-spec {s:?}; use a number, \"N^-α\", \"c*N^-α\" or \"c/N\"");
        if let Ok(v) = text.parse::<f64>() {
            return Ok(Self::Fixed(v));
        }
        if let Some(c) = text.strip_suffix("/N") {
            let coefficient = c.parse().map_err(|_| bad())?;
            return Ok(Self::Scaled { coefficient, alpha: 1.0 });
        }
        let (coefficient, rest) = match text.split_once('*') {
            Some((c, rest)) => (c.parse().map_err(|_| bad())?, rest),
            None => (1.0, text.as_str()),
        };
        let exponent: f64 = rest.strip_prefix("N^").ok_or_else(bad)?.parse().map_err(|_| bad())?;
        Ok(Self::Scaled {
            coefficient,
            alpha: -exponent,
        })
    }
}

impl fmt::Display for HSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Fixed(h) => write!(f, "{h}"),
            Self::Scaled { coefficient, alpha } if coefficient == 1.0 => write!(f, "N^{}", -alpha),
            Self::Scaled { coefficient, alpha } => write!(f, "{coefficient}*N^{}", -alpha),
        }
    }
}

impl HSpec {
    pub fn is_scaled(&self) -> bool {
        matches!(self, Self::Scaled { .. })
    }

    /// h for a chain of `n_sites` emitters.
    pub fn resolve(&self, n_sites: usize) -> Result<AlternationStrength> {
        let a = match *self {
            Self::Fixed(h) => AlternationStrength::fixed(h),
            Self::Scaled { coefficient, alpha } if coefficient == 1.0 => Ok(AlternationStrength::scaled(n_sites, alpha)),
            Self::Scaled { coefficient, alpha } => AlternationStrength::fixed(coefficient * (n_sites as f64).powf(-alpha)),
        };
        a.map_err(|e| CliError::invalid("h", e.to_string()))
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Fixed(h) if !(h.is_finite() && h >= 0.0) => Err(CliError::invalid("h", format!("must be ≥ 0, got {h}"))),
            Self::Scaled { coefficient, alpha } if !(coefficient.is_finite() && coefficient >= 0.0 && alpha.is_finite()) => {
                Err(CliError::invalid("h", format!("bad scaling {self}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingQuantity {
    /// Smallest collective decay rate.
    #[default]
    DecayRate,
    /// Alternation at which the light-line pair coalesces.
    EdgeEp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindingModel {
    #[default]
    ShortRange,
    LongRange,
}

/// Experiment-specific grids; unset fields take per-experiment defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub k_points: Option<usize>,
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
    pub h_step: Option<f64>,
    pub sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub quantity: ScalingQuantity,
    /// Only sizes at or above this enter the scaling fit.
    pub fit_from: Option<usize>,
    /// Times of the density-map rows.
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub model: WindingModel,
    /// Intercell hopping of the short-range winding model.
    pub g: Option<f64>,
}

fn default_theta() -> f64 {
    MAGIC_ANGLE
}
fn default_spacing() -> f64 {
    FRAC_PI_2
}
fn default_tolerance() -> f64 {
    1e-8
}
fn default_t_max() -> f64 {
    1e3
}
fn default_dt() -> f64 {
    0.01
}
fn default_start_time() -> f64 {
    5.0
}
fn default_lambda_grid() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75]
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_sites: Option<usize>,
    /// d·k₀.
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub h: HSpec,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Walk integration horizon; extended tenfold while the surviving norm
    /// is too large.
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_start_time")]
    pub start_time: f64,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    pub output_path: Option<PathBuf>,
    /// Run dense linear algebra single-threaded so output is byte-stable.
    #[serde(default = "default_true")]
    pub deterministic: bool,
    #[serde(default)]
    pub sweep: SweepConfig,
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must be positive, got {v}")))
    }
}

fn even_chain(field: &str, n: usize) -> Result<()> {
    if n >= 2 && n % 2 == 0 {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("chain length must be even and ≥ 2, got {n}")))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        positive("spacing", self.spacing)?;
        positive("tolerance", self.tolerance)?;
        positive("dt", self.dt)?;
        positive("t_max", self.t_max)?;
        if !(0.0..=FRAC_PI_2).contains(&self.theta) {
            return Err(CliError::invalid("theta", format!("must lie in [0, π/2], got {}", self.theta)));
        }
        if !(self.start_time.is_finite() && self.start_time >= 0.0 && self.start_time < self.t_max) {
            return Err(CliError::invalid("start_time", format!("must lie in [0, t_max), got {}", self.start_time)));
        }
        self.h.validate()?;
        if self.lambda_grid.is_empty()
            || self.lambda_grid.iter().any(|l| !(0.0..=1.0).contains(l))
            || self.lambda_grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(CliError::invalid("lambda_grid", "must be non-empty and ascending within [0, 1]"));
        }
        match self.n_sites {
            Some(n) => even_chain("n_sites", n)?,
            None if self.experiment.needs_chain() => {
                return Err(CliError::invalid("n_sites", format!("required for the {} experiment", self.experiment)))
            }
            None if self.h.is_scaled() && self.experiment != Experiment::Scaling => {
                return Err(CliError::invalid("n_sites", "required to resolve an N-dependent h"))
            }
            None => {}
        }
        let s = &self.sweep;
        if s.k_points == Some(0) || s.k_points == Some(1) {
            return Err(CliError::invalid("sweep.k_points", "need at least two k points"));
        }
        for (field, v) in [("sweep.h_min", s.h_min), ("sweep.h_max", s.h_max)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(CliError::invalid(field, format!("must be ≥ 0, got {v}")));
                }
            }
        }
        if let Some(step) = s.h_step {
            positive("sweep.h_step", step)?;
        }
        let (lo, hi) = self.h_range();
        if lo >= hi {
            return Err(CliError::invalid("sweep.h_max", format!("must exceed sweep.h_min ({lo} ≥ {hi})")));
        }
        if let Some(sizes) = &s.sizes {
            for &n in sizes {
                even_chain("sweep.sizes", n)?;
            }
            if sizes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::invalid("sweep.sizes", "must be ascending"));
            }
        }
        if let Some(times) = &s.times {
            if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::invalid("sweep.times", "must be non-negative and ascending"));
            }
        }
        if let Some(g) = s.g {
            positive("sweep.g", g)?;
        }
        Ok(())
    }

    pub fn orientation(&self) -> Result<DipoleOrientation> {
        DipoleOrientation::new(self.theta).map_err(|e| CliError::invalid("theta", e.to_string()))
    }

    pub fn geometry(&self, n_sites: usize) -> Result<ChainGeometry> {
        ChainGeometry::new(n_sites, self.spacing).map_err(|e| CliError::invalid("n_sites", e.to_string()))
    }

    pub fn chain_length(&self) -> Result<usize> {
        self.n_sites
            .ok_or_else(|| CliError::invalid("n_sites", format!("required for the {} experiment", self.experiment)))
    }

    /// h for the configured chain length, or for `n_sites = 1` when no
    /// length is set and h is fixed.
    pub fn alternation(&self) -> Result<AlternationStrength> {
        self.h.resolve(self.n_sites.unwrap_or(1))
    }

    pub fn h_range(&self) -> (f64, f64) {
        (self.sweep.h_min.unwrap_or(0.005), self.sweep.h_max.unwrap_or(1.0))
    }

    /// The ascending ep-scan grid h_min, h_min + step, … ≤ h_max.
    pub fn h_grid(&self) -> Vec<f64> {
        let (lo, hi) = self.h_range();
        let step = self.sweep.h_step.unwrap_or(0.005);
        let count = ((hi - lo) / step + 1e-9).floor() as usize;
        (0..=count).map(|i| lo + i as f64 * step).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sweep.sizes.clone().unwrap_or_else(|| vec![100, 150, 200, 300, 400])
    }

    pub fn density_times(&self) -> Vec<f64> {
        self.sweep
            .times
            .clone()
            .unwrap_or_else(|| (0..=50).map(f64::from).collect())
    }

    pub fn k_points(&self) -> usize {
        self.sweep.k_points.unwrap_or(match self.experiment {
            Experiment::Winding => 1025,
            _ => 256,
        })
    }

    /// Where tables go when `output_path` is unset.
    pub fn output_dir(&self, fallback_name: &str) -> PathBuf {
        self.output_path
            .clone()
            .unwrap_or_else(|| Path::new("out").join(fallback_name))
    }
}

/// Sets `key` (dotted for sections, e.g. `sweep.h_max`) to `value`, read as
/// a TOML value when possible and as a bare string otherwise.
fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::invalid(assignment, "override must look like key=value"))?;
    let (key, raw) = (key.trim(), raw.trim());
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| CliError::invalid(key, "empty override key"))?;
    let mut node = table;
    for part in parts {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| CliError::invalid(key, format!("`{part}` is not a section")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

/// Parses, overrides, defaults and validates a config. `origin` names the
/// source in error messages.
pub fn parse_config(text: &str, origin: &str, overrides: &[String]) -> Result<ExperimentConfig> {
    let parse_err = |e: toml::de::Error| CliError::Parse {
        origin: origin.to_string(),
        message: e.to_string(),
    };
    let mut table: toml::Table = toml::from_str(text).map_err(parse_err)?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    match table.get("experiment") {
        Some(toml::Value::String(name)) => {
            name.parse::<Experiment>()?;
        }
        Some(other) => return Err(CliError::invalid("experiment", format!("expected a name, got {other}"))),
        None => return Err(CliError::invalid("experiment", "missing")),
    }
    let config: ExperimentConfig = if overrides.is_empty() {
        // Straight from the text so type errors keep their line numbers.
        toml::from_str(text).map_err(parse_err)?
    } else {
        toml::Value::Table(table).try_into().map_err(parse_err)?
    };
    config.validate()?;
    Ok(config)
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, &path.display().to_string(), &[])
}
