//! Run configuration: a single JSON document per run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::HPolyhedron;
use crate::modulus::{GridFunction, ModulusSpec};
use crate::piecewise::PiecewiseAffine;
use crate::width::WidthSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulusConfig {
    Power {
        alpha: f64,
    },
    PowerLog {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        offset: Option<f64>,
        #[serde(default)]
        knee: Option<f64>,
    },
    LinearOverLog {
        beta: f64,
        #[serde(default)]
        offset: Option<f64>,
        #[serde(default)]
        knee: Option<f64>,
    },
    Sampled {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
}

impl ModulusConfig {
    pub fn build(&self) -> Result<ModulusSpec> {
        match self {
            Self::Power { alpha } => ModulusSpec::power(*alpha),
            Self::PowerLog { alpha, beta, offset, knee } => match (offset, knee) {
                (Some(o), Some(k)) => ModulusSpec::power_log_with(*alpha, *beta, *o, *k),
                (None, None) => ModulusSpec::power_log(*alpha, *beta),
                _ => Err(Error::Config("offset and knee must be given together".into())),
            },
            Self::LinearOverLog { beta, offset, knee } => match (offset, knee) {
                (Some(o), Some(k)) => ModulusSpec::linear_over_log_with(*beta, *o, *k),
                (None, None) => ModulusSpec::linear_over_log(*beta),
                _ => Err(Error::Config("offset and knee must be given together".into())),
            },
            Self::Sampled { xs, ys } => Ok(ModulusSpec::sampled(GridFunction::new(
                xs.clone(),
                ys.clone(),
            )?)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WidthConfig {
    Constant { c: f64 },
    PowerShift { beta: f64, shift: f64 },
    Affine { slope: f64, intercept: f64 },
    Piecewise { breakpoints: Vec<f64>, values: Vec<f64> },
}

impl WidthConfig {
    pub fn build(&self) -> Result<WidthSpec> {
        match self {
            Self::Constant { c } => WidthSpec::constant(*c),
            Self::PowerShift { beta, shift } => WidthSpec::power_shift(*beta, *shift),
            Self::Affine { slope, intercept } => WidthSpec::affine(*slope, *intercept),
            Self::Piecewise { breakpoints, values } => {
                WidthSpec::piecewise(PiecewiseAffine::new(breakpoints.clone(), values.clone())?)
            }
        }
    }
}

/// H-polyhedron input: row-major matrix `A`, offsets `c`, openness flag.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyhedronConfig {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    pub open: bool,
}

impl PolyhedronConfig {
    pub fn build(&self) -> Result<HPolyhedron> {
        HPolyhedron::from_rows(&self.a, &self.c, self.open)
    }
}

fn default_gamma() -> f64 {
    1.05
}

fn default_rho() -> f64 {
    4.0
}

fn default_cap() -> usize {
    crate::partition_modulus::DEFAULT_NODE_CAP
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_max: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

fn default_a_min() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionConfig {
    #[serde(default = "default_a_min")]
    pub a_min: f64,
    /// Threshold for a positive envelope slope; defaults to 1e-12 of the
    /// largest slope.
    #[serde(default)]
    pub eps_pos: Option<f64>,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        Self { a_min: default_a_min(), eps_pos: None }
    }
}

fn default_triples() -> usize {
    100_000
}

fn default_pairs() -> usize {
    10_000
}

fn default_structural_pairs() -> usize {
    1_000
}

fn default_envelope_samples() -> usize {
    1_000
}

fn default_lines() -> usize {
    100
}

fn default_pairs_per_line() -> usize {
    32
}

fn default_tolerance_scale() -> f64 {
    1e-9
}

fn default_n_max() -> u32 {
    512
}

fn default_condition_samples() -> usize {
    48
}

fn default_condition_window() -> (f64, f64) {
    (1e3, 1e6)
}

fn default_eps_star() -> f64 {
    0.05
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationConfig {
    /// Sampling seed. Mandatory: runs must be reproducible.
    pub seed: u64,
    #[serde(default = "default_triples")]
    pub triples: usize,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_structural_pairs")]
    pub structural_pairs: usize,
    #[serde(default = "default_envelope_samples")]
    pub envelope_samples: usize,
    #[serde(default = "default_lines")]
    pub lines: usize,
    #[serde(default = "default_pairs_per_line")]
    pub pairs_per_line: usize,
    #[serde(default = "default_tolerance_scale")]
    pub tolerance_scale: f64,
    #[serde(default = "default_n_max")]
    pub condition_n_max: u32,
    #[serde(default = "default_condition_samples")]
    pub condition_samples: usize,
    #[serde(default = "default_condition_window")]
    pub condition_window: (f64, f64),
    #[serde(default = "default_eps_star")]
    pub eps_star: f64,
    /// Witness probes; defaults to powers of ten inside the domain.
    #[serde(default)]
    pub probes: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub omega: ModulusConfig,
    #[serde(default)]
    pub eta: Option<WidthConfig>,
    #[serde(default)]
    pub polyhedron: Option<PolyhedronConfig>,
    #[serde(default)]
    pub polyhedron_path: Option<PathBuf>,
    pub grid: GridConfig,
    #[serde(default)]
    pub construction: ConstructionConfig,
    pub verification: VerificationConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: PipelineConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.grid.t_max > 0.0) {
            return Err(Error::Config(format!("t_max {} must be positive", self.grid.t_max)));
        }
        if !(self.grid.gamma > 1.0) {
            return Err(Error::Config(format!("gamma {} must be > 1", self.grid.gamma)));
        }
        if !(self.grid.rho >= 2.0) {
            return Err(Error::Config(format!("rho {} must be >= 2", self.grid.rho)));
        }
        if !(self.construction.a_min > 0.0) {
            return Err(Error::Config("a_min must be positive".into()));
        }
        let v = &self.verification;
        if v.triples == 0 || v.pairs == 0 || v.structural_pairs == 0 || v.envelope_samples == 0 {
            return Err(Error::Config("sample counts must be positive".into()));
        }
        if !(v.tolerance_scale > 0.0 && v.eps_star > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(v.condition_window.0 > 0.0 && v.condition_window.0 < v.condition_window.1) {
            return Err(Error::Config("bad condition window".into()));
        }
        if let Some(probes) = &v.probes {
            if probes.iter().any(|&p| !(p > 0.0)) {
                return Err(Error::Config("probes must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn width(&self) -> Result<WidthSpec> {
        match &self.eta {
            Some(w) => w.build(),
            None => Err(Error::Config("this command needs an eta width spec".into())),
        }
    }

    pub fn polyhedron(&self) -> Result<HPolyhedron> {
        match (&self.polyhedron, &self.polyhedron_path) {
            (Some(p), None) => p.build(),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                let p: PolyhedronConfig = serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("bad polyhedron file: {e}")))?;
                p.build()
            }
            (Some(_), Some(_)) => {
                Err(Error::Config("give either polyhedron or polyhedron_path, not both".into()))
            }
            (None, None) => Err(Error::Config("this command needs a polyhedron".into())),
        }
    }
}
