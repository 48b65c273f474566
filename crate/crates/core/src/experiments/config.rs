//! Experiment configuration: a TOML file with one table per concern.
//!
//! ```toml
//! [experiment]
//! kind = "scaling"
//! seed = 7
//! output_dir = "out"
//!
//! [construction]
//! family = "simple"
//! k_values = [8, 10, 12]
//!
//! [perturbation]
//! kind = "left-doubling"
//!
//! [measurements]
//! list = ["hitting", "gap"]
//! walkers = 2000
//! ```
//!
//! Every field has a default, unknown keys are rejected, and the only
//! environment override is `MIXLAB_OUT` for the output directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::GapMethod;
use crate::constructions::{ConstructionParams, EllRule, LogBase, TorusShape};
use crate::format::hash_str;

/// Environment variable overriding `experiment.output_dir`.
pub const OUTPUT_ENV: &str = "MIXLAB_OUT";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Scaling,
    Robustness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionFamily {
    Simple,
    Main,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationKind {
    LeftDoubling,
    UniformRandom,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measurement {
    Mixing,
    Hitting,
    Gap,
    Visits,
    Excursions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HittingMethod {
    MonteCarlo,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobustFamily {
    LatticeTorus,
    Hypercube,
    ErSupercritical,
    ErCritical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub output_dir: String,
    /// Skip K values already present in the row log of a previous run.
    pub resume: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self { kind: ExperimentKind::Scaling, seed: 1, output_dir: "mixlab-out".into(), resume: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstructionSection {
    pub family: ConstructionFamily,
    pub k_values: Vec<u32>,
    pub ell_coeff: f64,
    pub ell_log_base: LogBase,
    pub balance_window_coeff: f64,
    pub level_range: [f64; 2],
    pub torus_volume_factor: f64,
    pub torus_shape: TorusShape,
    pub expander_degree: usize,
    pub expander_size_factor: f64,
    pub expander_gap_threshold: f64,
    pub max_expander_retries: usize,
}

impl Default for ConstructionSection {
    fn default() -> Self {
        let p = ConstructionParams::new(8);
        Self {
            family: ConstructionFamily::Simple,
            k_values: vec![8, 10, 12],
            ell_coeff: p.ell_rule.coeff,
            ell_log_base: p.ell_rule.log_base,
            balance_window_coeff: p.balance_window_coeff,
            level_range: [p.level_range.0, p.level_range.1],
            torus_volume_factor: p.torus_volume_factor,
            torus_shape: p.torus_shape,
            expander_degree: p.expander_degree,
            expander_size_factor: p.expander_size_factor,
            expander_gap_threshold: p.expander_gap_threshold,
            max_expander_retries: p.max_expander_retries,
        }
    }
}

impl ConstructionSection {
    pub fn params(&self, k: u32) -> ConstructionParams {
        ConstructionParams {
            k,
            ell_rule: EllRule { coeff: self.ell_coeff, log_base: self.ell_log_base },
            balance_window_coeff: self.balance_window_coeff,
            level_range: (self.level_range[0], self.level_range[1]),
            torus_volume_factor: self.torus_volume_factor,
            torus_shape: self.torus_shape,
            expander_degree: self.expander_degree,
            expander_size_factor: self.expander_size_factor,
            expander_gap_threshold: self.expander_gap_threshold,
            max_expander_retries: self.max_expander_retries,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationSection {
    pub kind: PerturbationKind,
    /// Bound `C` for uniform-random factors in `[1/C, C]`.
    pub bound: f64,
}

impl Default for PerturbationSection {
    fn default() -> Self {
        Self { kind: PerturbationKind::LeftDoubling, bound: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasurementSection {
    pub list: Vec<Measurement>,
    pub walkers: usize,
    pub t_cap: u64,
    pub hitting_method: HittingMethod,
    pub t_max: usize,
    pub threshold: f64,
    pub gap_method: GapMethod,
    pub gap_tol: f64,
    pub gap_max_iters: usize,
    pub exhaustive_cap: usize,
    pub exact_hitting_cap: usize,
    /// Number of anchors sampled for excursion statistics.
    pub excursion_anchors: usize,
    pub excursion_walkers: usize,
}

impl Default for MeasurementSection {
    fn default() -> Self {
        Self {
            list: vec![Measurement::Hitting, Measurement::Gap],
            walkers: 2000,
            t_cap: 1 << 32,
            hitting_method: HittingMethod::MonteCarlo,
            t_max: 1_000_000,
            threshold: 0.25,
            gap_method: GapMethod::Lanczos,
            gap_tol: 1e-9,
            gap_max_iters: 20_000,
            exhaustive_cap: crate::analysis::EXHAUSTIVE_START_CAP,
            exact_hitting_cap: crate::analysis::EXACT_HITTING_CAP,
            excursion_anchors: 10,
            excursion_walkers: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourceSection {
    pub max_vertices: u64,
    pub max_memory_bytes: u64,
}

impl Default for ResourceSection {
    fn default() -> Self {
        Self { max_vertices: 20_000_000, max_memory_bytes: 4_000_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobustnessSection {
    pub family: RobustFamily,
    /// Side length (tori), dimension (hypercube) or vertex count (Erdős–Rényi).
    pub size: usize,
    /// Lattice dimension `d` for tori.
    pub dimension: usize,
    /// Mean degree `c` of `G(n, c/n)` in the supercritical case.
    pub er_mean_degree: f64,
    pub bound: f64,
    pub trials: usize,
    /// Random starts used when the graph is above the exhaustive cap.
    pub sampled_starts: usize,
}

impl Default for RobustnessSection {
    fn default() -> Self {
        Self {
            family: RobustFamily::Hypercube,
            size: 10,
            dimension: 1,
            er_mean_degree: 2.0,
            bound: 2.0,
            trials: 20,
            sampled_starts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub construction: ConstructionSection,
    pub perturbation: PerturbationSection,
    pub measurements: MeasurementSection,
    pub resources: ResourceSection,
    pub robustness: RobustnessSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let c: Self = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads a config file and applies the `MIXLAB_OUT` override.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let mut c = Self::from_toml(&text)?;
        if let Ok(dir) = std::env::var(OUTPUT_ENV) {
            c.experiment.output_dir = dir;
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.into()));
        let m = &self.measurements;
        if m.walkers == 0 || m.excursion_walkers == 0 {
            return bad("walker counts must be >= 1");
        }
        if m.t_max == 0 || m.t_cap == 0 {
            return bad("t_max and t_cap must be >= 1");
        }
        if !(m.threshold > 0.0 && m.threshold < 1.0) {
            return bad("threshold must lie in (0, 1)");
        }
        if !(m.gap_tol > 0.0) {
            return bad("gap_tol must be > 0");
        }
        if !(self.perturbation.bound >= 1.0) || !(self.robustness.bound >= 1.0) {
            return bad("perturbation bounds must be >= 1");
        }
        if self.experiment.kind == ExperimentKind::Scaling && self.construction.k_values.is_empty() {
            return bad("construction.k_values is empty");
        }
        Ok(())
    }

    /// Hash of everything that determines results (the output directory and
    /// resume flag excluded).
    pub fn params_hash(&self) -> String {
        let mut c = self.clone();
        c.experiment.output_dir = String::new();
        c.experiment.resume = false;
        hash_str(&c.to_toml())
    }

    /// Hash identifying one scaling row: [`Self::params_hash`] without the list
    /// of K values, so a finished row stays valid when the sweep is extended.
    pub fn row_params_hash(&self) -> String {
        let mut c = self.clone();
        c.experiment.output_dir = String::new();
        c.experiment.resume = false;
        c.construction.k_values.clear();
        hash_str(&c.to_toml())
    }

    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(&self.experiment.output_dir)
    }
}
