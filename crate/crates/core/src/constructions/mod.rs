//! Builders for the decorated-tree graphs, their pieces, and the comparison families.

mod assemble;
mod attach;
mod expander;
mod families;
mod perturb;
mod torus;
mod tree;

pub use assemble::{
    assemble_main_construction, assemble_simple_construction, main_plan, simple_plan,
    ConstructionMetadata, ExpanderCertificate, MainPlan, SimplePlan,
};
pub use attach::attach_subgraph;
pub use expander::{build_random_regular_expander, ExpanderBuild};
pub use families::{build_er_graph, build_hypercube, build_lattice_torus, ErGraph};
pub use perturb::{left_edge_doubling_rule, uniform_random_rule};
pub use torus::{box_dims_for_volume, build_box_torus, build_torus_3d, nearest_cube_side, torus_graph};
pub use tree::{balanced_count, balanced_nodes, build_binary_tree, TreeAddress};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::graph::{GraphError, VertexId};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("measurement failed during construction: {0}")]
    Analysis(#[from] Box<AnalysisError>),
    #[error("torus volume {0} is below the minimum of 8")]
    VolumeTooSmall(usize),
    #[error("guest edge ({guest_u},{guest_v}) collides with existing host edge ({host_u},{host_v})")]
    EdgeCollision { guest_u: VertexId, guest_v: VertexId, host_u: VertexId, host_v: VertexId },
    #[error("duplicate identification involving guest vertex {guest} / host vertex {host}")]
    DuplicateIdentification { guest: VertexId, host: VertexId },
    #[error("identification references vertex {0} outside the graph")]
    IdentificationOutOfRange(VertexId),
    #[error("size {size} with degree {degree}: size*degree must be even")]
    ParityViolation { size: usize, degree: usize },
    #[error("regular graph needs size > degree (size {size}, degree {degree})")]
    TooSmallForDegree { size: usize, degree: usize },
    #[error("no simple connected {degree}-regular graph on {size} vertices with lazy gap >= {threshold} after {retries} retries (best gap {best_gap})")]
    RetriesExhausted { size: usize, degree: usize, threshold: f64, retries: usize, best_gap: f64 },
    #[error("infeasible ell rule: K={k}, ell={ell}; need floor(K/(4*ell)) >= 1 and a level j*ell in [{lo}, {hi}] with j*ell + ell <= K ({detail})")]
    InfeasibleEllRule { k: u32, ell: u32, lo: f64, hi: f64, detail: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("graph carries no tree labels")]
    NoTreeLabels,
}

impl From<AnalysisError> for ConstructionError {
    fn from(e: AnalysisError) -> Self {
        ConstructionError::Analysis(Box::new(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    Natural,
    Binary,
}

/// `ℓ = ⌈coeff · log(K)⌉` in the given base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllRule {
    pub coeff: f64,
    pub log_base: LogBase,
}

impl EllRule {
    /// `ℓ = ⌈100 ln K⌉`.
    pub const LITERAL: EllRule = EllRule { coeff: 100.0, log_base: LogBase::Natural };

    pub fn binary(coeff: f64) -> Self {
        EllRule { coeff, log_base: LogBase::Binary }
    }

    pub fn ell(&self, k: u32) -> u32 {
        let log = match self.log_base {
            LogBase::Natural => (k as f64).ln(),
            LogBase::Binary => (k as f64).log2(),
        };
        (self.coeff * log).ceil().max(1.0) as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorusShape {
    /// `ℤ_m³` with `m = round(volume^{1/3})`.
    NearestCube,
    /// `ℤ_a × ℤ_b × ℤ_c` with `abc` as close as possible to the target volume.
    Box,
}

/// Tunable constants of the decorated-tree constructions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub k: u32,
    pub ell_rule: EllRule,
    /// Balance window is `⌈β √h⌉` for a (sub)tree of height `h`.
    pub balance_window_coeff: f64,
    /// Decorated depths are `[⌈lo·h⌉, ⌊hi·h⌋]` for a (sub)tree of height `h`.
    pub level_range: (f64, f64),
    /// Target torus volume is `factor · K`.
    pub torus_volume_factor: f64,
    pub torus_shape: TorusShape,
    pub expander_degree: usize,
    /// Expander size is `⌈factor · K²⌉ · 2^K`.
    pub expander_size_factor: f64,
    pub expander_gap_threshold: f64,
    pub max_expander_retries: usize,
}

impl ConstructionParams {
    pub fn new(k: u32) -> Self {
        Self {
            k,
            ell_rule: EllRule::LITERAL,
            balance_window_coeff: 1.0,
            level_range: (0.25, 0.5),
            torus_volume_factor: 1.0,
            torus_shape: TorusShape::NearestCube,
            expander_degree: 3,
            expander_size_factor: 1.0,
            expander_gap_threshold: 0.01,
            max_expander_retries: 20,
        }
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        let bad = |m: String| Err(ConstructionError::InvalidParams(m));
        if self.k < 4 {
            return bad(format!("K must be >= 4, got {}", self.k));
        }
        if self.k > 120 {
            return bad(format!("K = {} is out of range", self.k));
        }
        let (lo, hi) = self.level_range;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return bad(format!("level range ({lo}, {hi}) must satisfy 0 <= lo <= hi <= 1"));
        }
        if !(self.balance_window_coeff >= 0.0) {
            return bad("balance window coefficient must be >= 0".into());
        }
        if !(self.torus_volume_factor > 0.0) || self.torus_target_volume() < 8 {
            return bad(format!("torus target volume {} must be >= 8", self.torus_target_volume()));
        }
        if !(self.expander_size_factor > 0.0) || self.expander_size() < (1u128 << self.k) {
            return bad("expander must have at least 2^K vertices to contain the leaves".into());
        }
        if self.expander_degree < 3 {
            return bad("expander degree must be >= 3".into());
        }
        if (self.expander_degree as u128 * self.expander_size()) % 2 != 0 {
            return bad("expander degree * size must be even".into());
        }
        Ok(())
    }

    pub fn torus_target_volume(&self) -> usize {
        (self.torus_volume_factor * self.k as f64).round() as usize
    }

    pub fn torus_dims(&self) -> Vec<usize> {
        let target = self.torus_target_volume();
        match self.torus_shape {
            TorusShape::NearestCube => {
                let m = nearest_cube_side(target);
                vec![m, m, m]
            }
            TorusShape::Box => box_dims_for_volume(target).to_vec(),
        }
    }

    pub fn expander_size(&self) -> u128 {
        let k2 = (self.expander_size_factor * (self.k as f64).powi(2)).ceil() as u128;
        k2 << self.k
    }

    /// Balance window `⌈β √h⌉`.
    pub fn window(&self, height: u32) -> u32 {
        (self.balance_window_coeff * (height as f64).sqrt()).ceil() as u32
    }

    /// Decorated depth range `[⌈lo·h⌉, ⌊hi·h⌋]` for a (sub)tree of height `h`.
    pub fn depth_range(&self, height: u32) -> (u32, u32) {
        let lo = (self.level_range.0 * height as f64).ceil() as u32;
        let hi = (self.level_range.1 * height as f64).floor() as u32;
        (lo, hi)
    }
}
