//! Measurements on weighted graphs: mixing times, spectral gaps, hitting times,
//! visit and excursion statistics, the Bernoulli-sum tail and the L∞ distance.

pub mod hitting;
pub mod linf;
pub mod mixing;
pub mod spectral;
pub mod tail;
pub mod visits;

pub use hitting::{hitting_time_exact, hitting_time_mc, hitting_times_exact, HittingReport, HittingSolve, VisitCount};
pub use linf::linf_distance;
pub use mixing::{candidate_starts, exact_mixing_time, mixing_time_from, worst_case_mixing_time, MixingReport, StartSet};
pub use spectral::{spectral_gap, spectral_gap_with, GapMethod, GapOptions, SpectralReport};
pub use tail::{balanced_tail_probability, tail_distribution};
pub use visits::{excursion_statistics, visit_statistics, ExcursionReport, ExcursionStats, VisitSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{GraphError, VertexId, CHUNK};

/// Default vertex cap for exhaustive worst-case mixing.
pub const EXHAUSTIVE_START_CAP: usize = 5000;
/// Default cap on non-target vertices for the exact hitting-time solve.
pub const EXACT_HITTING_CAP: usize = 200_000;
/// Default vertex cap for the all-pairs L∞ distance.
pub const LINF_CAP: usize = 2000;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("TV distance still {tv} > {threshold} after t_max = {t_max} steps")]
    NotMixedByTMax { t_max: usize, tv: f64, threshold: f64, partial: Box<MixingReport> },
    #[error("exhaustive worst-case mixing over {vertex_count} vertices exceeds the cap of {cap}")]
    TooManyStartsForExhaustive { vertex_count: usize, cap: usize },
    #[error("power iteration did not converge: best gap {} with residual {}", .best.gap, .best.residual)]
    NoConvergence { best: Box<SpectralReport> },
    #[error("target set is unreachable from vertex {start}")]
    TargetUnreachable { start: VertexId },
    #[error("target set is empty")]
    EmptyTarget,
    #[error("{what}: size {size} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("linear solve stopped at the iteration cap {iterations} with residual {residual}")]
    SolverIterationCap { iterations: usize, residual: f64 },
    #[error("all {walkers} walks were truncated at t_cap = {t_cap}")]
    AllWalksTruncated { walkers: usize, t_cap: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Boolean membership mask; checks every vertex id.
pub(crate) fn vertex_mask(n: usize, set: &[VertexId]) -> Result<Vec<bool>, GraphError> {
    let mut mask = vec![false; n];
    for &v in set {
        if v as usize >= n {
            return Err(GraphError::InvalidVertex { vertex: v, vertex_count: n });
        }
        mask[v as usize] = true;
    }
    Ok(mask)
}

/// `Σ w_i a_i b_i` with a fixed, thread-independent summation order.
pub(crate) fn weighted_dot(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .zip(w.par_chunks(CHUNK))
        .map(|((x, y), w)| x.iter().zip(y).zip(w).map(|((x, y), w)| w * x * y).sum::<f64>())
        .collect();
    partial.iter().sum()
}

pub(crate) fn chunked_sum(a: &[f64]) -> f64 {
    let partial: Vec<f64> = a.par_chunks(CHUNK).map(|x| x.iter().sum::<f64>()).collect();
    partial.iter().sum()
}

/// Sample mean and standard error `s / √n`.
pub(crate) fn mean_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64, usize) {
    let n = xs.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN, 0);
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0, 1);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt(), n)
}
