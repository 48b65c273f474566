use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::spectral::{spectral_gap_with, GapOptions};
use crate::analysis::AnalysisError;
use crate::constructions::{ConstructionError, ExpanderCertificate};
use crate::graph::{RegionLabel, VertexId, WeightedGraph};

/// Pairings tried per certification round before giving up on simplicity.
const MAX_PAIRINGS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct ExpanderBuild {
    pub graph: WeightedGraph,
    pub certificate: ExpanderCertificate,
}

/// Random `degree`-regular simple graph from the pairing model, resampled
/// until it is simple, connected and its lazy spectral gap is at least
/// `gap_threshold`. Vertices are labelled `Expander`.
pub fn build_random_regular_expander<R: Rng + ?Sized>(
    size: usize,
    degree: usize,
    gap_threshold: f64,
    rng: &mut R,
    max_retries: usize,
) -> Result<ExpanderBuild, ConstructionError> {
    if (size * degree) % 2 != 0 {
        return Err(ConstructionError::ParityViolation { size, degree });
    }
    if size <= degree {
        return Err(ConstructionError::TooSmallForDegree { size, degree });
    }
    let mut pairing_attempts = 0;
    let mut best_gap: f64 = 0.0;
    for retries in 0..=max_retries {
        let edges = loop {
            pairing_attempts += 1;
            if let Some(edges) = try_pairing(size, degree, rng) {
                break edges;
            }
            if pairing_attempts >= MAX_PAIRINGS * (retries + 1) {
                return Err(ConstructionError::RetriesExhausted {
                    size,
                    degree,
                    threshold: gap_threshold,
                    retries,
                    best_gap,
                });
            }
        };
        let graph = WeightedGraph::from_unique_edges(&edges, vec![RegionLabel::Expander; size]);
        if !graph.is_connected() {
            continue;
        }
        let report = match spectral_gap_with(&graph, &GapOptions::certification()) {
            Ok(r) => r,
            Err(AnalysisError::NoConvergence { best }) => *best,
            Err(e) => return Err(e.into()),
        };
        best_gap = best_gap.max(report.gap);
        if report.converged && report.gap >= gap_threshold {
            return Ok(ExpanderBuild {
                graph,
                certificate: ExpanderCertificate {
                    gap: report.gap,
                    threshold: gap_threshold,
                    retries,
                    pairing_attempts,
                    iterations: report.iterations,
                    residual: report.residual,
                    method: report.method,
                },
            });
        }
    }
    Err(ConstructionError::RetriesExhausted {
        size,
        degree,
        threshold: gap_threshold,
        retries: max_retries,
        best_gap,
    })
}

/// One uniform pairing of `size · degree` half-edges; `None` if it has a loop or a multi-edge.
fn try_pairing<R: Rng + ?Sized>(size: usize, degree: usize, rng: &mut R) -> Option<Vec<(VertexId, VertexId, f64)>> {
    let mut points: Vec<VertexId> = (0..size as VertexId).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    points.shuffle(rng);
    let mut edges = Vec::with_capacity(points.len() / 2);
    for pair in points.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        if a == b {
            return None;
        }
        edges.push((a.min(b), a.max(b), 1.0));
    }
    edges.sort_unstable_by_key(|e| (e.0, e.1));
    if edges.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
        return None;
    }
    Some(edges)
}
