//! Total-variation mixing times by exact distribution evolution.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{chunked_sum, AnalysisError};
use crate::graph::{l1_diff, Distribution, RegionLabel, VertexId, WeightedGraph};

/// Kernel applications between renormalizations of the evolving mass.
pub const RENORMALIZE_EVERY: usize = 64;

/// Slack allowed when checking that the TV curve never increases.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Renormalization {
    pub t: usize,
    /// Total mass just before dividing it out.
    pub mass_before: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    /// `None` when started from an arbitrary distribution.
    pub start: Option<VertexId>,
    /// First `t` with TV at or below the threshold.
    pub t_mix: usize,
    pub threshold: f64,
    /// `tv[t]` for `t = 0..=t_mix` (or up to `t_max` on failure).
    pub tv: Vec<f64>,
    pub renormalizations: Vec<Renormalization>,
    /// Per-start values for worst-case runs, in evaluation order.
    pub per_start: Vec<(VertexId, usize)>,
    /// How the start set was chosen (single, exhaustive, list or candidate set).
    pub start_set: String,
    pub wall_time_s: f64,
}

impl MixingReport {
    /// CSV with header `t,tv`.
    pub fn tv_csv(&self) -> String {
        let mut s = String::from("t,tv\n");
        for (t, v) in self.tv.iter().enumerate() {
            s.push_str(&format!("{t},{v}\n"));
        }
        s
    }
}

/// `t_mix(g, start)` with the given TV threshold (1/4 in the usual definition).
pub fn exact_mixing_time(
    g: &WeightedGraph,
    start: VertexId,
    threshold: f64,
    t_max: usize,
) -> Result<MixingReport, AnalysisError> {
    g.check_vertex(start)?;
    let mu = Distribution::point_mass(g.vertex_count(), start)?;
    let mut report = mixing_time_from(g, &mu, threshold, t_max)?;
    report.start = Some(start);
    report.start_set = "single".into();
    Ok(report)
}

/// First `t` with `TV(μP^t, π) ≤ threshold`.
pub fn mixing_time_from(
    g: &WeightedGraph,
    mu: &Distribution,
    threshold: f64,
    t_max: usize,
) -> Result<MixingReport, AnalysisError> {
    let clock = Instant::now();
    g.check_dim(mu.len())?;
    if t_max == 0 {
        return Err(AnalysisError::InvalidArgument("t_max must be >= 1".into()));
    }
    let pi = g.stationary_distribution()?;
    let pi = pi.as_slice();
    let n = pi.len();
    let mut cur = mu.as_slice().to_vec();
    let mut next = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut tv = vec![0.5 * l1_diff(&cur, pi)];
    let mut renormalizations = Vec::new();
    let mut t = 0;
    while tv[t] > threshold {
        if t == t_max {
            let partial = MixingReport {
                start: None,
                t_mix: t_max,
                threshold,
                tv,
                renormalizations,
                per_start: Vec::new(),
                start_set: "single".into(),
                wall_time_s: clock.elapsed().as_secs_f64(),
            };
            return Err(AnalysisError::NotMixedByTMax {
                t_max,
                tv: *partial.tv.last().unwrap(),
                threshold,
                partial: Box::new(partial),
            });
        }
        g.step_into(&cur, &mut next, &mut scratch);
        std::mem::swap(&mut cur, &mut next);
        t += 1;
        if t % RENORMALIZE_EVERY == 0 {
            let total = chunked_sum(&cur);
            cur.iter_mut().for_each(|m| *m /= total);
            renormalizations.push(Renormalization { t, mass_before: total });
        }
        let d = 0.5 * l1_diff(&cur, pi);
        debug_assert!(d <= tv[t - 1] + MONOTONE_SLACK, "TV increased at t={t}: {} -> {d}", tv[t - 1]);
        tv.push(d);
    }
    Ok(MixingReport {
        start: None,
        t_mix: t,
        threshold,
        tv,
        renormalizations,
        per_start: Vec::new(),
        start_set: "single".into(),
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StartSet {
    /// Every vertex; refused above the exhaustive cap.
    All,
    List(Vec<VertexId>),
    /// Heuristic worst-start candidates; the result is a lower bound on `max_v t_mix`.
    Candidates(Vec<VertexId>),
}

/// `max_v t_mix(g, v)` over the start set. The returned report is the one of
/// the maximizing start, with every start's value listed in `per_start`.
pub fn worst_case_mixing_time(
    g: &WeightedGraph,
    starts: &StartSet,
    threshold: f64,
    t_max: usize,
    cap: usize,
) -> Result<MixingReport, AnalysisError> {
    let clock = Instant::now();
    let (list, tag): (Vec<VertexId>, &str) = match starts {
        StartSet::All => {
            if g.vertex_count() > cap {
                return Err(AnalysisError::TooManyStartsForExhaustive { vertex_count: g.vertex_count(), cap });
            }
            ((0..g.vertex_count() as VertexId).collect(), "exhaustive")
        }
        StartSet::List(v) => (v.clone(), "list"),
        StartSet::Candidates(v) => (v.clone(), "candidate-set lower bound"),
    };
    if list.is_empty() {
        return Err(AnalysisError::InvalidArgument("empty start set".into()));
    }
    let mut best: Option<MixingReport> = None;
    let mut per_start = Vec::with_capacity(list.len());
    for &v in &list {
        let r = exact_mixing_time(g, v, threshold, t_max)?;
        per_start.push((v, r.t_mix));
        if best.as_ref().is_none_or(|b| r.t_mix > b.t_mix) {
            best = Some(r);
        }
    }
    let mut best = best.unwrap();
    best.per_start = per_start;
    best.start_set = tag.into();
    best.wall_time_s = clock.elapsed().as_secs_f64();
    Ok(best)
}

/// Heuristic worst starts on a decorated tree: the root, the torus vertex
/// farthest from its anchor among the deepest decorated anchors, and the first
/// expander vertex. Missing regions are skipped.
pub fn candidate_starts(g: &WeightedGraph) -> Vec<VertexId> {
    let mut out = Vec::new();
    if let Some(root) = g.vertices_where(|l| l.tree_level() == Some(0)).first() {
        out.push(*root);
    }
    let deepest = g
        .labels()
        .iter()
        .filter_map(|l| match l {
            RegionLabel::Torus { anchor } => Some(*anchor),
            _ => None,
        })
        .max_by_key(|&a| (g.label(a).tree_level().unwrap_or(0), std::cmp::Reverse(a)));
    if let Some(anchor) = deepest {
        let inside = |v: VertexId| g.label(v) == RegionLabel::Torus { anchor };
        // breadth-first from the anchor through its torus; the last vertex reached is farthest
        let mut seen = std::collections::HashSet::from([anchor]);
        let mut queue = std::collections::VecDeque::from([anchor]);
        let mut last = anchor;
        while let Some(v) = queue.pop_front() {
            last = v;
            for &u in g.neighbors(v) {
                if inside(u) && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        if last != anchor {
            out.push(last);
        }
    }
    if let Some(x) = g.vertices_where(|l| *l == RegionLabel::Expander).first() {
        out.push(*x);
    }
    out
}
