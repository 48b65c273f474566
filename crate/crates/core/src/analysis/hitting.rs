//! Hitting times of vertex sets: exact sparse solve and Monte Carlo walkers.

use std::collections::VecDeque;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{mean_se, vertex_mask, AnalysisError, EXACT_HITTING_CAP};
use crate::graph::{VertexId, WeightedGraph, CHUNK};
use crate::rng::stream_rng;

/// Max-norm residual of `(I − Q)h = 1` at which the exact solve stops.
pub const EXACT_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisitCount {
    pub set: String,
    pub mean: f64,
    pub se: f64,
    pub walkers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingReport {
    pub start: VertexId,
    pub target: String,
    pub target_size: usize,
    /// `exact` or `monte-carlo`.
    pub method: String,
    /// Exact value, or the mean over walks that reached the target.
    pub mean: f64,
    /// Standard error `s / √completed`; 0 for exact solves.
    pub se: f64,
    pub walkers: usize,
    pub completed: usize,
    pub truncated: usize,
    pub t_cap: Option<u64>,
    /// Mean with truncated walks counted as `t_cap`; a lower bound on the true mean.
    pub truncated_lower_bound: Option<f64>,
    pub residual: Option<f64>,
    pub iterations: Option<usize>,
    pub seed: Option<u64>,
    /// Mean visits per counted set strictly before absorption (completed walks only).
    pub visits: Vec<VisitCount>,
    /// Per-walk sum over all counted sets.
    pub total_visits: Option<VisitCount>,
    pub wall_time_s: f64,
}

impl HittingReport {
    /// CSV with header `set,mean,se,walkers`.
    pub fn visits_csv(&self) -> String {
        let mut s = String::from("set,mean,se,walkers\n");
        for v in self.visits.iter().chain(self.total_visits.as_ref()) {
            s.push_str(&format!("{},{},{},{}\n", v.set, v.mean, v.se, v.walkers));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HittingSolve {
    /// Expected hitting time from every vertex; 0 on the target, infinite where
    /// the target is unreachable.
    pub h: Vec<f64>,
    /// Max-norm residual of `(I − Q)h = 1` over the solved vertices.
    pub residual: f64,
    pub iterations: usize,
}

/// Solves `(I − Q)h = 1` off the target, `Q` the lazy kernel restricted to
/// non-target vertices. Multiplying row `v` by `2c(v)` gives the symmetric
/// positive definite system `c(v)h(v) − Σ_u c(u,v)h(u) = 2c(v)`, solved by
/// Jacobi-preconditioned conjugate gradients.
pub fn hitting_times_exact(g: &WeightedGraph, target: &[VertexId], cap: usize) -> Result<HittingSolve, AnalysisError> {
    if target.is_empty() {
        return Err(AnalysisError::EmptyTarget);
    }
    let n = g.vertex_count();
    let in_target = vertex_mask(n, target)?;

    let mut reached = in_target.clone();
    let mut queue: VecDeque<VertexId> = target.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if !reached[u as usize] {
                reached[u as usize] = true;
                queue.push_back(u);
            }
        }
    }
    let unknowns: Vec<VertexId> =
        (0..n as VertexId).filter(|&v| reached[v as usize] && !in_target[v as usize]).collect();
    if unknowns.len() > cap {
        return Err(AnalysisError::CapExceeded { what: "non-target vertices for the exact solve", size: unknowns.len(), cap });
    }
    let m = unknowns.len();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in unknowns.iter().enumerate() {
        index[v as usize] = i;
    }
    let diag: Vec<f64> = unknowns.iter().map(|&v| g.strength(v)).collect();
    let b: Vec<f64> = diag.iter().map(|c| 2.0 * c).collect();
    let matvec = |x: &[f64], out: &mut [f64]| {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(chunk, block)| {
            for (k, slot) in block.iter_mut().enumerate() {
                let i = chunk * CHUNK + k;
                let v = unknowns[i];
                let mut acc = diag[i] * x[i];
                for (&u, &c) in g.neighbors(v).iter().zip(g.neighbor_conductances(v)) {
                    let j = index[u as usize];
                    if j != usize::MAX {
                        acc -= c * x[j];
                    }
                }
                *slot = acc;
            }
        });
    };
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        let partial: Vec<f64> = a
            .par_chunks(CHUNK)
            .zip(b.par_chunks(CHUNK))
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
            .collect();
        partial.iter().sum()
    };
    // residual of the unscaled system
    let scaled_max = |r: &[f64]| r.iter().zip(&b).map(|(r, b)| (r / b).abs()).fold(0.0, f64::max);

    let mut x = vec![0.0; m];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; m];
    let mut rz = dot(&r, &z);
    let max_iters = 10 * m + 1000;
    let mut iterations = 0;
    let mut residual = scaled_max(&r);
    while residual > EXACT_RESIDUAL_TOL {
        if iterations == max_iters {
            return Err(AnalysisError::SolverIterationCap { iterations, residual });
        }
        iterations += 1;
        matvec(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        x.iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.iter_mut().zip(&ap).for_each(|(r, a)| *r -= alpha * a);
        residual = scaled_max(&r);
        if residual <= EXACT_RESIDUAL_TOL || iterations % 50 == 0 {
            // replace the recurrence residual by the true one
            matvec(&x, &mut ap);
            r.iter_mut().zip(&b).zip(&ap).for_each(|((r, b), a)| *r = b - a);
            residual = scaled_max(&r);
        }
        z.iter_mut().zip(&r).zip(&diag).for_each(|((z, r), d)| *z = r / d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }

    let mut h = vec![f64::INFINITY; n];
    for v in 0..n {
        if in_target[v] {
            h[v] = 0.0;
        } else if index[v] != usize::MAX {
            h[v] = x[index[v]];
        }
    }
    Ok(HittingSolve { h, residual, iterations })
}

/// `E_start[τ_target]` for the lazy walk.
pub fn hitting_time_exact(g: &WeightedGraph, start: VertexId, target: &[VertexId]) -> Result<f64, AnalysisError> {
    Ok(hitting_report_exact(g, start, target, EXACT_HITTING_CAP)?.mean)
}

pub fn hitting_report_exact(
    g: &WeightedGraph,
    start: VertexId,
    target: &[VertexId],
    cap: usize,
) -> Result<HittingReport, AnalysisError> {
    let clock = Instant::now();
    g.check_vertex(start)?;
    if target.is_empty() {
        return Err(AnalysisError::EmptyTarget);
    }
    let (mean, residual, iterations) = if target.contains(&start) {
        (0.0, 0.0, 0)
    } else {
        let s = hitting_times_exact(g, target, cap)?;
        (s.h[start as usize], s.residual, s.iterations)
    };
    if !mean.is_finite() {
        return Err(AnalysisError::TargetUnreachable { start });
    }
    Ok(HittingReport {
        start,
        target: format!("{} vertices", target.len()),
        target_size: target.len(),
        method: "exact".into(),
        mean,
        se: 0.0,
        walkers: 0,
        completed: 0,
        truncated: 0,
        t_cap: None,
        truncated_lower_bound: None,
        residual: Some(residual),
        iterations: Some(iterations),
        seed: None,
        visits: Vec::new(),
        total_visits: None,
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}

/// Outcome of one walker: absorption time (or `None` if truncated) and visit
/// counts per counted set.
pub(crate) struct WalkOutcome {
    pub steps: Option<u64>,
    pub counts: Vec<u64>,
}

/// Runs `walkers` independent lazy walks from `start` until they enter
/// `absorbing` or reach `t_cap` steps. Walker `i` draws from stream `i` of
/// `seed`. `membership[v]` is a bit mask of the counted sets containing `v`;
/// each walk counts its positions at times `0, 1, …` strictly before absorption.
pub(crate) fn run_walkers(
    g: &WeightedGraph,
    start: VertexId,
    absorbing: &[bool],
    membership: Option<(&[u64], usize)>,
    walkers: usize,
    seed: u64,
    t_cap: u64,
) -> Vec<WalkOutcome> {
    (0..walkers as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let mut counts = vec![0u64; membership.map_or(0, |m| m.1)];
            let mut v = start;
            let mut t = 0u64;
            loop {
                if absorbing[v as usize] {
                    return WalkOutcome { steps: Some(t), counts };
                }
                if t == t_cap {
                    return WalkOutcome { steps: None, counts };
                }
                if let Some((bits, _)) = membership {
                    let mut b = bits[v as usize];
                    while b != 0 {
                        counts[b.trailing_zeros() as usize] += 1;
                        b &= b - 1;
                    }
                }
                v = g.lazy_step_with(v, rng.random::<f64>());
                t += 1;
            }
        })
        .collect()
}

/// Monte Carlo estimate of `E_start[τ_target]`. Truncated walks are counted
/// and reported separately, never averaged into the mean.
pub fn hitting_time_mc(
    g: &WeightedGraph,
    start: VertexId,
    target: &[VertexId],
    walkers: usize,
    seed: u64,
    t_cap: u64,
) -> Result<HittingReport, AnalysisError> {
    let clock = Instant::now();
    g.check_vertex(start)?;
    if walkers == 0 {
        return Err(AnalysisError::InvalidArgument("walkers must be >= 1".into()));
    }
    if target.is_empty() {
        return Err(AnalysisError::EmptyTarget);
    }
    let mask = vertex_mask(g.vertex_count(), target)?;
    let outcomes = run_walkers(g, start, &mask, None, walkers, seed, t_cap);
    let mut report = summarize(start, target.len(), &outcomes, &[], walkers, seed, t_cap)?;
    report.wall_time_s = clock.elapsed().as_secs_f64();
    Ok(report)
}

pub(crate) fn summarize(
    start: VertexId,
    target_size: usize,
    outcomes: &[WalkOutcome],
    set_names: &[String],
    walkers: usize,
    seed: u64,
    t_cap: u64,
) -> Result<HittingReport, AnalysisError> {
    let done: Vec<&WalkOutcome> = outcomes.iter().filter(|o| o.steps.is_some()).collect();
    let truncated = outcomes.len() - done.len();
    if done.is_empty() {
        return Err(AnalysisError::AllWalksTruncated { walkers, t_cap });
    }
    let (mean, se, completed) = mean_se(done.iter().map(|o| o.steps.unwrap() as f64));
    let total: f64 = done.iter().map(|o| o.steps.unwrap() as f64).sum::<f64>() + truncated as f64 * t_cap as f64;
    let visits: Vec<VisitCount> = set_names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let (mean, se, w) = mean_se(done.iter().map(|o| o.counts[k] as f64));
            VisitCount { set: name.clone(), mean, se, walkers: w }
        })
        .collect();
    let total_visits = (!set_names.is_empty()).then(|| {
        let (mean, se, w) = mean_se(done.iter().map(|o| o.counts.iter().sum::<u64>() as f64));
        VisitCount { set: "total".into(), mean, se, walkers: w }
    });
    Ok(HittingReport {
        start,
        target: format!("{target_size} vertices"),
        target_size,
        method: "monte-carlo".into(),
        mean,
        se,
        walkers,
        completed,
        truncated,
        t_cap: Some(t_cap),
        truncated_lower_bound: Some(total / outcomes.len() as f64),
        residual: None,
        iterations: None,
        seed: Some(seed),
        visits,
        total_visits,
        wall_time_s: 0.0,
    })
}
