//! Visit counts before absorption and torus excursion lengths.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::hitting::{hitting_times_exact, run_walkers, summarize, HittingReport};
use crate::analysis::{mean_se, vertex_mask, AnalysisError, EXACT_HITTING_CAP};
use crate::graph::{RegionLabel, VertexId, WeightedGraph};
use crate::rng::{derive_seed, stream_rng};

/// Walks longer than this are abandoned when measuring excursions.
const EXCURSION_STEP_CAP: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisitSet {
    pub name: String,
    pub vertices: Vec<VertexId>,
}

impl VisitSet {
    pub fn new(name: impl Into<String>, vertices: Vec<VertexId>) -> Self {
        Self { name: name.into(), vertices }
    }
}

/// Mean number of visits to each counted set before the walk enters
/// `absorbing`. Positions at times `0, 1, …` strictly before absorption are
/// counted, including lazy stays. At most 64 sets; they may overlap.
pub fn visit_statistics(
    g: &WeightedGraph,
    start: VertexId,
    counted: &[VisitSet],
    absorbing: &[VertexId],
    walkers: usize,
    seed: u64,
    t_cap: u64,
) -> Result<HittingReport, AnalysisError> {
    let clock = Instant::now();
    g.check_vertex(start)?;
    if counted.len() > 64 {
        return Err(AnalysisError::InvalidArgument(format!("{} counted sets; at most 64 are supported", counted.len())));
    }
    if walkers == 0 {
        return Err(AnalysisError::InvalidArgument("walkers must be >= 1".into()));
    }
    if absorbing.is_empty() {
        return Err(AnalysisError::EmptyTarget);
    }
    let n = g.vertex_count();
    let mask = vertex_mask(n, absorbing)?;
    let mut bits = vec![0u64; n];
    for (k, set) in counted.iter().enumerate() {
        for (v, inside) in vertex_mask(n, &set.vertices)?.into_iter().enumerate() {
            if inside {
                bits[v] |= 1 << k;
            }
        }
    }
    let outcomes = run_walkers(g, start, &mask, Some((&bits, counted.len())), walkers, seed, t_cap);
    let names: Vec<String> = counted.iter().map(|s| s.name.clone()).collect();
    let mut report = summarize(start, absorbing.len(), &outcomes, &names, walkers, seed, t_cap)?;
    report.wall_time_s = clock.elapsed().as_secs_f64();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionStats {
    pub anchor: VertexId,
    /// Vertices of the torus including the anchor.
    pub torus_volume: usize,
    pub samples: usize,
    pub mean: f64,
    pub se: f64,
    /// Exact mean from the hitting-time solve on the torus component.
    pub exact: Option<f64>,
    /// `2(1/π_B(u) − 1)`, Kac's return-time formula on the torus with its anchor.
    pub kac_prediction: f64,
    /// Raw excursion lengths, in sample order.
    pub lengths: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionReport {
    pub seed: u64,
    pub walkers: usize,
    pub anchors: Vec<ExcursionStats>,
    pub wall_time_s: f64,
}

/// Lengths of excursions into the torus hanging at each anchor.
///
/// An excursion begins when the walk at anchor `u` steps into `B_u∖{u}` and
/// ends on its return to `u`; its length is the number of steps spent strictly
/// inside `B_u∖{u}`. Lazy stays at the anchor belong to no excursion. Each
/// sample enters through a torus neighbor of `u` chosen with probability
/// proportional to conductance, exactly as the walk does. Anchors without a
/// torus yield an empty sample set.
pub fn excursion_statistics(
    g: &WeightedGraph,
    anchors: &[VertexId],
    walkers: usize,
    seed: u64,
) -> Result<ExcursionReport, AnalysisError> {
    let clock = Instant::now();
    let mut out = Vec::with_capacity(anchors.len());
    for &u in anchors {
        g.check_vertex(u)?;
        let torus: Vec<VertexId> = g.vertices_where(|l| *l == RegionLabel::Torus { anchor: u });
        if torus.is_empty() {
            out.push(ExcursionStats {
                anchor: u,
                torus_volume: 1,
                samples: 0,
                mean: f64::NAN,
                se: f64::NAN,
                exact: None,
                kac_prediction: f64::NAN,
                lengths: Vec::new(),
            });
            continue;
        }
        let entries: Vec<(VertexId, f64)> = g
            .neighbors(u)
            .iter()
            .zip(g.neighbor_conductances(u))
            .filter(|(w, _)| g.label(**w) == RegionLabel::Torus { anchor: u })
            .map(|(w, c)| (*w, *c))
            .collect();
        let entry_total: f64 = entries.iter().map(|e| e.1).sum();
        let anchor_seed = derive_seed(seed, &format!("excursion {u}"));
        let lengths: Vec<u64> = (0..walkers as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(anchor_seed, i);
                let mut pick = rng.random::<f64>() * entry_total;
                let mut v = entries[entries.len() - 1].0;
                for &(w, c) in &entries {
                    pick -= c;
                    if pick < 0.0 {
                        v = w;
                        break;
                    }
                }
                let mut len = 0u64;
                while v != u && len < EXCURSION_STEP_CAP {
                    v = g.lazy_step_with(v, rng.random::<f64>());
                    len += 1;
                }
                len
            })
            .collect();
        let (mean, se, samples) = mean_se(lengths.iter().map(|&l| l as f64));

        // the torus with its anchor, as a standalone graph (anchor is vertex 0)
        let mut component = vec![u];
        component.extend(&torus);
        let sub = g.induced_subgraph(&component);
        let strength_total: f64 = sub.strengths().iter().sum();
        let kac_prediction = 2.0 * (strength_total / sub.strength(0) - 1.0);
        let exact = if torus.len() <= EXACT_HITTING_CAP {
            let h = hitting_times_exact(&sub, &[0], EXACT_HITTING_CAP)?.h;
            let s: f64 = sub.neighbors(0).iter().zip(sub.neighbor_conductances(0)).map(|(&w, &c)| c * h[w as usize]).sum();
            Some(s / sub.strength(0))
        } else {
            None
        };
        out.push(ExcursionStats {
            anchor: u,
            torus_volume: component.len(),
            samples,
            mean,
            se,
            exact,
            kac_prediction,
            lengths,
        });
    }
    Ok(ExcursionReport { seed, walkers, anchors: out, wall_time_s: clock.elapsed().as_secs_f64() })
}
