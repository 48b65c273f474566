//! Random bounded perturbations of the standard robust families: mixing-time
//! and spectral-gap ratios before and after.

use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::{spectral_gap_with, worst_case_mixing_time, AnalysisError, GapOptions, SpectralReport, StartSet};
use crate::constructions::{build_er_graph, build_hypercube, build_lattice_torus, uniform_random_rule};
use crate::experiments::config::{ExperimentConfig, RobustFamily, RobustnessSection};
use crate::experiments::report::{envelope, write_json};
use crate::experiments::ExperimentError;
use crate::format::graph_hash;
use crate::graph::{VertexId, WeightedGraph};
use crate::rng::derive_seed;

pub const REPORT_FILE: &str = "robustness_report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessTrial {
    pub trial: usize,
    pub seed: u64,
    pub graph_hash: String,
    pub t_mix: Option<usize>,
    /// `max(t̃/t, t/t̃)`.
    pub mixing_ratio: Option<f64>,
    pub gap: Option<f64>,
    /// `λ̃/λ`.
    pub gap_ratio: Option<f64>,
    pub gap_within_certificate: Option<bool>,
    pub error: Option<String>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub family: RobustFamily,
    pub size: usize,
    pub dimension: usize,
    pub bound: f64,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub graph_hash: String,
    pub starts: Vec<VertexId>,
    pub start_set: String,
    pub t_mix: usize,
    pub gap: SpectralReport,
    pub trials: Vec<RobustnessTrial>,
    pub max_mixing_ratio: f64,
    /// `[1/C², C²]`, the range any bounded perturbation keeps `λ̃/λ` in.
    pub gap_certificate: (f64, f64),
    pub all_gaps_within_certificate: bool,
    pub failed_trials: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct RobustnessOutcome {
    pub report: RobustnessReport,
    pub json: Value,
    pub exit_code: i32,
}

/// Builds the configured family member.
pub fn build_family(spec: &RobustnessSection, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "robustness graph"));
    match spec.family {
        RobustFamily::LatticeTorus => build_lattice_torus(spec.size, spec.dimension),
        RobustFamily::Hypercube => build_hypercube(spec.size as u32),
        RobustFamily::ErSupercritical => {
            build_er_graph(spec.size, spec.er_mean_degree / spec.size as f64, &mut rng).graph
        }
        RobustFamily::ErCritical => build_er_graph(spec.size, 1.0 / spec.size as f64, &mut rng).graph,
    }
}

fn gap_of(g: &WeightedGraph, config: &ExperimentConfig, seed: u64) -> Result<SpectralReport, AnalysisError> {
    let m = &config.measurements;
    let opts = GapOptions { method: m.gap_method, tol: m.gap_tol, max_iters: m.gap_max_iters, seed };
    match spectral_gap_with(g, &opts) {
        Ok(r) => Ok(r),
        Err(AnalysisError::NoConvergence { best }) => Ok(*best),
        Err(e) => Err(e),
    }
}

/// `trials` independent uniform factor assignments in `[1/C, C]`, each compared
/// with the unperturbed graph. Writes `robustness_report.json` to the output
/// directory.
pub fn run_robustness_experiment(config: &ExperimentConfig) -> Result<RobustnessOutcome, ExperimentError> {
    config.validate()?;
    let clock = Instant::now();
    let spec = &config.robustness;
    let m = &config.measurements;
    let seed = config.experiment.seed;
    let g = build_family(spec, seed);
    let n = g.vertex_count();
    let (starts, start_set) = if n <= m.exhaustive_cap {
        (StartSet::All, "exhaustive")
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "robustness starts"));
        let picks = sample(&mut rng, n, spec.sampled_starts.min(n)).into_iter().map(|v| v as VertexId).collect();
        (StartSet::List(picks), "sampled list (lower bound on the worst start)")
    };
    let base = worst_case_mixing_time(&g, &starts, m.threshold, m.t_max, m.exhaustive_cap)?;
    let start_list: Vec<VertexId> = base.per_start.iter().map(|p| p.0).collect();
    let gap = gap_of(&g, config, seed)?;
    let c = spec.bound;
    let cert = (1.0 / (c * c), c * c);

    let mut trials = Vec::with_capacity(spec.trials);
    for trial in 0..spec.trials {
        let tclock = Instant::now();
        let tseed = derive_seed(seed, &format!("robustness trial {trial}"));
        let mut row = RobustnessTrial {
            trial,
            seed: tseed,
            graph_hash: String::new(),
            t_mix: None,
            mixing_ratio: None,
            gap: None,
            gap_ratio: None,
            gap_within_certificate: None,
            error: None,
            wall_time_s: 0.0,
        };
        let result = (|| -> Result<(), ExperimentError> {
            let mut rng = ChaCha8Rng::seed_from_u64(tseed);
            let rule = uniform_random_rule(&g, c, &mut rng)?;
            let gp = g.apply_perturbation(&rule)?;
            row.graph_hash = graph_hash(&gp);
            let starts = match &starts {
                StartSet::All => StartSet::All,
                _ => StartSet::List(start_list.clone()),
            };
            let t = worst_case_mixing_time(&gp, &starts, m.threshold, m.t_max, m.exhaustive_cap)?.t_mix;
            row.t_mix = Some(t);
            row.mixing_ratio = Some(if t == base.t_mix {
                1.0
            } else {
                (t as f64 / base.t_mix as f64).max(base.t_mix as f64 / t as f64)
            });
            let gp_gap = gap_of(&gp, config, seed)?;
            let ratio = gp_gap.gap / gap.gap;
            row.gap = Some(gp_gap.gap);
            row.gap_ratio = Some(ratio);
            row.gap_within_certificate = Some(ratio >= cert.0 && ratio <= cert.1);
            Ok(())
        })();
        if let Err(e) = result {
            row.error = Some(e.to_string());
        }
        row.wall_time_s = tclock.elapsed().as_secs_f64();
        trials.push(row);
    }

    let failed_trials = trials.iter().filter(|t| t.error.is_some()).count();
    let report = RobustnessReport {
        family: spec.family,
        size: spec.size,
        dimension: spec.dimension,
        bound: c,
        vertex_count: n,
        edge_count: g.edge_count(),
        graph_hash: graph_hash(&g),
        starts: start_list,
        start_set: start_set.into(),
        t_mix: base.t_mix,
        gap,
        max_mixing_ratio: trials.iter().filter_map(|t| t.mixing_ratio).fold(1.0, f64::max),
        gap_certificate: cert,
        all_gaps_within_certificate: trials.iter().all(|t| t.gap_within_certificate != Some(false)),
        failed_trials,
        trials,
        wall_time_s: clock.elapsed().as_secs_f64(),
    };
    let json = envelope("robustness", &config.params_hash(), seed, Some(config), &report);
    write_json(&config.output_dir().join(REPORT_FILE), &json)?;
    Ok(RobustnessOutcome { report, json, exit_code: if failed_trials > 0 { 1 } else { 0 } })
}
