//! Sweep over tree heights K comparing a decorated tree `G` with its perturbed
//! copy `G̃`. Rows are appended to a JSON-lines log as they finish so that an
//! interrupted sweep can resume where it stopped.

use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::{
    candidate_starts, excursion_statistics, hitting::hitting_report_exact, hitting_time_mc, spectral_gap_with,
    visit_statistics, worst_case_mixing_time, AnalysisError, GapOptions, HittingReport, SpectralReport, StartSet,
    VisitCount, VisitSet,
};
use crate::constructions::{
    assemble_main_construction, assemble_simple_construction, left_edge_doubling_rule, main_plan, simple_plan,
    uniform_random_rule, ConstructionError, ConstructionMetadata, TreeAddress,
};
use crate::experiments::config::{ConstructionFamily, ExperimentConfig, Measurement, HittingMethod, PerturbationKind};
use crate::experiments::report::{envelope, write_json};
use crate::experiments::{loglog_slope, ExperimentError};
use crate::format::graph_hash;
use crate::graph::{PerturbationRule, RegionLabel, VertexId, WeightedGraph};
use crate::rng::derive_seed;

/// Rough bytes per vertex held while building and measuring one row (both
/// graphs, their edge lists, and the measurement buffers).
pub const BYTES_PER_VERTEX_ESTIMATE: u128 = 320;

pub const ROW_LOG: &str = "scaling_rows.jsonl";
pub const REPORT_FILE: &str = "scaling_report.json";
pub const ROW_CSV: &str = "scaling_rows.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowError {
    /// `infeasible-ell-rule`, `resource-cap-exceeded`, `invalid-params`,
    /// `construction` or `measurement`.
    pub kind: String,
    pub message: String,
    /// Configuration problems (as opposed to failures while measuring).
    pub infeasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingSummary {
    pub method: String,
    pub mean: f64,
    pub se: f64,
    pub walkers: usize,
    pub completed: usize,
    pub truncated: usize,
    pub truncated_lower_bound: Option<f64>,
    pub residual: Option<f64>,
}

impl From<&HittingReport> for HittingSummary {
    fn from(r: &HittingReport) -> Self {
        Self {
            method: r.method.clone(),
            mean: r.mean,
            se: r.se,
            walkers: r.walkers,
            completed: r.completed,
            truncated: r.truncated,
            truncated_lower_bound: r.truncated_lower_bound,
            residual: r.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionSummary {
    pub anchor: VertexId,
    pub torus_volume: usize,
    pub samples: usize,
    pub mean: f64,
    pub se: f64,
    pub exact: Option<f64>,
    pub kac_prediction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideMeasurements {
    pub graph_hash: String,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub max_degree: usize,
    /// `π(V*)`, the stationary mass of the expander.
    pub expander_mass: f64,
    pub t_mix: Option<usize>,
    pub t_mix_per_start: Option<Vec<(VertexId, usize)>>,
    pub t_mix_start_set: Option<String>,
    /// Hitting time of the expander from the root.
    pub hitting: Option<HittingSummary>,
    pub gap: Option<SpectralReport>,
    /// Visits to each decorated level before reaching the expander.
    pub visits: Option<Vec<VisitCount>>,
    pub total_visits: Option<VisitCount>,
    /// `|𝓐 ∩ H_i| / |H_i|` for each counted level, in the same order.
    pub visit_lower_bounds: Option<Vec<f64>>,
    pub excursions: Option<Vec<ExcursionSummary>>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub k: u32,
    pub params_hash: String,
    pub construction_seed: u64,
    pub walker_seed: u64,
    #[serde(with = "wide_count")]
    pub estimated_vertex_count: Option<u128>,
    #[serde(with = "wide_count")]
    pub estimated_memory_bytes: Option<u128>,
    pub metadata: Option<ConstructionMetadata>,
    /// `|V|` of the unperturbed graph.
    pub n: Option<usize>,
    pub unperturbed: Option<SideMeasurements>,
    pub perturbed: Option<SideMeasurements>,
    /// `t_mix(G) / t_mix(G̃)` over the candidate start set.
    pub t_mix_ratio: Option<f64>,
    /// `E_o τ_{V*}(G) / E_o τ_{V*}(G̃)`.
    pub hitting_ratio: Option<f64>,
    /// Headline ratio: the mixing ratio when measured, else the hitting ratio.
    pub ratio: Option<f64>,
    pub ratio_source: Option<String>,
    /// `λ(G̃) / λ(G)`.
    pub gap_ratio: Option<f64>,
    pub error: Option<RowError>,
    pub wall_time_s: f64,
}

/// Counts past `u64::MAX` (infeasible K) are written as decimal strings,
/// which JSON values cannot hold as numbers.
mod wide_count {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Wide {
        Small(u64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<u128>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|x| u64::try_from(x).map(Wide::Small).unwrap_or_else(|_| Wide::Text(x.to_string()))).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u128>, D::Error> {
        match Option::<Wide>::deserialize(d)? {
            None => Ok(None),
            Some(Wide::Small(x)) => Ok(Some(x as u128)),
            Some(Wide::Text(t)) => t.parse().map(Some).map_err(serde::de::Error::custom),
        }
    }
}

impl RatioRow {
    fn new(k: u32, params_hash: &str, construction_seed: u64, walker_seed: u64) -> Self {
        Self {
            k,
            params_hash: params_hash.to_string(),
            construction_seed,
            walker_seed,
            estimated_vertex_count: None,
            estimated_memory_bytes: None,
            metadata: None,
            n: None,
            unperturbed: None,
            perturbed: None,
            t_mix_ratio: None,
            hitting_ratio: None,
            ratio: None,
            ratio_source: None,
            gap_ratio: None,
            error: None,
            wall_time_s: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingOutcome {
    pub rows: Vec<RatioRow>,
    pub report: Value,
    /// 0 when every row succeeded, 2 if any row was infeasible, else 1 if any
    /// measurement failed.
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub rows_ok: usize,
    pub rows_failed: usize,
    pub hitting_slope_unperturbed: Option<f64>,
    pub hitting_slope_perturbed: Option<f64>,
    pub ratio_strictly_increasing: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
struct ScalingBody<'a> {
    rows: &'a [RatioRow],
    summary: ScalingSummary,
}

fn row_error(kind: &str, message: impl ToString, infeasible: bool) -> RowError {
    RowError { kind: kind.into(), message: message.to_string(), infeasible }
}

fn construction_error(e: &ConstructionError) -> RowError {
    match e {
        ConstructionError::InfeasibleEllRule { .. } => row_error("infeasible-ell-rule", e, true),
        ConstructionError::InvalidParams(_) => row_error("invalid-params", e, true),
        _ => row_error("construction", e, false),
    }
}

/// Runs the sweep described by `config`, writing the row log, the report and
/// a CSV of the headline columns into the configured output directory.
pub fn run_scaling_experiment(config: &ExperimentConfig) -> Result<ScalingOutcome, ExperimentError> {
    config.validate()?;
    let out = config.output_dir();
    std::fs::create_dir_all(&out)?;
    let params_hash = config.params_hash();
    let row_hash = config.row_params_hash();
    let log_path = out.join(ROW_LOG);

    let mut done: Vec<RatioRow> = Vec::new();
    if config.experiment.resume && log_path.exists() {
        for line in std::fs::read_to_string(&log_path)?.lines() {
            if let Ok(row) = serde_json::from_str::<RatioRow>(line) {
                if row.params_hash == row_hash && config.construction.k_values.contains(&row.k) {
                    done.retain(|r| r.k != row.k);
                    done.push(row);
                }
            }
        }
    }
    // rewrite the log with only the rows being kept (drops a torn last line)
    let mut log = std::fs::File::create(&log_path)?;
    for row in &done {
        writeln!(log, "{}", serde_json::to_string(row)?)?;
    }
    drop(log);

    let mut rows = Vec::with_capacity(config.construction.k_values.len());
    for &k in &config.construction.k_values {
        if let Some(row) = done.iter().find(|r| r.k == k) {
            rows.push(row.clone());
            continue;
        }
        let row = run_row(config, k, &row_hash, &out);
        let mut log = OpenOptions::new().append(true).open(&log_path)?;
        writeln!(log, "{}", serde_json::to_string(&row)?)?;
        rows.push(row);
    }

    let summary = summarize(&rows);
    let report = envelope("scaling", &params_hash, config.experiment.seed, Some(config), &ScalingBody { rows: &rows, summary });
    write_json(&out.join(REPORT_FILE), &report)?;
    std::fs::write(out.join(ROW_CSV), rows_csv(&rows))?;
    let exit_code = if rows.iter().any(|r| r.error.as_ref().is_some_and(|e| e.infeasible)) {
        2
    } else if rows.iter().any(|r| r.error.is_some()) {
        1
    } else {
        0
    };
    Ok(ScalingOutcome { rows, report, exit_code })
}

fn summarize(rows: &[RatioRow]) -> ScalingSummary {
    let ok: Vec<&RatioRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    let slope = |pick: fn(&RatioRow) -> Option<&SideMeasurements>| {
        let pts: Vec<(f64, f64)> =
            ok.iter().filter_map(|r| Some((r.k as f64, pick(r)?.hitting.as_ref()?.mean))).collect();
        (pts.len() >= 2).then(|| {
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            loglog_slope(&x, &y)
        })
    };
    let ratios: Vec<f64> = ok.iter().filter_map(|r| r.ratio).collect();
    ScalingSummary {
        rows_ok: ok.len(),
        rows_failed: rows.len() - ok.len(),
        hitting_slope_unperturbed: slope(|r| r.unperturbed.as_ref()),
        hitting_slope_perturbed: slope(|r| r.perturbed.as_ref()),
        ratio_strictly_increasing: (ratios.len() >= 2).then(|| ratios.windows(2).all(|w| w[1] > w[0])),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with one line per K.
pub fn rows_csv(rows: &[RatioRow]) -> String {
    let mut s = String::from(
        "k,n,t_mix,t_mix_perturbed,hitting,hitting_se,hitting_perturbed,hitting_perturbed_se,ratio,gap,gap_perturbed,error\n",
    );
    for r in rows {
        let side = |p: &Option<SideMeasurements>| p.as_ref().cloned();
        let (a, b) = (side(&r.unperturbed), side(&r.perturbed));
        let hit = |s: &Option<SideMeasurements>| s.as_ref().and_then(|s| s.hitting.clone());
        let (ha, hb) = (hit(&a), hit(&b));
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.k,
            opt(r.n),
            opt(a.as_ref().and_then(|s| s.t_mix)),
            opt(b.as_ref().and_then(|s| s.t_mix)),
            opt(ha.as_ref().map(|h| h.mean)),
            opt(ha.as_ref().map(|h| h.se)),
            opt(hb.as_ref().map(|h| h.mean)),
            opt(hb.as_ref().map(|h| h.se)),
            opt(r.ratio),
            opt(a.as_ref().and_then(|s| s.gap.as_ref().map(|g| g.gap))),
            opt(b.as_ref().and_then(|s| s.gap.as_ref().map(|g| g.gap))),
            r.error.as_ref().map(|e| e.kind.clone()).unwrap_or_default(),
        ));
    }
    s
}

fn run_row(config: &ExperimentConfig, k: u32, params_hash: &str, out: &Path) -> RatioRow {
    let clock = Instant::now();
    let seed = config.experiment.seed;
    let construction_seed = derive_seed(seed, &format!("construction K={k}"));
    let walker_seed = derive_seed(seed, &format!("walkers K={k}"));
    let mut row = RatioRow::new(k, params_hash, construction_seed, walker_seed);
    if let Err(e) = fill_row(config, k, out, &mut row) {
        row.error = Some(e);
    }
    row.wall_time_s = clock.elapsed().as_secs_f64();
    row
}

fn fill_row(config: &ExperimentConfig, k: u32, out: &Path, row: &mut RatioRow) -> Result<(), RowError> {
    let params = config.construction.params(k);
    let family = config.construction.family;
    let estimate = match family {
        ConstructionFamily::Simple => simple_plan(&params).map(|p| p.vertex_count),
        ConstructionFamily::Main => main_plan(&params).map(|p| p.vertex_count),
    }
    .map_err(|e| construction_error(&e))?;
    let memory = estimate.saturating_mul(BYTES_PER_VERTEX_ESTIMATE);
    row.estimated_vertex_count = Some(estimate);
    row.estimated_memory_bytes = Some(memory);
    let limits = &config.resources;
    if estimate > limits.max_vertices as u128 || memory > limits.max_memory_bytes as u128 {
        return Err(row_error(
            "resource-cap-exceeded",
            format!(
                "estimated {estimate} vertices / {memory} bytes exceed the caps of {} vertices / {} bytes",
                limits.max_vertices, limits.max_memory_bytes
            ),
            true,
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(row.construction_seed);
    let (g, meta) = match family {
        ConstructionFamily::Simple => assemble_simple_construction(&params, &mut rng),
        ConstructionFamily::Main => assemble_main_construction(&params, &mut rng),
    }
    .map_err(|e| construction_error(&e))?;
    let rule = match config.perturbation.kind {
        PerturbationKind::LeftDoubling => left_edge_doubling_rule(&g).map_err(|e| construction_error(&e))?,
        PerturbationKind::UniformRandom => {
            let mut prng = ChaCha8Rng::seed_from_u64(derive_seed(config.experiment.seed, &format!("perturbation K={k}")));
            uniform_random_rule(&g, config.perturbation.bound, &mut prng).map_err(|e| row_error("construction", e, false))?
        }
        PerturbationKind::Identity => PerturbationRule::identity(),
    };
    let gp = g.apply_perturbation(&rule).map_err(|e| row_error("construction", e, false))?;
    row.n = Some(g.vertex_count());

    let a = measure_side(config, &g, &meta, row.walker_seed, k, "unperturbed", out)?;
    let b = measure_side(config, &gp, &meta, row.walker_seed, k, "perturbed", out)?;
    row.t_mix_ratio = match (a.t_mix, b.t_mix) {
        (Some(x), Some(y)) if y > 0 => Some(x as f64 / y as f64),
        _ => None,
    };
    row.hitting_ratio = match (&a.hitting, &b.hitting) {
        (Some(x), Some(y)) if y.mean > 0.0 => Some(x.mean / y.mean),
        _ => None,
    };
    (row.ratio, row.ratio_source) = match (row.t_mix_ratio, row.hitting_ratio) {
        (Some(r), _) => (Some(r), Some("t_mix".into())),
        (None, Some(r)) => (Some(r), Some("hitting".into())),
        _ => (None, None),
    };
    row.gap_ratio = match (&a.gap, &b.gap) {
        (Some(x), Some(y)) => Some(y.gap / x.gap),
        _ => None,
    };
    row.metadata = Some(meta);
    row.unperturbed = Some(a);
    row.perturbed = Some(b);
    Ok(())
}

/// Decorated tree levels with their anchors, for visit counting.
fn level_sets(g: &WeightedGraph, meta: &ConstructionMetadata) -> Vec<(u32, Vec<VertexId>, f64)> {
    let mut by_level: std::collections::BTreeMap<u32, Vec<VertexId>> = Default::default();
    for &a in &meta.anchors {
        if let Some(level) = g.label(a).tree_level() {
            by_level.entry(level).or_default().push(a);
        }
    }
    by_level
        .into_iter()
        .map(|(level, anchors)| {
            let fraction = anchors.len() as f64 / (1u64 << level) as f64;
            (level, anchors, fraction)
        })
        .collect()
}

fn measure_side(
    config: &ExperimentConfig,
    g: &WeightedGraph,
    meta: &ConstructionMetadata,
    walker_seed: u64,
    k: u32,
    side: &str,
    out: &Path,
) -> Result<SideMeasurements, RowError> {
    let clock = Instant::now();
    let merr = |e: AnalysisError| row_error("measurement", e, false);
    let write = |name: String, text: String| {
        std::fs::write(out.join(&name), text).map_err(|e| row_error("io", format!("{name}: {e}"), false))
    };
    let m = &config.measurements;
    let wants = |x: Measurement| m.list.contains(&x);
    let root = TreeAddress::ROOT.heap_index();
    let expander = &meta.expander_vertices;
    let pi = g.stationary_distribution().map_err(|e| merr(e.into()))?;
    let mut s = SideMeasurements {
        graph_hash: graph_hash(g),
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        max_degree: g.max_degree(),
        expander_mass: g.region_mass(&pi, |l| *l == RegionLabel::Expander),
        t_mix: None,
        t_mix_per_start: None,
        t_mix_start_set: None,
        hitting: None,
        gap: None,
        visits: None,
        total_visits: None,
        visit_lower_bounds: None,
        excursions: None,
        wall_time_s: 0.0,
    };
    if wants(Measurement::Hitting) {
        let r = match m.hitting_method {
            HittingMethod::MonteCarlo => hitting_time_mc(g, root, expander, m.walkers, walker_seed, m.t_cap),
            HittingMethod::Exact => hitting_report_exact(g, root, expander, m.exact_hitting_cap),
        }
        .map_err(merr)?;
        s.hitting = Some((&r).into());
    }
    if wants(Measurement::Gap) {
        let opts = GapOptions { method: m.gap_method, tol: m.gap_tol, max_iters: m.gap_max_iters, seed: walker_seed };
        s.gap = Some(match spectral_gap_with(g, &opts) {
            Ok(r) => r,
            // keep the best estimate; `converged = false` marks it
            Err(AnalysisError::NoConvergence { best }) => *best,
            Err(e) => return Err(merr(e)),
        });
    }
    if wants(Measurement::Mixing) {
        let starts = StartSet::Candidates(candidate_starts(g));
        let r = worst_case_mixing_time(g, &starts, m.threshold, m.t_max, m.exhaustive_cap).map_err(merr)?;
        write(format!("tv_K{k}_{side}.csv"), r.tv_csv())?;
        s.t_mix = Some(r.t_mix);
        s.t_mix_per_start = Some(r.per_start);
        s.t_mix_start_set = Some(r.start_set);
    }
    if wants(Measurement::Visits) {
        let levels = level_sets(g, meta);
        let sets: Vec<VisitSet> =
            levels.iter().map(|(level, anchors, _)| VisitSet::new(format!("A∩H_{level}"), anchors.clone())).collect();
        let r = visit_statistics(g, root, &sets, expander, m.walkers, walker_seed, m.t_cap).map_err(merr)?;
        write(format!("visits_K{k}_{side}.csv"), r.visits_csv())?;
        s.visit_lower_bounds = Some(levels.iter().map(|l| l.2).collect());
        s.visits = Some(r.visits);
        s.total_visits = r.total_visits;
    }
    if wants(Measurement::Excursions) && !meta.anchors.is_empty() {
        let count = m.excursion_anchors.min(meta.anchors.len());
        let picked: Vec<VertexId> = (0..count).map(|j| meta.anchors[j * meta.anchors.len() / count]).collect();
        let r = excursion_statistics(g, &picked, m.excursion_walkers, walker_seed).map_err(merr)?;
        s.excursions = Some(
            r.anchors
                .iter()
                .map(|a| ExcursionSummary {
                    anchor: a.anchor,
                    torus_volume: a.torus_volume,
                    samples: a.samples,
                    mean: a.mean,
                    se: a.se,
                    exact: a.exact,
                    kac_prediction: a.kac_prediction,
                })
                .collect(),
        );
    }
    s.wall_time_s = clock.elapsed().as_secs_f64();
    Ok(s)
}
