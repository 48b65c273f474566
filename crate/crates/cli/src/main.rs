//! `mixlab`: build decorated-tree graphs, perturb them, and measure mixing.
//!
//! Exit codes: 0 on success, 1 when a measurement fails, 2 for usage errors
//! and infeasible configurations.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use mixlab_core::analysis::{
    excursion_statistics, exact_mixing_time, hitting::hitting_report_exact, hitting_time_mc, spectral_gap_with,
    visit_statistics, worst_case_mixing_time, AnalysisError, GapMethod, GapOptions, StartSet, VisitSet,
    EXACT_HITTING_CAP, EXHAUSTIVE_START_CAP,
};
use mixlab_core::constructions::{
    assemble_main_construction, assemble_simple_construction, build_er_graph, build_hypercube, build_lattice_torus,
    build_random_regular_expander, left_edge_doubling_rule, uniform_random_rule, ConstructionError,
    ConstructionParams, EllRule,
};
use mixlab_core::experiments::config::OUTPUT_ENV;
use mixlab_core::experiments::report::{envelope, write_json};
use mixlab_core::experiments::{run_robustness_experiment, run_scaling_experiment, ExperimentConfig, ExperimentError};
use mixlab_core::format::{graph_hash, load_graph, save_graph, FormatError};
use mixlab_core::rng::{derive_seed, with_threads};
use mixlab_core::{oracle, PerturbationRule, RegionLabel, VertexId, WeightedGraph};

#[derive(Parser, Debug)]
#[command(name = "mixlab", version, about = "Mixing-time experiments on decorated binary trees")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output file for `build` and `perturb`, output directory otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Experiment config (TOML). `build` also reads its `[construction]` table.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a graph and write it with a `.meta.json` sidecar.
    Build(BuildArgs),
    /// Apply a conductance perturbation to a saved graph.
    Perturb(PerturbArgs),
    /// Exact TV mixing time.
    Mix(MixArgs),
    /// Expected hitting time of a target set.
    Hit(HitArgs),
    /// Spectral gap of the lazy walk.
    Gap(GapArgs),
    /// Visits to decorated levels before reaching the target.
    Visits(VisitArgs),
    /// Torus excursion lengths against Kac's formula.
    Excursions(ExcursionArgs),
    /// Config-driven experiment runs.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
    /// Dense brute-force references on a small graph.
    Oracle(OracleArgs),
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// Sweep K and compare each graph with its perturbed copy.
    Scaling,
    /// Random bounded perturbations of a robust family.
    Robustness,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Family {
    Simple,
    Main,
    Torus,
    Hypercube,
    Er,
    Expander,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Tree height for `simple` and `main`.
    #[arg(long = "K")]
    k: Option<u32>,
    /// Side length (torus), dimension (hypercube) or vertex count (er, expander).
    #[arg(long)]
    n: Option<usize>,
    /// Torus dimension.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Edge probability for `er`.
    #[arg(long)]
    p: Option<f64>,
    /// Expander degree.
    #[arg(long, default_value_t = 3)]
    degree: usize,
    /// Override the ℓ rule with `ℓ = ⌈coeff · log₂ K⌉`.
    #[arg(long)]
    ell_coeff: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Rule {
    LeftDoubling,
    Uniform,
}

#[derive(Args, Debug)]
struct PerturbArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "left-doubling")]
    rule: Rule,
    /// Bound `C` for uniform factors in `[1/C, C]`.
    #[arg(long, default_value_t = 2.0)]
    bound: f64,
}

#[derive(Args, Debug)]
struct MixArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Start vertex; omitted means the worst case over every start.
    #[arg(long)]
    start: Option<VertexId>,
    #[arg(long, default_value_t = 0.25)]
    threshold: f64,
    #[arg(long, default_value_t = 1_000_000)]
    t_max: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum HitMethod {
    Exact,
    Mc,
}

#[derive(Args, Debug)]
struct HitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    start: VertexId,
    /// Comma-separated vertex ids, or `expander`.
    #[arg(long, default_value = "expander")]
    target: String,
    #[arg(long, value_enum, default_value = "exact")]
    method: HitMethod,
    #[arg(long, default_value_t = 2000)]
    walkers: usize,
    #[arg(long, default_value_t = 1 << 32)]
    t_cap: u64,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "power")]
    method: GapMethodArg,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iters: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum GapMethodArg {
    Power,
    Lanczos,
}

#[derive(Args, Debug)]
struct VisitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    start: VertexId,
    /// Comma-separated vertex ids, or `expander`.
    #[arg(long, default_value = "expander")]
    target: String,
    #[arg(long, default_value_t = 2000)]
    walkers: usize,
    #[arg(long, default_value_t = 1 << 32)]
    t_cap: u64,
}

#[derive(Args, Debug)]
struct ExcursionArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated anchors; default is up to `--max-anchors` spread evenly.
    #[arg(long)]
    anchors: Option<String>,
    #[arg(long, default_value_t = 10)]
    max_anchors: usize,
    #[arg(long, default_value_t = 2000)]
    walkers: usize,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    start: VertexId,
    /// Comma-separated vertex ids for the hitting time.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, default_value_t = 0.25)]
    threshold: f64,
    #[arg(long, default_value_t = 100_000)]
    t_max: usize,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(m: impl Display) -> Self {
        Self { code: 2, message: m.to_string() }
    }

    fn measurement(m: impl Display) -> Self {
        Self { code: 1, message: m.to_string() }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidArgument(_) | AnalysisError::EmptyTarget | AnalysisError::Graph(_) => Self::usage(e),
            _ => Self::measurement(e),
        }
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::InfeasibleEllRule { .. } | ConstructionError::InvalidParams(_) => Self::usage(e),
            _ => Self::measurement(e),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Self::usage(e)
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(_) => Self::usage(e),
            _ => Self::measurement(e),
        }
    }
}

impl From<mixlab_core::GraphError> for Failure {
    fn from(e: mixlab_core::GraphError) -> Self {
        Self::usage(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::measurement(format!("io error: {e}"))
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    match with_threads(threads, move || run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("mixlab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let seed = cli.seed.unwrap_or(1);
    match &cli.command {
        Command::Build(a) => build(&cli, a, seed),
        Command::Perturb(a) => perturb(&cli, a, seed),
        Command::Mix(a) => mix(&cli, a),
        Command::Hit(a) => hit(&cli, a, seed),
        Command::Gap(a) => gap(&cli, a, seed),
        Command::Visits(a) => visits(&cli, a, seed),
        Command::Excursions(a) => excursions(&cli, a, seed),
        Command::Experiment { which } => experiment(&cli, which),
        Command::Oracle(a) => run_oracle(a),
    }
}

/// Shortest decimal that agrees with `x` to 10 significant digits, so
/// solver noise in the last bits does not reach the terminal.
fn show(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.9e}").parse().unwrap_or(x);
    rounded.to_string()
}

fn load(path: &Path) -> Result<WeightedGraph> {
    Ok(load_graph(path)?)
}

fn parse_vertices(g: &WeightedGraph, spec: &str) -> Result<Vec<VertexId>> {
    if spec == "expander" {
        let v = g.vertices_where(|l| *l == RegionLabel::Expander);
        if v.is_empty() {
            return Err(Failure::usage("graph has no expander vertices; pass --target with vertex ids"));
        }
        // tree leaves double as expander vertices; their ids follow the tree
        let leaves = leaf_level(g).map(|k| g.vertices_where(|l| l.tree_level() == Some(k))).unwrap_or_default();
        let mut all = leaves;
        all.extend(v);
        all.sort_unstable();
        return Ok(all);
    }
    spec.split(',')
        .map(|s| s.trim().parse::<VertexId>().map_err(|_| Failure::usage(format!("bad vertex id {s:?}"))))
        .collect()
}

/// Deepest tree level, when the graph carries tree labels and an expander.
fn leaf_level(g: &WeightedGraph) -> Option<u32> {
    g.labels().iter().filter_map(|l| l.tree_level()).max()
}

/// Writes `value` as `<out>/<name>` when `--out` was given.
fn emit_report(cli: &Cli, name: &str, kind: &str, seed: u64, body: &impl serde::Serialize) -> Result<()> {
    if let Some(dir) = &cli.out {
        let v = envelope(kind, "", seed, None::<&Value>, body);
        write_json(&dir.join(name), &v)?;
    }
    Ok(())
}

fn emit_text(cli: &Cli, name: &str, text: String) -> Result<()> {
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

fn out_file(cli: &Cli) -> Result<&Path> {
    cli.out.as_deref().ok_or_else(|| Failure::usage("--out <FILE> is required"))
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn construction_params(cli: &Cli, a: &BuildArgs) -> Result<ConstructionParams> {
    let k = a.k.ok_or_else(|| Failure::usage("--K is required for this family"))?;
    let mut params = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(Failure::usage)?.construction.params(k),
        None => ConstructionParams::new(k),
    };
    if let Some(c) = a.ell_coeff {
        params.ell_rule = EllRule::binary(c);
    }
    Ok(params)
}

fn build(cli: &Cli, a: &BuildArgs, seed: u64) -> Result<u8> {
    let path = out_file(cli)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "build"));
    let need_n = || a.n.ok_or_else(|| Failure::usage("--n is required for this family"));
    let (g, details) = match a.family {
        Family::Simple | Family::Main => {
            let params = construction_params(cli, a)?;
            let (g, meta) = if a.family == Family::Simple {
                assemble_simple_construction(&params, &mut rng)?
            } else {
                assemble_main_construction(&params, &mut rng)?
            };
            let meta = serde_json::to_value(&meta).map_err(Failure::measurement)?;
            (g, meta)
        }
        Family::Torus => (build_lattice_torus(need_n()?, a.d), json!({"n": a.n, "d": a.d})),
        Family::Hypercube => (build_hypercube(need_n()? as u32), json!({"n": a.n})),
        Family::Er => {
            let n = need_n()?;
            let p = a.p.unwrap_or(2.0 / n as f64);
            let er = build_er_graph(n, p, &mut rng);
            (er.graph, json!({"n": n, "p": p, "original_ids": er.original_ids}))
        }
        Family::Expander => {
            let b = build_random_regular_expander(need_n()?, a.degree, 0.01, &mut rng, 20)?;
            let cert = serde_json::to_value(&b.certificate).map_err(Failure::measurement)?;
            (b.graph, json!({"n": a.n, "degree": a.degree, "certificate": cert}))
        }
    };
    let hash = save_graph(&g, path)?;
    let family = a.family.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let meta = json!({
        "family": family,
        "seed": seed,
        "graph_hash": hash,
        "vertex_count": g.vertex_count(),
        "edge_count": g.edge_count(),
        "max_degree": g.max_degree(),
        "details": details,
    });
    write_json(&sidecar_path(path), &meta)?;
    println!("{} vertices, {} edges, hash {hash}", g.vertex_count(), g.edge_count());
    Ok(0)
}

fn perturb(cli: &Cli, a: &PerturbArgs, seed: u64) -> Result<u8> {
    let path = out_file(cli)?;
    let g = load(&a.input)?;
    let rule: PerturbationRule = match a.rule {
        Rule::LeftDoubling => left_edge_doubling_rule(&g)?,
        Rule::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "perturb"));
            uniform_random_rule(&g, a.bound, &mut rng)?
        }
    };
    let gp = g.apply_perturbation(&rule)?;
    let hash = save_graph(&gp, path)?;
    let meta = json!({
        "source": a.input,
        "source_hash": graph_hash(&g),
        "rule": format!("{:?}", a.rule),
        "bound": rule.bound(),
        "modified_edges": rule.len(),
        "seed": seed,
        "graph_hash": hash,
    });
    write_json(&sidecar_path(path), &meta)?;
    println!("{} edges modified, hash {hash}", rule.len());
    Ok(0)
}

fn mix(cli: &Cli, a: &MixArgs) -> Result<u8> {
    let g = load(&a.input)?;
    let report = match a.start {
        Some(v) => exact_mixing_time(&g, v, a.threshold, a.t_max),
        None => worst_case_mixing_time(&g, &StartSet::All, a.threshold, a.t_max, EXHAUSTIVE_START_CAP),
    };
    let report = match report {
        Ok(r) => r,
        Err(AnalysisError::NotMixedByTMax { t_max, tv, threshold, partial }) => {
            emit_text(cli, "tv.csv", partial.tv_csv())?;
            return Err(Failure::measurement(format!("TV {tv} still above {threshold} at t_max = {t_max}")));
        }
        Err(e) => return Err(e.into()),
    };
    emit_text(cli, "tv.csv", report.tv_csv())?;
    emit_report(cli, "mix_report.json", "mix", 0, &report)?;
    println!("{}", report.t_mix);
    Ok(0)
}

fn hit(cli: &Cli, a: &HitArgs, seed: u64) -> Result<u8> {
    let g = load(&a.input)?;
    let target = parse_vertices(&g, &a.target)?;
    let report = match a.method {
        HitMethod::Exact => match hitting_report_exact(&g, a.start, &target, EXACT_HITTING_CAP) {
            Err(AnalysisError::CapExceeded { size, cap, .. }) => {
                eprintln!("mixlab: {size} vertices exceed the exact-solve cap of {cap}; using Monte Carlo");
                hitting_time_mc(&g, a.start, &target, a.walkers, seed, a.t_cap)?
            }
            r => r?,
        },
        HitMethod::Mc => hitting_time_mc(&g, a.start, &target, a.walkers, seed, a.t_cap)?,
    };
    emit_report(cli, "hit_report.json", "hit", seed, &report)?;
    if report.truncated > 0 {
        eprintln!("mixlab: {} of {} walks hit t_cap", report.truncated, report.walkers);
    }
    if report.method == "exact" {
        println!("{}", show(report.mean));
    } else {
        println!("{} ± {}", show(report.mean), show(report.se));
    }
    Ok(0)
}

fn gap(cli: &Cli, a: &GapArgs, seed: u64) -> Result<u8> {
    let g = load(&a.input)?;
    let method = match a.method {
        GapMethodArg::Power => GapMethod::Power,
        GapMethodArg::Lanczos => GapMethod::Lanczos,
    };
    let opts = GapOptions { method, tol: a.tol, max_iters: a.max_iters, seed };
    let report = match spectral_gap_with(&g, &opts) {
        Ok(r) => r,
        Err(AnalysisError::NoConvergence { best }) => {
            emit_report(cli, "gap_report.json", "gap", seed, &best)?;
            return Err(Failure::measurement(format!(
                "no convergence after {} iterations (best gap {}, residual {:e})",
                best.iterations, best.gap, best.residual
            )));
        }
        Err(e) => return Err(e.into()),
    };
    emit_report(cli, "gap_report.json", "gap", seed, &report)?;
    println!("{}", show(report.gap));
    Ok(0)
}

/// Torus anchors grouped by tree level, shallowest first.
fn anchor_levels(g: &WeightedGraph) -> Vec<(u32, Vec<VertexId>)> {
    let mut anchors: Vec<VertexId> = g
        .labels()
        .iter()
        .filter_map(|l| match l {
            RegionLabel::Torus { anchor } => Some(*anchor),
            _ => None,
        })
        .collect();
    anchors.sort_unstable();
    anchors.dedup();
    let mut by_level: std::collections::BTreeMap<u32, Vec<VertexId>> = Default::default();
    for a in anchors {
        if let Some(level) = g.label(a).tree_level() {
            by_level.entry(level).or_default().push(a);
        }
    }
    by_level.into_iter().collect()
}

fn visits(cli: &Cli, a: &VisitArgs, seed: u64) -> Result<u8> {
    let g = load(&a.input)?;
    let target = parse_vertices(&g, &a.target)?;
    let sets: Vec<VisitSet> =
        anchor_levels(&g).into_iter().map(|(level, vs)| VisitSet::new(format!("A∩H_{level}"), vs)).collect();
    if sets.is_empty() {
        return Err(Failure::usage("graph has no torus anchors to count visits to"));
    }
    let report = visit_statistics(&g, a.start, &sets, &target, a.walkers, seed, a.t_cap)?;
    emit_text(cli, "visits.csv", report.visits_csv())?;
    emit_report(cli, "visits_report.json", "visits", seed, &report)?;
    for v in report.visits.iter().chain(report.total_visits.as_ref()) {
        println!("{}\t{} ± {}", v.set, show(v.mean), show(v.se));
    }
    Ok(0)
}

fn excursions(cli: &Cli, a: &ExcursionArgs, seed: u64) -> Result<u8> {
    let g = load(&a.input)?;
    let anchors = match &a.anchors {
        Some(s) => parse_vertices(&g, s)?,
        None => {
            let all: Vec<VertexId> = anchor_levels(&g).into_iter().flat_map(|(_, vs)| vs).collect();
            let count = a.max_anchors.min(all.len());
            (0..count).map(|j| all[j * all.len() / count]).collect()
        }
    };
    if anchors.is_empty() {
        return Err(Failure::usage("graph has no torus anchors"));
    }
    let report = excursion_statistics(&g, &anchors, a.walkers, seed)?;
    let mut csv = String::from("anchor,torus_volume,samples,mean,se,exact,kac\n");
    println!("anchor\tvolume\tmean\tse\texact\tkac");
    for s in &report.anchors {
        let exact = s.exact.map(show).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.anchor, s.torus_volume, s.samples, s.mean, s.se, exact, s.kac_prediction
        ));
        println!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            s.anchor,
            s.torus_volume,
            show(s.mean),
            show(s.se),
            exact,
            show(s.kac_prediction)
        );
    }
    emit_text(cli, "excursions.csv", csv)?;
    emit_report(cli, "excursions_report.json", "excursions", seed, &report)?;
    Ok(0)
}

fn experiment(cli: &Cli, which: &ExperimentCommand) -> Result<u8> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(Failure::usage)?,
        None => {
            let mut c = ExperimentConfig::default();
            if let Ok(dir) = std::env::var(OUTPUT_ENV) {
                c.experiment.output_dir = dir;
            }
            c
        }
    };
    if let Some(seed) = cli.seed {
        config.experiment.seed = seed;
    }
    if let Some(dir) = &cli.out {
        config.experiment.output_dir = dir.to_string_lossy().into_owned();
    }
    let out = config.output_dir();
    match which {
        ExperimentCommand::Scaling => {
            let outcome = run_scaling_experiment(&config)?;
            println!("k\tn\tratio\tsource\terror");
            for r in &outcome.rows {
                println!(
                    "{}\t{}\t{}\t{}\t{}",
                    r.k,
                    r.n.map(|n| n.to_string()).unwrap_or_default(),
                    r.ratio.map(show).unwrap_or_default(),
                    r.ratio_source.clone().unwrap_or_default(),
                    r.error.as_ref().map(|e| e.message.clone()).unwrap_or_default()
                );
            }
            eprintln!("report written to {}", out.display());
            Ok(outcome.exit_code as u8)
        }
        ExperimentCommand::Robustness => {
            let outcome = run_robustness_experiment(&config)?;
            let r = &outcome.report;
            println!("vertices\t{}", r.vertex_count);
            println!("t_mix\t{}", r.t_mix);
            println!("gap\t{}", show(r.gap.gap));
            println!("max_mixing_ratio\t{}", show(r.max_mixing_ratio));
            println!("gaps_within_certificate\t{}", r.all_gaps_within_certificate);
            eprintln!("report written to {}", out.display());
            Ok(outcome.exit_code as u8)
        }
    }
}

fn run_oracle(a: &OracleArgs) -> Result<u8> {
    let g = load(&a.input)?;
    if g.vertex_count() > oracle::ORACLE_CAP {
        return Err(Failure::usage(format!(
            "{} vertices exceed the dense-oracle cap of {}",
            g.vertex_count(),
            oracle::ORACLE_CAP
        )));
    }
    if a.start as usize >= g.vertex_count() {
        return Err(Failure::usage(format!("start {} is not a vertex", a.start)));
    }
    if !g.is_connected() {
        return Err(Failure::usage("dense oracles need a connected graph"));
    }
    println!("gap\t{}", show(oracle::spectral_gap(&g)));
    match oracle::mixing_time(&g, a.start, a.threshold, a.t_max) {
        Some(t) => println!("t_mix\t{t}"),
        None => println!("t_mix\t> {}", a.t_max),
    }
    if let Some(spec) = &a.target {
        let target = parse_vertices(&g, spec)?;
        if let Some(bad) = target.iter().find(|&&v| v as usize >= g.vertex_count()) {
            return Err(Failure::usage(format!("target {bad} is not a vertex")));
        }
        println!("hitting\t{}", show(oracle::hitting_time(&g, a.start, &target)));
    }
    Ok(0)
}
