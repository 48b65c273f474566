//! Decorated binary trees: the simple construction (tori on balanced nodes of
//! the whole tree) and the main construction (tori on balanced nodes of height-ℓ
//! subtrees hanging from every ℓ-th level), both finished with an expander glued
//! onto the leaves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::attach::Assembler;
use crate::constructions::expander::build_random_regular_expander;
use crate::constructions::torus::torus_graph;
use crate::constructions::tree::{balanced_count, balanced_nodes, build_binary_tree, TreeAddress};
use crate::constructions::{ConstructionError, ConstructionParams};
use crate::graph::{RegionLabel, VertexId, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderCertificate {
    pub gap: f64,
    pub threshold: f64,
    /// Certification rounds that failed before success.
    pub retries: usize,
    /// Total pairings drawn, including non-simple ones.
    pub pairing_attempts: usize,
    pub iterations: usize,
    pub residual: f64,
    pub method: String,
}

/// Closed-form sizes of the simple construction, computed without building it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplePlan {
    pub k: u32,
    pub window: u32,
    pub depth_range: (u32, u32),
    pub balanced_count: u128,
    pub torus_dims: Vec<usize>,
    pub torus_volume: usize,
    pub expander_size: u128,
    pub vertex_count: u128,
}

/// Closed-form sizes of the main construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainPlan {
    pub k: u32,
    pub ell: u32,
    /// Levels `jℓ` carrying subtree roots.
    pub subtree_levels: Vec<u32>,
    pub subtree_root_count: u128,
    pub window: u32,
    /// Depth range relative to a subtree root.
    pub relative_depth_range: (u32, u32),
    pub balanced_per_subtree: u128,
    pub balanced_count: u128,
    pub torus_dims: Vec<usize>,
    pub torus_volume: usize,
    pub expander_size: u128,
    pub vertex_count: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionMetadata {
    pub family: String,
    pub params: ConstructionParams,
    pub ell: Option<u32>,
    pub subtree_levels: Option<Vec<u32>>,
    pub window: u32,
    pub depth_range: (u32, u32),
    /// `|B|` for the simple construction, `|𝓐|` for the main one.
    pub balanced_count: u128,
    pub torus_dims: Vec<usize>,
    pub torus_volume: usize,
    pub expander_size: usize,
    pub expander: ExpanderCertificate,
    pub tree_vertex_count: usize,
    pub vertex_count: usize,
    pub closed_form_vertex_count: u128,
    pub edge_count: usize,
    pub max_degree: usize,
    /// Tree vertices carrying a torus, in address order.
    #[serde(skip)]
    pub anchors: Vec<VertexId>,
    /// Graph id of each expander vertex, in the expander's own vertex order.
    #[serde(skip)]
    pub expander_vertices: Vec<VertexId>,
}

fn closed_form_count(k: u32, decorated: u128, torus_volume: usize, expander_size: u128) -> u128 {
    let tree = (1u128 << (k + 1)) - 1;
    tree + decorated * (torus_volume as u128 - 1) + expander_size - (1u128 << k)
}

/// Largest vertex count the builders will materialize (ids are `u32`).
pub const MAX_MATERIALIZED_VERTICES: u128 = u32::MAX as u128;

fn check_materializable(count: u128) -> Result<(), ConstructionError> {
    if count > MAX_MATERIALIZED_VERTICES {
        return Err(ConstructionError::InvalidParams(format!(
            "{count} vertices exceed the {MAX_MATERIALIZED_VERTICES}-vertex limit"
        )));
    }
    Ok(())
}

/// Decorated depths clamped below the leaf level, which carries the expander.
fn clamp_range(range: (u32, u32), height: u32) -> (u32, u32) {
    (range.0, range.1.min(height.saturating_sub(1)))
}

pub fn simple_plan(params: &ConstructionParams) -> Result<SimplePlan, ConstructionError> {
    params.validate()?;
    let k = params.k;
    let window = params.window(k);
    let depth_range = clamp_range(params.depth_range(k), k);
    let balanced = if depth_range.0 <= depth_range.1 { balanced_count(depth_range, window) } else { 0 };
    let torus_dims = params.torus_dims();
    let torus_volume = torus_dims.iter().product();
    let expander_size = params.expander_size();
    Ok(SimplePlan {
        k,
        window,
        depth_range,
        balanced_count: balanced,
        vertex_count: closed_form_count(k, balanced, torus_volume, expander_size),
        torus_dims,
        torus_volume,
        expander_size,
    })
}

pub fn main_plan(params: &ConstructionParams) -> Result<MainPlan, ConstructionError> {
    let k = params.k;
    let ell = params.ell_rule.ell(k);
    let (lo_f, hi_f) = params.level_range;
    let (lo, hi) = (lo_f * k as f64, hi_f * k as f64);
    let infeasible = |detail: String| ConstructionError::InfeasibleEllRule { k, ell, lo, hi, detail };
    if k / (4 * ell) < 1 {
        return Err(infeasible(format!("floor({k}/(4*{ell})) = 0")));
    }
    let subtree_levels: Vec<u32> = (1..=k / ell)
        .map(|j| j * ell)
        .filter(|&l| l as f64 >= lo && l as f64 <= hi && l + ell <= k)
        .collect();
    if subtree_levels.is_empty() {
        return Err(infeasible("no multiple of ell in the level range".into()));
    }
    params.validate()?;
    let window = params.window(ell);
    let relative_depth_range = params.depth_range(ell);
    let per = if relative_depth_range.0 <= relative_depth_range.1 {
        balanced_count(relative_depth_range, window)
    } else {
        0
    };
    let roots: u128 = subtree_levels.iter().map(|&l| 1u128 << l).sum();
    let torus_dims = params.torus_dims();
    let torus_volume = torus_dims.iter().product();
    let expander_size = params.expander_size();
    Ok(MainPlan {
        k,
        ell,
        subtree_root_count: roots,
        window,
        relative_depth_range,
        balanced_per_subtree: per,
        balanced_count: roots * per,
        vertex_count: closed_form_count(k, roots * per, torus_volume, expander_size),
        subtree_levels,
        torus_dims,
        torus_volume,
        expander_size,
    })
}

/// Tree of height K, a torus on every balanced node, and an expander whose
/// vertex set meets the tree exactly in the leaves.
pub fn assemble_simple_construction<R: Rng + ?Sized>(
    params: &ConstructionParams,
    rng: &mut R,
) -> Result<(WeightedGraph, ConstructionMetadata), ConstructionError> {
    let plan = simple_plan(params)?;
    check_materializable(plan.vertex_count)?;
    let anchors: Vec<TreeAddress> = if plan.depth_range.0 <= plan.depth_range.1 {
        balanced_nodes(plan.k, TreeAddress::ROOT, plan.depth_range, plan.window)
    } else {
        Vec::new()
    };
    let (graph, anchors, expander_vertices, certificate) = decorate(params, &plan.torus_dims, &anchors, rng)?;
    let meta = ConstructionMetadata {
        family: "simple".into(),
        params: params.clone(),
        ell: None,
        subtree_levels: None,
        window: plan.window,
        depth_range: plan.depth_range,
        balanced_count: plan.balanced_count,
        torus_dims: plan.torus_dims.clone(),
        torus_volume: plan.torus_volume,
        expander_size: plan.expander_size as usize,
        expander: certificate,
        tree_vertex_count: (1usize << (plan.k + 1)) - 1,
        vertex_count: graph.vertex_count(),
        closed_form_vertex_count: plan.vertex_count,
        edge_count: graph.edge_count(),
        max_degree: graph.max_degree(),
        anchors,
        expander_vertices,
    };
    Ok((graph, meta))
}

/// Tree of height K whose height-ℓ subtrees rooted at levels `jℓ` carry tori
/// on their own balanced nodes; expander on the leaves as before.
pub fn assemble_main_construction<R: Rng + ?Sized>(
    params: &ConstructionParams,
    rng: &mut R,
) -> Result<(WeightedGraph, ConstructionMetadata), ConstructionError> {
    let plan = main_plan(params)?;
    check_materializable(plan.vertex_count)?;
    let mut anchors = Vec::with_capacity(plan.balanced_count as usize);
    for &level in &plan.subtree_levels {
        for bits in 0..(1u64 << level) {
            let root = TreeAddress { depth: level, bits };
            anchors.extend(balanced_nodes(plan.ell, root, plan.relative_depth_range, plan.window));
        }
    }
    anchors.sort();
    let (graph, anchors, expander_vertices, certificate) = decorate(params, &plan.torus_dims, &anchors, rng)?;
    let meta = ConstructionMetadata {
        family: "main".into(),
        params: params.clone(),
        ell: Some(plan.ell),
        subtree_levels: Some(plan.subtree_levels.clone()),
        window: plan.window,
        depth_range: plan.relative_depth_range,
        balanced_count: plan.balanced_count,
        torus_dims: plan.torus_dims.clone(),
        torus_volume: plan.torus_volume,
        expander_size: plan.expander_size as usize,
        expander: certificate,
        tree_vertex_count: (1usize << (plan.k + 1)) - 1,
        vertex_count: graph.vertex_count(),
        closed_form_vertex_count: plan.vertex_count,
        edge_count: graph.edge_count(),
        max_degree: graph.max_degree(),
        anchors,
        expander_vertices,
    };
    Ok((graph, meta))
}

type Decorated = (WeightedGraph, Vec<VertexId>, Vec<VertexId>, ExpanderCertificate);

fn decorate<R: Rng + ?Sized>(
    params: &ConstructionParams,
    torus_dims: &[usize],
    anchors: &[TreeAddress],
    rng: &mut R,
) -> Result<Decorated, ConstructionError> {
    let k = params.k;
    let tree = build_binary_tree(k);
    let torus = torus_graph(torus_dims);
    let mut asm = Assembler::from_graph(&tree);
    let anchor_ids: Vec<VertexId> = anchors.iter().map(|a| a.heap_index()).collect();
    for &u in &anchor_ids {
        asm.attach(&torus, &[(0, u)], RegionLabel::Torus { anchor: u })?;
    }
    drop(tree);

    let size = params.expander_size() as usize;
    let expander = build_random_regular_expander(
        size,
        params.expander_degree,
        params.expander_gap_threshold,
        rng,
        params.max_expander_retries,
    )?;
    let leaves = 1usize << k;
    let first_leaf = (leaves - 1) as VertexId;
    let chosen = rand::seq::index::sample(rng, size, leaves);
    let identify: Vec<(VertexId, VertexId)> = chosen
        .iter()
        .enumerate()
        .map(|(i, e)| (e as VertexId, first_leaf + i as VertexId))
        .collect();
    let expander_vertices = asm.attach(&expander.graph, &identify, RegionLabel::Expander)?;
    Ok((asm.finish(), anchor_ids, expander_vertices, expander.certificate))
}
