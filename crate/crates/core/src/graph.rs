//! Weighted graphs, the lazy random-walk kernel and distributions over vertices.
//!
//! A [`WeightedGraph`] is an immutable CSR adjacency with strictly positive,
//! symmetric conductances. Laziness lives in the kernel: from `v` the walk
//! stays with probability 1/2 and otherwise moves to `u` with probability
//! `c(u,v) / (2 c(v))`, where `c(v)` is the vertex strength. The stationary
//! measure is therefore `π(v) ∝ c(v)` exactly.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense 0-based vertex index.
pub type VertexId = u32;

/// Vertices per parallel work item in kernel products and reductions.
/// Fixed so that floating-point summation order never depends on the thread count.
pub(crate) const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeSide {
    Root,
    Left,
    Right,
}

impl TreeSide {
    pub fn as_str(self) -> &'static str {
        match self {
            TreeSide::Root => "root",
            TreeSide::Left => "left",
            TreeSide::Right => "right",
        }
    }
}

/// Which part of a construction a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RegionLabel {
    /// Binary-tree vertex at `level` (root is level 0).
    Tree { level: u32, side: TreeSide },
    /// Interior vertex of a torus glued to the tree vertex `anchor`.
    Torus { anchor: VertexId },
    /// Expander vertex that is not also a tree leaf.
    Expander,
    /// Vertex of a graph without construction structure (cycles, hypercubes, ...).
    Plain,
}

impl RegionLabel {
    pub fn tree_level(&self) -> Option<u32> {
        match *self {
            RegionLabel::Tree { level, .. } => Some(level),
            _ => None,
        }
    }

    pub fn is_tree(&self) -> bool {
        matches!(self, RegionLabel::Tree { .. })
    }
}

/// A single problem found while validating an edge list.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeIssue {
    NonPositiveConductance { u: VertexId, v: VertexId, conductance: f64 },
    SelfLoop { v: VertexId },
    AsymmetricEdge { u: VertexId, v: VertexId, forward: f64, backward: f64 },
    DuplicateEdge { u: VertexId, v: VertexId },
    VertexOutOfRange { u: VertexId, v: VertexId, vertex_count: usize },
}

impl fmt::Display for EdgeIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeIssue::NonPositiveConductance { u, v, conductance } => {
                write!(f, "non-positive conductance {conductance} on edge ({u},{v})")
            }
            EdgeIssue::SelfLoop { v } => write!(f, "self-loop at vertex {v}"),
            EdgeIssue::AsymmetricEdge { u, v, forward, backward } => write!(
                f,
                "asymmetric edge ({u},{v}): conductance {forward} one way, {backward} the other"
            ),
            EdgeIssue::DuplicateEdge { u, v } => write!(f, "duplicate edge ({u},{v})"),
            EdgeIssue::VertexOutOfRange { u, v, vertex_count } => {
                write!(f, "edge ({u},{v}) references a vertex outside 0..{vertex_count}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid edge list: {}", format_issues(.0))]
    InvalidEdges(Vec<EdgeIssue>),
    #[error("torus vertex {vertex} is anchored at {anchor}, which is not a tree vertex")]
    BadTorusAnchor { vertex: VertexId, anchor: VertexId },
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("dimension mismatch: expected {expected} entries, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    InvalidVertex { vertex: VertexId, vertex_count: usize },
    #[error("perturbation references edge ({u},{v}) which is not in the graph")]
    UnknownEdge { u: VertexId, v: VertexId },
    #[error("perturbation factor {factor} on ({u},{v}) outside [1/{bound}, {bound}]")]
    FactorOutOfBounds { u: VertexId, v: VertexId, factor: f64, bound: f64 },
    #[error("perturbation bound must be a finite real >= 1, got {0}")]
    InvalidBound(f64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
}

fn format_issues(issues: &[EdgeIssue]) -> String {
    issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ")
}

/// Immutable sparse weighted graph with per-vertex region labels.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    conductances: Vec<f64>,
    strength: Vec<f64>,
    labels: Vec<RegionLabel>,
    connected: bool,
}

impl WeightedGraph {
    /// Validates an edge list and builds the graph. The vertex count is `labels.len()`.
    ///
    /// Each undirected edge may be listed once in either orientation, or twice
    /// (once per orientation) with equal conductances.
    pub fn new(
        edges: &[(VertexId, VertexId, f64)],
        labels: Vec<RegionLabel>,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut issues = Vec::new();
        // (lo, hi) -> (conductance, seen forward, seen backward)
        let mut keyed: Vec<(VertexId, VertexId, f64, bool)> = Vec::with_capacity(edges.len());
        for &(u, v, c) in edges {
            if u as usize >= n || v as usize >= n {
                issues.push(EdgeIssue::VertexOutOfRange { u, v, vertex_count: n });
                continue;
            }
            if u == v {
                issues.push(EdgeIssue::SelfLoop { v });
                continue;
            }
            if !(c > 0.0) || !c.is_finite() {
                issues.push(EdgeIssue::NonPositiveConductance { u, v, conductance: c });
                continue;
            }
            keyed.push((u.min(v), u.max(v), c, u < v));
        }
        keyed.sort_by(|a, b| (a.0, a.1, !a.3).cmp(&(b.0, b.1, !b.3)));

        let mut unique: Vec<(VertexId, VertexId, f64)> = Vec::with_capacity(keyed.len());
        let mut i = 0;
        while i < keyed.len() {
            let (lo, hi, c, fwd) = keyed[i];
            let mut j = i + 1;
            let mut fwd_seen = fwd as u32;
            let mut bwd_seen = (!fwd) as u32;
            let mut other = None;
            while j < keyed.len() && keyed[j].0 == lo && keyed[j].1 == hi {
                if keyed[j].3 {
                    fwd_seen += 1;
                } else {
                    bwd_seen += 1;
                    other = Some(keyed[j].2);
                }
                j += 1;
            }
            if fwd_seen > 1 || bwd_seen > 1 {
                issues.push(EdgeIssue::DuplicateEdge { u: lo, v: hi });
            } else if let (true, Some(back)) = (fwd_seen == 1, other) {
                if back != c {
                    issues.push(EdgeIssue::AsymmetricEdge { u: lo, v: hi, forward: c, backward: back });
                }
            }
            unique.push((lo, hi, c));
            i = j;
        }
        if !issues.is_empty() {
            return Err(GraphError::InvalidEdges(issues));
        }
        for (v, label) in labels.iter().enumerate() {
            if let RegionLabel::Torus { anchor } = *label {
                if anchor as usize >= n || !labels[anchor as usize].is_tree() {
                    return Err(GraphError::BadTorusAnchor { vertex: v as VertexId, anchor });
                }
            }
        }
        Ok(Self::from_unique_edges(&unique, labels))
    }

    /// Builds from an already validated list of distinct `(lo, hi, c)` edges with `lo < hi`.
    pub(crate) fn from_unique_edges(edges: &[(VertexId, VertexId, f64)], labels: Vec<RegionLabel>) -> Self {
        let n = labels.len();
        let mut degree = vec![0usize; n];
        for &(u, v, _) in edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut neighbors = vec![0 as VertexId; total];
        let mut conductances = vec![0.0; total];
        let mut fill = offsets[..n].to_vec();
        for &(u, v, c) in edges {
            let (u, v) = (u as usize, v as usize);
            neighbors[fill[u]] = v as VertexId;
            conductances[fill[u]] = c;
            fill[u] += 1;
            neighbors[fill[v]] = u as VertexId;
            conductances[fill[v]] = c;
            fill[v] += 1;
        }
        // sorted neighbor order makes summation order canonical
        for v in 0..n {
            let (a, b) = (offsets[v], offsets[v + 1]);
            if !neighbors[a..b].windows(2).all(|w| w[0] < w[1]) {
                let mut pairs: Vec<_> = neighbors[a..b]
                    .iter()
                    .copied()
                    .zip(conductances[a..b].iter().copied())
                    .collect();
                pairs.sort_by_key(|p| p.0);
                for (k, (u, c)) in pairs.into_iter().enumerate() {
                    neighbors[a + k] = u;
                    conductances[a + k] = c;
                }
            }
        }
        let strength = (0..n)
            .map(|v| conductances[offsets[v]..offsets[v + 1]].iter().sum())
            .collect();
        let mut g = Self { offsets, neighbors, conductances, strength, labels, connected: false };
        g.connected = g.compute_connected();
        g
    }

    fn compute_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0 as VertexId];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in self.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn labels(&self) -> &[RegionLabel] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> RegionLabel {
        self.labels[v as usize]
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Conductances aligned with [`neighbors`](Self::neighbors).
    pub fn neighbor_conductances(&self, v: VertexId) -> &[f64] {
        let v = v as usize;
        &self.conductances[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v as VertexId)).max().unwrap_or(0)
    }

    /// Total incident conductance `c(v)`.
    pub fn strength(&self, v: VertexId) -> f64 {
        self.strength[v as usize]
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strength
    }

    pub fn conductance(&self, u: VertexId, v: VertexId) -> Option<f64> {
        let nb = self.neighbors(u);
        nb.binary_search(&v).ok().map(|k| self.neighbor_conductances(u)[k])
    }

    /// Undirected edges `(u, v, c)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        (0..self.vertex_count() as VertexId).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .zip(self.neighbor_conductances(u))
                .filter(move |(&v, _)| u < v)
                .map(move |(&v, &c)| (u, v, c))
        })
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if (v as usize) < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex { vertex: v, vertex_count: self.vertex_count() })
        }
    }

    pub(crate) fn require_connected(&self) -> Result<(), GraphError> {
        if self.connected {
            Ok(())
        } else {
            Err(GraphError::DisconnectedGraph)
        }
    }

    /// Kernel entry `P(v, u)`.
    pub fn transition_probability(&self, v: VertexId, u: VertexId) -> f64 {
        if u == v {
            return 0.5;
        }
        match self.conductance(v, u) {
            Some(c) => c / (2.0 * self.strength(v)),
            None => 0.0,
        }
    }

    /// One application of the lazy kernel: returns `μP`.
    pub fn lazy_step_distribution(&self, mu: &Distribution) -> Result<Distribution, GraphError> {
        self.check_dim(mu.len())?;
        let mut out = vec![0.0; mu.len()];
        let mut scratch = vec![0.0; mu.len()];
        self.step_into(mu.as_slice(), &mut out, &mut scratch);
        Ok(Distribution(out))
    }

    pub(crate) fn check_dim(&self, len: usize) -> Result<(), GraphError> {
        if len == self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::DimensionMismatch { expected: self.vertex_count(), actual: len })
        }
    }

    /// `out = mass · P`, using `scratch` for the per-vertex outflow `mass(v) / (2 c(v))`.
    /// Each output entry sums its neighbors in sorted order, so the result is
    /// bit-identical for any thread count.
    pub(crate) fn step_into(&self, mass: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        scratch
            .par_chunks_mut(CHUNK)
            .zip(mass.par_chunks(CHUNK))
            .zip(self.strength.par_chunks(CHUNK))
            .for_each(|((s, m), c)| {
                for ((s, &m), &c) in s.iter_mut().zip(m).zip(c) {
                    *s = if c > 0.0 { m / (2.0 * c) } else { 0.0 };
                }
            });
        let flow: &[f64] = scratch;
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(chunk, block)| {
            let base = chunk * CHUNK;
            for (k, slot) in block.iter_mut().enumerate() {
                let u = base + k;
                let (a, b) = (self.offsets[u], self.offsets[u + 1]);
                let mut acc = if a == b { mass[u] } else { 0.5 * mass[u] };
                for e in a..b {
                    acc += self.conductances[e] * flow[self.neighbors[e] as usize];
                }
                *slot = acc;
            }
        });
    }

    /// `out = P f` for a function `f` on vertices (the kernel acting on the right).
    pub(crate) fn apply_to_function(&self, f: &[f64], out: &mut [f64]) {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(chunk, block)| {
            let base = chunk * CHUNK;
            for (k, slot) in block.iter_mut().enumerate() {
                let v = base + k;
                let (a, b) = (self.offsets[v], self.offsets[v + 1]);
                if a == b {
                    *slot = f[v];
                    continue;
                }
                let mut acc = 0.0;
                for e in a..b {
                    acc += self.conductances[e] * f[self.neighbors[e] as usize];
                }
                *slot = 0.5 * f[v] + acc / (2.0 * self.strength[v]);
            }
        });
    }

    /// `π(v) = c(v) / Σ_w c(w)`.
    pub fn stationary_distribution(&self) -> Result<Distribution, GraphError> {
        self.require_connected()?;
        let total = stable_sum(&self.strength);
        Ok(Distribution(self.strength.iter().map(|c| c / total).collect()))
    }

    /// One lazy step from `v`, consuming a single uniform draw from `rng`.
    pub fn sample_lazy_step<R: Rng + ?Sized>(&self, v: VertexId, rng: &mut R) -> VertexId {
        let u: f64 = rng.random();
        self.lazy_step_with(v, u)
    }

    /// Deterministic lazy step given a uniform `u ∈ [0, 1)`.
    #[inline]
    pub(crate) fn lazy_step_with(&self, v: VertexId, u: f64) -> VertexId {
        if u < 0.5 {
            return v;
        }
        let vi = v as usize;
        let (a, b) = (self.offsets[vi], self.offsets[vi + 1]);
        if a == b {
            return v;
        }
        let mut target = (u - 0.5) * 2.0 * self.strength[vi];
        for e in a..b {
            target -= self.conductances[e];
            if target < 0.0 {
                return self.neighbors[e];
            }
        }
        self.neighbors[b - 1]
    }

    /// New graph with `c'(u,v) = factor(u,v) · c(u,v)`; labels are preserved.
    pub fn apply_perturbation(&self, rule: &PerturbationRule) -> Result<WeightedGraph, GraphError> {
        for &(u, v) in rule.factors.keys() {
            if self.conductance(u, v).is_none() {
                return Err(GraphError::UnknownEdge { u, v });
            }
        }
        let edges: Vec<_> = self
            .edges()
            .map(|(u, v, c)| {
                let c = match rule.factors.get(&(u, v)) {
                    Some(&f) if rule.inverted => c / f,
                    Some(&f) => c * f,
                    None => c,
                };
                (u, v, c)
            })
            .collect();
        Ok(Self::from_unique_edges(&edges, self.labels.clone()))
    }

    /// `Σ_{v : pred(label(v))} μ(v)`.
    pub fn region_mass<F>(&self, mu: &Distribution, pred: F) -> f64
    where
        F: Fn(&RegionLabel) -> bool,
    {
        let picked: Vec<f64> = mu
            .as_slice()
            .iter()
            .zip(&self.labels)
            .filter(|(_, l)| pred(l))
            .map(|(m, _)| *m)
            .collect();
        stable_sum(&picked)
    }

    /// Vertices whose label satisfies `pred`, in increasing order.
    pub fn vertices_where<F>(&self, pred: F) -> Vec<VertexId>
    where
        F: Fn(&RegionLabel) -> bool,
    {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| pred(l))
            .map(|(v, _)| v as VertexId)
            .collect()
    }

    /// Subgraph induced on `vertices`; vertex `i` of the result is `vertices[i]`.
    /// Labels of the result are `Plain`.
    pub fn induced_subgraph(&self, vertices: &[VertexId]) -> WeightedGraph {
        let mut index = vec![u32::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v as usize] = i as u32;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for (&u, &c) in self.neighbors(v).iter().zip(self.neighbor_conductances(v)) {
                let j = index[u as usize];
                if j != u32::MAX && (i as u32) < j {
                    edges.push((i as u32, j, c));
                }
            }
        }
        Self::from_unique_edges(&edges, vec![RegionLabel::Plain; vertices.len()])
    }

    /// Checks row sums, laziness, reversibility and `πP = π`. Returns the worst
    /// deviation seen across all checks.
    pub fn kernel_invariant_deviation(&self) -> Result<f64, GraphError> {
        let pi = self.stationary_distribution()?;
        let mut worst: f64 = 0.0;
        for v in 0..self.vertex_count() as VertexId {
            let row: f64 = 0.5
                + self
                    .neighbor_conductances(v)
                    .iter()
                    .map(|c| c / (2.0 * self.strength(v)))
                    .sum::<f64>();
            worst = worst.max((row - 1.0).abs());
            worst = worst.max((0.5 - self.transition_probability(v, v)).max(0.0));
            let pv = pi.as_slice()[v as usize];
            for &u in self.neighbors(v) {
                let flux_vu = pv * self.transition_probability(v, u);
                let flux_uv = pi.as_slice()[u as usize] * self.transition_probability(u, v);
                worst = worst.max((flux_vu - flux_uv).abs());
            }
        }
        let next = self.lazy_step_distribution(&pi)?;
        worst = worst.max(tv_distance(&next, &pi)?);
        Ok(worst)
    }
}

/// Dense probability vector over vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    /// Validates nonnegativity and total mass `1 ± 1e-12`.
    pub fn new(mass: Vec<f64>) -> Result<Self, GraphError> {
        if let Some((i, m)) = mass.iter().enumerate().find(|(_, m)| !(**m >= 0.0) || !m.is_finite()) {
            return Err(GraphError::InvalidDistribution(format!("entry {i} is {m}")));
        }
        let total = stable_sum(&mass);
        if (total - 1.0).abs() > 1e-12 {
            return Err(GraphError::InvalidDistribution(format!("total mass {total} != 1")));
        }
        Ok(Self(mass))
    }

    pub fn point_mass(n: usize, v: VertexId) -> Result<Self, GraphError> {
        if v as usize >= n {
            return Err(GraphError::InvalidVertex { vertex: v, vertex_count: n });
        }
        let mut mass = vec![0.0; n];
        mass[v as usize] = 1.0;
        Ok(Self(mass))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// CSV with header `vertex,mass`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("vertex,mass\n");
        for (v, m) in self.0.iter().enumerate() {
            s.push_str(&format!("{v},{m}\n"));
        }
        s
    }
}

/// `½ Σ |μ(x) − ν(x)|`.
pub fn tv_distance(mu: &Distribution, nu: &Distribution) -> Result<f64, GraphError> {
    if mu.len() != nu.len() {
        return Err(GraphError::DimensionMismatch { expected: mu.len(), actual: nu.len() });
    }
    Ok(0.5 * l1_diff(mu.as_slice(), nu.as_slice()))
}

pub(crate) fn l1_diff(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum::<f64>())
        .collect();
    partial.iter().sum()
}

/// Compensated (Neumaier) summation.
pub(crate) fn stable_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Multiplicative conductance perturbation with factors in `[1/C, C]`.
/// Edges not in the map keep factor 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationRule {
    factors: BTreeMap<(VertexId, VertexId), f64>,
    bound: f64,
    inverted: bool,
}

impl PerturbationRule {
    pub fn new(bound: f64) -> Result<Self, GraphError> {
        if !(bound >= 1.0) || !bound.is_finite() {
            return Err(GraphError::InvalidBound(bound));
        }
        Ok(Self { factors: BTreeMap::new(), bound, inverted: false })
    }

    pub fn identity() -> Self {
        Self { factors: BTreeMap::new(), bound: 1.0, inverted: false }
    }

    /// Sets the factor of the undirected edge `{u, v}`.
    pub fn set(&mut self, u: VertexId, v: VertexId, factor: f64) -> Result<(), GraphError> {
        if !(factor >= 1.0 / self.bound && factor <= self.bound) {
            return Err(GraphError::FactorOutOfBounds { u, v, factor, bound: self.bound });
        }
        self.factors.insert((u.min(v), u.max(v)), factor);
        Ok(())
    }

    pub fn factor(&self, u: VertexId, v: VertexId) -> f64 {
        let f = self.factors.get(&(u.min(v), u.max(v))).copied().unwrap_or(1.0);
        if self.inverted {
            1.0 / f
        } else {
            f
        }
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The rule undoing this one. Applied by division, so undoing is exact
    /// whenever the intermediate products are exact (e.g. power-of-two
    /// conductances or factors).
    pub fn inverse(&self) -> Self {
        Self { factors: self.factors.clone(), bound: self.bound, inverted: !self.inverted }
    }

    /// Explicit `(u, v, factor)` triples with `u < v`.
    pub fn entries(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.factors.keys().map(move |&(u, v)| (u, v, self.factor(u, v)))
    }
}
