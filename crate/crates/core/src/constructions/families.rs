use rand::Rng;

use crate::constructions::torus::torus_graph;
use crate::graph::{RegionLabel, VertexId, WeightedGraph};

/// `ℤ_n^d` with unit conductances.
pub fn build_lattice_torus(n: usize, d: usize) -> WeightedGraph {
    torus_graph(&vec![n; d])
}

/// `{0,1}^n`; vertices are bit masks, edges flip one bit.
pub fn build_hypercube(n: u32) -> WeightedGraph {
    let size = 1usize << n;
    let mut edges = Vec::with_capacity(size * n as usize / 2);
    for v in 0..size {
        for b in 0..n {
            let u = v ^ (1 << b);
            if v < u {
                edges.push((v as VertexId, u as VertexId, 1.0));
            }
        }
    }
    edges.sort_unstable_by_key(|e| (e.0, e.1));
    WeightedGraph::from_unique_edges(&edges, vec![RegionLabel::Plain; size])
}

#[derive(Debug, Clone)]
pub struct ErGraph {
    /// Largest connected component, relabelled `0..size`.
    pub graph: WeightedGraph,
    /// Vertex id in the full `G(n, p)` sample of each component vertex.
    pub original_ids: Vec<VertexId>,
    pub n: usize,
    pub p: f64,
}

/// Samples `G(n, p)` and keeps its largest connected component (ties go to the
/// component containing the smallest vertex).
pub fn build_er_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> ErGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u as VertexId, v as VertexId, 1.0));
            }
        }
    }
    let full = WeightedGraph::from_unique_edges(&edges, vec![RegionLabel::Plain; n]);
    let mut comp = vec![usize::MAX; n];
    let mut best: Vec<VertexId> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = s;
        let mut members = vec![s as VertexId];
        let mut i = 0;
        while i < members.len() {
            let v = members[i];
            for &u in full.neighbors(v) {
                if comp[u as usize] == usize::MAX {
                    comp[u as usize] = s;
                    members.push(u);
                }
            }
            i += 1;
        }
        if members.len() > best.len() {
            best = members;
        }
    }
    best.sort_unstable();
    ErGraph { graph: full.induced_subgraph(&best), original_ids: best, n, p }
}
