#![allow(dead_code)]

use mixlab_core::{RegionLabel, TreeSide, VertexId, WeightedGraph};
use rand::Rng;

pub fn plain(edges: &[(VertexId, VertexId, f64)], n: usize) -> WeightedGraph {
    WeightedGraph::new(edges, vec![RegionLabel::Plain; n]).unwrap()
}

pub fn path(n: usize) -> WeightedGraph {
    let edges: Vec<_> = (1..n as VertexId).map(|v| (v - 1, v, 1.0)).collect();
    plain(&edges, n)
}

pub fn cycle(n: usize) -> WeightedGraph {
    let edges: Vec<_> = (0..n as VertexId).map(|v| (v, (v + 1) % n as VertexId, 1.0)).collect();
    plain(&edges, n)
}

pub fn complete(n: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            edges.push((u, v, 1.0));
        }
    }
    plain(&edges, n)
}

pub fn star(weights: &[f64]) -> WeightedGraph {
    let edges: Vec<_> = weights.iter().enumerate().map(|(i, &c)| (0, i as VertexId + 1, c)).collect();
    plain(&edges, weights.len() + 1)
}

/// Two-level binary tree (7 vertices) with every left-child edge multiplied by `left`.
pub fn two_level_tree(left: f64) -> WeightedGraph {
    let mut labels = vec![RegionLabel::Tree { level: 0, side: TreeSide::Root }];
    let mut edges = Vec::new();
    for v in 1..7u32 {
        let level = if v < 3 { 1 } else { 2 };
        let side = if v % 2 == 1 { TreeSide::Left } else { TreeSide::Right };
        labels.push(RegionLabel::Tree { level, side });
        let c = if side == TreeSide::Left { left } else { 1.0 };
        edges.push(((v - 1) / 2, v, c));
    }
    WeightedGraph::new(&edges, labels).unwrap()
}

/// Fixed corpus of small graphs (at most 8 vertices each).
pub fn small_corpus() -> Vec<(String, WeightedGraph)> {
    let mut out: Vec<(String, WeightedGraph)> = Vec::new();
    for n in 2..=8 {
        out.push((format!("path P{n}"), path(n)));
    }
    for n in 3..=8 {
        out.push((format!("cycle C{n}"), cycle(n)));
    }
    out.push(("K4".into(), complete(4)));
    out.push(("K5".into(), complete(5)));
    out.push(("star (1,2,1)".into(), star(&[1.0, 2.0, 1.0])));
    out.push(("star (0.5,3,1,7)".into(), star(&[0.5, 3.0, 1.0, 7.0])));
    out.push(("weighted star of 7".into(), star(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0])));
    out.push(("tree, left doubled".into(), two_level_tree(2.0)));
    out.push(("tree, unit".into(), two_level_tree(1.0)));
    out.push((
        "weighted path".into(),
        plain(&[(0, 1, 0.25), (1, 2, 4.0), (2, 3, 1.5), (3, 4, 0.75)], 5),
    ));
    out.push((
        "lollipop".into(),
        plain(&[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 3, 2.0), (3, 4, 1.0), (4, 5, 0.5)], 6),
    ));
    out
}

/// Connected graph: a random spanning tree plus `extra` random chords, with
/// conductances drawn from `[lo, hi]`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: usize, lo: f64, hi: f64) -> WeightedGraph {
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    let c = |rng: &mut R| if lo == hi { lo } else { rng.random_range(lo..=hi) };
    for v in 1..n as VertexId {
        let u = rng.random_range(0..v);
        seen.insert((u, v));
        edges.push((u, v, c(rng)));
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n as VertexId);
        let v = rng.random_range(0..n as VertexId);
        let key = (u.min(v), u.max(v));
        if u != v && seen.insert(key) {
            edges.push((key.0, key.1, c(rng)));
        }
    }
    plain(&edges, n)
}
