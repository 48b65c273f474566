use crate::constructions::ConstructionError;
use crate::graph::{RegionLabel, VertexId, WeightedGraph};

/// `round(volume^{1/3})`, at least 2.
pub fn nearest_cube_side(volume: usize) -> usize {
    ((volume as f64).cbrt().round() as usize).max(2)
}

/// Side lengths `a ≤ b ≤ c` of a 3D box torus whose volume is closest to
/// `target`. Sides of 2 are avoided when the target allows sides of 3 (they
/// collapse parallel edges and lower the degree). Ties go to the most
/// cube-like box.
pub fn box_dims_for_volume(target: usize) -> [usize; 3] {
    let min_side = if target >= 27 { 3 } else { 2 };
    let mut best = [min_side; 3];
    let mut best_key = (usize::MAX, usize::MAX);
    let a_max = (target as f64).cbrt().ceil() as usize + 1;
    for a in min_side..=a_max.max(min_side) {
        let b_max = ((target / a) as f64).sqrt().ceil() as usize + 1;
        for b in a..=b_max.max(a) {
            let q = target / (a * b);
            for c in [q, q + 1] {
                if c < b {
                    continue;
                }
                let key = ((a * b * c).abs_diff(target), c - a);
                if key < best_key {
                    best_key = key;
                    best = [a, b, c];
                }
            }
        }
    }
    best
}

/// Product of cycles `ℤ_{d_1} × … × ℤ_{d_k}` with unit conductances. Vertex
/// index is mixed-radix with the first dimension fastest. A side of 2 yields a
/// single edge per pair (no parallel edges); a side of 1 contributes nothing.
pub fn torus_graph(dims: &[usize]) -> WeightedGraph {
    let n: usize = dims.iter().product();
    let mut edges = Vec::new();
    let mut stride = 1;
    for &side in dims {
        for v in 0..n {
            let coord = (v / stride) % side;
            if side >= 3 || (side == 2 && coord == 0) {
                let next = if coord + 1 == side { v + stride - side * stride } else { v + stride };
                edges.push(((v.min(next)) as VertexId, (v.max(next)) as VertexId, 1.0));
            }
        }
        stride *= side;
    }
    edges.sort_by_key(|e| (e.0, e.1));
    WeightedGraph::from_unique_edges(&edges, vec![RegionLabel::Plain; n])
}

/// 3D torus `ℤ_m³` with `m` the nearest cube side to `target_volume`.
pub fn build_torus_3d(target_volume: usize) -> Result<WeightedGraph, ConstructionError> {
    if target_volume < 8 {
        return Err(ConstructionError::VolumeTooSmall(target_volume));
    }
    let m = nearest_cube_side(target_volume);
    Ok(torus_graph(&[m, m, m]))
}

pub fn build_box_torus(dims: [usize; 3]) -> Result<WeightedGraph, ConstructionError> {
    if dims.iter().product::<usize>() < 8 || dims.iter().any(|&d| d < 2) {
        return Err(ConstructionError::VolumeTooSmall(dims.iter().product()));
    }
    Ok(torus_graph(&dims))
}
