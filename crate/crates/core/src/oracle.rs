//! Dense brute-force references for small graphs, built directly from the
//! kernel definition with no code shared with the sparse measurements.

use nalgebra::{DMatrix, DVector};

use crate::graph::{VertexId, WeightedGraph};

/// Largest graph the dense oracles accept.
pub const ORACLE_CAP: usize = 400;

fn check(g: &WeightedGraph) {
    assert!(g.vertex_count() <= ORACLE_CAP, "dense oracle limited to {ORACLE_CAP} vertices");
}

/// `P(v,v) = 1/2`, `P(v,u) = c(u,v) / (2 Σ_w c(w,v))`.
pub fn kernel_matrix(g: &WeightedGraph) -> DMatrix<f64> {
    check(g);
    let n = g.vertex_count();
    let mut c = DMatrix::zeros(n, n);
    for (u, v, w) in g.edges() {
        c[(u as usize, v as usize)] = w;
        c[(v as usize, u as usize)] = w;
    }
    let mut p = DMatrix::zeros(n, n);
    for v in 0..n {
        let total: f64 = c.row(v).sum();
        p[(v, v)] = 0.5;
        for u in 0..n {
            if c[(v, u)] > 0.0 {
                p[(v, u)] = c[(v, u)] / (2.0 * total);
            }
        }
    }
    p
}

/// Stationary measure as the normalized left eigenvector of eigenvalue 1,
/// obtained by solving `π(P − I) = 0` with `Σπ = 1`.
pub fn stationary(g: &WeightedGraph) -> DVector<f64> {
    let p = kernel_matrix(g);
    let n = p.nrows();
    let mut a = p.transpose() - DMatrix::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    a.lu().solve(&b).expect("stationary system is singular")
}

/// `TV(P^t(start,·), π)` for `t = 0..=t_max` by repeated dense products.
pub fn tv_curve(g: &WeightedGraph, start: VertexId, t_max: usize) -> Vec<f64> {
    let p = kernel_matrix(g);
    let pi = stationary(g);
    let mut row = DVector::zeros(p.nrows()).transpose();
    row[start as usize] = 1.0;
    let mut out = Vec::with_capacity(t_max + 1);
    for _ in 0..=t_max {
        out.push(0.5 * (row.transpose() - &pi).abs().sum());
        row *= &p;
    }
    out
}

/// First `t ≤ t_max` with TV at most `threshold`.
pub fn mixing_time(g: &WeightedGraph, start: VertexId, threshold: f64, t_max: usize) -> Option<usize> {
    tv_curve(g, start, t_max).iter().position(|&d| d <= threshold)
}

/// `E_start τ_target` by a direct LU solve of `(I − Q)h = 1`.
pub fn hitting_time(g: &WeightedGraph, start: VertexId, target: &[VertexId]) -> f64 {
    if target.contains(&start) {
        return 0.0;
    }
    let p = kernel_matrix(g);
    let rest: Vec<usize> = (0..p.nrows()).filter(|v| !target.contains(&(*v as VertexId))).collect();
    let m = rest.len();
    let a = DMatrix::from_fn(m, m, |i, j| (if i == j { 1.0 } else { 0.0 }) - p[(rest[i], rest[j])]);
    let h = a.lu().solve(&DVector::from_element(m, 1.0)).expect("target unreachable");
    h[rest.iter().position(|&v| v == start as usize).unwrap()]
}

/// All eigenvalues of the kernel in decreasing order, from the symmetric
/// matrix `D^{1/2} P D^{-1/2}` with `D = diag(π)`.
pub fn eigenvalues(g: &WeightedGraph) -> Vec<f64> {
    let p = kernel_matrix(g);
    let pi = stationary(g);
    let n = p.nrows();
    let s = DMatrix::from_fn(n, n, |i, j| p[(i, j)] * (pi[i] / pi[j]).sqrt());
    let s = (&s + s.transpose()) * 0.5;
    let mut ev: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// `1 − λ₂`.
pub fn spectral_gap(g: &WeightedGraph) -> f64 {
    let ev = eigenvalues(g);
    if ev.len() < 2 {
        1.0
    } else {
        1.0 - ev[1]
    }
}

/// `max_{x,y} |P^t(x,y)/π(y) − 1|` from the dense matrix power.
pub fn linf_distance(g: &WeightedGraph, t: usize) -> f64 {
    let p = kernel_matrix(g);
    let pi = stationary(g);
    let n = p.nrows();
    let pt = p.pow(t as u32);
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            worst = worst.max((pt[(x, y)] / pi[y] - 1.0).abs());
        }
    }
    worst
}
