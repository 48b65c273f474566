use crate::analysis::AnalysisError;
use crate::graph::WeightedGraph;

/// `max_{x,y} |P^t(x,y)/π(y) − 1|`, by evolving every point mass `t` steps.
pub fn linf_distance(g: &WeightedGraph, t: usize, cap: usize) -> Result<f64, AnalysisError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(AnalysisError::CapExceeded { what: "vertices for the all-pairs L-infinity distance", size: n, cap });
    }
    let pi = g.stationary_distribution()?.into_vec();
    let mut worst: f64 = 0.0;
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    for x in 0..n {
        cur.iter_mut().for_each(|m| *m = 0.0);
        cur[x] = 1.0;
        for _ in 0..t {
            g.step_into(&cur, &mut next, &mut scratch);
            std::mem::swap(&mut cur, &mut next);
        }
        for (m, p) in cur.iter().zip(&pi) {
            worst = worst.max((m / p - 1.0).abs());
        }
    }
    Ok(worst)
}
