//! Lazy spectral gap `λ = 1 − λ₂`.
//!
//! The kernel is self-adjoint in `L²(π)`, so both methods work on functions
//! with the `π`-weighted inner product and project out the constants (the
//! eigenfunction of eigenvalue 1) at every step. The lazy kernel has spectrum
//! in `[0, 1]`, so the largest remaining eigenvalue is `λ₂`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{weighted_dot, AnalysisError};
use crate::graph::WeightedGraph;
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMethod {
    Power,
    Lanczos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapOptions {
    pub method: GapMethod,
    /// Stop once the eigen-residual `‖Pf − μf‖_π` is at most this.
    pub tol: f64,
    pub max_iters: usize,
    /// Seed of the random start vector.
    pub seed: u64,
}

impl GapOptions {
    pub fn power(tol: f64, max_iters: usize) -> Self {
        Self { method: GapMethod::Power, tol, max_iters, seed: 0x5eed }
    }

    pub fn lanczos(tol: f64, max_iters: usize) -> Self {
        Self { method: GapMethod::Lanczos, tol, max_iters, seed: 0x5eed }
    }

    /// Settings used to certify expanders and to measure gaps of large graphs.
    pub fn certification() -> Self {
        Self::lanczos(1e-9, 5000)
    }
}

impl Default for GapOptions {
    fn default() -> Self {
        Self::power(1e-10, 1_000_000)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub gap: f64,
    pub second_eigenvalue: f64,
    pub iterations: usize,
    pub residual: f64,
    pub tol: f64,
    pub converged: bool,
    pub method: String,
}

/// Power iteration with residual-based stopping.
pub fn spectral_gap(g: &WeightedGraph, tol: f64, max_iters: usize) -> Result<SpectralReport, AnalysisError> {
    spectral_gap_with(g, &GapOptions::power(tol, max_iters))
}

pub fn spectral_gap_with(g: &WeightedGraph, opts: &GapOptions) -> Result<SpectralReport, AnalysisError> {
    let pi = g.stationary_distribution()?.into_vec();
    if !(opts.tol > 0.0) || opts.max_iters == 0 {
        return Err(AnalysisError::InvalidArgument("tol must be > 0 and max_iters >= 1".into()));
    }
    let n = pi.len();
    if n == 1 {
        return Ok(SpectralReport {
            gap: 1.0,
            second_eigenvalue: 0.0,
            iterations: 0,
            residual: 0.0,
            tol: opts.tol,
            converged: true,
            method: "trivial (single vertex)".into(),
        });
    }
    let mut rng = stream_rng(opts.seed, 0);
    let mut f: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    project_out_constants(&mut f, &pi);
    normalize(&mut f, &pi);
    let report = match opts.method {
        GapMethod::Power => power(g, &pi, f, opts),
        GapMethod::Lanczos => lanczos(g, &pi, f, opts),
    };
    if report.converged {
        Ok(report)
    } else {
        Err(AnalysisError::NoConvergence { best: Box::new(report) })
    }
}

fn project_out_constants(f: &mut [f64], pi: &[f64]) {
    let ones = vec![1.0; f.len()];
    let mean = weighted_dot(f, &ones, pi);
    f.iter_mut().for_each(|x| *x -= mean);
}

fn normalize(f: &mut [f64], pi: &[f64]) -> f64 {
    let norm = weighted_dot(f, f, pi).sqrt();
    if norm > 0.0 {
        f.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn power(g: &WeightedGraph, pi: &[f64], mut f: Vec<f64>, opts: &GapOptions) -> SpectralReport {
    let n = pi.len();
    let mut pf = vec![0.0; n];
    let mut best = (f64::INFINITY, 0.0);
    let mut iterations = 0;
    for it in 1..=opts.max_iters {
        iterations = it;
        g.apply_to_function(&f, &mut pf);
        project_out_constants(&mut pf, pi);
        let mu = weighted_dot(&f, &pf, pi);
        let r: Vec<f64> = pf.iter().zip(&f).map(|(p, x)| p - mu * x).collect();
        let res = weighted_dot(&r, &r, pi).sqrt();
        if res < best.0 {
            best = (res, mu);
        }
        if res <= opts.tol {
            break;
        }
        std::mem::swap(&mut f, &mut pf);
        if normalize(&mut f, pi) == 0.0 {
            // f was an eigenfunction of eigenvalue 0
            best = (0.0, 0.0);
            break;
        }
    }
    let (residual, mu) = best;
    let mu = mu.max(0.0);
    SpectralReport {
        gap: 1.0 - mu,
        second_eigenvalue: mu,
        iterations,
        residual,
        tol: opts.tol,
        converged: residual <= opts.tol,
        method: "power iteration in L2(pi), constants projected out".into(),
    }
}

/// Lanczos on the kernel in `L²(π)`. No full reorthogonalization: the largest
/// Ritz value still converges to `λ₂`, and spurious copies do not disturb it.
fn lanczos(g: &WeightedGraph, pi: &[f64], mut q: Vec<f64>, opts: &GapOptions) -> SpectralReport {
    let n = pi.len();
    let mut q_prev = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut theta = 0.0;
    let mut residual = f64::INFINITY;
    let mut history: Vec<f64> = Vec::new();
    let mut note = "lanczos in L2(pi), constants projected out";
    let mut stalled = false;
    let mut iterations = 0;
    for j in 0..opts.max_iters.min(n) {
        iterations = j + 1;
        g.apply_to_function(&q, &mut w);
        let a = weighted_dot(&q, &w, pi);
        let b_prev = beta.last().copied().unwrap_or(0.0);
        for i in 0..n {
            w[i] -= a * q[i] + b_prev * q_prev[i];
        }
        project_out_constants(&mut w, pi);
        // one local reorthogonalization step against q
        let c = weighted_dot(&q, &w, pi);
        w.iter_mut().zip(&q).for_each(|(x, y)| *x -= c * y);
        let a = a + c;
        let b = weighted_dot(&w, &w, pi).sqrt();
        alpha.push(a);
        beta.push(b);

        let last = j + 1 == opts.max_iters.min(n);
        let invariant = b <= 1e-14;
        if j % 5 == 4 || last || invariant {
            let (t, y_last) = top_ritz_pair(&alpha, &beta[..beta.len() - 1]);
            theta = t;
            residual = b * y_last.abs();
            history.push(theta);
            if residual <= opts.tol {
                break;
            }
            let h = history.len();
            if h > 10 && (history[h - 1] - history[h - 11]).abs() <= f64::EPSILON * 4.0 {
                note = "lanczos in L2(pi), constants projected out; stopped on stalled Ritz value";
                stalled = true;
                break;
            }
        }
        if invariant {
            residual = 0.0;
            break;
        }
        std::mem::swap(&mut q_prev, &mut q);
        q.iter_mut().zip(&w).for_each(|(x, y)| *x = y / b);
    }
    let mu = theta.clamp(0.0, 1.0);
    SpectralReport {
        gap: 1.0 - mu,
        second_eigenvalue: mu,
        iterations,
        residual,
        tol: opts.tol,
        converged: residual <= opts.tol || stalled,
        method: note.into(),
    }
}

/// Number of eigenvalues of the symmetric tridiagonal `(alpha, off)` below `x`.
fn sturm_count(alpha: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..alpha.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = alpha[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::MIN_POSITIVE.sqrt();
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of the tridiagonal matrix and the last component of its
/// unit eigenvector.
fn top_ritz_pair(alpha: &[f64], off: &[f64]) -> (f64, f64) {
    let m = alpha.len();
    if m == 1 {
        return (alpha[0], 1.0);
    }
    let radius = |i: usize| {
        (if i > 0 { off[i - 1].abs() } else { 0.0 }) + (if i + 1 < m { off[i].abs() } else { 0.0 })
    };
    let mut lo = (0..m).map(|i| alpha[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..m).map(|i| alpha[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alpha, off, mid) == m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    // inverse iteration with a shift just above the top eigenvalue: T − σI is
    // negative definite, so elimination without pivoting is stable
    let sigma = hi + 4.0 * f64::EPSILON * hi.abs().max(1.0);
    let mut y = vec![1.0; m];
    for _ in 0..3 {
        y = solve_shifted(alpha, off, sigma, &y);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return (theta, 1.0);
        }
        y.iter_mut().for_each(|v| *v /= norm);
    }
    (theta, y[m - 1])
}

fn solve_shifted(alpha: &[f64], off: &[f64], sigma: f64, rhs: &[f64]) -> Vec<f64> {
    let m = alpha.len();
    let mut diag = vec![0.0; m];
    let mut r = rhs.to_vec();
    diag[0] = alpha[0] - sigma;
    for i in 1..m {
        let l = off[i - 1] / diag[i - 1];
        diag[i] = alpha[i] - sigma - l * off[i - 1];
        r[i] -= l * r[i - 1];
    }
    let mut x = vec![0.0; m];
    x[m - 1] = r[m - 1] / diag[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = (r[i] - off[i] * x[i + 1]) / diag[i];
    }
    x
}
