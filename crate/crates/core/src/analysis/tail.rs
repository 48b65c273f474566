//! Tail of a biased ±1 random walk.

/// Law of `Z_i`, a sum of `i` independent ±1 steps with `P(+1) = (1 + bias)/2`.
/// Entry `k` is `P(Z_i = 2k − i)`.
pub fn tail_distribution(i: usize, bias: f64) -> Vec<f64> {
    let up = (1.0 + bias) / 2.0;
    let mut dist = vec![1.0];
    for _ in 0..i {
        let mut next = vec![0.0; dist.len() + 1];
        for (k, &p) in dist.iter().enumerate() {
            next[k] += p * (1.0 - up);
            next[k + 1] += p * up;
        }
        dist = next;
    }
    dist
}

/// `P(|Z_i| ≤ w)`, exact by dynamic programming over the support of `Z_i`.
pub fn balanced_tail_probability(i: usize, bias: f64, w: f64) -> f64 {
    assert!((0.0..1.0).contains(&bias), "bias must lie in [0, 1)");
    tail_distribution(i, bias)
        .iter()
        .enumerate()
        .filter(|(k, _)| ((2 * k) as f64 - i as f64).abs() <= w)
        .map(|(_, p)| p)
        .sum()
}
