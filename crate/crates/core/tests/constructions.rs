use mixlab_core::analysis::{spectral_gap_with, GapOptions};
use mixlab_core::constructions::{
    assemble_main_construction, assemble_simple_construction, balanced_count, balanced_nodes, build_er_graph,
    left_edge_doubling_rule, simple_plan, ConstructionMetadata, ConstructionParams, EllRule, TreeAddress,
};
use mixlab_core::format::{graph_to_string, load_graph, save_graph};
use mixlab_core::{RegionLabel, TreeSide, WeightedGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of ±1 strings of length `d` with `|sum| ≤ w`, by a step-by-step DP
/// over the running imbalance.
fn dp_balanced(d: u32, w: u32) -> u128 {
    let size = 2 * d as usize + 1;
    let mut ways = vec![0u128; size];
    ways[d as usize] = 1;
    for _ in 0..d {
        let mut next = vec![0u128; size];
        for (i, &c) in ways.iter().enumerate() {
            if c > 0 {
                next[i - 1] += c;
                next[i + 1] += c;
            }
        }
        ways = next;
    }
    ways.iter().enumerate().filter(|(i, _)| (*i as i64 - d as i64).unsigned_abs() <= w as u64).map(|(_, c)| c).sum()
}

#[test]
fn balanced_nodes_match_dp_exhaustively() {
    for d in 0..=20u32 {
        for w in 0..=d + 1 {
            let expected = dp_balanced(d, w);
            assert_eq!(balanced_count((d, d), w), expected, "depth {d} window {w}");
            if d <= 16 {
                assert_eq!(balanced_nodes(d, TreeAddress::ROOT, (d, d), w).len() as u128, expected, "depth {d} window {w}");
            }
        }
    }
    assert_eq!(balanced_nodes(6, TreeAddress::ROOT, (6, 6), 4).len(), 62);
}

fn simple(k: u32, seed: u64) -> (WeightedGraph, ConstructionMetadata) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    assemble_simple_construction(&ConstructionParams::new(k), &mut rng).unwrap()
}

fn check_decorated(g: &WeightedGraph, meta: &ConstructionMetadata) {
    let k = meta.params.k;
    assert!(g.is_connected());
    assert!(g.max_degree() <= 10, "max degree {}", g.max_degree());
    assert_eq!(g.vertex_count() as u128, meta.closed_form_vertex_count);
    assert!(g.kernel_invariant_deviation().unwrap() <= 1e-12);
    // leaves: one parent plus the expander degree
    for v in g.vertices_where(|l| l.tree_level() == Some(k)) {
        assert_eq!(g.degree(v), 1 + meta.params.expander_degree);
    }
    // every anchor carries exactly one torus, of the recorded volume
    for &a in &meta.anchors {
        let torus = g.vertices_where(|l| *l == RegionLabel::Torus { anchor: a });
        assert_eq!(torus.len() + 1, meta.torus_volume);
    }
}

fn expander_mass(g: &WeightedGraph, meta: &ConstructionMetadata) -> f64 {
    let pi = g.stationary_distribution().unwrap();
    meta.expander_vertices.iter().map(|&v| pi.as_slice()[v as usize]).sum()
}

#[test]
fn simple_construction_invariants() {
    for k in [8, 10] {
        let (g, meta) = simple(k, k as u64);
        check_decorated(&g, &meta);
        assert!(expander_mass(&g, &meta) >= 0.9);
        let ratio = g.vertex_count() as f64 / ((k * k) as f64 * 2f64.powi(k as i32));
        assert!((1.0..=1.0 + 10.0 / k as f64).contains(&ratio), "K={k}: |V|/(K²2^K) = {ratio}");
        assert_eq!(simple_plan(&meta.params).unwrap().vertex_count, meta.closed_form_vertex_count);
    }
}

#[test]
fn main_construction_with_override_rule() {
    let mut params = ConstructionParams::new(16);
    params.ell_rule = EllRule::binary(1.0);
    // smallest expander that still holds the 2^K leaves
    params.expander_size_factor = 1.0 / 256.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (g, meta) = assemble_main_construction(&params, &mut rng).unwrap();
    assert_eq!(meta.ell, Some(4));
    assert_eq!(meta.subtree_levels, Some(vec![4, 8]));
    assert!(!meta.anchors.is_empty());
    check_decorated(&g, &meta);
}

#[test]
fn expander_certificate_reproduces_after_assembly() {
    let (g, meta) = simple(8, 3);
    assert!(meta.expander.gap >= 0.01);
    let sub = g.induced_subgraph(&meta.expander_vertices);
    let r = spectral_gap_with(&sub, &GapOptions::certification()).unwrap();
    assert!((r.gap - meta.expander.gap).abs() <= 1e-6, "{} vs {}", r.gap, meta.expander.gap);
}

#[test]
fn left_doubling_is_exact_on_assembled_graph() {
    let (g, _) = simple(8, 9);
    let gp = g.apply_perturbation(&left_edge_doubling_rule(&g).unwrap()).unwrap();
    let mut doubled = 0;
    for ((u, v, c), (_, _, cp)) in g.edges().zip(gp.edges()) {
        let child_is_left = [u, v].iter().any(|&x| {
            matches!(g.label(x), RegionLabel::Tree { side: TreeSide::Left, .. })
                && [u, v].iter().any(|&y| g.label(y).tree_level().map(|l| l + 1) == g.label(x).tree_level())
        });
        if child_is_left {
            assert_eq!(cp, 2.0 * c);
            doubled += 1;
        } else {
            assert_eq!(cp, c, "edge {u}-{v}");
        }
    }
    assert_eq!(doubled, (1 << 8) - 1);
}

#[test]
fn assembled_graph_round_trips_through_file() {
    let (g, _) = simple(8, 1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g1.txt");
    let hash = save_graph(&g, &path).unwrap();
    let back = load_graph(&path).unwrap();
    assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    assert_eq!(back.labels(), g.labels());
    let resaved = dir.path().join("again.txt");
    assert_eq!(save_graph(&back, &resaved).unwrap(), hash);
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&resaved).unwrap());
    assert_eq!(graph_to_string(&back), std::fs::read_to_string(&path).unwrap());
}

#[test]
fn er_giant_component_fraction() {
    // θ = 1 − e^{−2θ}
    let mut theta: f64 = 0.5;
    for _ in 0..200 {
        theta = 1.0 - (-2.0 * theta).exp();
    }
    let n = 1000;
    let seeds = 100;
    let mut total = 0.0;
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let er = build_er_graph(n, 2.0 / n as f64, &mut rng);
        assert!(er.graph.is_connected());
        let fraction = er.graph.vertex_count() as f64 / n as f64;
        assert!((0.7..=0.9).contains(&fraction), "seed {seed}: fraction {fraction}");
        total += fraction;
    }
    let mean = total / seeds as f64;
    assert!((mean - theta).abs() <= 0.05, "mean fraction {mean}, θ = {theta}");
}
