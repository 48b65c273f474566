use rand::Rng;

use crate::constructions::ConstructionError;
use crate::graph::{GraphError, PerturbationRule, TreeSide, WeightedGraph};

/// Factor 2 on every tree edge from a parent to its left child, 1 elsewhere.
pub fn left_edge_doubling_rule(g: &WeightedGraph) -> Result<PerturbationRule, ConstructionError> {
    if !g.labels().iter().any(|l| l.is_tree()) {
        return Err(ConstructionError::NoTreeLabels);
    }
    let mut rule = PerturbationRule::new(2.0)?;
    for (u, v, _) in g.edges() {
        let (lu, lv) = (g.label(u), g.label(v));
        let (Some(du), Some(dv)) = (lu.tree_level(), lv.tree_level()) else { continue };
        let child = if dv == du + 1 {
            lv
        } else if du == dv + 1 {
            lu
        } else {
            continue;
        };
        if matches!(child, crate::graph::RegionLabel::Tree { side: TreeSide::Left, .. }) {
            rule.set(u, v, 2.0)?;
        }
    }
    Ok(rule)
}

/// Independent factors on every edge, uniform in `[1/C, C]`. `C = 1` gives
/// factors of exactly 1.
pub fn uniform_random_rule<R: Rng + ?Sized>(g: &WeightedGraph, c: f64, rng: &mut R) -> Result<PerturbationRule, GraphError> {
    let mut rule = PerturbationRule::new(c)?;
    for (u, v, _) in g.edges() {
        let f = if c == 1.0 { 1.0 } else { rng.random_range(1.0 / c..=c) };
        rule.set(u, v, f)?;
    }
    Ok(rule)
}
