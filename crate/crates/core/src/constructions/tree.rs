use serde::{Deserialize, Serialize};

use crate::graph::{RegionLabel, TreeSide, VertexId, WeightedGraph};

/// Path of left/right moves from the root. Bit `i` (counting from the most
/// significant of `depth` bits) is the `i`-th move: 0 = left, 1 = right.
///
/// Tree vertices are stored in heap order, so an address maps to vertex id
/// `2^depth - 1 + bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TreeAddress {
    pub depth: u32,
    pub bits: u64,
}

impl TreeAddress {
    pub const ROOT: TreeAddress = TreeAddress { depth: 0, bits: 0 };

    pub fn from_moves(moves: &str) -> Option<Self> {
        let mut a = Self::ROOT;
        for ch in moves.chars() {
            a = match ch {
                'L' => a.left(),
                'R' => a.right(),
                _ => return None,
            };
        }
        Some(a)
    }

    pub fn left(self) -> Self {
        TreeAddress { depth: self.depth + 1, bits: self.bits << 1 }
    }

    pub fn right(self) -> Self {
        TreeAddress { depth: self.depth + 1, bits: (self.bits << 1) | 1 }
    }

    /// Appends a relative path.
    pub fn join(self, rel: TreeAddress) -> Self {
        TreeAddress { depth: self.depth + rel.depth, bits: (self.bits << rel.depth) | rel.bits }
    }

    pub fn heap_index(self) -> VertexId {
        ((1u64 << self.depth) - 1 + self.bits) as VertexId
    }

    pub fn from_heap_index(v: VertexId) -> Self {
        let x = v as u64 + 1;
        let depth = 63 - x.leading_zeros();
        TreeAddress { depth, bits: x - (1u64 << depth) }
    }

    pub fn right_count(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn left_count(self) -> u32 {
        self.depth - self.right_count()
    }

    /// `#L − #R` along the path.
    pub fn imbalance(self) -> i64 {
        self.left_count() as i64 - self.right_count() as i64
    }

    pub fn moves(self) -> String {
        (0..self.depth)
            .rev()
            .map(|i| if (self.bits >> i) & 1 == 0 { 'L' } else { 'R' })
            .collect()
    }
}

/// Complete binary tree of height `k` in heap order with unit conductances.
pub fn build_binary_tree(k: u32) -> WeightedGraph {
    let n = (1usize << (k + 1)) - 1;
    let mut edges = Vec::with_capacity(n - 1);
    for v in 1..n {
        edges.push((((v - 1) / 2) as VertexId, v as VertexId, 1.0));
    }
    WeightedGraph::from_unique_edges(&edges, tree_labels(k))
}

pub(crate) fn tree_labels(k: u32) -> Vec<RegionLabel> {
    let n = (1usize << (k + 1)) - 1;
    (0..n)
        .map(|v| {
            let a = TreeAddress::from_heap_index(v as VertexId);
            let side = if v == 0 {
                TreeSide::Root
            } else if v % 2 == 1 {
                TreeSide::Left
            } else {
                TreeSide::Right
            };
            RegionLabel::Tree { level: a.depth, side }
        })
        .collect()
}

/// Addresses below `root` at relative depths in `depth_range` (inclusive) whose
/// relative path has `|#L − #R| ≤ window`. Sorted by depth, then path.
///
/// `height` is the height of the subtree rooted at `root`; depths beyond it are
/// not generated.
pub fn balanced_nodes(
    height: u32,
    root: TreeAddress,
    depth_range: (u32, u32),
    window: u32,
) -> Vec<TreeAddress> {
    let (lo, hi) = depth_range;
    let hi = hi.min(height);
    let mut out = Vec::new();
    for d in lo..=hi {
        for bits in 0..(1u64 << d) {
            let rel = TreeAddress { depth: d, bits };
            if rel.imbalance().unsigned_abs() <= window as u64 {
                out.push(root.join(rel));
            }
        }
    }
    out
}

/// Number of addresses [`balanced_nodes`] returns, from binomial coefficients.
pub fn balanced_count(depth_range: (u32, u32), window: u32) -> u128 {
    let (lo, hi) = depth_range;
    let mut total = 0u128;
    for d in lo..=hi {
        // j right moves: imbalance d − 2j
        for j in 0..=d {
            if (d as i64 - 2 * j as i64).unsigned_abs() <= window as u64 {
                total += binomial(d, j);
            }
        }
    }
    total
}

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
