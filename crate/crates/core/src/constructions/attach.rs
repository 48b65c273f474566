use std::collections::HashSet;

use crate::constructions::ConstructionError;
use crate::graph::{RegionLabel, VertexId, WeightedGraph};

/// Incrementally glues guest graphs onto a host edge list.
pub(crate) struct Assembler {
    pub edges: Vec<(VertexId, VertexId, f64)>,
    pub labels: Vec<RegionLabel>,
}

impl Assembler {
    pub fn from_graph(host: &WeightedGraph) -> Self {
        Self { edges: host.edges().collect(), labels: host.labels().to_vec() }
    }

    /// Adds `guest`, merging each `(guest_v, host_v)` pair. New vertices get
    /// `label`; identified vertices keep their host label. Returns the host id
    /// of every guest vertex.
    pub fn attach(
        &mut self,
        guest: &WeightedGraph,
        identify: &[(VertexId, VertexId)],
        label: RegionLabel,
    ) -> Result<Vec<VertexId>, ConstructionError> {
        let host_n = self.labels.len();
        let mut map = vec![VertexId::MAX; guest.vertex_count()];
        let mut host_used = HashSet::with_capacity(identify.len());
        for &(g, h) in identify {
            if g as usize >= guest.vertex_count() {
                return Err(ConstructionError::IdentificationOutOfRange(g));
            }
            if h as usize >= host_n {
                return Err(ConstructionError::IdentificationOutOfRange(h));
            }
            if map[g as usize] != VertexId::MAX || !host_used.insert(h) {
                return Err(ConstructionError::DuplicateIdentification { guest: g, host: h });
            }
            map[g as usize] = h;
        }
        let identified: Vec<bool> = map.iter().map(|&h| h != VertexId::MAX).collect();
        let mut next = host_n as VertexId;
        for slot in map.iter_mut().filter(|h| **h == VertexId::MAX) {
            *slot = next;
            next += 1;
        }

        // guest edges between two identified vertices may collide with host edges
        let both: Vec<(VertexId, VertexId, VertexId, VertexId)> = guest
            .edges()
            .filter(|&(a, b, _)| identified[a as usize] && identified[b as usize])
            .map(|(a, b, _)| {
                let (x, y) = (map[a as usize], map[b as usize]);
                (a, b, x.min(y), x.max(y))
            })
            .collect();
        if !both.is_empty() {
            let wanted: HashSet<(VertexId, VertexId)> = both.iter().map(|e| (e.2, e.3)).collect();
            if let Some(&(x, y, _)) = self.edges.iter().find(|e| wanted.contains(&(e.0.min(e.1), e.0.max(e.1)))) {
                let hit = both.iter().find(|e| (e.2, e.3) == (x.min(y), x.max(y))).unwrap();
                return Err(ConstructionError::EdgeCollision {
                    guest_u: hit.0,
                    guest_v: hit.1,
                    host_u: hit.2,
                    host_v: hit.3,
                });
            }
        }

        self.labels.resize(next as usize, label);
        for (a, b, c) in guest.edges() {
            let (x, y) = (map[a as usize], map[b as usize]);
            self.edges.push((x.min(y), x.max(y), c));
        }
        Ok(map)
    }

    pub fn finish(mut self) -> WeightedGraph {
        self.edges.sort_unstable_by_key(|e| (e.0, e.1));
        WeightedGraph::from_unique_edges(&self.edges, self.labels)
    }
}

/// Disjoint union of `host` and `guest` with the listed `(guest, host)` pairs
/// merged. Non-identified guest vertices are appended after the host vertices in
/// guest order and labelled `guest_label`.
pub fn attach_subgraph(
    host: &WeightedGraph,
    guest: &WeightedGraph,
    identify: &[(VertexId, VertexId)],
    guest_label: RegionLabel,
) -> Result<WeightedGraph, ConstructionError> {
    let mut asm = Assembler::from_graph(host);
    asm.attach(guest, identify, guest_label)?;
    let labels = asm.labels.clone();
    // labels may reference anchors; validate through the public constructor
    Ok(WeightedGraph::new(&asm.edges, labels)?)
}
