//! Text serialization of graphs (`mixlab-graph v1`) and content hashes.
//!
//! ```text
//! mixlab-graph v1 <n> <m>
//! <u> <v> <c>                  m lines, u < v, sorted
//! label <v> tree <level> <side>
//! label <v> torus <anchor>
//! label <v> expander
//! label <v> plain              n lines, one per vertex, in order
//! ```
//!
//! Conductances are written with the shortest representation that parses
//! back to the same `f64`, so save/load round-trips exactly.

use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{GraphError, RegionLabel, TreeSide, VertexId, WeightedGraph};

pub const GRAPH_HEADER: &str = "mixlab-graph v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph hash mismatch: expected {expected}, found {actual}")]
    HashMismatch { expected: String, actual: String },
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

fn write_graph<W: fmt::Write>(g: &WeightedGraph, s: &mut W) -> fmt::Result {
    writeln!(s, "{GRAPH_HEADER} {} {}", g.vertex_count(), g.edge_count())?;
    for (u, v, c) in g.edges() {
        writeln!(s, "{u} {v} {c:?}")?;
    }
    for (v, label) in g.labels().iter().enumerate() {
        match *label {
            RegionLabel::Tree { level, side } => writeln!(s, "label {v} tree {level} {}", side.as_str())?,
            RegionLabel::Torus { anchor } => writeln!(s, "label {v} torus {anchor}")?,
            RegionLabel::Expander => writeln!(s, "label {v} expander")?,
            RegionLabel::Plain => writeln!(s, "label {v} plain")?,
        }
    }
    Ok(())
}

pub fn graph_to_string(g: &WeightedGraph) -> String {
    let mut s = String::with_capacity(32 * (g.edge_count() + g.vertex_count()) + 32);
    write_graph(g, &mut s).unwrap();
    s
}

struct HashWriter(Sha256);

impl fmt::Write for HashWriter {
    fn write_str(&mut self, s: &str) -> fmt::Result {
        self.0.update(s.as_bytes());
        Ok(())
    }
}

pub fn graph_from_str(text: &str) -> Result<WeightedGraph, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let rest = header
        .strip_prefix(GRAPH_HEADER)
        .ok_or_else(|| parse_err(1, format!("expected header '{GRAPH_HEADER} <n> <m>'")))?;
    let counts: Vec<&str> = rest.split_whitespace().collect();
    if counts.len() != 2 {
        return Err(parse_err(1, "header must carry vertex and edge counts"));
    }
    let n: usize = counts[0].parse().map_err(|_| parse_err(1, "bad vertex count"))?;
    let m: usize = counts[1].parse().map_err(|_| parse_err(1, "bad edge count"))?;

    let mut last_line = 1;
    let mut edges = Vec::with_capacity(m);
    for k in 0..m {
        let (no, line) = lines
            .next()
            .ok_or_else(|| parse_err(last_line + 1, format!("unexpected end of input: {k} of {m} edges read")))?;
        last_line = no;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(parse_err(no, "edge line must be 'u v c'"));
        }
        let u: VertexId = f[0].parse().map_err(|_| parse_err(no, "bad vertex id"))?;
        let v: VertexId = f[1].parse().map_err(|_| parse_err(no, "bad vertex id"))?;
        let c: f64 = f[2].parse().map_err(|_| parse_err(no, "bad conductance"))?;
        edges.push((u, v, c));
    }

    let mut labels = Vec::with_capacity(n);
    for k in 0..n {
        let (no, line) = lines
            .next()
            .ok_or_else(|| parse_err(last_line + 1, format!("unexpected end of input: {k} of {n} labels read")))?;
        last_line = no;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 3 || f[0] != "label" {
            return Err(parse_err(no, "label line must be 'label v <kind> <args>'"));
        }
        let v: usize = f[1].parse().map_err(|_| parse_err(no, "bad vertex id"))?;
        if v != k {
            return Err(parse_err(no, format!("labels out of order: expected vertex {k}, got {v}")));
        }
        let label = match (f[2], f.len()) {
            ("tree", 5) => {
                let level = f[3].parse().map_err(|_| parse_err(no, "bad tree level"))?;
                let side = match f[4] {
                    "root" => TreeSide::Root,
                    "left" => TreeSide::Left,
                    "right" => TreeSide::Right,
                    other => return Err(parse_err(no, format!("unknown tree side '{other}'"))),
                };
                RegionLabel::Tree { level, side }
            }
            ("torus", 4) => RegionLabel::Torus {
                anchor: f[3].parse().map_err(|_| parse_err(no, "bad torus anchor"))?,
            },
            ("expander", 3) => RegionLabel::Expander,
            ("plain", 3) => RegionLabel::Plain,
            (kind, _) => return Err(parse_err(no, format!("malformed label of kind '{kind}'"))),
        };
        labels.push(label);
    }
    if let Some((no, line)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_err(no, format!("trailing content: '{line}'")));
    }
    Ok(WeightedGraph::new(&edges, labels)?)
}

pub fn save_graph(g: &WeightedGraph, path: &Path) -> Result<String, FormatError> {
    let text = graph_to_string(g);
    std::fs::write(path, &text)?;
    Ok(hash_str(&text))
}

pub fn load_graph(path: &Path) -> Result<WeightedGraph, FormatError> {
    let text = std::fs::read_to_string(path)?;
    graph_from_str(&text)
}

/// Loads and checks the content hash of the canonical re-serialization.
pub fn load_graph_verified(path: &Path, expected_hash: &str) -> Result<WeightedGraph, FormatError> {
    let g = load_graph(path)?;
    let actual = graph_hash(&g);
    if actual != expected_hash {
        return Err(FormatError::HashMismatch { expected: expected_hash.to_string(), actual });
    }
    Ok(g)
}

/// SHA-256 of the canonical v1 text, computed without materializing it.
pub fn graph_hash(g: &WeightedGraph) -> String {
    let mut w = HashWriter(Sha256::new());
    write_graph(g, &mut w).unwrap();
    hex::encode(w.0.finalize())
}

pub fn hash_str(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> WeightedGraph {
        let labels = vec![
            RegionLabel::Tree { level: 0, side: TreeSide::Root },
            RegionLabel::Tree { level: 1, side: TreeSide::Left },
            RegionLabel::Torus { anchor: 0 },
            RegionLabel::Expander,
        ];
        WeightedGraph::new(&[(0, 1, 2.0), (0, 2, 0.1 + 0.2), (1, 3, 1.0 / 3.0)], labels).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let g = sample();
        let text = graph_to_string(&g);
        let back = graph_from_str(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(graph_to_string(&back), text);
        assert_eq!(graph_hash(&g), hash_str(&text));
    }

    #[test]
    fn truncated_input_reports_line() {
        let text = graph_to_string(&sample());
        let cut: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        match graph_from_str(&cut) {
            Err(FormatError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_header() {
        assert!(matches!(graph_from_str("graph 2 1\n"), Err(FormatError::Parse { line: 1, .. })));
    }

    #[test]
    fn bad_label_line_number() {
        let text = graph_to_string(&sample()).replace("label 2 torus 0", "label 2 torus");
        match graph_from_str(&text) {
            Err(FormatError::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn verified_load_detects_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        let hash = save_graph(&sample(), &path).unwrap();
        assert!(load_graph_verified(&path, &hash).is_ok());
        assert!(matches!(
            load_graph_verified(&path, "00"),
            Err(FormatError::HashMismatch { .. })
        ));
    }
}
