//! Versioned JSON reports and their CSV companions.

use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

/// Schema tag embedded in every report.
pub const REPORT_SCHEMA: &str = "mixlab-report v1";

/// Key of every wall-clock field; stripped before determinism comparisons.
pub const WALL_TIME_KEY: &str = "wall_time_s";

/// Report envelope: schema, kind, provenance and the measurement body.
pub fn envelope<T: Serialize>(kind: &str, params_hash: &str, seed: u64, config: Option<&impl Serialize>, body: &T) -> Value {
    json!({
        "schema": REPORT_SCHEMA,
        "kind": kind,
        "params_hash": params_hash,
        "seed": seed,
        "config": config.map(|c| serde_json::to_value(c).expect("config serializes")),
        "body": serde_json::to_value(body).expect("report serializes"),
    })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, v: &Value) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, to_pretty(v))
}

/// Copy of `v` with every `wall_time_s` field removed, at any depth.
pub fn strip_wall_times(v: &Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(
            map.iter().filter(|(k, _)| k.as_str() != WALL_TIME_KEY).map(|(k, v)| (k.clone(), strip_wall_times(v))).collect(),
        ),
        Value::Array(items) => Value::Array(items.iter().map(strip_wall_times).collect()),
        other => other.clone(),
    }
}

/// Evenly spaced subsample of at most `max` points, always keeping the last.
pub fn downsample<T: Clone>(xs: &[T], max: usize) -> Vec<(usize, T)> {
    if xs.len() <= max || max < 2 {
        return xs.iter().cloned().enumerate().collect();
    }
    let step = (xs.len() - 1) as f64 / (max - 1) as f64;
    let mut out: Vec<(usize, T)> = Vec::with_capacity(max);
    for i in 0..max {
        let idx = ((i as f64 * step).round() as usize).min(xs.len() - 1);
        if out.last().is_none_or(|(j, _)| *j != idx) {
            out.push((idx, xs[idx].clone()));
        }
    }
    out
}
