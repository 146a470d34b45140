//! Deterministic random edge-list generator.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Per-label edge counts of the synthetic benchmark graph the presets are shaped after.
pub const RPQBENCH_LABEL_COUNTS: [(&str, u64); 7] = [
    ("a", 343_660),
    ("b", 4_209_447),
    ("c", 114_742_222),
    ("d", 186),
    ("e", 36),
    ("f", 4_928_456),
    ("g", 223_656),
];

/// Labels rarer than this keep their original absolute count when scaled down.
const RARE_FLOOR: u64 = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("vertex count must be at least 1")]
    NoVertices,
    #[error("bad label spec '{0}', expected name:count")]
    BadLabel(String),
    #[error("duplicate label '{0}'")]
    DuplicateLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub vertices: usize,
    /// `(label, number of edges to draw)`
    pub labels: Vec<(String, usize)>,
}

impl GenSpec {
    pub fn new(vertices: usize, labels: Vec<(String, usize)>) -> Result<Self, GenError> {
        if vertices == 0 {
            return Err(GenError::NoVertices);
        }
        for (i, (name, _)) in labels.iter().enumerate() {
            if name.is_empty() || name.contains(['\t', '\n', '\r']) {
                return Err(GenError::BadLabel(name.clone()));
            }
            if labels[..i].iter().any(|(n, _)| n == name) {
                return Err(GenError::DuplicateLabel(name.clone()));
            }
        }
        Ok(Self { vertices, labels })
    }

    /// Parses `"a:50,b:10"`.
    pub fn parse(vertices: usize, labels: &str) -> Result<Self, GenError> {
        let mut out = Vec::new();
        for part in labels.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, count) = part
                .rsplit_once(':')
                .ok_or_else(|| GenError::BadLabel(part.to_owned()))?;
            let count: usize = count.trim().parse().map_err(|_| GenError::BadLabel(part.to_owned()))?;
            out.push((name.trim().to_owned(), count));
        }
        Self::new(vertices, out)
    }

    /// The seven-label skewed preset scaled to roughly `edges` edges.
    pub fn rpqbench(vertices: usize, edges: usize) -> Result<Self, GenError> {
        let total: u64 = RPQBENCH_LABEL_COUNTS.iter().map(|&(_, c)| c).sum();
        let labels = RPQBENCH_LABEL_COUNTS
            .iter()
            .map(|&(name, count)| {
                let scaled = (count as f64 * edges as f64 / total as f64).round() as u64;
                (name.to_owned(), scaled.max(count.min(RARE_FLOOR)) as usize)
            })
            .collect();
        Self::new(vertices, labels)
    }

    pub fn total_edges(&self) -> usize {
        self.labels.iter().map(|(_, c)| c).sum()
    }
}

/// Draws every edge with uniformly random endpoints. Output depends only on
/// `spec` and `seed`.
pub fn generate(spec: &GenSpec, seed: u64) -> Vec<(usize, &str, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(spec.total_edges());
    for (label, count) in &spec.labels {
        for _ in 0..*count {
            let u = rng.gen_range(0..spec.vertices);
            let v = rng.gen_range(0..spec.vertices);
            edges.push((u, label.as_str(), v));
        }
    }
    edges
}

pub fn write_generated<W: Write>(spec: &GenSpec, seed: u64, out: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    for (u, label, v) in generate(spec, seed) {
        writeln!(out, "{u}\t{label}\t{v}")?;
    }
    out.flush()
}
