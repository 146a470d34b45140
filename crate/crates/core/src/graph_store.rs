//! Edge-labelled graphs held as a Boolean decomposition.
//!
//! Each label `a` owns a `|V| x |V|` matrix with a one at `(u, v)` iff the
//! edge `u -a-> v` exists. The transpose of every label matrix is built at
//! load time so that inverse steps `^a` never pay for a transpose per query.
//!
//! The text format is one edge per line, `source<TAB>label<TAB>destination`.
//! Lines starting with `#` are comments.

use std::io::{self, BufRead, Write};

use indexmap::IndexSet;
use thiserror::Error;

use crate::sparse_bool::SparseBoolMatrix;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("vertex index {index} out of range (|V| = {count})")]
    VertexOutOfRange { index: usize, count: usize },
    #[error("unknown label index {index} (|L| = {count})")]
    UnknownLabel { index: usize, count: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone)]
pub struct LabeledGraph {
    vertices: IndexSet<String>,
    labels: IndexSet<String>,
    forward: Vec<SparseBoolMatrix>,
    backward: Vec<SparseBoolMatrix>,
}

impl LabeledGraph {
    /// Builds a graph from `(source, label, destination)` triples.
    ///
    /// Vertices and labels are numbered in order of first appearance; the
    /// source of an edge is interned before its destination.
    pub fn from_triples<I, S>(triples: I) -> Self
    where
        I: IntoIterator<Item = (S, S, S)>,
        S: AsRef<str>,
    {
        let mut vertices = IndexSet::new();
        let mut labels = IndexSet::new();
        let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
        for (src, label, dst) in triples {
            let (u, _) = vertices.insert_full(src.as_ref().to_owned());
            let (v, _) = vertices.insert_full(dst.as_ref().to_owned());
            let (a, fresh) = labels.insert_full(label.as_ref().to_owned());
            if fresh {
                edges.push(Vec::new());
            }
            edges[a].push((u, v));
        }
        let n = vertices.len();
        let forward: Vec<SparseBoolMatrix> = edges
            .into_iter()
            .map(|pairs| SparseBoolMatrix::from_entries(n, n, pairs).expect("interned indices are in range"))
            .collect();
        let backward = forward.iter().map(SparseBoolMatrix::transpose).collect();
        Self {
            vertices,
            labels,
            forward,
            backward,
        }
    }

    /// Parses the tab-separated edge-list format.
    pub fn load<R: BufRead>(reader: R) -> Result<Self, GraphError> {
        let mut triples = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(GraphError::Malformed {
                    line: i + 1,
                    message: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            }
            if let Some(pos) = fields.iter().position(|f| f.is_empty()) {
                return Err(GraphError::Malformed {
                    line: i + 1,
                    message: format!("field {} is empty", pos + 1),
                });
            }
            triples.push((fields[0].to_owned(), fields[1].to_owned(), fields[2].to_owned()));
        }
        Ok(Self::from_triples(triples))
    }

    pub fn load_str(text: &str) -> Result<Self, GraphError> {
        Self::load(text.as_bytes())
    }

    /// Writes every distinct edge back out in the edge-list format, grouped by label.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (a, label) in self.labels.iter().enumerate() {
            for (u, v) in self.forward[a].iter() {
                writeln!(out, "{}\t{}\t{}", self.vertices[u], label, self.vertices[v])?;
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of distinct `(u, label, v)` triples.
    pub fn edge_count(&self) -> usize {
        self.forward.iter().map(SparseBoolMatrix::nnz).sum()
    }

    pub fn labels(&self) -> &IndexSet<String> {
        &self.labels
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.get_index_of(name)
    }

    pub fn label_name(&self, index: usize) -> Option<&str> {
        self.labels.get_index(index).map(String::as_str)
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize, GraphError> {
        self.vertices
            .get_index_of(id)
            .ok_or_else(|| GraphError::UnknownVertex(id.to_owned()))
    }

    pub fn vertex_name(&self, index: usize) -> Result<&str, GraphError> {
        self.vertices
            .get_index(index)
            .map(String::as_str)
            .ok_or(GraphError::VertexOutOfRange {
                index,
                count: self.vertices.len(),
            })
    }

    /// `G^a` when `inverted` is false, `(G^a)^T = G^{a^-}` otherwise.
    pub fn adjacency(&self, label: usize, inverted: bool) -> Result<&SparseBoolMatrix, GraphError> {
        let side = if inverted { &self.backward } else { &self.forward };
        side.get(label).ok_or(GraphError::UnknownLabel {
            index: label,
            count: self.labels.len(),
        })
    }
}
