//! Random instances and reference evaluators shared by the integration tests.
//!
//! The oracles here work on the pattern tree and on plain edge lists, so they
//! check the compiler and the matrix engine without going through either.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rpq_core::{LabeledGraph, RegexAst, Symbol};

pub const LABELS: [&str; 4] = ["a", "b", "c", "d"];

/// A label no generated graph contains.
pub const ABSENT: &str = "z";

pub struct RandomGraph {
    pub graph: LabeledGraph,
    /// Edges in graph indices: `(source, label name, destination)`.
    pub edges: Vec<(usize, String, usize)>,
}

/// At most `max_vertices` vertices, 1 to 4 labels and 1 to `max_edges` edges.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> RandomGraph {
    let nv = rng.gen_range(1..=max_vertices);
    let nl = rng.gen_range(1..=LABELS.len());
    let ne = rng.gen_range(1..=max_edges);
    let triples: Vec<(String, String, String)> = (0..ne)
        .map(|_| {
            (
                format!("v{}", rng.gen_range(0..nv)),
                LABELS[rng.gen_range(0..nl)].to_owned(),
                format!("v{}", rng.gen_range(0..nv)),
            )
        })
        .collect();
    let graph = LabeledGraph::from_triples(triples.iter().map(|(u, l, v)| (u.as_str(), l.as_str(), v.as_str())));
    let edges = triples
        .iter()
        .map(|(u, l, v)| {
            (
                graph.vertex_index(u).unwrap(),
                l.clone(),
                graph.vertex_index(v).unwrap(),
            )
        })
        .collect();
    RandomGraph { graph, edges }
}

fn random_symbol<R: Rng>(rng: &mut R, labels: &[&str]) -> Symbol {
    let name = if rng.gen_bool(0.05) {
        ABSENT
    } else {
        labels.choose(rng).copied().unwrap_or(ABSENT)
    };
    Symbol::new(name, rng.gen_bool(0.35))
}

/// Pattern of depth at most `max_depth` over `labels`, occasionally using
/// [`ABSENT`]. Built with the raw variants so nesting is not flattened.
pub fn random_ast<R: Rng>(rng: &mut R, labels: &[&str], max_depth: usize) -> RegexAst {
    if max_depth <= 1 || rng.gen_bool(0.3) {
        return RegexAst::Label(random_symbol(rng, labels));
    }
    let child = |rng: &mut R| random_ast(rng, labels, max_depth - 1);
    match rng.gen_range(0..5) {
        0 => {
            let k = rng.gen_range(2..=3);
            RegexAst::Concat((0..k).map(|_| child(rng)).collect())
        }
        1 => {
            let k = rng.gen_range(2..=3);
            RegexAst::Alt((0..k).map(|_| child(rng)).collect())
        }
        2 => RegexAst::Star(Box::new(child(rng))),
        3 => RegexAst::Plus(Box::new(child(rng))),
        _ => RegexAst::Opt(Box::new(child(rng))),
    }
}

/// Labels present in a generated graph, for feeding [`random_ast`].
pub fn graph_labels(g: &LabeledGraph) -> Vec<&str> {
    g.labels().iter().map(String::as_str).collect()
}

/// Word membership decided on the pattern tree: does `word[i..j]` match `node`?
pub fn ast_accepts(ast: &RegexAst, word: &[Symbol]) -> bool {
    let mut memo = HashMap::new();
    matches(ast, word, 0, word.len(), &mut memo)
}

fn matches(node: &RegexAst, w: &[Symbol], i: usize, j: usize, memo: &mut HashMap<(usize, usize, usize), bool>) -> bool {
    let key = (node as *const RegexAst as usize, i, j);
    if let Some(&hit) = memo.get(&key) {
        return hit;
    }
    let result = match node {
        RegexAst::Label(s) => j == i + 1 && w[i] == *s,
        RegexAst::Concat(cs) => {
            let mut ends = vec![i];
            for c in cs {
                let mut next = Vec::new();
                for &k in &ends {
                    for k2 in k..=j {
                        if !next.contains(&k2) && matches(c, w, k, k2, memo) {
                            next.push(k2);
                        }
                    }
                }
                ends = next;
            }
            ends.contains(&j)
        }
        RegexAst::Alt(cs) => cs.iter().any(|c| matches(c, w, i, j, memo)),
        RegexAst::Star(c) => i == j || (i + 1..=j).any(|k| matches(c, w, i, k, memo) && matches(node, w, k, j, memo)),
        RegexAst::Plus(c) => {
            matches(c, w, i, j, memo) || (i + 1..j).any(|k| matches(c, w, i, k, memo) && matches(node, w, k, j, memo))
        }
        RegexAst::Opt(c) => i == j || matches(c, w, i, j, memo),
    };
    memo.insert(key, result);
    result
}

/// A random word of the pattern's language, or `None` if the draw runs past `max_len`.
pub fn sample_member<R: Rng>(rng: &mut R, ast: &RegexAst, max_len: usize) -> Option<Vec<Symbol>> {
    let mut out = Vec::new();
    emit(rng, ast, &mut out, max_len).then_some(out)
}

fn emit<R: Rng>(rng: &mut R, node: &RegexAst, out: &mut Vec<Symbol>, max_len: usize) -> bool {
    match node {
        RegexAst::Label(s) => {
            out.push(s.clone());
            out.len() <= max_len
        }
        RegexAst::Concat(cs) => cs.iter().all(|c| emit(rng, c, out, max_len)),
        RegexAst::Alt(cs) => {
            let pick = rng.gen_range(0..cs.len());
            emit(rng, &cs[pick], out, max_len)
        }
        RegexAst::Star(c) => (0..rng.gen_range(0..=3)).all(|_| emit(rng, c, out, max_len)),
        RegexAst::Plus(c) => (0..rng.gen_range(1..=3)).all(|_| emit(rng, c, out, max_len)),
        RegexAst::Opt(c) => !rng.gen_bool(0.5) || emit(rng, c, out, max_len),
    }
}

/// Uniform word of length `0..=max_len` over `alphabet`.
pub fn random_word<R: Rng>(rng: &mut R, alphabet: &[Symbol], max_len: usize) -> Vec<Symbol> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| alphabet.choose(rng).unwrap().clone()).collect()
}

pub type Dense = Vec<Vec<bool>>;

fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect()
}

fn compose(x: &Dense, y: &Dense) -> Dense {
    let n = x.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if x[i][k] {
                for j in 0..n {
                    out[i][j] |= y[k][j];
                }
            }
        }
    }
    out
}

fn union(mut x: Dense, y: &Dense) -> Dense {
    for (rx, ry) in x.iter_mut().zip(y) {
        for (a, &b) in rx.iter_mut().zip(ry) {
            *a |= b;
        }
    }
    x
}

/// Warshall transitive closure.
fn closure(mut x: Dense) -> Dense {
    let n = x.len();
    for k in 0..n {
        let through = x[k].clone();
        for row in x.iter_mut().filter(|row| row[k]) {
            for (a, &b) in row.iter_mut().zip(&through) {
                *a |= b;
            }
        }
    }
    x
}

/// The pattern's full relation on the graph, computed node by node on dense
/// matrices: `rel[u][v]` iff some 2-path from `u` to `v` spells a word of `ast`.
pub fn ast_relation(rg: &RandomGraph, ast: &RegexAst) -> Dense {
    let n = rg.graph.vertex_count();
    match ast {
        RegexAst::Label(s) => {
            let mut r = vec![vec![false; n]; n];
            for (u, l, v) in &rg.edges {
                if *l == s.label {
                    let (x, y) = if s.inverted { (*v, *u) } else { (*u, *v) };
                    r[x][y] = true;
                }
            }
            r
        }
        RegexAst::Concat(cs) => cs
            .iter()
            .fold(identity(n), |acc, c| compose(&acc, &ast_relation(rg, c))),
        RegexAst::Alt(cs) => cs
            .iter()
            .fold(vec![vec![false; n]; n], |acc, c| union(acc, &ast_relation(rg, c))),
        RegexAst::Star(c) => union(closure(ast_relation(rg, c)), &identity(n)),
        RegexAst::Plus(c) => closure(ast_relation(rg, c)),
        RegexAst::Opt(c) => union(ast_relation(rg, c), &identity(n)),
    }
}

/// Row `u` of a dense relation as sorted column indices.
pub fn row_set(rel: &Dense, u: usize) -> Vec<usize> {
    (0..rel.len()).filter(|&v| rel[u][v]).collect()
}
