//! Brute-force reference evaluation.
//!
//! Explicit breadth-first search over the product of the query automaton and
//! the graph, using adjacency lists and hash sets. Only the position lists of
//! the input matrices are read; no matrix kernel or engine code is used.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::rc::Rc;

use thiserror::Error;

use crate::graph_store::LabeledGraph;
use crate::query::{Symbol, TwoNfa};

/// Upper bound on the number of candidate words [`oracle_words`] will enumerate.
pub const MAX_ENUMERATED_WORDS: u128 = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{alphabet} symbols up to length {max_len} is too many words to enumerate")]
    AlphabetTooLarge { alphabet: usize, max_len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductState {
    pub state: usize,
    pub vertex: usize,
}

type Adjacency = Rc<Vec<Vec<usize>>>;

/// Every product state reachable from `(q_s, source)`.
pub fn product_reach(g: &LabeledGraph, n: &TwoNfa, source: usize) -> HashSet<ProductState> {
    assert!(source < g.vertex_count(), "source {source} out of range");
    let nv = g.vertex_count();
    // moves[q] = (q', vertex adjacency list) for each symbol usable from q
    let mut moves: Vec<Vec<(usize, Adjacency)>> = vec![Vec::new(); n.nstates()];
    for t in n.transitions() {
        let Some(label) = t.label else { continue };
        let mut adj = vec![Vec::new(); nv];
        for (u, v) in g.adjacency(label, false).expect("label bound to this graph").iter() {
            if t.symbol.inverted {
                adj[v].push(u);
            } else {
                adj[u].push(v);
            }
        }
        let adj = Rc::new(adj);
        for (q, q2) in t.matrix.iter() {
            moves[q].push((q2, adj.clone()));
        }
    }

    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    for &q in n.start_states() {
        let s = ProductState {
            state: q,
            vertex: source,
        };
        if seen.insert(s) {
            queue.push_back(s);
        }
    }
    while let Some(ProductState { state, vertex }) = queue.pop_front() {
        for (q2, adj) in &moves[state] {
            for &v2 in &adj[vertex] {
                let s = ProductState { state: *q2, vertex: v2 };
                if seen.insert(s) {
                    queue.push_back(s);
                }
            }
        }
    }
    seen
}

/// Vertices `v` such that some 2-path from `source` to `v` spells a word of `n`.
pub fn oracle_ssr(g: &LabeledGraph, n: &TwoNfa, source: usize) -> BTreeSet<usize> {
    let finals: HashSet<usize> = n.final_states().iter().copied().collect();
    product_reach(g, n, source)
        .into_iter()
        .filter(|s| finals.contains(&s.state))
        .map(|s| s.vertex)
        .collect()
}

/// All words of length at most `max_len` accepted by `n`, by exhaustive
/// enumeration over the automaton's alphabet.
pub fn oracle_words(n: &TwoNfa, max_len: usize) -> Result<BTreeSet<Vec<Symbol>>, OracleError> {
    let alphabet: Vec<Symbol> = n.alphabet().cloned().collect();
    let k = alphabet.len() as u128;
    let total: u128 = (0..=max_len as u32).map(|l| k.saturating_pow(l)).sum();
    if total > MAX_ENUMERATED_WORDS {
        return Err(OracleError::AlphabetTooLarge {
            alphabet: alphabet.len(),
            max_len,
        });
    }
    let mut delta: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (a, t) in n.transitions().iter().enumerate() {
        for (q, q2) in t.matrix.iter() {
            delta.entry((q, a)).or_default().push(q2);
        }
    }
    let finals: HashSet<usize> = n.final_states().iter().copied().collect();
    let mut out = BTreeSet::new();
    let mut stack: Vec<(Vec<usize>, BTreeSet<usize>)> = vec![(Vec::new(), n.start_states().iter().copied().collect())];
    while let Some((word, states)) = stack.pop() {
        if states.iter().any(|q| finals.contains(q)) {
            out.insert(word.iter().map(|&a| alphabet[a].clone()).collect());
        }
        if word.len() == max_len {
            continue;
        }
        for a in 0..alphabet.len() {
            let next: BTreeSet<usize> = states
                .iter()
                .filter_map(|&q| delta.get(&(q, a)))
                .flatten()
                .copied()
                .collect();
            if !next.is_empty() {
                let mut w = word.clone();
                w.push(a);
                stack.push((w, next));
            }
        }
    }
    Ok(out)
}
