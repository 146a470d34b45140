//! Subset construction and Hopcroft minimization.
//!
//! DFAs here are partial: a missing transition means rejection. Neither the
//! determinized nor the minimized automaton carries a dead state.

use std::collections::{HashMap, VecDeque};

use super::ast::{RegexAst, Symbol};
use super::nfa::EpsilonNfa;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Vec<Symbol>,
    start: usize,
    finals: Vec<bool>,
    /// `delta[state][symbol id]`
    delta: Vec<Vec<Option<usize>>>,
}

impl Dfa {
    /// Determinizes the Thompson automaton of `ast`. States are numbered in
    /// breadth-first discovery order from the start subset, symbols visited
    /// in sorted order.
    pub fn determinize(ast: &RegexAst) -> Self {
        let nfa = EpsilonNfa::build(ast);
        let k = nfa.alphabet.len();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        let start = nfa.closure([nfa.start]);
        index.insert(start.clone(), 0);
        subsets.push(start);
        queue.push_back(0);
        let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
        while let Some(d) = queue.pop_front() {
            let mut row = vec![None; k];
            for (sym, slot) in row.iter_mut().enumerate() {
                let targets = subsets[d]
                    .iter()
                    .flat_map(|&s| nfa.moves[s].iter().filter(|m| m.0 == sym).map(|m| m.1));
                let next = nfa.closure(targets);
                if next.is_empty() {
                    continue;
                }
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len();
                        index.insert(next.clone(), id);
                        subsets.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                *slot = Some(id);
            }
            // Queue order equals numbering order, so rows are pushed in state order.
            debug_assert_eq!(delta.len(), d);
            delta.push(row);
        }
        let finals = subsets.iter().map(|s| s.binary_search(&nfa.accept).is_ok()).collect();
        Dfa {
            alphabet: nfa.alphabet,
            start: 0,
            finals,
            delta,
        }
    }

    /// Determinize then minimize.
    pub fn minimal(ast: &RegexAst) -> Self {
        Self::determinize(ast).minimize()
    }

    pub fn nstates(&self) -> usize {
        self.delta.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_final(&self, state: usize) -> bool {
        self.finals[state]
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn next(&self, state: usize, symbol: &Symbol) -> Option<usize> {
        let id = self.alphabet.binary_search(symbol).ok()?;
        self.delta[state][id]
    }

    /// `(from, symbol, to)` for every defined transition, sorted by source then symbol.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, &Symbol, usize)> + '_ {
        self.delta.iter().enumerate().flat_map(move |(q, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(a, t)| t.map(|t| (q, &self.alphabet[a], t)))
        })
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let mut q = self.start;
        for sym in word {
            match self.next(q, sym) {
                Some(t) => q = t,
                None => return false,
            }
        }
        self.finals[q]
    }

    /// Hopcroft partition refinement over the automaton completed with a sink.
    ///
    /// The block holding the sink (and every state equivalent to it) is
    /// dropped afterwards. Remaining blocks are numbered by their smallest
    /// member, which keeps the start state at 0.
    pub fn minimize(&self) -> Dfa {
        let n = self.nstates();
        let k = self.alphabet.len();
        let sink = n;
        let total = n + 1;
        let step = |q: usize, a: usize| {
            if q == sink {
                sink
            } else {
                self.delta[q][a].unwrap_or(sink)
            }
        };

        // inverse[a][t] = states moving to t on a
        let mut inverse = vec![vec![Vec::new(); total]; k];
        for q in 0..total {
            for (a, inv) in inverse.iter_mut().enumerate() {
                inv[step(q, a)].push(q);
            }
        }

        let accepting: Vec<usize> = (0..n).filter(|&q| self.finals[q]).collect();
        let rejecting: Vec<usize> = (0..total).filter(|&q| q == sink || !self.finals[q]).collect();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = vec![0usize; total];
        for part in [accepting, rejecting] {
            if !part.is_empty() {
                for &q in &part {
                    block_of[q] = blocks.len();
                }
                blocks.push(part);
            }
        }

        let mut pending: VecDeque<(usize, usize)> = VecDeque::new();
        let mut queued: Vec<Vec<bool>> = vec![vec![false; k]; blocks.len()];
        if blocks.len() == 2 {
            let smaller = if blocks[0].len() <= blocks[1].len() { 0 } else { 1 };
            pending.extend((0..k).map(|a| (smaller, a)));
            queued[smaller].fill(true);
        }

        let mut marked = vec![false; total];
        while let Some((splitter, a)) = pending.pop_front() {
            queued[splitter][a] = false;
            let mut preimage = Vec::new();
            for &t in &blocks[splitter] {
                for &q in &inverse[a][t] {
                    if !marked[q] {
                        marked[q] = true;
                        preimage.push(q);
                    }
                }
            }
            let mut touched: Vec<usize> = preimage.iter().map(|&q| block_of[q]).collect();
            touched.sort_unstable();
            touched.dedup();
            for y in touched {
                let (inside, outside): (Vec<usize>, Vec<usize>) = blocks[y].iter().partition(|&&q| marked[q]);
                if outside.is_empty() {
                    continue;
                }
                let z = blocks.len();
                for &q in &inside {
                    block_of[q] = z;
                }
                let (inside_len, outside_len) = (inside.len(), outside.len());
                blocks[y] = outside;
                blocks.push(inside);
                queued.push(vec![false; k]);
                #[allow(clippy::needless_range_loop)]
                for b in 0..k {
                    let pick = if queued[y][b] || inside_len <= outside_len {
                        z
                    } else {
                        y
                    };
                    if !queued[pick][b] {
                        queued[pick][b] = true;
                        pending.push_back((pick, b));
                    }
                }
            }
            for q in preimage {
                marked[q] = false;
            }
        }

        let dead = block_of[sink];
        if block_of[self.start] == dead {
            // Empty language.
            return Dfa {
                alphabet: self.alphabet.clone(),
                start: 0,
                finals: vec![false],
                delta: vec![vec![None; k]],
            };
        }
        let mut live: Vec<(usize, usize)> = blocks
            .iter()
            .enumerate()
            .filter(|&(b, _)| b != dead)
            .map(|(b, members)| (*members.iter().min().expect("blocks are nonempty"), b))
            .collect();
        live.sort_unstable();
        let mut renumber = vec![usize::MAX; blocks.len()];
        for (new, &(_, b)) in live.iter().enumerate() {
            renumber[b] = new;
        }
        let delta = live
            .iter()
            .map(|&(rep, _)| {
                (0..k)
                    .map(|a| {
                        let t = block_of[step(rep, a)];
                        (t != dead).then(|| renumber[t])
                    })
                    .collect()
            })
            .collect();
        let finals = live.iter().map(|&(rep, _)| self.finals[rep]).collect();
        Dfa {
            alphabet: self.alphabet.clone(),
            start: renumber[block_of[self.start]],
            finals,
            delta,
        }
    }
}
