//! Automata in Boolean-decomposed form, bound to a graph's label dictionary.

use indexmap::IndexSet;
use thiserror::Error;

use super::ast::{RegexAst, Symbol};
use super::dfa::Dfa;
use crate::sparse_bool::SparseBoolMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("transition matrix for {symbol} is {shape:?}, expected {nstates}x{nstates}")]
    BadTransition {
        symbol: String,
        shape: (usize, usize),
        nstates: usize,
    },
    #[error("duplicate transition matrix for {0}")]
    DuplicateSymbol(String),
    #[error("state {state} out of range ({nstates} states)")]
    StateOutOfRange { state: usize, nstates: usize },
}

/// The matrix `N^a` of one symbol, with `(q, q')` set iff `q -a-> q'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub symbol: Symbol,
    /// Index of the symbol's label in the bound graph, `None` when the graph
    /// has no such label (the graph side is then the zero matrix).
    pub label: Option<usize>,
    pub matrix: SparseBoolMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoNfa {
    nstates: usize,
    /// Sorted by symbol.
    transitions: Vec<Transition>,
    starts: SparseBoolMatrix,
    finals: SparseBoolMatrix,
}

impl TwoNfa {
    pub fn new(
        nstates: usize,
        mut transitions: Vec<Transition>,
        starts: &[usize],
        finals: &[usize],
    ) -> Result<Self, AutomatonError> {
        for t in &transitions {
            if t.matrix.shape() != (nstates, nstates) {
                return Err(AutomatonError::BadTransition {
                    symbol: t.symbol.to_string(),
                    shape: t.matrix.shape(),
                    nstates,
                });
            }
        }
        transitions.sort_by(|a, b| a.symbol.cmp(&b.symbol));
        if let Some(w) = transitions.windows(2).find(|w| w[0].symbol == w[1].symbol) {
            return Err(AutomatonError::DuplicateSymbol(w[0].symbol.to_string()));
        }
        let vector = |states: &[usize]| {
            SparseBoolMatrix::row_vector(nstates, states.iter().copied()).map_err(|e| match e {
                crate::sparse_bool::MatrixError::OutOfBounds { col, .. } => {
                    AutomatonError::StateOutOfRange { state: col, nstates }
                }
                other => unreachable!("{other}"),
            })
        };
        Ok(Self {
            nstates,
            starts: vector(starts)?,
            finals: vector(finals)?,
            transitions,
        })
    }

    /// Boolean decomposition of `dfa`, with labels resolved against `labels`.
    pub fn from_dfa(dfa: &Dfa, labels: &IndexSet<String>) -> Self {
        let n = dfa.nstates();
        let mut per_symbol: Vec<Vec<(usize, usize)>> = vec![Vec::new(); dfa.alphabet().len()];
        for (q, sym, t) in dfa.transitions() {
            let id = dfa
                .alphabet()
                .binary_search(sym)
                .expect("symbol from the same alphabet");
            per_symbol[id].push((q, t));
        }
        let transitions = dfa
            .alphabet()
            .iter()
            .zip(per_symbol)
            .filter(|(_, pairs)| !pairs.is_empty())
            .map(|(sym, pairs)| Transition {
                symbol: sym.clone(),
                label: labels.get_index_of(&sym.label),
                matrix: SparseBoolMatrix::from_entries(n, n, pairs).expect("dfa states in range"),
            })
            .collect();
        let finals: Vec<usize> = (0..n).filter(|&q| dfa.is_final(q)).collect();
        Self::new(n, transitions, &[dfa.start()], &finals).expect("dfa is well formed")
    }

    pub fn nstates(&self) -> usize {
        self.nstates
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, symbol: &Symbol) -> Option<&Transition> {
        self.transitions
            .binary_search_by(|t| t.symbol.cmp(symbol))
            .ok()
            .map(|i| &self.transitions[i])
    }

    /// `1 x |Q|` selector of start states.
    pub fn starts(&self) -> &SparseBoolMatrix {
        &self.starts
    }

    /// `1 x |Q|` selector of final states.
    pub fn finals(&self) -> &SparseBoolMatrix {
        &self.finals
    }

    pub fn start_states(&self) -> &[usize] {
        self.starts.row(0)
    }

    pub fn final_states(&self) -> &[usize] {
        self.finals.row(0)
    }

    /// Symbols with at least one transition.
    pub fn alphabet(&self) -> impl Iterator<Item = &Symbol> {
        self.transitions.iter().map(|t| &t.symbol)
    }

    /// True when every symbol matrix has at most one position per row and
    /// there is a single start state.
    pub fn is_deterministic(&self) -> bool {
        self.starts.nnz() <= 1
            && self
                .transitions
                .iter()
                .all(|t| (0..self.nstates).all(|q| t.matrix.row(q).len() <= 1))
    }

    /// The automaton of the reversed language: matrices transposed, symbols
    /// inverted, start and final states swapped.
    pub fn reverse(&self) -> Self {
        let mut transitions: Vec<Transition> = self
            .transitions
            .iter()
            .map(|t| Transition {
                symbol: t.symbol.flipped(),
                label: t.label,
                matrix: t.matrix.transpose(),
            })
            .collect();
        transitions.sort_by(|a, b| a.symbol.cmp(&b.symbol));
        Self {
            nstates: self.nstates,
            transitions,
            starts: self.finals.clone(),
            finals: self.starts.clone(),
        }
    }

    /// Word membership by state-set simulation.
    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let mut current = self.starts.clone();
        for sym in word {
            let Some(t) = self.transition(sym) else {
                return false;
            };
            current = current.bool_matmul(&t.matrix).expect("transition matrices are |Q|x|Q|");
            if current.is_zero() {
                return false;
            }
        }
        !current.mask(&self.finals).expect("both are 1x|Q|").is_zero()
    }
}

/// Compiles a pattern to its minimal DFA in Boolean-decomposed form.
pub fn compile(ast: &RegexAst, labels: &IndexSet<String>) -> TwoNfa {
    TwoNfa::from_dfa(&Dfa::minimal(ast), labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::ast::parse_query;

    fn labels(names: &[&str]) -> IndexSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn nfa(p: &str) -> TwoNfa {
        compile(&parse_query(p).unwrap(), &labels(&["a", "b"]))
    }

    fn w(s: &str) -> Vec<Symbol> {
        Symbol::parse_word(s)
    }

    #[test]
    fn a_star_b_structure() {
        let n = nfa("a*b");
        assert_eq!(n.nstates(), 2);
        assert_eq!(n.start_states(), &[0]);
        assert_eq!(n.final_states(), &[1]);
        let a = n.transition(&Symbol::forward("a")).unwrap();
        assert_eq!(a.label, Some(0));
        assert_eq!(a.matrix.iter().collect::<Vec<_>>(), vec![(0, 0)]);
        let b = n.transition(&Symbol::forward("b")).unwrap();
        assert_eq!(b.matrix.iter().collect::<Vec<_>>(), vec![(0, 1)]);
        assert!(n.is_deterministic());
    }

    #[test]
    fn a_star_single_state() {
        let n = nfa("a*");
        assert_eq!(n.nstates(), 1);
        assert_eq!(n.start_states(), n.final_states());
    }

    #[test]
    fn unknown_label_is_unbound() {
        let n = nfa("a x");
        assert_eq!(n.transition(&Symbol::forward("x")).unwrap().label, None);
        assert_eq!(n.transition(&Symbol::forward("a")).unwrap().label, Some(0));
    }

    #[test]
    fn membership() {
        let n = nfa("a*b");
        assert!(n.accepts(&w("b")));
        assert!(n.accepts(&w("a a b")));
        assert!(!n.accepts(&w("")));
        assert!(!n.accepts(&w("b a")));
        assert!(!n.accepts(&w("^b")));
        assert!(nfa("a*").accepts(&w("")));
    }

    #[test]
    fn reverse_single_symbol() {
        let r = nfa("b").reverse();
        assert!(r.accepts(&w("^b")));
        assert!(!r.accepts(&w("b")));
        assert!(!r.accepts(&w("")));
    }

    #[test]
    fn reverse_concat() {
        let n = nfa("a b");
        let r = n.reverse();
        assert!(r.accepts(&w("^b ^a")));
        for word in ["a b", "^a ^b", "b a", "^b", ""] {
            assert!(!r.accepts(&w(word)), "{word}");
        }
        let rr = r.reverse();
        assert_eq!(rr, n);
    }

    #[test]
    fn reverse_is_structural() {
        let n = nfa("(a ^b)* b | a+");
        let r = n.reverse();
        assert_eq!(r.start_states(), n.final_states());
        assert_eq!(r.final_states(), n.start_states());
        for t in n.transitions() {
            let rt = r.transition(&t.symbol.flipped()).unwrap();
            assert_eq!(rt.matrix, t.matrix.transpose());
            assert_eq!(rt.label, t.label);
        }
    }

    #[test]
    fn constructor_validates() {
        let t = Transition {
            symbol: Symbol::forward("a"),
            label: None,
            matrix: SparseBoolMatrix::zero(2, 2),
        };
        assert!(matches!(
            TwoNfa::new(3, vec![t.clone()], &[0], &[0]),
            Err(AutomatonError::BadTransition { .. })
        ));
        assert!(matches!(
            TwoNfa::new(2, vec![t.clone(), t.clone()], &[0], &[0]),
            Err(AutomatonError::DuplicateSymbol(_))
        ));
        assert!(matches!(
            TwoNfa::new(2, vec![t], &[5], &[0]),
            Err(AutomatonError::StateOutOfRange { state: 5, .. })
        ));
    }
}
