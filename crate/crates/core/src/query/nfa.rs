//! Thompson construction. The only place ε-moves exist.

use super::ast::{RegexAst, Symbol};

#[derive(Debug, Clone)]
pub(crate) struct EpsilonNfa {
    pub alphabet: Vec<Symbol>,
    pub start: usize,
    pub accept: usize,
    pub epsilon: Vec<Vec<usize>>,
    /// `(symbol id, target)` per state.
    pub moves: Vec<Vec<(usize, usize)>>,
}

impl EpsilonNfa {
    pub fn build(ast: &RegexAst) -> Self {
        let mut nfa = EpsilonNfa {
            alphabet: ast.symbols(),
            start: 0,
            accept: 0,
            epsilon: Vec::new(),
            moves: Vec::new(),
        };
        let (start, accept) = nfa.fragment(ast);
        nfa.start = start;
        nfa.accept = accept;
        nfa
    }

    pub fn nstates(&self) -> usize {
        self.epsilon.len()
    }

    fn state(&mut self) -> usize {
        self.epsilon.push(Vec::new());
        self.moves.push(Vec::new());
        self.epsilon.len() - 1
    }

    fn fragment(&mut self, node: &RegexAst) -> (usize, usize) {
        match node {
            RegexAst::Label(sym) => {
                let id = self
                    .alphabet
                    .binary_search(sym)
                    .expect("alphabet collected from the same tree");
                let (s, t) = (self.state(), self.state());
                self.moves[s].push((id, t));
                (s, t)
            }
            RegexAst::Concat(children) => {
                let mut frags = children
                    .iter()
                    .map(|c| self.fragment(c))
                    .collect::<Vec<_>>()
                    .into_iter();
                let (start, mut end) = frags.next().expect("concatenation has children");
                for (s, t) in frags {
                    self.epsilon[end].push(s);
                    end = t;
                }
                (start, end)
            }
            RegexAst::Alt(children) => {
                let (s, t) = (self.state(), self.state());
                for c in children {
                    let (cs, ct) = self.fragment(c);
                    self.epsilon[s].push(cs);
                    self.epsilon[ct].push(t);
                }
                (s, t)
            }
            RegexAst::Star(child) => {
                let (s, t) = (self.state(), self.state());
                let (cs, ct) = self.fragment(child);
                self.epsilon[s].extend([cs, t]);
                self.epsilon[ct].extend([cs, t]);
                (s, t)
            }
            // x+ = x x*
            RegexAst::Plus(child) => {
                let once = (**child).clone();
                self.fragment(&RegexAst::Concat(vec![once, RegexAst::star((**child).clone())]))
            }
            RegexAst::Opt(child) => {
                let (s, t) = (self.state(), self.state());
                let (cs, ct) = self.fragment(child);
                self.epsilon[s].extend([cs, t]);
                self.epsilon[ct].push(t);
                (s, t)
            }
        }
    }

    /// ε-closure of `states`, returned sorted.
    pub fn closure(&self, states: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut seen = vec![false; self.nstates()];
        let mut stack: Vec<usize> = Vec::new();
        for s in states {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for &t in &self.epsilon[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen.iter().enumerate().filter_map(|(s, &v)| v.then_some(s)).collect()
    }
}
