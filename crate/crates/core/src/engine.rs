//! Single-source and single-destination 2-RPQ evaluation.
//!
//! The automaton evaluators keep a `|Q| x |V|` relation between automaton
//! states and graph vertices and extend it one symbol at a time:
//!
//! ```text
//! M ← (⊕_a (N^a)^T ⊗ M ⊗ G^a)⟨¬P⟩     masked: M is the fresh frontier
//! P ← P ⊕ M
//! ```
//!
//! or, without a separate frontier, `P ← P ⊕ ⊕_a (N^a)^T ⊗ P ⊗ G^a` until
//! `P` stops growing. The hybrid evaluator runs the second form while `P`
//! is small and switches to the first once `nnz(P)` passes a threshold.
//! The answer is the row vector `F ⊗ P`.
//!
//! Single-destination queries run the single-source evaluators over the
//! reversed automaton. [`eval_plan`] is an independent baseline that maps
//! every node of the pattern tree to a matrix expression.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph_store::{GraphError, LabeledGraph};
use crate::query::{compile, parse_query, ParseError, RegexAst, TwoNfa};
use crate::sparse_bool::{MatrixError, SparseBoolMatrix};

pub const DEFAULT_SWITCH_THRESHOLD: usize = 100;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Masked,
    NoMask,
    Hybrid,
    Plan,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Masked, Algorithm::NoMask, Algorithm::Hybrid, Algorithm::Plan];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Masked => "masked",
            Algorithm::NoMask => "no_mask",
            Algorithm::Hybrid => "hybrid",
            Algorithm::Plan => "plan",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "masked" => Ok(Algorithm::Masked),
            "no_mask" | "no-mask" => Ok(Algorithm::NoMask),
            "hybrid" => Ok(Algorithm::Hybrid),
            "plan" => Ok(Algorithm::Plan),
            other => Err(format!(
                "unknown algorithm '{other}' (expected masked, no_mask, hybrid or plan)"
            )),
        }
    }
}

/// Association of the per-symbol product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProductOrder {
    /// `((N^a)^T ⊗ M) ⊗ G^a`
    #[default]
    Left,
    /// `(N^a)^T ⊗ (M ⊗ G^a)`
    Right,
}

impl FromStr for ProductOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(ProductOrder::Left),
            "right" => Ok(ProductOrder::Right),
            other => Err(format!("unknown product order '{other}' (expected left or right)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Single source: the bound vertex is where paths start.
    Ssr,
    /// Single destination: the bound vertex is where paths end.
    Sdr,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Ssr => "ssr",
            Mode::Sdr => "sdr",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ssr" => Ok(Mode::Ssr),
            "sdr" => Ok(Mode::Sdr),
            other => Err(format!("unknown mode '{other}' (expected ssr or sdr)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EngineOptions {
    pub algorithm: Algorithm,
    /// Hybrid switches to the masked iteration once `nnz(P)` exceeds this.
    pub switch_threshold: usize,
    pub product_order: ProductOrder,
    /// Checked between iterations. `None` disables the check.
    pub timeout: Option<Duration>,
    /// Verify frontier/visited disjointness, monotone growth, the
    /// `|Q|·|V|` iteration bound and fixpoint-on-exit at every step.
    pub check_invariants: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Hybrid,
            switch_threshold: DEFAULT_SWITCH_THRESHOLD,
            product_order: ProductOrder::Left,
            timeout: Some(DEFAULT_TIMEOUT),
            check_invariants: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("timed out after {iterations} iterations ({elapsed:?})")]
    Timeout { elapsed: Duration, iterations: usize },
    #[error("vertex index {index} out of range (|V| = {count})")]
    VertexOutOfRange { index: usize, count: usize },
    #[error("plan evaluation needs the pattern tree, not a compiled automaton")]
    PlanNeedsPattern,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalResult {
    /// Sorted vertex indices.
    pub reachable: Vec<usize>,
    pub iterations: usize,
    pub elapsed: Duration,
    pub algorithm: Algorithm,
}

/// Matrices of one automaton evaluation.
#[derive(Debug, Clone)]
pub struct EvalState {
    /// `M`, `|Q| x |V|`: pairs reached for the first time at the last step.
    pub frontier: SparseBoolMatrix,
    /// `P`, `|Q| x |V|`: every pair reached so far.
    pub visited: SparseBoolMatrix,
    /// `F`, `1 x |Q|`.
    pub finals: SparseBoolMatrix,
    pub iterations: usize,
}

impl EvalState {
    /// `M = P = {(q_s, source)}`.
    ///
    /// `P` starts with the seed so that zero-length paths are answers when
    /// the start state is final.
    fn seed(n: &TwoNfa, nvertices: usize, source: usize) -> Self {
        let seed =
            SparseBoolMatrix::from_entries(n.nstates(), nvertices, n.start_states().iter().map(|&q| (q, source)))
                .expect("source checked against |V|");
        Self {
            frontier: seed.clone(),
            visited: seed,
            finals: n.finals().clone(),
            iterations: 0,
        }
    }

    /// Column indices of `F ⊗ P`.
    fn answer(&self) -> Result<Vec<usize>, MatrixError> {
        Ok(self.finals.bool_matmul(&self.visited)?.row(0).to_vec())
    }
}

/// `((N^a)^T, G^a)` for every symbol present in both the automaton and the graph.
struct Operands<'g> {
    pairs: Vec<(SparseBoolMatrix, &'g SparseBoolMatrix)>,
    order: ProductOrder,
    nstates: usize,
    nvertices: usize,
}

impl<'g> Operands<'g> {
    fn new(g: &'g LabeledGraph, n: &TwoNfa, order: ProductOrder) -> Result<Self, EvalError> {
        let mut pairs = Vec::new();
        for t in n.transitions() {
            if let Some(label) = t.label {
                let adj = g.adjacency(label, t.symbol.inverted)?;
                pairs.push((t.matrix.transpose(), adj));
            }
        }
        Ok(Self {
            pairs,
            order,
            nstates: n.nstates(),
            nvertices: g.vertex_count(),
        })
    }

    /// `⊕_a (N^a)^T ⊗ x ⊗ G^a`
    fn advance(&self, x: &SparseBoolMatrix) -> Result<SparseBoolMatrix, MatrixError> {
        let mut acc = SparseBoolMatrix::zero(self.nstates, self.nvertices);
        if x.is_zero() {
            return Ok(acc);
        }
        for (nt, adj) in &self.pairs {
            let product = match self.order {
                ProductOrder::Left => nt.bool_matmul(x)?.bool_matmul(adj)?,
                ProductOrder::Right => nt.bool_matmul(&x.bool_matmul(adj)?)?,
            };
            acc = acc.or_sum(&product)?;
        }
        Ok(acc)
    }
}

/// One masked update: `(⊕_a (N^a)^T ⊗ m ⊗ G^a)⟨¬p⟩`.
///
/// Symbols whose label does not occur in the graph contribute nothing.
pub fn step_update(
    m: &SparseBoolMatrix,
    p: &SparseBoolMatrix,
    g: &LabeledGraph,
    n: &TwoNfa,
    opts: &EngineOptions,
) -> Result<SparseBoolMatrix, EvalError> {
    let ops = Operands::new(g, n, opts.product_order)?;
    let expected = (n.nstates(), g.vertex_count());
    for x in [m, p] {
        if x.shape() != expected {
            return Err(MatrixError::DimensionMismatch {
                op: "step_update",
                left: x.shape(),
                right: expected,
            }
            .into());
        }
    }
    Ok(ops.advance(m)?.mask_complement(p)?)
}

struct Clock {
    started: Instant,
    timeout: Option<Duration>,
}

impl Clock {
    fn start(opts: &EngineOptions) -> Self {
        Self {
            started: Instant::now(),
            timeout: opts.timeout,
        }
    }

    fn check(&self, iterations: usize) -> Result<(), EvalError> {
        let elapsed = self.started.elapsed();
        match self.timeout {
            Some(limit) if elapsed >= limit => Err(EvalError::Timeout { elapsed, iterations }),
            _ => Ok(()),
        }
    }

    fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }
}

fn violation(msg: String) -> EvalError {
    EvalError::InvariantViolation(msg)
}

fn check_source(g: &LabeledGraph, source: usize) -> Result<(), EvalError> {
    if source >= g.vertex_count() {
        return Err(EvalError::VertexOutOfRange {
            index: source,
            count: g.vertex_count(),
        });
    }
    Ok(())
}

/// Runs the masked iteration from the state's current frontier until it is empty.
fn run_masked(state: &mut EvalState, ops: &Operands<'_>, clock: &Clock, opts: &EngineOptions) -> Result<(), EvalError> {
    let bound = ops.nstates * ops.nvertices;
    while !state.frontier.is_zero() {
        clock.check(state.iterations)?;
        let next = ops.advance(&state.frontier)?.mask_complement(&state.visited)?;
        if opts.check_invariants && !next.mask(&state.visited)?.is_zero() {
            return Err(violation(format!(
                "frontier intersects visited at iteration {}",
                state.iterations + 1
            )));
        }
        let before = state.visited.nnz();
        state.visited = state.visited.or_sum(&next)?;
        state.frontier = next;
        state.iterations += 1;
        if opts.check_invariants {
            if state.visited.nnz() != before + state.frontier.nnz() {
                return Err(violation("visited did not grow by the frontier".into()));
            }
            if state.iterations > bound {
                return Err(violation(format!(
                    "{} iterations exceed |Q||V| = {bound}",
                    state.iterations
                )));
            }
        }
    }
    if opts.check_invariants && !ops.advance(&state.visited)?.mask_complement(&state.visited)?.is_zero() {
        return Err(violation("masked loop stopped before reaching the fixpoint".into()));
    }
    Ok(())
}

/// One mask-free step; returns whether `P` grew.
fn no_mask_step(state: &mut EvalState, ops: &Operands<'_>, opts: &EngineOptions) -> Result<bool, EvalError> {
    let next = state.visited.or_sum(&ops.advance(&state.visited)?)?;
    state.iterations += 1;
    if opts.check_invariants {
        if !state.visited.mask_complement(&next)?.is_zero() {
            return Err(violation("visited shrank".into()));
        }
        if state.iterations > ops.nstates * ops.nvertices {
            return Err(violation(format!(
                "{} iterations exceed |Q||V| = {}",
                state.iterations,
                ops.nstates * ops.nvertices
            )));
        }
    }
    // P only grows, so equal counts mean equal matrices.
    if next.nnz() == state.visited.nnz() {
        return Ok(false);
    }
    state.frontier = next.mask_complement(&state.visited)?;
    state.visited = next;
    Ok(true)
}

fn finish(state: &EvalState, clock: &Clock, algorithm: Algorithm) -> Result<EvalResult, EvalError> {
    Ok(EvalResult {
        reachable: state.answer()?,
        iterations: state.iterations,
        elapsed: clock.elapsed(),
        algorithm,
    })
}

/// Frontier-based evaluation with the complemented visited mask.
pub fn eval_ssr_masked(
    g: &LabeledGraph,
    n: &TwoNfa,
    source: usize,
    opts: &EngineOptions,
) -> Result<EvalResult, EvalError> {
    check_source(g, source)?;
    let clock = Clock::start(opts);
    let ops = Operands::new(g, n, opts.product_order)?;
    let mut state = EvalState::seed(n, g.vertex_count(), source);
    run_masked(&mut state, &ops, &clock, opts)?;
    finish(&state, &clock, Algorithm::Masked)
}

/// Fixpoint evaluation over `P` alone, with no frontier matrix.
pub fn eval_ssr_no_mask(
    g: &LabeledGraph,
    n: &TwoNfa,
    source: usize,
    opts: &EngineOptions,
) -> Result<EvalResult, EvalError> {
    check_source(g, source)?;
    let clock = Clock::start(opts);
    let ops = Operands::new(g, n, opts.product_order)?;
    let mut state = EvalState::seed(n, g.vertex_count(), source);
    loop {
        clock.check(state.iterations)?;
        if !no_mask_step(&mut state, &ops, opts)? {
            break;
        }
    }
    finish(&state, &clock, Algorithm::NoMask)
}

/// Mask-free steps until `nnz(P) > opts.switch_threshold`, masked steps after.
pub fn eval_ssr_hybrid(
    g: &LabeledGraph,
    n: &TwoNfa,
    source: usize,
    opts: &EngineOptions,
) -> Result<EvalResult, EvalError> {
    check_source(g, source)?;
    let clock = Clock::start(opts);
    let ops = Operands::new(g, n, opts.product_order)?;
    let mut state = EvalState::seed(n, g.vertex_count(), source);
    loop {
        clock.check(state.iterations)?;
        if !no_mask_step(&mut state, &ops, opts)? {
            return finish(&state, &clock, Algorithm::Hybrid);
        }
        if state.visited.nnz() > opts.switch_threshold {
            break;
        }
    }
    // The frontier left by the last mask-free step is exactly what is new in P.
    run_masked(&mut state, &ops, &clock, opts)?;
    finish(&state, &clock, Algorithm::Hybrid)
}

/// Dispatches on `opts.algorithm`.
pub fn eval_ssr(g: &LabeledGraph, n: &TwoNfa, source: usize, opts: &EngineOptions) -> Result<EvalResult, EvalError> {
    match opts.algorithm {
        Algorithm::Masked => eval_ssr_masked(g, n, source, opts),
        Algorithm::NoMask => eval_ssr_no_mask(g, n, source, opts),
        Algorithm::Hybrid => eval_ssr_hybrid(g, n, source, opts),
        Algorithm::Plan => Err(EvalError::PlanNeedsPattern),
    }
}

/// Single-destination evaluation: single-source over the reversed automaton.
pub fn eval_sdr(
    g: &LabeledGraph,
    n: &TwoNfa,
    target: usize,
    opts: &EngineOptions,
    algorithm: Algorithm,
) -> Result<EvalResult, EvalError> {
    let reversed = n.reverse();
    let opts = EngineOptions {
        algorithm,
        ..opts.clone()
    };
    eval_ssr(g, &reversed, target, &opts)
}

struct Planner<'g> {
    g: &'g LabeledGraph,
    clock: Clock,
    iterations: usize,
}

impl<'g> Planner<'g> {
    fn tick(&mut self) -> Result<(), EvalError> {
        self.clock.check(self.iterations)?;
        self.iterations += 1;
        Ok(())
    }

    fn leaf(&self, node: &RegexAst) -> Result<Option<&'g SparseBoolMatrix>, EvalError> {
        let RegexAst::Label(sym) = node else {
            return Ok(None);
        };
        match self.g.label_index(&sym.label) {
            Some(l) => Ok(Some(self.g.adjacency(l, sym.inverted)?)),
            None => Ok(None),
        }
    }

    fn zero_square(&self) -> SparseBoolMatrix {
        let n = self.g.vertex_count();
        SparseBoolMatrix::zero(n, n)
    }

    /// The full `|V| x |V|` relation of `node`.
    fn matrix(&mut self, node: &RegexAst) -> Result<Cow<'g, SparseBoolMatrix>, EvalError> {
        let n = self.g.vertex_count();
        Ok(match node {
            RegexAst::Label(_) => match self.leaf(node)? {
                Some(adj) => Cow::Borrowed(adj),
                None => Cow::Owned(self.zero_square()),
            },
            RegexAst::Concat(children) => {
                let mut acc = self.matrix(&children[0])?;
                for c in &children[1..] {
                    let rhs = self.matrix(c)?;
                    acc = Cow::Owned(acc.bool_matmul(&rhs)?);
                }
                acc
            }
            RegexAst::Alt(children) => {
                let mut acc = self.matrix(&children[0])?;
                for c in &children[1..] {
                    let rhs = self.matrix(c)?;
                    acc = Cow::Owned(acc.or_sum(&rhs)?);
                }
                acc
            }
            RegexAst::Star(child) => {
                let c = self.matrix(child)?;
                Cow::Owned(self.closure(&c)?.or_sum(&SparseBoolMatrix::identity(n))?)
            }
            RegexAst::Plus(child) => {
                let c = self.matrix(child)?;
                Cow::Owned(self.closure(&c)?)
            }
            RegexAst::Opt(child) => {
                let c = self.matrix(child)?;
                Cow::Owned(c.or_sum(&SparseBoolMatrix::identity(n))?)
            }
        })
    }

    /// Transitive closure `A ⊕ A² ⊕ ...` by repeated squaring.
    fn closure(&mut self, a: &SparseBoolMatrix) -> Result<SparseBoolMatrix, EvalError> {
        let mut r = a.clone();
        loop {
            self.tick()?;
            let next = r.or_sum(&r.bool_matmul(&r)?)?;
            if next.nnz() == r.nnz() {
                return Ok(r);
            }
            r = next;
        }
    }

    /// Vertices reachable from the row vector `v` through `node`.
    fn propagate(&mut self, node: &RegexAst, v: &SparseBoolMatrix) -> Result<SparseBoolMatrix, EvalError> {
        Ok(match node {
            RegexAst::Label(_) => match self.leaf(node)? {
                Some(adj) => v.bool_matmul(adj)?,
                None => SparseBoolMatrix::zero(1, self.g.vertex_count()),
            },
            RegexAst::Concat(children) => {
                let mut acc = v.clone();
                for c in children {
                    if acc.is_zero() {
                        break;
                    }
                    acc = self.propagate(c, &acc)?;
                }
                acc
            }
            RegexAst::Alt(children) => {
                let mut acc = SparseBoolMatrix::zero(1, self.g.vertex_count());
                for c in children {
                    acc = acc.or_sum(&self.propagate(c, v)?)?;
                }
                acc
            }
            RegexAst::Opt(child) => v.or_sum(&self.propagate(child, v)?)?,
            RegexAst::Star(child) => {
                let c = self.matrix(child)?;
                self.reach(v.clone(), &c)?
            }
            RegexAst::Plus(child) => {
                let c = self.matrix(child)?;
                let first = v.bool_matmul(&c)?;
                self.reach(first, &c)?
            }
        })
    }

    /// `start ⊕ start⊗C ⊕ start⊗C² ⊕ ...` without materializing the closure of `C`.
    fn reach(&mut self, start: SparseBoolMatrix, c: &SparseBoolMatrix) -> Result<SparseBoolMatrix, EvalError> {
        let mut acc = start.clone();
        let mut front = start;
        while !front.is_zero() {
            self.tick()?;
            front = front.bool_matmul(c)?.mask_complement(&acc)?;
            acc = acc.or_sum(&front)?;
        }
        Ok(acc)
    }
}

/// Bottom-up matrix evaluation of the pattern tree, restricted to the bound endpoint.
///
/// Concatenation chains, alternations and optional parts are applied to a
/// `1 x |V|` vector starting at the bound vertex. A closure node
/// materializes its operand's matrix and then iterates the vector against
/// it. Single-destination queries evaluate the reversed pattern from the
/// destination, which is the column-vector evaluation transposed.
pub fn eval_plan(
    g: &LabeledGraph,
    ast: &RegexAst,
    mode: Mode,
    vertex: usize,
    opts: &EngineOptions,
) -> Result<EvalResult, EvalError> {
    check_source(g, vertex)?;
    let mut planner = Planner {
        g,
        clock: Clock::start(opts),
        iterations: 0,
    };
    let reversed;
    let ast = match mode {
        Mode::Ssr => ast,
        Mode::Sdr => {
            reversed = ast.reversed();
            &reversed
        }
    };
    let start = SparseBoolMatrix::row_vector(g.vertex_count(), [vertex])?;
    let out = planner.propagate(ast, &start)?;
    Ok(EvalResult {
        reachable: out.row(0).to_vec(),
        iterations: planner.iterations,
        elapsed: planner.clock.elapsed(),
        algorithm: Algorithm::Plan,
    })
}

/// The full all-pairs relation of `ast` over `g`: `(u, v)` is set iff some
/// 2-path from `u` to `v` spells a word of the pattern.
pub fn plan_matrix(g: &LabeledGraph, ast: &RegexAst, opts: &EngineOptions) -> Result<SparseBoolMatrix, EvalError> {
    let mut planner = Planner {
        g,
        clock: Clock::start(opts),
        iterations: 0,
    };
    Ok(planner.matrix(ast)?.into_owned())
}

/// A pattern compiled against one graph, with its reversed automaton cached.
#[derive(Debug, Clone)]
pub struct Query {
    pub ast: RegexAst,
    pub nfa: TwoNfa,
    reversed: TwoNfa,
}

impl Query {
    pub fn from_ast(ast: RegexAst, g: &LabeledGraph) -> Self {
        let nfa = compile(&ast, g.labels());
        let reversed = nfa.reverse();
        Self { ast, nfa, reversed }
    }

    pub fn parse(text: &str, g: &LabeledGraph) -> Result<Self, ParseError> {
        Ok(Self::from_ast(parse_query(text)?, g))
    }

    pub fn reversed(&self) -> &TwoNfa {
        &self.reversed
    }

    /// Evaluates with `opts.algorithm` in the given mode.
    pub fn evaluate(
        &self,
        g: &LabeledGraph,
        mode: Mode,
        vertex: usize,
        opts: &EngineOptions,
    ) -> Result<EvalResult, EvalError> {
        match (opts.algorithm, mode) {
            (Algorithm::Plan, _) => eval_plan(g, &self.ast, mode, vertex, opts),
            (_, Mode::Ssr) => eval_ssr(g, &self.nfa, vertex, opts),
            (_, Mode::Sdr) => eval_ssr(g, &self.reversed, vertex, opts),
        }
    }
}
