//! Two-way regular path queries over edge-labelled graphs, evaluated as
//! sparse Boolean linear algebra.
//!
//! A query binds one endpoint (single source or single destination) and
//! constrains paths by a regular pattern over labels and inverse labels.
//! The pattern is compiled to a minimal DFA; evaluation then walks the
//! graph and the automaton together with Boolean matrix products.
//!
//! ```
//! use rpq_core::{EngineOptions, LabeledGraph, Mode, Query};
//!
//! let g = LabeledGraph::load_str("3\ta\t4\n4\ta\t3\n3\tb\t5\n").unwrap();
//! let q = Query::parse("a* b", &g).unwrap();
//! let source = g.vertex_index("3").unwrap();
//! let r = q.evaluate(&g, Mode::Ssr, source, &EngineOptions::default()).unwrap();
//! assert_eq!(r.reachable, vec![g.vertex_index("5").unwrap()]);
//! ```

pub mod bench;
pub mod engine;
pub mod generator;
pub mod graph_store;
pub mod oracle;
pub mod query;
pub mod sparse_bool;

pub use engine::{
    eval_plan, eval_sdr, eval_ssr, eval_ssr_hybrid, eval_ssr_masked, eval_ssr_no_mask, plan_matrix, step_update,
    Algorithm, EngineOptions, EvalError, EvalResult, EvalState, Mode, ProductOrder, Query,
};
pub use graph_store::{GraphError, LabeledGraph};
pub use query::{compile, parse_query, Dfa, ParseError, RegexAst, Symbol, TwoNfa};
pub use sparse_bool::{MatrixError, SparseBoolMatrix};
