//! Adaptive subgraph queries against lazily revealed random graphs.
//!
//! The crate is split along the lines of the problem:
//!
//! * [`graph`], [`structure`], [`embed`]: pattern graphs, their degeneracy
//!   orderings, depth and tree partitions, plus brute-force checkers.
//! * [`oracle`]: a seeded, memoized adjacency oracle over `G(∞, p)` or
//!   `G(n, p)` with exact accounting of distinct queries.
//! * [`strategies`]: the query strategies (vertex-by-vertex, book, triforce,
//!   cloud, tree layers) and the amplification wrapper.
//! * [`clique`]: weight functions over query transcripts on `G(n, 1/2)` and
//!   the resulting clique-size bounds.
//!
//! Everything here is `no_std` + `alloc`; file IO, the CLI and the Monte
//! Carlo driver live in the `subquery-lab` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod clique;
pub mod codegree;
pub mod embed;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod strategies;
pub mod structure;

mod fmath;

pub use embed::{brute_force_subgraph_search, validate_embedding, Embedding};
pub use graph::{builtin_graph, parse_graph, GraphError, HostGraph, PatternGraph};
pub use oracle::{EdgeOracle, OracleConfig, OracleError, OracleMode};
pub use strategies::{StrategyOutcome, StrategyParams};
pub use structure::{
    degeneracy_order, depth_orientation, find_tree_partition, DegeneracyOrdering, TreePartition,
};
