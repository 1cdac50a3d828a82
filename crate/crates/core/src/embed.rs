//! Embeddings of a pattern into a host, and their verification.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{GraphError, HostGraph, PatternGraph};
use crate::oracle::{EdgeOracle, HostId, OracleConfig};
use crate::structure::ExactLimits;

/// Injective map from pattern vertices to host vertices; `map[v]` is the
/// image of pattern vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub map: Vec<HostId>,
}

impl Embedding {
    pub fn new(map: Vec<HostId>) -> Self {
        Embedding { map }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = self.map.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

/// True iff `phi` is total, injective, and every pattern edge lands on a pair
/// the oracle has already revealed as an edge. Issues no queries.
pub fn validate_embedding(h: &PatternGraph, phi: &Embedding, oracle: &EdgeOracle) -> bool {
    phi.map.len() == h.n()
        && phi.is_injective()
        && h.edges()
            .iter()
            .all(|&(u, v)| oracle.peek(phi.map[u], phi.map[v]) == Some(true))
}

/// Re-checks an embedding against the keyed hash alone, with no memo: used
/// to re-validate stored results.
pub fn validate_against_hash(h: &PatternGraph, phi: &Embedding, config: &OracleConfig) -> bool {
    phi.map.len() == h.n()
        && phi.is_injective()
        && h.edges()
            .iter()
            .all(|&(u, v)| config.outcome(phi.map[u], phi.map[v]))
}

/// Backtracking search over all injections of `h` into an explicit host of at
/// most 40 vertices.
pub fn brute_force_subgraph_search(
    host: &HostGraph,
    h: &PatternGraph,
) -> Result<Option<Embedding>, GraphError> {
    brute_force_with_limit(host, h, ExactLimits::default().host)
}

pub fn brute_force_with_limit(
    host: &HostGraph,
    h: &PatternGraph,
    limit: usize,
) -> Result<Option<Embedding>, GraphError> {
    if host.n() > limit {
        return Err(GraphError::SizeLimit {
            what: "host",
            size: host.n(),
            limit,
        });
    }
    if h.n() > host.n() {
        return Ok(None);
    }
    let mut map = vec![usize::MAX; h.n()];
    let mut used = vec![false; host.n()];
    if extend(host, h, 0, &mut map, &mut used) {
        Ok(Some(Embedding::new(
            map.into_iter().map(|x| x as HostId).collect(),
        )))
    } else {
        Ok(None)
    }
}

fn extend(
    host: &HostGraph,
    h: &PatternGraph,
    v: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if v == h.n() {
        return true;
    }
    for x in 0..host.n() {
        if used[x] {
            continue;
        }
        let fits = h
            .neighbors(v)
            .iter()
            .filter(|&&w| w < v)
            .all(|&w| host.has_edge(map[w], x));
        if !fits {
            continue;
        }
        map[v] = x;
        used[x] = true;
        if extend(host, h, v + 1, map, used) {
            return true;
        }
        used[x] = false;
    }
    map[v] = usize::MAX;
    false
}
