//! Vertex-by-vertex construction along an ordering.

use alloc::format;
use alloc::vec::Vec;

use super::{
    amplify, find_common_neighbors, Attempt, Phases, StrategyError, StrategyOutcome, StrategyParams,
};
use crate::embed::Embedding;
use crate::fmath;
use crate::graph::PatternGraph;
use crate::oracle::{EdgeOracle, HostId};
use crate::structure::DegeneracyOrdering;

pub(crate) fn checked_ordering(
    h: &PatternGraph,
    ordering: &DegeneracyOrdering,
) -> Result<DegeneracyOrdering, StrategyError> {
    DegeneracyOrdering::from_order(h, ordering.order.clone())
        .map_err(|e| StrategyError::InvalidInput(format!("{e}")))
}

/// Embeds the vertices in order. A vertex with embedded left-neighbors gets
/// the first fresh common neighbor of their images, searching at most
/// `pool_multiplier · b^deg` candidates; one without gets a fresh vertex.
pub fn run_trivial(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    ordering: &DegeneracyOrdering,
    params: &StrategyParams,
) -> Result<StrategyOutcome, StrategyError> {
    params.validate()?;
    let ordering = checked_ordering(h, ordering)?;
    amplify(oracle, h, params.max_restarts, params.budget, |o, ph| {
        attempt_trivial(o, h, &ordering, params, ph)
    })
}

/// One attempt of [`run_trivial`], charging all queries to `build`.
pub fn attempt_trivial(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    ordering: &DegeneracyOrdering,
    params: &StrategyParams,
    phases: &mut Phases,
) -> Result<Attempt, StrategyError> {
    phases.track("build", oracle, |o| build_in_order(o, h, ordering, params))
}

pub(crate) fn build_in_order(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    ordering: &DegeneracyOrdering,
    params: &StrategyParams,
) -> Result<Attempt, StrategyError> {
    let b = oracle.b();
    let pos = ordering.positions();
    let mut map: Vec<HostId> = alloc::vec![0; h.n()];
    for (i, &v) in ordering.order.iter().enumerate() {
        let anchors: Vec<HostId> = h
            .neighbors(v)
            .iter()
            .filter(|&&w| pos[w] < i)
            .map(|&w| map[w])
            .collect();
        map[v] = if anchors.is_empty() {
            oracle.fresh_vertex()?
        } else {
            let budget = fmath::ceil_count(
                params.pool_multiplier * fmath::powi(b, anchors.len() as u32),
                1,
            );
            match find_common_neighbors(oracle, &anchors, 1, budget)?.first() {
                Some(&w) => w,
                None => return Ok(Err(format!("vertex {v}"))),
            }
        };
    }
    Ok(Ok(Embedding::new(map)))
}
