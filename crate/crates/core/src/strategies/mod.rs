//! Query strategies for finding a copy of a pattern in `G(∞, p)`.
//!
//! Every strategy is a single attempt that either returns an embedding or
//! names the stage that fell short; [`amplify`] repeats attempts on disjoint
//! regions of the host until one succeeds. Wherever an algorithm queries a
//! block of pairs and then keeps the first qualifying vertices in allocation
//! order, the block is evaluated lazily: queries stop as soon as the kept
//! set is determined, which changes only the count, never the choice.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::embed::{validate_embedding, Embedding};
use crate::fmath;
use crate::graph::PatternGraph;
use crate::oracle::{EdgeOracle, HostId, OracleError};

mod book;
mod cloud;
mod tree_layers;
mod triforce;
mod trivial;

pub use book::{attempt_book, max_pages, run_book};
pub use cloud::{attempt_cloud, run_cloud, run_cloud_audited, CloudAudit};
pub use tree_layers::{attempt_tree_layers, run_tree_layers};
pub use triforce::{attempt_triforce, run_triforce};
pub use trivial::{attempt_trivial, run_trivial};

/// Names accepted on the command line and in config files.
pub const STRATEGY_NAMES: [&str; 5] = ["trivial", "book", "triforce", "cloud", "tree-layers"];

/// Tunables standing in for the unspecified constants of the algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrategyParams {
    /// Lower clamp for every `ℓ`-type quantity.
    pub ell_floor: f64,
    /// Scale of candidate pools and per-vertex search budgets.
    pub pool_multiplier: f64,
    /// Multiplier on the initial cloud sizes `b^d / ℓ_i`.
    pub cloud_scale: f64,
    /// Attempts allowed by [`amplify`].
    pub max_restarts: u32,
    /// Distinct queries allowed per attempt; `0` leaves only the
    /// algorithm's own phase limits.
    pub budget: u64,
}

impl Default for StrategyParams {
    fn default() -> Self {
        StrategyParams {
            ell_floor: 1.0,
            pool_multiplier: 4.0,
            cloud_scale: 1.0,
            max_restarts: 64,
            budget: 0,
        }
    }
}

impl StrategyParams {
    pub fn validate(&self) -> Result<(), StrategyError> {
        if !(self.ell_floor >= 1.0) {
            return Err(StrategyError::InvalidParams(format!(
                "ell_floor must be >= 1, got {}",
                self.ell_floor
            )));
        }
        if !(self.pool_multiplier > 0.0) {
            return Err(StrategyError::InvalidParams(format!(
                "pool_multiplier must be > 0, got {}",
                self.pool_multiplier
            )));
        }
        if !(self.cloud_scale > 0.0) {
            return Err(StrategyError::InvalidParams(format!(
                "cloud_scale must be > 0, got {}",
                self.cloud_scale
            )));
        }
        if self.max_restarts == 0 {
            return Err(StrategyError::InvalidParams(
                "max_restarts must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StrategyError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid strategy parameters: {0}")]
    InvalidParams(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("attempt returned an embedding that does not validate")]
    Unsound,
}

/// Per-phase query tally, in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Phases {
    pub entries: Vec<(String, u64)>,
    /// Set when any size was lifted to its floor because the asymptotic
    /// formula was below it.
    pub clamped: bool,
}

impl Phases {
    pub fn add(&mut self, label: &str, queries: u64) {
        match self.entries.iter_mut().find(|(l, _)| l == label) {
            Some((_, q)) => *q += queries,
            None => self.entries.push((label.into(), queries)),
        }
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, q)| q).sum()
    }

    /// Runs `f`, charging the oracle's count delta to `label`.
    pub fn track<T>(
        &mut self,
        label: &str,
        oracle: &mut EdgeOracle,
        f: impl FnOnce(&mut EdgeOracle) -> T,
    ) -> T {
        let before = oracle.query_count();
        let out = f(oracle);
        self.add(label, oracle.query_count() - before);
        out
    }

    fn merge(&mut self, other: Phases) {
        for (l, q) in other.entries {
            self.add(&l, q);
        }
        self.clamped |= other.clamped;
    }
}

/// Result of one attempt: an embedding, or the stage that fell short.
pub type Attempt = Result<Embedding, String>;

/// Turns budget exhaustion into an ordinary attempt failure.
pub(crate) fn budget_to_failure(
    r: Result<Attempt, StrategyError>,
) -> Result<Attempt, StrategyError> {
    match r {
        Err(StrategyError::Oracle(OracleError::BudgetExhausted(_))) => Ok(Err("budget".into())),
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub success: bool,
    pub embedding: Option<Embedding>,
    pub queries_used: u64,
    pub phase_counts: Vec<(String, u64)>,
    pub failure_stage: Option<String>,
    /// Attempts made, including the successful one.
    pub restarts_used: u32,
    pub clamped: bool,
}

/// `ℓ = log b / (2 log log b)`, or `None` where `log log b <= 0`.
fn ell_raw(b: f64) -> Option<f64> {
    let lb = fmath::ln(b);
    let llb = fmath::ln(lb);
    (lb > 0.0 && llb > 0.0).then(|| lb / (2.0 * llb))
}

/// `ℓ(b) = max(floor, log b / (2 log log b))` with natural logs; the floor
/// alone where `log log b <= 0`.
pub fn ell(b: f64, floor: f64) -> Result<f64, StrategyError> {
    Ok(ell_clamped(b, floor)?.0)
}

/// [`ell`] plus whether the floor was applied.
pub fn ell_clamped(b: f64, floor: f64) -> Result<(f64, bool), StrategyError> {
    if !(b > 1.0) {
        return Err(StrategyError::InvalidInput(format!(
            "b must exceed 1, got {b}"
        )));
    }
    Ok(match ell_raw(b) {
        Some(x) if x >= floor => (x, false),
        _ => (floor, true),
    })
}

/// `L(x) = log x / (3n log log x)` iterated `times` times from `b`, clamped
/// to `floor` like [`ell`]. Returns the value and whether a clamp fired.
pub fn iterated_l_clamped(
    b: f64,
    n: usize,
    times: usize,
    floor: f64,
) -> Result<(f64, bool), StrategyError> {
    if !(b > 1.0) || n == 0 {
        return Err(StrategyError::InvalidInput(format!(
            "need b > 1 and n >= 1, got b={b}, n={n}"
        )));
    }
    let mut x = b;
    let mut clamped = false;
    for _ in 0..times {
        let lx = fmath::ln(x);
        let llx = fmath::ln(lx);
        x = if lx > 0.0 && llx > 0.0 && lx / (3.0 * n as f64 * llx) >= floor {
            lx / (3.0 * n as f64 * llx)
        } else {
            clamped = true;
            floor
        };
    }
    Ok((x, clamped))
}

pub fn iterated_l(b: f64, n: usize, times: usize, floor: f64) -> Result<f64, StrategyError> {
    Ok(iterated_l_clamped(b, n, times, floor)?.0)
}

/// Draws fresh vertices and keeps those adjacent to every vertex of
/// `anchors`, stopping after `count` hits or `budget` candidates. Each
/// candidate is queried against the anchors in order and dropped at its
/// first non-edge. A short list means the budget ran out.
pub fn find_common_neighbors(
    oracle: &mut EdgeOracle,
    anchors: &[HostId],
    count: usize,
    budget: u64,
) -> Result<Vec<HostId>, StrategyError> {
    if anchors.is_empty() {
        return Err(StrategyError::InvalidInput("anchor set is empty".into()));
    }
    let mut found = Vec::with_capacity(count.min(1 << 20));
    let mut tried = 0u64;
    while found.len() < count && tried < budget {
        let w = oracle.fresh_vertex()?;
        tried += 1;
        let mut all = true;
        for &a in anchors {
            if !oracle.query(a, w)? {
                all = false;
                break;
            }
        }
        if all {
            found.push(w);
        }
    }
    Ok(found)
}

/// Repeats `attempt` on fresh disjoint children of `oracle` until one
/// succeeds or `max_attempts` are spent. Each child is capped at `budget`
/// distinct queries when `budget > 0`. Every child is absorbed back, so the
/// parent's memo and count cover all attempts, and a success is validated
/// against the parent before it is reported.
pub fn amplify<F>(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    max_attempts: u32,
    budget: u64,
    mut attempt: F,
) -> Result<StrategyOutcome, StrategyError>
where
    F: FnMut(&mut EdgeOracle, &mut Phases) -> Result<Attempt, StrategyError>,
{
    if max_attempts == 0 {
        return Err(StrategyError::InvalidParams(
            "need at least one attempt".into(),
        ));
    }
    let start = oracle.query_count();
    let mut phases = Phases::default();
    let mut last_failure = None;
    for round in 1..=max_attempts {
        let mut child = oracle.fork_disjoint()?;
        if budget > 0 {
            child.set_query_limit(Some(budget));
        }
        let mut local = Phases::default();
        let result = budget_to_failure(attempt(&mut child, &mut local))?;
        let untracked = child.query_count() - local.total();
        if untracked > 0 {
            local.add("attempt", untracked);
        }
        oracle.absorb(child);
        phases.merge(local);
        match result {
            Ok(embedding) => {
                if !validate_embedding(h, &embedding, oracle) {
                    return Err(StrategyError::Unsound);
                }
                return Ok(StrategyOutcome {
                    success: true,
                    embedding: Some(embedding),
                    queries_used: oracle.query_count() - start,
                    phase_counts: phases.entries,
                    failure_stage: None,
                    restarts_used: round,
                    clamped: phases.clamped,
                });
            }
            Err(stage) => last_failure = Some(stage),
        }
    }
    Ok(StrategyOutcome {
        success: false,
        embedding: None,
        queries_used: oracle.query_count() - start,
        phase_counts: phases.entries,
        failure_stage: last_failure,
        restarts_used: max_attempts,
        clamped: phases.clamped,
    })
}
