//! Seeded adjacency oracle over `G(∞, p)` or `G(n, p)`.
//!
//! The outcome of a pair is a pure function of `(master_seed, trial_index,
//! min(u,v), max(u,v))`: the four words are absorbed into a SplitMix64
//! finalizer chain and the top 53 bits of the result, read as a number in
//! `[0, 1)`, are compared against `p`. Query order therefore never changes
//! an outcome. The oracle memoizes every pair it reveals; repeat queries are
//! free and `query_count` is always the number of distinct pairs revealed.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU32, Ordering};

use serde::{Deserialize, Serialize};

/// Identifier of the pair hash, recorded in every harness output.
pub const HASH_ID: &str = "splitmix64-chain-v1";

/// Host vertex id. In infinite mode the top bits carry the id-space region
/// (see [`EdgeOracle::fork_disjoint`]).
pub type HostId = u64;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const REGION_SHIFT: u32 = 40;
const LOCAL_MASK: u64 = (1 << REGION_SHIFT) - 1;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn absorb(h: u64, x: u64) -> u64 {
    mix64(h.wrapping_add(GAMMA) ^ x)
}

/// The keyed 64-bit hash of an unordered pair.
#[inline]
pub fn pair_hash(seed: u64, trial: u64, u: HostId, v: HostId) -> u64 {
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    absorb(absorb(absorb(seed, trial), lo), hi)
}

/// Uniform value in `[0, 1)` from the top 53 bits of a hash.
#[inline]
pub fn unit_interval(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `p` as a threshold on the top 53 bits: `unit_interval(h) < p` iff
/// `h >> 11 < threshold(p)`.
fn threshold(p: f64) -> u64 {
    libm::ceil(p * (1u64 << 53) as f64) as u64
}

/// Whether the pair is an edge under `(seed, trial)` at edge probability `p`.
#[inline]
pub fn keyed_outcome(seed: u64, trial: u64, u: HostId, v: HostId, p: f64) -> bool {
    unit_interval(pair_hash(seed, trial, u, v)) < p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OracleMode {
    Infinite { p: f64 },
    Finite { n: u64, p: f64 },
}

impl OracleMode {
    pub fn p(&self) -> f64 {
        match *self {
            OracleMode::Infinite { p } | OracleMode::Finite { p, .. } => p,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            OracleMode::Infinite { .. } => "infinite",
            OracleMode::Finite { .. } => "finite",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub mode: OracleMode,
    pub master_seed: u64,
    pub trial_index: u64,
}

impl OracleConfig {
    pub fn infinite(p: f64, master_seed: u64, trial_index: u64) -> Self {
        OracleConfig {
            mode: OracleMode::Infinite { p },
            master_seed,
            trial_index,
        }
    }

    pub fn finite(n: u64, p: f64, master_seed: u64, trial_index: u64) -> Self {
        OracleConfig {
            mode: OracleMode::Finite { n, p },
            master_seed,
            trial_index,
        }
    }

    pub fn p(&self) -> f64 {
        self.mode.p()
    }

    /// `b = 1/p`.
    pub fn b(&self) -> f64 {
        1.0 / self.p()
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        let p = self.p();
        if !(p > 0.0 && p < 1.0) {
            return Err(OracleError::InvalidProbability(p));
        }
        if let OracleMode::Finite { n, .. } = self.mode {
            if n < 2 {
                return Err(OracleError::HostTooSmall(n));
            }
        }
        Ok(())
    }

    /// Outcome of a pair straight from the hash, without memoization.
    pub fn outcome(&self, u: HostId, v: HostId) -> bool {
        keyed_outcome(self.master_seed, self.trial_index, u, v, self.p())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("edge probability {0} is outside (0, 1)")]
    InvalidProbability(f64),
    #[error("finite host needs at least 2 vertices, got {0}")]
    HostTooSmall(u64),
    #[error("self-query on vertex {0}")]
    SelfQuery(HostId),
    #[error("vertex {0} has not been allocated")]
    Unallocated(HostId),
    #[error("operation requires infinite mode")]
    UnsupportedMode,
    #[error("query budget of {0} distinct pairs exhausted")]
    BudgetExhausted(u64),
    #[error("id space exhausted")]
    IdSpaceExhausted,
}

/// Set of revealed pairs, stored as runs: for each smaller endpoint
/// (`anchor`) the larger endpoints form a union of disjoint intervals.
/// Strategies mostly scan freshly allocated, consecutive vertices against a
/// fixed anchor, so runs stay few and the common case is an O(1) extension
/// of the `hot` run.
#[derive(Debug, Clone, Default)]
struct PairMemo {
    runs: BTreeMap<(HostId, HostId), HostId>,
    hot: Option<Run>,
    /// Start of the run following `hot` for the same anchor, or `u64::MAX`.
    hot_next: HostId,
    len: u64,
}

#[derive(Debug, Clone, Copy)]
struct Run {
    anchor: HostId,
    start: HostId,
    end: HostId,
}

impl PairMemo {
    fn contains(&self, a: HostId, x: HostId) -> bool {
        if let Some(h) = self.hot {
            if h.anchor == a && h.start <= x && x <= h.end {
                return true;
            }
        }
        matches!(self.runs.range(..=(a, x)).next_back(), Some((&(ra, _), &end)) if ra == a && end >= x)
    }

    fn flush_hot(&mut self) {
        if let Some(h) = self.hot.take() {
            self.runs.insert((h.anchor, h.start), h.end);
        }
    }

    /// True if `(a, x)` is new and directly extends the hot run.
    fn extends_hot(&self, a: HostId, x: HostId) -> bool {
        matches!(self.hot, Some(h) if h.anchor == a && x == h.end + 1 && x + 1 < self.hot_next)
    }

    /// Records `(a, x)` with `a < x`; returns `false` if already present.
    fn insert(&mut self, a: HostId, x: HostId) -> bool {
        if self.extends_hot(a, x) {
            if let Some(h) = &mut self.hot {
                h.end = x;
            }
            self.len += 1;
            return true;
        }
        if self.contains(a, x) {
            return false;
        }
        self.flush_hot();
        let mut run = Run {
            anchor: a,
            start: x,
            end: x,
        };
        if let Some((&(ra, rs), &re)) = self.runs.range(..(a, x)).next_back() {
            if ra == a && re + 1 == x {
                self.runs.remove(&(ra, rs));
                run.start = rs;
            }
        }
        if let Some(se) = self.runs.remove(&(a, x + 1)) {
            run.end = se;
        }
        self.hot_next = match self.runs.range((a, run.end + 1)..).next() {
            Some((&(na, ns), _)) if na == a => ns,
            _ => u64::MAX,
        };
        self.hot = Some(run);
        self.len += 1;
        true
    }

    fn merge_disjoint(&mut self, mut other: PairMemo) {
        self.flush_hot();
        other.flush_hot();
        self.len += other.len;
        self.runs.append(&mut other.runs);
    }

    fn iter(&self) -> impl Iterator<Item = (HostId, HostId)> + '_ {
        self.runs
            .iter()
            .map(|(&(a, s), &e)| (a, s, e))
            .chain(self.hot.iter().map(|h| (h.anchor, h.start, h.end)))
            .flat_map(|(a, s, e)| (s..=e).map(move |x| (a, x)))
    }
}

/// Memoized adjacency oracle with exact query accounting.
#[derive(Debug)]
pub struct EdgeOracle {
    config: OracleConfig,
    memo: PairMemo,
    query_count: u64,
    edges_found: u64,
    region: u32,
    horizon: u64,
    /// Horizons of regions absorbed from forked children.
    foreign: BTreeMap<u32, u64>,
    regions: Arc<AtomicU32>,
    query_limit: Option<u64>,
    forced: Option<bool>,
    log: Option<Vec<(HostId, HostId, bool)>>,
    /// `(seed, trial)` prefix of the pair hash, and `p` as an integer bound.
    key: u64,
    threshold: u64,
}

impl EdgeOracle {
    pub fn new(config: OracleConfig) -> Result<Self, OracleError> {
        config.validate()?;
        Ok(Self::unchecked(config, None))
    }

    /// An oracle whose every pair is an edge, for exercising strategies
    /// deterministically. Shares all bookkeeping with the random oracle.
    pub fn always_edge(config: OracleConfig) -> Self {
        Self::unchecked(config, Some(true))
    }

    fn unchecked(config: OracleConfig, forced: Option<bool>) -> Self {
        EdgeOracle {
            config,
            memo: PairMemo {
                hot_next: u64::MAX,
                ..PairMemo::default()
            },
            query_count: 0,
            edges_found: 0,
            region: 0,
            horizon: 0,
            foreign: BTreeMap::new(),
            regions: Arc::new(AtomicU32::new(1)),
            query_limit: None,
            forced,
            log: None,
            key: absorb(config.master_seed, config.trial_index),
            threshold: threshold(config.p()),
        }
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn p(&self) -> f64 {
        self.config.p()
    }

    pub fn b(&self) -> f64 {
        self.config.b()
    }

    pub fn is_forced(&self) -> bool {
        self.forced.is_some()
    }

    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    pub fn edges_found(&self) -> u64 {
        self.edges_found
    }

    /// Number of memoized pairs; always equal to [`Self::query_count`].
    pub fn memo_len(&self) -> u64 {
        self.memo.len
    }

    /// Next id [`Self::fresh_vertex`] would hand out.
    pub fn vertex_horizon(&self) -> HostId {
        (self.region as u64) << REGION_SHIFT | self.horizon
    }

    /// Caps `query_count`: once it reaches `limit`, revealing a new pair
    /// fails with [`OracleError::BudgetExhausted`]. Memoized pairs stay free.
    pub fn set_query_limit(&mut self, limit: Option<u64>) {
        self.query_limit = limit;
    }

    pub fn query_limit(&self) -> Option<u64> {
        self.query_limit
    }

    /// Starts recording every newly revealed pair in order.
    pub fn start_log(&mut self) {
        self.log = Some(Vec::new());
    }

    pub fn take_log(&mut self) -> Vec<(HostId, HostId, bool)> {
        self.log.take().unwrap_or_default()
    }

    /// Same value as [`OracleConfig::outcome`] for `u < v`, with the
    /// per-oracle prefix of the hash precomputed.
    #[inline]
    fn outcome(&self, lo: HostId, hi: HostId) -> bool {
        match self.forced {
            Some(bit) => bit,
            None => absorb(absorb(self.key, lo), hi) >> 11 < self.threshold,
        }
    }

    fn check_vertex(&self, u: HostId) -> Result<(), OracleError> {
        match self.config.mode {
            OracleMode::Finite { n, .. } => {
                if u < n {
                    Ok(())
                } else {
                    Err(OracleError::Unallocated(u))
                }
            }
            OracleMode::Infinite { .. } => {
                let region = (u >> REGION_SHIFT) as u32;
                let local = u & LOCAL_MASK;
                let horizon = if region == self.region {
                    self.horizon
                } else {
                    self.foreign.get(&region).copied().unwrap_or(0)
                };
                if local < horizon {
                    Ok(())
                } else {
                    Err(OracleError::Unallocated(u))
                }
            }
        }
    }

    /// "Is `(u, v)` an edge?" First queries are counted and memoized; repeats
    /// return the memoized bit for free.
    pub fn query(&mut self, u: HostId, v: HostId) -> Result<bool, OracleError> {
        if u == v {
            return Err(OracleError::SelfQuery(u));
        }
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        if !self.memo.extends_hot(lo, hi) && self.memo.contains(lo, hi) {
            return Ok(self.outcome(lo, hi));
        }
        self.check_vertex(lo)?;
        self.check_vertex(hi)?;
        if let Some(limit) = self.query_limit {
            if self.query_count >= limit {
                return Err(OracleError::BudgetExhausted(limit));
            }
        }
        let bit = self.outcome(lo, hi);
        self.memo.insert(lo, hi);
        self.query_count += 1;
        self.edges_found += bit as u64;
        if let Some(log) = &mut self.log {
            log.push((lo, hi, bit));
        }
        Ok(bit)
    }

    /// The memoized outcome of a pair, or `None` if it was never revealed.
    /// Never issues a query.
    pub fn peek(&self, u: HostId, v: HostId) -> Option<bool> {
        if u == v {
            return None;
        }
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        self.memo.contains(lo, hi).then(|| self.outcome(lo, hi))
    }

    /// Allocates a previously unexplored vertex.
    pub fn fresh_vertex(&mut self) -> Result<HostId, OracleError> {
        self.fresh_block(1).map(|r| r.start)
    }

    /// Allocates `count` consecutive fresh vertices.
    pub fn fresh_block(&mut self, count: u64) -> Result<core::ops::Range<HostId>, OracleError> {
        if !matches!(self.config.mode, OracleMode::Infinite { .. }) {
            return Err(OracleError::UnsupportedMode);
        }
        let start = self.vertex_horizon();
        let end_local = self
            .horizon
            .checked_add(count)
            .filter(|&e| e <= LOCAL_MASK)
            .ok_or(OracleError::IdSpaceExhausted)?;
        self.horizon = end_local;
        Ok(start..start + count)
    }

    /// A child oracle over a disjoint region of the id space. It reuses the
    /// seed and trial index, so outcomes stay a function of the pair alone;
    /// its queries flow back into this oracle through [`Self::absorb`].
    pub fn fork_disjoint(&self) -> Result<EdgeOracle, OracleError> {
        if !matches!(self.config.mode, OracleMode::Infinite { .. }) {
            return Err(OracleError::UnsupportedMode);
        }
        let region = self.regions.fetch_add(1, Ordering::Relaxed);
        if region as u64 >= 1 << (64 - REGION_SHIFT) {
            return Err(OracleError::IdSpaceExhausted);
        }
        let mut child = EdgeOracle::unchecked(self.config, self.forced);
        child.region = region;
        child.regions = Arc::clone(&self.regions);
        Ok(child)
    }

    /// Folds a forked child's memo and counters into this oracle.
    pub fn absorb(&mut self, child: EdgeOracle) {
        self.query_count += child.query_count;
        self.edges_found += child.edges_found;
        self.foreign.insert(child.region, child.horizon);
        self.foreign.extend(child.foreign);
        if let (Some(log), Some(mut more)) = (&mut self.log, child.log) {
            log.append(&mut more);
        }
        self.memo.merge_disjoint(child.memo);
    }

    /// Every memoized pair as `(lo, hi)`; intended for audits and tests.
    pub fn memoized_pairs(&self) -> impl Iterator<Item = (HostId, HostId)> + '_ {
        self.memo.iter()
    }
}
