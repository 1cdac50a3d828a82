//! Greedy clique search on a finite oracle, and the fixed query strategies
//! used to sample transcripts.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CliqueError, QueryTranscript};
use crate::oracle::{pair_hash, EdgeOracle, HostId, OracleConfig, OracleError, OracleMode};

fn host_size(oracle: &EdgeOracle) -> Result<u64, CliqueError> {
    match oracle.config().mode {
        OracleMode::Finite { n, .. } => Ok(n),
        OracleMode::Infinite { .. } => Err(CliqueError::Oracle(OracleError::UnsupportedMode)),
    }
}

/// Largest clique found by greedy growth within `budget` new queries.
///
/// A pass scans every vertex in label order and admits it when it is
/// adjacent to the whole current clique. When a pass ends, the next pass
/// starts from the unused known edge with the most known common neighbors
/// (ties to the smallest pair). Every returned pair is a witnessed edge.
pub fn greedy_clique(oracle: &mut EdgeOracle, budget: u64) -> Result<Vec<HostId>, CliqueError> {
    let n = host_size(oracle)?;
    let saved = oracle.query_limit();
    let cap = oracle.query_count().saturating_add(budget);
    oracle.set_query_limit(Some(saved.map_or(cap, |s| s.min(cap))));
    let mut g = Greedy {
        adj: alloc::vec![Vec::new(); n as usize],
        best: Vec::new(),
        used: BTreeSet::new(),
    };
    let r = g.run(oracle, n);
    oracle.set_query_limit(saved);
    match r {
        Ok(()) | Err(CliqueError::Oracle(OracleError::BudgetExhausted(_))) => Ok(g.best),
        Err(e) => Err(e),
    }
}

struct Greedy {
    adj: Vec<Vec<HostId>>,
    best: Vec<HostId>,
    used: BTreeSet<(HostId, HostId)>,
}

impl Greedy {
    fn run(&mut self, oracle: &mut EdgeOracle, n: u64) -> Result<(), CliqueError> {
        let mut clique = Vec::new();
        loop {
            self.grow(oracle, n, &mut clique)?;
            let Some((u, v)) = self.next_seed() else {
                return Ok(());
            };
            self.used.insert((u, v));
            clique = alloc::vec![u, v];
        }
    }

    fn query(
        &mut self,
        oracle: &mut EdgeOracle,
        u: HostId,
        v: HostId,
    ) -> Result<bool, CliqueError> {
        let fresh = oracle.peek(u, v).is_none();
        let bit = oracle.query(u, v)?;
        if bit && fresh {
            self.adj[u as usize].push(v);
            self.adj[v as usize].push(u);
        }
        Ok(bit)
    }

    fn grow(
        &mut self,
        oracle: &mut EdgeOracle,
        n: u64,
        clique: &mut Vec<HostId>,
    ) -> Result<(), CliqueError> {
        let result = (|| {
            for x in 0..n {
                if clique.contains(&x) {
                    continue;
                }
                let mut all = true;
                for i in 0..clique.len() {
                    if !self.query(oracle, clique[i], x)? {
                        all = false;
                        break;
                    }
                }
                if all {
                    clique.push(x);
                    if clique.len() > self.best.len() {
                        self.best = clique.clone();
                    }
                }
            }
            Ok(())
        })();
        if clique.len() > self.best.len() {
            self.best = clique.clone();
        }
        result
    }

    fn next_seed(&mut self) -> Option<(HostId, HostId)> {
        for list in &mut self.adj {
            list.sort_unstable();
        }
        let mut best: Option<(usize, (HostId, HostId))> = None;
        for (u, list) in self.adj.iter().enumerate() {
            let u = u as HostId;
            for &v in list.iter().filter(|&&v| v > u) {
                if self.used.contains(&(u, v)) {
                    continue;
                }
                let common = sorted_intersection(list, &self.adj[v as usize]);
                if best.map_or(true, |(c, _)| common > c) {
                    best = Some((common, (u, v)));
                }
            }
        }
        best.map(|(_, p)| p)
    }
}

fn sorted_intersection(a: &[HostId], b: &[HostId]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Fixed query strategies for sampling transcripts on `G(n, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TranscriptStrategy {
    /// A uniformly random order of all pairs.
    Random,
    /// [`greedy_clique`].
    Greedy,
    /// Pairs in lexicographic order: all of vertex 0's pairs, then 1's, ...
    Star,
}

impl TranscriptStrategy {
    pub const ALL: [TranscriptStrategy; 3] = [
        TranscriptStrategy::Random,
        TranscriptStrategy::Greedy,
        TranscriptStrategy::Star,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TranscriptStrategy::Random => "random",
            TranscriptStrategy::Greedy => "greedy",
            TranscriptStrategy::Star => "star",
        }
    }
}

/// Runs `strategy` for `t` queries on the finite host `(n, 1/2)` keyed by
/// `(seed, trial)` and returns its transcript. Greedy may stop early once it
/// has nothing left to ask.
pub fn sample_transcript(
    strategy: TranscriptStrategy,
    n: usize,
    t: usize,
    seed: u64,
    trial: u64,
) -> Result<QueryTranscript, CliqueError> {
    let mut oracle = EdgeOracle::new(OracleConfig::finite(n as u64, 0.5, seed, trial))?;
    oracle.start_log();
    let mut pairs: Vec<(HostId, HostId)> = (0..n as HostId)
        .flat_map(|u| (u + 1..n as HostId).map(move |v| (u, v)))
        .collect();
    match strategy {
        TranscriptStrategy::Greedy => {
            greedy_clique(&mut oracle, t as u64)?;
        }
        TranscriptStrategy::Random | TranscriptStrategy::Star => {
            if strategy == TranscriptStrategy::Random {
                let mut rng = ChaCha8Rng::seed_from_u64(pair_hash(seed, trial, u64::MAX, u64::MAX));
                pairs.shuffle(&mut rng);
            }
            for &(u, v) in pairs.iter().take(t) {
                oracle.query(u, v)?;
            }
        }
    }
    QueryTranscript::from_log(n, &oracle.take_log())
}
