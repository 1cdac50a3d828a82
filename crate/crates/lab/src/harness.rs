//! Monte Carlo driver: independent trials per grid point, folded in trial
//! order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use subquery_core::embed::validate_against_hash;
use subquery_core::graph;
use subquery_core::strategies::{self, max_pages};
use subquery_core::structure::{depth_orientation, find_tree_partition};
use subquery_core::{
    degeneracy_order, validate_embedding, DegeneracyOrdering, EdgeOracle, Embedding, OracleConfig,
    PatternGraph, StrategyOutcome, StrategyParams, TreePartition,
};

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::stats::{wilson, Quantiles};

/// Strategy plus whatever structure it needs, computed once per experiment.
#[derive(Debug, Clone)]
pub enum Plan {
    Trivial(DegeneracyOrdering),
    Book { d: usize, t: usize },
    Triforce,
    Cloud(DegeneracyOrdering),
    TreeLayers(TreePartition),
}

/// A validated configuration ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub graph: PatternGraph,
    pub plan: Plan,
    /// Every query answers "edge"; for exercising the plumbing.
    pub always_edge: bool,
}

fn same_edges(a: &PatternGraph, b: &PatternGraph) -> bool {
    let sorted = |g: &PatternGraph| {
        let mut e: Vec<_> = g
            .edges()
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        e.sort_unstable();
        e
    };
    a.n() == b.n() && sorted(a) == sorted(b)
}

/// `(d, t)` if `h` is `B_{d,t}` in the builtin labelling.
fn as_book(h: &PatternGraph) -> Option<(usize, usize)> {
    (2..h.n())
        .map(|d| (d, h.n() - d))
        .find(|&(d, t)| graph::book(d, t).is_ok_and(|b| same_edges(&b, h)))
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let graph = config.load_graph()?;
        let plan = plan_for(&config.strategy, &graph, &config.params, &config.p)?;
        Ok(Experiment {
            config,
            graph,
            plan,
            always_edge: false,
        })
    }

    /// One trial at `p`; `trial` selects the oracle stream.
    pub fn run_trial(&self, p: f64, trial: u64) -> Result<TrialRecord> {
        let cfg = OracleConfig::infinite(p, self.config.seed, trial);
        let mut oracle = if self.always_edge {
            EdgeOracle::always_edge(cfg)
        } else {
            EdgeOracle::new(cfg).map_err(|e| LabError::Runtime(e.to_string()))?
        };
        let (out, nominal) = run_plan(&self.plan, &mut oracle, &self.graph, &self.config.params)?;
        let mut rec = TrialRecord::from_outcome(p, trial, out, &self.graph, &oracle);
        rec.within_nominal = nominal;
        Ok(rec)
    }

    /// All trials at `p`, in trial order.
    pub fn run_point(&self, p: f64) -> Result<Vec<TrialRecord>> {
        let jobs = self.config.jobs;
        let run = || {
            (0..self.config.trials)
                .into_par_iter()
                .map(|t| self.run_trial(p, t))
                .collect::<Result<Vec<_>>>()
        };
        if jobs == 1 {
            return (0..self.config.trials)
                .map(|t| self.run_trial(p, t))
                .collect();
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| LabError::Runtime(e.to_string()))?
            .install(run)
    }

    /// One [`PointResult`] per grid point.
    pub fn estimate_success(&self) -> Result<Vec<PointResult>> {
        self.config
            .p
            .iter()
            .map(|&p| {
                let trials = self.run_point(p)?;
                Ok(PointResult {
                    row: ResultRow::from_trials(p, &trials),
                    trials,
                })
            })
            .collect()
    }
}

pub fn plan_for(
    strategy: &str,
    h: &PatternGraph,
    params: &StrategyParams,
    grid: &[f64],
) -> Result<Plan> {
    let mismatch = |what: &str| LabError::Config(format!("strategy `{strategy}` needs {what}"));
    match strategy {
        "trivial" => Ok(Plan::Trivial(degeneracy_order(h))),
        "book" => {
            let (d, t) =
                as_book(h).ok_or_else(|| mismatch("a book graph `book:d,t` with d >= 2"))?;
            for &p in grid {
                let cap =
                    max_pages(1.0 / p, params).map_err(|e| LabError::Config(e.to_string()))?;
                if t > cap {
                    return Err(LabError::Config(format!(
                        "book with t={t} pages exceeds the limit {cap} at p={p}"
                    )));
                }
            }
            Ok(Plan::Book { d, t })
        }
        "triforce" => {
            if !same_edges(h, &graph::triforce()) {
                return Err(mismatch("the triforce graph"));
            }
            Ok(Plan::Triforce)
        }
        "cloud" => {
            let d = degeneracy_order(h).d;
            depth_orientation(h, d)
                .map(Plan::Cloud)
                .map_err(|e| LabError::Config(format!("depth ordering: {e}")))
        }
        "tree-layers" => match find_tree_partition(h) {
            Ok(Some(part)) => Ok(Plan::TreeLayers(part)),
            Ok(None) => Err(mismatch("a graph partitionable into layered trees")),
            Err(e) => Err(LabError::Config(format!("tree partition: {e}"))),
        },
        other => Err(LabError::Config(format!("unknown strategy `{other}`"))),
    }
}

/// Runs one trial of `plan`. For the cloud strategy the second value says
/// whether every attempt kept its cloud bookkeeping and stayed within its
/// audited query bound.
pub fn run_plan(
    plan: &Plan,
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    params: &StrategyParams,
) -> Result<(StrategyOutcome, Option<bool>)> {
    let out = match plan {
        Plan::Trivial(order) => strategies::run_trivial(oracle, h, order, params),
        Plan::Book { d, t } => strategies::run_book(oracle, *d, *t, params),
        Plan::Triforce => strategies::run_triforce(oracle, params),
        Plan::Cloud(order) => {
            let (out, audit) = strategies::run_cloud_audited(oracle, h, order, params)?;
            let ok = audit.bookkeeping_ok && audit.attempts.iter().all(|&(q, bound)| q <= bound);
            return Ok((out, Some(ok)));
        }
        Plan::TreeLayers(part) => strategies::run_tree_layers(oracle, h, part, params),
    };
    Ok((out?, None))
}

/// Everything kept about one trial; successes carry their embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub p: f64,
    pub trial: u64,
    pub success: bool,
    /// The strategy claimed success but the embedding failed re-validation.
    #[serde(default)]
    pub unsound: bool,
    pub queries: u64,
    pub restarts: u32,
    pub clamped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_stage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<u64>>,
    /// Cloud only: bookkeeping and per-attempt query audit both held.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub within_nominal: Option<bool>,
}

impl TrialRecord {
    fn from_outcome(
        p: f64,
        trial: u64,
        out: StrategyOutcome,
        h: &PatternGraph,
        oracle: &EdgeOracle,
    ) -> Self {
        let valid = out.embedding.as_ref().is_some_and(|e| {
            validate_embedding(h, e, oracle)
                && (oracle.is_forced() || validate_against_hash(h, e, oracle.config()))
        });
        let unsound = out.success && !valid;
        TrialRecord {
            p,
            trial,
            success: out.success && valid,
            unsound,
            queries: out.queries_used,
            restarts: out.restarts_used,
            clamped: out.clamped,
            failure_stage: if unsound {
                Some("unsound".into())
            } else {
                out.failure_stage
            },
            embedding: out.embedding.filter(|_| valid).map(|e| e.map),
            within_nominal: None,
        }
    }

    /// Re-checks a stored success against the keyed hash of `(seed, trial)`.
    pub fn revalidate(&self, h: &PatternGraph, seed: u64) -> bool {
        let Some(map) = &self.embedding else {
            return !self.success;
        };
        let cfg = OracleConfig::infinite(self.p, seed, self.trial);
        validate_against_hash(h, &Embedding::new(map.clone()), &cfg)
    }
}

/// Summary of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub p: f64,
    pub b: f64,
    pub trials: u64,
    pub successes: u64,
    pub unsound: u64,
    pub rate: f64,
    pub rate_lo: f64,
    pub rate_hi: f64,
    /// Query quantiles over successful trials.
    pub queries: Option<Quantiles>,
    pub restarts_mean: f64,
    pub clamped: bool,
}

impl ResultRow {
    pub fn from_trials(p: f64, trials: &[TrialRecord]) -> Self {
        let n = trials.len() as u64;
        let successes = trials.iter().filter(|t| t.success).count() as u64;
        let unsound = trials.iter().filter(|t| t.unsound).count() as u64;
        let used: Vec<u64> = trials
            .iter()
            .filter(|t| t.success)
            .map(|t| t.queries)
            .collect();
        let (rate_lo, rate_hi) = wilson(successes, n);
        let restarts: u64 = trials.iter().map(|t| t.restarts as u64).sum();
        ResultRow {
            p,
            b: 1.0 / p,
            trials: n,
            successes,
            unsound,
            rate: if n == 0 {
                0.0
            } else {
                successes as f64 / n as f64
            },
            rate_lo,
            rate_hi,
            queries: Quantiles::of(&used),
            restarts_mean: if n == 0 {
                0.0
            } else {
                restarts as f64 / n as f64
            },
            clamped: trials.iter().any(|t| t.clamped),
        }
    }

    pub fn median(&self) -> Option<f64> {
        self.queries.map(|q| q.q50)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub row: ResultRow,
    pub trials: Vec<TrialRecord>,
}

/// Outcome of [`bisect_budget`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectResult {
    pub p: f64,
    /// Largest per-attempt budget seen to fall short of rate 1/2.
    pub lo: u64,
    /// Smallest per-attempt budget seen to reach rate 1/2.
    pub hi: u64,
    pub row_at_hi: ResultRow,
    pub evaluations: u32,
}

/// Per-attempt budget ratio at which [`bisect_budget`] stops.
pub const BISECT_FACTOR: f64 = 1.189_207_115_002_721; // 2^{1/4}

/// Searches for the smallest per-attempt budget with success rate at least
/// 1/2 at `p`, to within a factor of [`BISECT_FACTOR`]. Doubles from
/// `start` to bracket, then bisects geometrically.
pub fn bisect_budget(
    exp: &Experiment,
    p: f64,
    start: u64,
    max_doublings: u32,
) -> Result<BisectResult> {
    let mut evaluations = 0;
    let mut eval = |budget: u64| -> Result<ResultRow> {
        evaluations += 1;
        let mut e = exp.clone();
        e.config.params.budget = budget;
        Ok(ResultRow::from_trials(p, &e.run_point(p)?))
    };
    let mut lo = 0u64;
    let mut hi = start.max(1);
    let mut row = eval(hi)?;
    let mut doublings = 0;
    while row.rate < 0.5 {
        if doublings == max_doublings {
            return Err(LabError::Runtime(format!(
                "no budget up to {hi} reaches success rate 1/2 at p={p}"
            )));
        }
        lo = hi;
        hi = hi.saturating_mul(2);
        row = eval(hi)?;
        doublings += 1;
    }
    while lo > 0 && (hi as f64) > BISECT_FACTOR * lo as f64 {
        let mid = ((lo as f64) * (hi as f64)).sqrt().round() as u64;
        if mid <= lo || mid >= hi {
            break;
        }
        let r = eval(mid)?;
        if r.rate >= 0.5 {
            hi = mid;
            row = r;
        } else {
            lo = mid;
        }
    }
    Ok(BisectResult {
        p,
        lo,
        hi,
        row_at_hi: row,
        evaluations,
    })
}
