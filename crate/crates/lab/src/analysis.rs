//! Monte Carlo checks of the clique weight bounds, codegree concentration,
//! the feasibility table and the structural report.

use serde::Serialize;
use subquery_core::clique::{
    alpha_plus, clique_weight_bound, feasibility_row, final_weights, martingale_step_check,
    sample_transcript, weight_sums, TranscriptStrategy,
};
use subquery_core::codegree::max_codegree;
use subquery_core::strategies::ell;
use subquery_core::structure::{depth_orientation, find_tree_partition};
use subquery_core::{degeneracy_order, HostGraph, PatternGraph};

use crate::error::{LabError, Result};

/// Sample mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub se: f64,
}

impl Moments {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Moments {
            mean,
            se: (var / n).sqrt(),
        }
    }
}

/// Allowance, in standard errors, granted to sampled means.
pub const SIGMAS: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightBoundRow {
    pub strategy: &'static str,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub t: usize,
    pub trials: u64,
    pub mean: f64,
    pub se: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursiveRow {
    pub strategy: &'static str,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub trials: u64,
    /// Mean of `w_{k,1}(t)`.
    pub lhs: f64,
    /// `t · 2^{-(2k-3)}` times the mean of `w_{k-2,0}(t)`.
    pub rhs: f64,
    /// Standard error of the paired difference.
    pub se: f64,
    pub ok: bool,
}

fn transcripts(
    strategy: TranscriptStrategy,
    n: usize,
    t: usize,
    trials: u64,
    seed: u64,
) -> impl Iterator<Item = Result<subquery_core::clique::QueryTranscript>> {
    (0..trials).map(move |i| Ok(sample_transcript(strategy, n, t, seed, i)?))
}

/// Sampled `E[w_{k,m}(t)]` against its closed-form bound, for every
/// combination of the arguments.
pub fn weight_bound_check(
    ns: &[usize],
    ks: &[usize],
    ms: &[usize],
    t_of: impl Fn(usize) -> Vec<usize>,
    trials: u64,
    seed: u64,
) -> Result<Vec<WeightBoundRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for t in t_of(n) {
            for strategy in TranscriptStrategy::ALL {
                let mut samples = vec![Vec::with_capacity(trials as usize); ks.len() * ms.len()];
                for tr in transcripts(strategy, n, t, trials, seed) {
                    let tr = tr?;
                    for (i, &k) in ks.iter().enumerate() {
                        for (j, &m) in ms.iter().enumerate() {
                            let (_, w) = final_weights(&tr, k, m)?;
                            samples[i * ms.len() + j].push(w.to_f64());
                        }
                    }
                }
                for (i, &k) in ks.iter().enumerate() {
                    for (j, &m) in ms.iter().enumerate() {
                        let mo = Moments::of(&samples[i * ms.len() + j]);
                        let bound =
                            clique_weight_bound(n as u64, k as u64, t as u64, m as u64)?.exp2();
                        rows.push(WeightBoundRow {
                            strategy: strategy.name(),
                            n,
                            k,
                            m,
                            t,
                            trials,
                            mean: mo.mean,
                            se: mo.se,
                            bound,
                            ok: mo.mean <= bound + SIGMAS * mo.se,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Sampled `E[w_{k,1}(t)] <= t · 2^{-(2k-3)} · E[w_{k-2,0}(t)]`, tested on the
/// paired per-transcript difference.
pub fn recursive_check(
    ns: &[usize],
    ks: &[usize],
    t_of: impl Fn(usize) -> Vec<usize>,
    trials: u64,
    seed: u64,
) -> Result<Vec<RecursiveRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for t in t_of(n) {
            for strategy in TranscriptStrategy::ALL {
                for &k in ks {
                    if k < 3 {
                        return Err(LabError::Config(format!(
                            "recursive check needs k >= 3, got {k}"
                        )));
                    }
                    let factor = t as f64 * (-(2.0 * k as f64 - 3.0)).exp2();
                    let (mut lhs, mut rhs, mut diff) = (Vec::new(), Vec::new(), Vec::new());
                    for tr in transcripts(strategy, n, t, trials, seed) {
                        let tr = tr?;
                        let a = final_weights(&tr, k, 1)?.1.to_f64();
                        let b = factor * final_weights(&tr, k - 2, 0)?.1.to_f64();
                        lhs.push(a);
                        rhs.push(b);
                        diff.push(a - b);
                    }
                    let d = Moments::of(&diff);
                    rows.push(RecursiveRow {
                        strategy: strategy.name(),
                        n,
                        k,
                        t,
                        trials,
                        lhs: Moments::of(&lhs).mean,
                        rhs: Moments::of(&rhs).mean,
                        se: d.se,
                        ok: d.mean <= SIGMAS * d.se,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Counts martingale steps with a nonzero exact residual over `trials`
/// random transcripts of every pair of an `n`-vertex host.
pub fn martingale_check(n: usize, ks: &[usize], trials: u64, seed: u64) -> Result<(u64, u64)> {
    let t = n * (n - 1) / 2;
    let (mut steps, mut nonzero) = (0, 0);
    for tr in transcripts(TranscriptStrategy::Random, n, t, trials, seed) {
        let tr = tr?;
        for &k in ks {
            for step in 0..tr.len() {
                steps += 1;
                if !martingale_step_check(&tr, k, step)?.is_zero() {
                    nonzero += 1;
                }
            }
        }
    }
    Ok((steps, nonzero))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodegreeRow {
    pub p: f64,
    pub hosts: u64,
    pub vertices: usize,
    pub threshold: f64,
    pub exceed: u64,
    pub fraction: f64,
    pub max_seen: usize,
}

/// Fraction of `G(2N, p)` hosts, `N = ⌈b²⌉`, whose largest pairwise
/// codegree exceeds `10·ℓ(b)`.
pub fn codegree_check(p: f64, hosts: u64, seed: u64) -> Result<CodegreeRow> {
    let b = 1.0 / p;
    let n = 2 * (b * b).ceil() as usize;
    let threshold = 10.0 * ell(b, 1.0)?;
    let (mut exceed, mut max_seen) = (0, 0);
    for trial in 0..hosts {
        let g = HostGraph::sample_gnp(n, p, seed, trial);
        let c = max_codegree(&g, 2);
        max_seen = max_seen.max(c);
        if c as f64 > threshold {
            exceed += 1;
        }
    }
    Ok(CodegreeRow {
        p,
        hosts,
        vertices: n,
        threshold,
        exceed,
        fraction: exceed as f64 / hosts as f64,
        max_seen,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub n: u64,
    pub delta: f64,
    pub t: u64,
    pub k_max_feasible: u64,
    pub k_over_lg_n: f64,
    pub alpha_plus: Option<f64>,
    /// `1 + δ/2`.
    pub lower_line: f64,
    /// `k/lg n <= alpha_plus + 2/lg n`, where `alpha_plus` is defined.
    pub within_slack: bool,
}

pub fn clique_feasibility_table(ns: &[u64], deltas: &[f64]) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for &delta in deltas {
            let r = feasibility_row(n, delta)?;
            let lg = (n as f64).log2();
            rows.push(TableRow {
                n,
                delta,
                t: r.t,
                k_max_feasible: r.k_max_feasible,
                k_over_lg_n: r.k_over_lg_n,
                alpha_plus: r.alpha_plus,
                lower_line: 1.0 + delta / 2.0,
                within_slack: r.alpha_plus.is_none_or(|a| r.k_over_lg_n <= a + 2.0 / lg),
            });
        }
    }
    Ok(rows)
}

/// Strict increase of `alpha_plus` on `points` evenly spaced deltas of its
/// domain.
pub fn alpha_plus_monotone(points: usize) -> Result<bool> {
    let lo = 2.0 - std::f64::consts::SQRT_2;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..points {
        let d = lo + (2.0 - lo) * i as f64 / (points - 1) as f64;
        let a = alpha_plus(d)?;
        if a <= prev {
            return Ok(false);
        }
        prev = a;
    }
    Ok(true)
}

/// One line per step of a transcript: `t`, `w_k`, `w_{k,m}` as exact
/// decimals.
pub fn weight_series(
    strategy: TranscriptStrategy,
    n: usize,
    k: usize,
    m: usize,
    t: usize,
    seed: u64,
    trial: u64,
) -> Result<String> {
    let tr = sample_transcript(strategy, n, t, seed, trial)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| LabError::Runtime(e.to_string());
    w.write_record(["t", "u", "v", "edge", "w_k", "w_km"])
        .map_err(csv_err)?;
    for (i, pt) in weight_sums(&tr, k, m)?.into_iter().enumerate() {
        let (u, v, bit) = match i.checked_sub(1).map(|j| tr.steps()[j]) {
            Some(((u, v), bit)) => (u.to_string(), v.to_string(), (bit as u8).to_string()),
            None => Default::default(),
        };
        w.write_record([
            pt.t.to_string(),
            u,
            v,
            bit,
            pt.w_k.to_string(),
            pt.w_km.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let body = w
        .into_inner()
        .map_err(|e| LabError::Runtime(e.to_string()))?;
    String::from_utf8(body).map_err(|e| LabError::Runtime(e.to_string()))
}

/// Degeneracy, depth and tree-partition summary of a pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsReport {
    pub name: Option<String>,
    pub n: usize,
    pub edges: usize,
    pub degeneracy: usize,
    pub degeneracy_order: Vec<usize>,
    pub depth: usize,
    pub depth_order: Vec<usize>,
    pub tree_layers: Option<Vec<Vec<usize>>>,
    pub epsilon: Option<f64>,
}

pub fn params_report(h: &PatternGraph) -> Result<ParamsReport> {
    let deg = degeneracy_order(h);
    let depth = depth_orientation(h, deg.d).map_err(|e| LabError::Runtime(e.to_string()))?;
    let part = find_tree_partition(h).map_err(|e| LabError::Runtime(e.to_string()))?;
    Ok(ParamsReport {
        name: h.name().map(str::to_string),
        n: h.n(),
        edges: h.edge_count(),
        degeneracy: deg.d,
        degeneracy_order: deg.order,
        depth: depth.delta,
        depth_order: depth.order,
        epsilon: part.as_ref().map(|p| p.epsilon),
        tree_layers: part.map(|p| p.layers),
    })
}
