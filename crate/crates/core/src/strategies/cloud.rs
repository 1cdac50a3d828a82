//! General `d`-degenerate patterns via shrinking candidate clouds.
//!
//! Round `k` commits the vertex at position `k` of the ordering. Each later
//! neighbor `j` is either active (this is its last left-neighbor, so it
//! holds exactly `d - 1` dead ones before the round) and filtered by a dense
//! search over `C_k × C_j`, or inactive and filtered by the fan-out
//! `{u_k} × C_j`. Target sizes follow
//! `c_j = b^{d-m} / ℓ_j` for `m < d` dead left-neighbors and `ℓ_j` for `m = d`.

use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use super::trivial::{checked_ordering, run_trivial};
use super::{
    amplify, iterated_l_clamped, Attempt, Phases, StrategyError, StrategyOutcome, StrategyParams,
};
use crate::embed::Embedding;
use crate::fmath;
use crate::graph::PatternGraph;
use crate::oracle::{EdgeOracle, HostId};
use crate::structure::DegeneracyOrdering;

/// Per-attempt accounting collected by [`run_cloud_audited`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CloudAudit {
    /// `(queries, bound)` per attempt, where `bound` is
    /// `Σ_k [⌈ℓ_k⌉ · Σ_active |C_j| + Σ_inactive |C_j|]` over the rounds run.
    pub attempts: Vec<(u64, u64)>,
    /// Whether every living cloud matched the memo after every round.
    pub bookkeeping_ok: bool,
}

#[derive(Debug, Clone)]
enum Cloud {
    Block(Range<HostId>),
    Set(Vec<HostId>),
}

impl Cloud {
    fn len(&self) -> u64 {
        match self {
            Cloud::Block(r) => r.end - r.start,
            Cloud::Set(v) => v.len() as u64,
        }
    }

    fn get(&self, i: u64) -> HostId {
        match self {
            Cloud::Block(r) => r.start + i,
            Cloud::Set(v) => v[i as usize],
        }
    }

    fn truncate(&mut self, keep: u64) {
        match self {
            Cloud::Block(r) => r.end = r.end.min(r.start + keep),
            Cloud::Set(v) => v.truncate(keep as usize),
        }
    }
}

struct Plan {
    order: Vec<usize>,
    pos: Vec<usize>,
    d: usize,
    /// `ℓ_i` per position.
    ell: Vec<f64>,
    clamped: bool,
}

impl Plan {
    fn new(
        h: &PatternGraph,
        ordering: &DegeneracyOrdering,
        b: f64,
        params: &StrategyParams,
    ) -> Result<Self, StrategyError> {
        let mut clamped = false;
        let mut ell = Vec::with_capacity(h.n());
        for &depth in &ordering.depths {
            let (l, c) = iterated_l_clamped(b, h.n(), depth, params.ell_floor)?;
            clamped |= c;
            ell.push(l);
        }
        Ok(Plan {
            order: ordering.order.clone(),
            pos: ordering.positions(),
            d: ordering.d,
            ell,
            clamped,
        })
    }

    fn later_neighbors(&self, h: &PatternGraph, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = h
            .neighbors(self.order[k])
            .iter()
            .map(|&w| self.pos[w])
            .filter(|&j| j > k)
            .collect();
        out.sort_unstable();
        out
    }
}

/// Runs the cloud strategy along `ordering`, which should come from
/// `depth_orientation`. Orderings with back-degree at most 1 are handed to
/// [`run_trivial`].
pub fn run_cloud(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    ordering: &DegeneracyOrdering,
    params: &StrategyParams,
) -> Result<StrategyOutcome, StrategyError> {
    run_inner(oracle, h, ordering, params, None)
}

/// [`run_cloud`] that also re-checks every cloud against the memo after each
/// round and records the per-attempt query bound.
pub fn run_cloud_audited(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    ordering: &DegeneracyOrdering,
    params: &StrategyParams,
) -> Result<(StrategyOutcome, CloudAudit), StrategyError> {
    let mut audit = CloudAudit {
        attempts: Vec::new(),
        bookkeeping_ok: true,
    };
    let out = run_inner(oracle, h, ordering, params, Some(&mut audit))?;
    Ok((out, audit))
}

fn run_inner(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    ordering: &DegeneracyOrdering,
    params: &StrategyParams,
    mut audit: Option<&mut CloudAudit>,
) -> Result<StrategyOutcome, StrategyError> {
    params.validate()?;
    let ordering = checked_ordering(h, ordering)?;
    if ordering.d <= 1 {
        return run_trivial(oracle, h, &ordering, params);
    }
    let plan = Plan::new(h, &ordering, oracle.b(), params)?;
    amplify(oracle, h, params.max_restarts, params.budget, |o, ph| {
        let mut local = audit.as_mut().map(|_| (0u64, true));
        let start = o.query_count();
        let r = attempt_with_plan(o, h, &plan, params, ph, local.as_mut());
        if let (Some(a), Some((bound, ok))) = (audit.as_deref_mut(), local) {
            a.attempts.push((o.query_count() - start, bound));
            a.bookkeeping_ok &= ok;
        }
        r
    })
}

/// One attempt of [`run_cloud`]; `ordering` must have back-degree ≥ 2.
pub fn attempt_cloud(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    ordering: &DegeneracyOrdering,
    params: &StrategyParams,
    phases: &mut Phases,
) -> Result<Attempt, StrategyError> {
    let ordering = checked_ordering(h, ordering)?;
    if ordering.d <= 1 {
        return Err(StrategyError::InvalidInput(
            "cloud needs back-degree >= 2".into(),
        ));
    }
    let plan = Plan::new(h, &ordering, oracle.b(), params)?;
    attempt_with_plan(oracle, h, &plan, params, phases, None)
}

fn attempt_with_plan(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    plan: &Plan,
    params: &StrategyParams,
    phases: &mut Phases,
    mut audit: Option<&mut (u64, bool)>,
) -> Result<Attempt, StrategyError> {
    let n = h.n();
    let b = oracle.b();
    let d = plan.d;
    phases.clamped |= plan.clamped;

    let mut clouds = Vec::with_capacity(n);
    for i in 0..n {
        let size = fmath::ceil_count(
            params.cloud_scale * fmath::powi(b, d as u32) / plan.ell[i],
            1,
        );
        clouds.push(Cloud::Block(oracle.fresh_block(size)?));
    }
    let mut dead_left = alloc::vec![0usize; n];
    let mut image: Vec<HostId> = alloc::vec![0; n];

    for k in 0..n {
        let keep = fmath::ceil_count(plan.ell[k], 1);
        if clouds[k].len() < keep {
            return Ok(Err(format!("round {k} trim")));
        }
        clouds[k].truncate(keep);

        let later = plan.later_neighbors(h, k);
        let (active, inactive): (Vec<usize>, Vec<usize>) =
            later.iter().partition(|&&j| dead_left[j] == d - 1);

        if let Some(bound) = audit.as_deref_mut().map(|a| &mut a.0) {
            let act: u64 = active.iter().map(|&j| clouds[j].len()).sum();
            let inact: u64 = inactive.iter().map(|&j| clouds[j].len()).sum();
            *bound += keep * act + inact;
        }

        let chosen = phases.track("active", oracle, |o| {
            active_portion(o, &clouds, k, &active, &plan.ell)
        })?;
        let (u, filtered) = match chosen {
            Ok(c) => c,
            Err(j) => return Ok(Err(format!("round {k} active j={j}"))),
        };
        for (&j, set) in active.iter().zip(filtered) {
            clouds[j] = Cloud::Set(set);
        }

        for &j in &inactive {
            let m = dead_left[j];
            let target = fmath::ceil_count(fmath::powi(b, (d - m - 1) as u32) / plan.ell[j], 1);
            let kept = phases.track("inactive", oracle, |o| scan(o, u, &clouds[j], target))?;
            if (kept.len() as u64) < target {
                return Ok(Err(format!("round {k} inactive j={j}")));
            }
            clouds[j] = Cloud::Set(kept);
        }

        image[k] = u;
        clouds[k] = Cloud::Set(alloc::vec![u]);
        for &j in &later {
            dead_left[j] += 1;
        }
        if let Some(a) = audit.as_deref_mut() {
            a.1 &= bookkeeping_holds(oracle, h, plan, &clouds, &image, k);
        }
    }

    let mut map = alloc::vec![0; n];
    for (i, &v) in plan.order.iter().enumerate() {
        map[v] = image[i];
    }
    Ok(Ok(Embedding::new(map)))
}

/// Picks the first candidate of `C_k` with `⌈ℓ_j⌉` neighbors in every active
/// `C_j`, returning it with those neighbors; on failure names the active `j`
/// that stopped the last candidate.
#[allow(clippy::type_complexity)]
fn active_portion(
    oracle: &mut EdgeOracle,
    clouds: &[Cloud],
    k: usize,
    active: &[usize],
    ell: &[f64],
) -> Result<Result<(HostId, Vec<Vec<HostId>>), usize>, StrategyError> {
    let mut blocker = usize::MAX;
    'candidates: for c in 0..clouds[k].len() {
        let u = clouds[k].get(c);
        let mut sets = Vec::with_capacity(active.len());
        for &j in active {
            let target = fmath::ceil_count(ell[j], 1);
            let hits = scan(oracle, u, &clouds[j], target)?;
            if (hits.len() as u64) < target {
                blocker = j;
                continue 'candidates;
            }
            sets.push(hits);
        }
        return Ok(Ok((u, sets)));
    }
    Ok(Err(blocker))
}

/// Neighbors of `u` in `cloud`, in order, stopping after `target`.
fn scan(
    oracle: &mut EdgeOracle,
    u: HostId,
    cloud: &Cloud,
    target: u64,
) -> Result<Vec<HostId>, StrategyError> {
    let mut hits = Vec::new();
    for i in 0..cloud.len() {
        if hits.len() as u64 == target {
            break;
        }
        let w = cloud.get(i);
        if oracle.query(u, w)? {
            hits.push(w);
        }
    }
    Ok(hits)
}

/// After round `k`: every member of a living cloud is a memoized neighbor of
/// the image of each dead neighbor, and dead images are pairwise consistent.
fn bookkeeping_holds(
    oracle: &EdgeOracle,
    h: &PatternGraph,
    plan: &Plan,
    clouds: &[Cloud],
    image: &[HostId],
    k: usize,
) -> bool {
    (0..h.n()).all(|j| {
        let dead: Vec<usize> = h
            .neighbors(plan.order[j])
            .iter()
            .map(|&w| plan.pos[w])
            .filter(|&i| i <= k && i != j)
            .collect();
        if j <= k {
            dead.iter()
                .all(|&i| oracle.peek(image[i], image[j]) == Some(true))
        } else {
            (0..clouds[j].len()).all(|c| {
                let w = clouds[j].get(c);
                dead.iter().all(|&i| oracle.peek(image[i], w) == Some(true))
            })
        }
    })
}
