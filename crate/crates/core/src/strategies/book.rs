//! Books `B_{d,t}` via a spine clique, a pool of common neighbors, and a
//! star search inside the pool.

use alloc::format;
use alloc::vec::Vec;

use super::trivial::build_in_order;
use super::{
    amplify, ell_clamped, find_common_neighbors, Attempt, Phases, StrategyError, StrategyOutcome,
    StrategyParams,
};
use crate::embed::Embedding;
use crate::fmath;
use crate::graph;
use crate::oracle::{EdgeOracle, HostId};
use crate::structure::degeneracy_order;

/// Largest page count [`run_book`] accepts at this `b`: `⌈ℓ⌉`, but never
/// below 2 so that a triforce can always draw two pages.
pub fn max_pages(b: f64, params: &StrategyParams) -> Result<usize, StrategyError> {
    let l = ell_clamped(b, params.ell_floor)?.0;
    Ok((libm::ceil(l) as usize).max(2))
}

/// Builds `B_{d,t}`; the embedding uses the labelling of
/// [`graph::book`]: spine `0..d`, pages `d..d+t`.
pub fn run_book(
    oracle: &mut EdgeOracle,
    d: usize,
    t: usize,
    params: &StrategyParams,
) -> Result<StrategyOutcome, StrategyError> {
    params.validate()?;
    check_book(oracle.b(), d, t, params)?;
    let h = graph::book(d, t).map_err(|e| StrategyError::InvalidInput(format!("{e}")))?;
    amplify(oracle, &h, params.max_restarts, params.budget, |o, ph| {
        attempt_book(o, d, t, params, ph)
    })
}

fn check_book(b: f64, d: usize, t: usize, params: &StrategyParams) -> Result<(), StrategyError> {
    if d < 2 {
        return Err(StrategyError::InvalidInput(format!(
            "book needs d >= 2, got {d}"
        )));
    }
    let cap = max_pages(b, params)?;
    if t == 0 || t > cap {
        return Err(StrategyError::InvalidInput(format!(
            "book needs 1 <= t <= {cap} at b={b}, got {t}"
        )));
    }
    Ok(())
}

/// One attempt of [`run_book`] with phases `spine-clique`, `pool`, `star`.
pub fn attempt_book(
    oracle: &mut EdgeOracle,
    d: usize,
    t: usize,
    params: &StrategyParams,
    phases: &mut Phases,
) -> Result<Attempt, StrategyError> {
    let b = oracle.b();
    check_book(b, d, t, params)?;
    let (l, clamped) = ell_clamped(b, params.ell_floor)?;
    phases.clamped |= clamped || t as f64 > libm::ceil(l);
    let side = fmath::ceil_count(b / fmath::sqrt(l), 1);

    let k = graph::clique(d - 1).map_err(|e| StrategyError::InvalidInput(format!("{e}")))?;
    let spine = match phases.track("spine-clique", oracle, |o| {
        build_in_order(o, &k, &degeneracy_order(&k), params)
    })? {
        Ok(e) => e.map,
        Err(_) => return Ok(Err("spine-clique".into())),
    };

    let candidates = fmath::ceil_count(
        params.pool_multiplier * fmath::powi(b, d as u32) / fmath::sqrt(l),
        1,
    );
    let target = usize::try_from(2 * side)
        .map_err(|_| StrategyError::InvalidInput("pool size overflows".into()))?;
    let pool = phases.track("pool", oracle, |o| {
        find_common_neighbors(o, &spine, target, candidates)
    })?;
    if pool.len() < target {
        return Ok(Err("pool".into()));
    }

    let (s1, s2) = pool.split_at(target / 2);
    let star = phases.track("star", oracle, |o| find_star(o, s1, s2, t))?;
    let Some((centre, pages)) = star else {
        return Ok(Err("star".into()));
    };
    let mut map = spine;
    map.push(centre);
    map.extend(pages);
    Ok(Ok(Embedding::new(map)))
}

/// First `u` of `s1` (in order) with `t` neighbors in `s2`, together with
/// its first `t` neighbors. Each `u` scans `s2` only until it has `t`.
pub(crate) fn find_star(
    oracle: &mut EdgeOracle,
    s1: &[HostId],
    s2: &[HostId],
    t: usize,
) -> Result<Option<(HostId, Vec<HostId>)>, StrategyError> {
    for &u in s1 {
        let mut hits = Vec::with_capacity(t);
        for &w in s2 {
            if oracle.query(u, w)? {
                hits.push(w);
                if hits.len() == t {
                    return Ok(Some((u, hits)));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::validate_embedding;
    use crate::oracle::OracleConfig;

    #[test]
    fn preconditions() {
        let mut o = EdgeOracle::new(OracleConfig::infinite(1.0 / 1024.0, 1, 0)).unwrap();
        let p = StrategyParams::default();
        assert!(run_book(&mut o, 1, 1, &p).is_err());
        assert!(run_book(&mut o, 2, 0, &p).is_err());
        assert!(run_book(&mut o, 2, 3, &p).is_err());
        assert_eq!(max_pages(1024.0, &p).unwrap(), 2);
    }

    #[test]
    fn always_edge_layout() {
        let mut o = EdgeOracle::always_edge(OracleConfig::infinite(1.0 / 64.0, 1, 0));
        let out = run_book(&mut o, 3, 2, &StrategyParams::default()).unwrap();
        assert!(out.success);
        let map = out.embedding.unwrap().map;
        assert_eq!(map.len(), 5);
        let labels: Vec<_> = out.phase_counts.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["spine-clique", "pool", "star"]);
        assert_eq!(out.phase_counts[0].1, 1);
        assert_eq!(out.phase_counts[2].1, 2);
        // centre is the first pool vertex, pages open the second half
        assert_eq!(map[2], map[0].min(map[1]) + 2);
        assert_eq!(map[4], map[3] + 1);
        assert!(map[3] > map[2] + 1);
    }

    #[test]
    fn smallest_book_is_a_triangle() {
        let h = graph::book(2, 1).unwrap();
        for trial in 0..10 {
            let mut o = EdgeOracle::new(OracleConfig::infinite(1.0 / 32.0, 9, trial)).unwrap();
            let out = run_book(&mut o, 2, 1, &StrategyParams::default()).unwrap();
            assert!(out.success);
            assert!(validate_embedding(&h, out.embedding.as_ref().unwrap(), &o));
            assert_eq!(
                out.phase_counts.iter().map(|(_, q)| q).sum::<u64>(),
                out.queries_used
            );
        }
    }

    #[test]
    fn random_books_validate() {
        for (d, p) in [(2, 1.0 / 256.0), (3, 1.0 / 16.0)] {
            let t = max_pages(1.0 / p, &StrategyParams::default()).unwrap();
            let h = graph::book(d, t).unwrap();
            for trial in 0..5 {
                let mut o = EdgeOracle::new(OracleConfig::infinite(p, 2, trial)).unwrap();
                let out = run_book(&mut o, d, t, &StrategyParams::default()).unwrap();
                assert!(out.success, "d={d} trial={trial} {:?}", out.failure_stage);
                assert!(validate_embedding(&h, out.embedding.as_ref().unwrap(), &o));
            }
        }
    }
}
