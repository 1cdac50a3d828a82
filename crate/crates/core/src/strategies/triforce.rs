//! The triforce from a two-spine book plus one neighbor set per spine vertex.

use alloc::vec;

use super::book::{attempt_book, max_pages};
use super::{
    amplify, ell_clamped, find_common_neighbors, Attempt, Phases, StrategyError, StrategyOutcome,
    StrategyParams,
};
use crate::embed::Embedding;
use crate::fmath;
use crate::graph::triforce;
use crate::oracle::{EdgeOracle, HostId};

/// Embeds [`triforce`] as `x, y, z, z', y', x'` on vertices `0..6`, where
/// `x, y` is the book spine, `z, z'` are pages, and `x'`, `y'` are
/// neighbors of `x`, `y` joined to `z`.
pub fn run_triforce(
    oracle: &mut EdgeOracle,
    params: &StrategyParams,
) -> Result<StrategyOutcome, StrategyError> {
    params.validate()?;
    let h = triforce();
    amplify(oracle, &h, params.max_restarts, params.budget, |o, ph| {
        attempt_triforce(o, params, ph)
    })
}

/// One attempt of [`run_triforce`]; phases are the book's plus
/// `side-sets` and `linking`.
pub fn attempt_triforce(
    oracle: &mut EdgeOracle,
    params: &StrategyParams,
    phases: &mut Phases,
) -> Result<Attempt, StrategyError> {
    let b = oracle.b();
    let t = max_pages(b, params)?;
    let book = match attempt_book(oracle, 2, t, params, phases)? {
        Ok(e) => e.map,
        Err(_) => return Ok(Err("book".into())),
    };
    let (x, y, pages) = (book[0], book[1], &book[2..]);

    let l = ell_clamped(b, params.ell_floor)?.0;
    let side = fmath::ceil_count(b / fmath::sqrt(l), 1);
    let budget = fmath::ceil_count(params.pool_multiplier * b * side as f64, 1);
    let side = side as usize;
    let sets = phases.track("side-sets", oracle, |o| {
        let sx = find_common_neighbors(o, &[x], side, budget)?;
        if sx.len() < side {
            return Ok(None);
        }
        let sy = find_common_neighbors(o, &[y], side, budget)?;
        Ok::<_, StrategyError>((sy.len() == side).then_some((sx, sy)))
    })?;
    let Some((sx, sy)) = sets else {
        return Ok(Err("side-sets".into()));
    };

    let link = phases.track("linking", oracle, |o| {
        for (i, &z) in pages.iter().enumerate() {
            let Some(xp) = first_neighbor(o, z, &sx)? else {
                continue;
            };
            let Some(yp) = first_neighbor(o, z, &sy)? else {
                continue;
            };
            let zp = if i == 0 { pages[1] } else { pages[0] };
            return Ok(Some([z, zp, yp, xp]));
        }
        Ok::<_, StrategyError>(None)
    })?;
    let Some([z, zp, yp, xp]) = link else {
        return Ok(Err("linking".into()));
    };
    Ok(Ok(Embedding::new(vec![x, y, z, zp, yp, xp])))
}

fn first_neighbor(
    oracle: &mut EdgeOracle,
    z: HostId,
    set: &[HostId],
) -> Result<Option<HostId>, StrategyError> {
    for &w in set {
        if oracle.query(z, w)? {
            return Ok(Some(w));
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
    fn always_edge_links_first_page() {
        let mut o = EdgeOracle::always_edge(OracleConfig::infinite(1.0 / 64.0, 1, 0));
        let out = run_triforce(&mut o, &StrategyParams::default()).unwrap();
        assert!(out.success);
        assert_eq!(out.restarts_used, 1);
        let map = out.embedding.unwrap().map;
        let link = out
            .phase_counts
            .iter()
            .find(|(l, _)| l == "linking")
            .unwrap();
        assert_eq!(link.1, 2);
        // z is the first page, z' the second
        assert_eq!(map[3], map[2] + 1);
        assert!(validate_embedding(&triforce(), &Embedding::new(map), &o));
    }

    #[test]
    fn random_runs_validate() {
        let h = triforce();
        for trial in 0..10 {
            let mut o = EdgeOracle::new(OracleConfig::infinite(1.0 / 128.0, 4, trial)).unwrap();
            let out = run_triforce(&mut o, &StrategyParams::default()).unwrap();
            assert!(out.success, "{:?}", out.failure_stage);
            assert!(validate_embedding(&h, out.embedding.as_ref().unwrap(), &o));
            assert_eq!(
                out.phase_counts.iter().map(|(_, q)| q).sum::<u64>(),
                out.queries_used
            );
        }
    }
}
