use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use subquery_core::oracle::{keyed_outcome, HostId};
use subquery_core::{EdgeOracle, OracleConfig, OracleError};

#[derive(Debug, Clone)]
enum Op {
    Query(usize, usize),
    Fresh(u64),
}

fn ops() -> impl Strategy<Value = Vec<Op>> {
    proptest::collection::vec(
        prop_oneof![
            4 => (0usize..64, 0usize..64).prop_map(|(a, b)| Op::Query(a, b)),
            1 => (1u64..6).prop_map(Op::Fresh),
        ],
        1..200,
    )
}

/// Applies `ops`, mapping query indices onto allocated ids; returns the
/// outcome of each answered query.
fn replay(o: &mut EdgeOracle, ops: &[Op]) -> Vec<((HostId, HostId), bool)> {
    let mut ids: Vec<HostId> = o.fresh_block(2).unwrap().collect();
    let mut out = Vec::new();
    for op in ops {
        match *op {
            Op::Fresh(c) => ids.extend(o.fresh_block(c).unwrap()),
            Op::Query(a, b) => {
                let (u, v) = (ids[a % ids.len()], ids[b % ids.len()]);
                if u != v {
                    out.push(((u.min(v), u.max(v)), o.query(u, v).unwrap()));
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn replay_determinism(ops in ops(), seed in any::<u64>(), trial in any::<u64>()) {
        let cfg = OracleConfig::infinite(0.3, seed, trial);
        let mut a = EdgeOracle::new(cfg).unwrap();
        let mut b = EdgeOracle::new(cfg).unwrap();
        prop_assert_eq!(replay(&mut a, &ops), replay(&mut b, &ops));
        prop_assert_eq!(a.query_count(), b.query_count());
        prop_assert_eq!(a.edges_found(), b.edges_found());
    }

    #[test]
    fn count_is_distinct_pairs(ops in ops(), seed in any::<u64>()) {
        let mut o = EdgeOracle::new(OracleConfig::infinite(0.5, seed, 1)).unwrap();
        let answers = replay(&mut o, &ops);
        let distinct: BTreeSet<_> = answers.iter().map(|(pair, _)| *pair).collect();
        prop_assert_eq!(o.query_count(), distinct.len() as u64);
        prop_assert_eq!(o.memo_len(), distinct.len() as u64);
        let memo: BTreeSet<_> = o.memoized_pairs().collect();
        prop_assert_eq!(&memo, &distinct);
        let edges = answers.iter().filter(|(_, b)| *b).map(|(p, _)| *p).collect::<BTreeSet<_>>();
        prop_assert_eq!(o.edges_found(), edges.len() as u64);
        for (u, v) in distinct {
            prop_assert_eq!(o.peek(v, u), Some(keyed_outcome(seed, 1, u, v, 0.5)));
        }
    }

    #[test]
    fn order_independence(ops in ops(), seed in any::<u64>()) {
        let cfg = OracleConfig::infinite(0.2, seed, 9);
        let mut a = EdgeOracle::new(cfg).unwrap();
        let first: BTreeMap<_, _> = replay(&mut a, &ops).into_iter().collect();
        let mut pairs: Vec<_> = first.keys().copied().collect();
        pairs.reverse();
        let k = pairs.len() / 3;
        pairs.rotate_left(k);
        let mut b = EdgeOracle::new(cfg).unwrap();
        let top = pairs.iter().map(|&(_, v)| v).max().unwrap_or(0);
        b.fresh_block(top + 1).unwrap();
        for (u, v) in pairs {
            prop_assert_eq!(b.query(v, u).unwrap(), first[&(u, v)]);
        }
    }

    #[test]
    fn memo_runs_against_set(pairs in proptest::collection::vec((0u64..40, 0u64..40), 1..400)) {
        let mut o = EdgeOracle::new(OracleConfig::infinite(0.5, 3, 3)).unwrap();
        o.fresh_block(40).unwrap();
        let mut reference = BTreeSet::new();
        for (u, v) in pairs {
            if u == v {
                prop_assert_eq!(o.query(u, v), Err(OracleError::SelfQuery(u)));
                continue;
            }
            let before = o.query_count();
            o.query(u, v).unwrap();
            let fresh = reference.insert((u.min(v), u.max(v)));
            prop_assert_eq!(o.query_count(), before + fresh as u64);
        }
        for u in 0..40 {
            for v in 0..40 {
                let known = u != v && reference.contains(&(u.min(v), u.max(v)));
                prop_assert_eq!(o.peek(u, v).is_some(), known);
            }
        }
    }
}

#[test]
fn binomial_mean_within_five_sigma() {
    for p in [0.5, 0.1, 1.0 / 1024.0] {
        let n = 1_000_000u64;
        let hits = (0..n)
            .filter(|&i| keyed_outcome(i % 7, i / 7, i, i + 1 + i % 13, p))
            .count() as f64;
        let mean = n as f64 * p;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (hits - mean).abs() <= 5.0 * sigma,
            "p={p}: {hits} vs {mean} ± {sigma}"
        );
    }
}

#[test]
fn finite_mode_bounds() {
    let mut o = EdgeOracle::new(OracleConfig::finite(4, 0.5, 0, 0)).unwrap();
    assert!(o.query(0, 3).is_ok());
    assert_eq!(o.query(0, 4), Err(OracleError::Unallocated(4)));
    assert_eq!(o.fresh_vertex(), Err(OracleError::UnsupportedMode));
    assert!(EdgeOracle::new(OracleConfig::finite(1, 0.5, 0, 0)).is_err());
    assert!(EdgeOracle::new(OracleConfig::infinite(1.0, 0, 0)).is_err());
}

#[test]
fn unallocated_and_budget() {
    let mut o = EdgeOracle::new(OracleConfig::infinite(0.5, 0, 0)).unwrap();
    let r = o.fresh_block(3).unwrap();
    assert_eq!(
        o.query(r.start, r.end),
        Err(OracleError::Unallocated(r.end))
    );
    o.set_query_limit(Some(2));
    o.query(0, 1).unwrap();
    o.query(1, 2).unwrap();
    assert_eq!(o.query(0, 2), Err(OracleError::BudgetExhausted(2)));
    // memoized pairs stay free
    assert!(o.query(1, 0).is_ok());
    assert_eq!(o.query_count(), 2);
}

#[test]
fn forks_are_disjoint_and_absorbed() {
    let mut parent = EdgeOracle::new(OracleConfig::infinite(0.5, 5, 5)).unwrap();
    let base = parent.fresh_block(4).unwrap();
    let mut a = parent.fork_disjoint().unwrap();
    let mut b = parent.fork_disjoint().unwrap();
    let ra = a.fresh_block(4).unwrap();
    let rb = b.fresh_block(4).unwrap();
    assert!(ra.end <= rb.start || rb.end <= ra.start);
    assert!(base.end <= ra.start);
    let bit = a.query(ra.start, ra.start + 1).unwrap();
    b.query(rb.start, rb.start + 2).unwrap();
    parent.absorb(a);
    parent.absorb(b);
    assert_eq!(parent.query_count(), 2);
    assert_eq!(parent.peek(ra.start, ra.start + 1), Some(bit));
    // absorbed regions are addressable from the parent
    assert!(parent.query(base.start, rb.start + 3).is_ok());
}
