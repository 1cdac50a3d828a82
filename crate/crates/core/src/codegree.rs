//! Codegree statistics of explicit hosts.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::HostGraph;

/// Maximum over all `k`-subsets `U` of the number of common neighbors of `U`.
///
/// `k = 1` is the maximum degree; `k = 2` counts wedges through every
/// vertex; larger `k` enumerates subsets with running bitset intersections,
/// pruned as soon as the intersection cannot beat the best so far.
pub fn max_codegree(host: &HostGraph, k: usize) -> usize {
    assert!(k >= 1, "k must be positive");
    let n = host.n();
    if k > n {
        return 0;
    }
    match k {
        1 => (0..n).map(|u| host.degree(u)).max().unwrap_or(0),
        2 => max_pair_codegree(host),
        _ => {
            let mut best = 0;
            let mut acc = Vec::new();
            for u in 0..n {
                acc.clear();
                acc.extend_from_slice(host.row(u));
                subsets(host, k - 1, u + 1, &acc, &mut best);
            }
            best
        }
    }
}

fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

fn subsets(host: &HostGraph, left: usize, from: usize, acc: &[u64], best: &mut usize) {
    let common = popcount(acc);
    if common <= *best {
        return;
    }
    if left == 0 {
        *best = common;
        return;
    }
    let mut next = vec![0u64; acc.len()];
    for v in from..host.n() {
        if host.n() - v < left {
            break;
        }
        for (o, (a, r)) in next.iter_mut().zip(acc.iter().zip(host.row(v))) {
            *o = a & r;
        }
        subsets(host, left - 1, v + 1, &next, best);
    }
}

fn max_pair_codegree(host: &HostGraph) -> usize {
    let n = host.n();
    let mut counts = vec![0u32; n * n];
    let mut nbrs = Vec::new();
    for w in 0..n {
        nbrs.clear();
        nbrs.extend(host.neighbors(w));
        for (i, &u) in nbrs.iter().enumerate() {
            let row = &mut counts[u * n..(u + 1) * n];
            for &v in &nbrs[i + 1..] {
                row[v] += 1;
            }
        }
    }
    counts.into_iter().max().unwrap_or(0) as usize
}
