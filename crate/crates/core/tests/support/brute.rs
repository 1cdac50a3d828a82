//! Exhaustive reference answers for patterns with at most 7 vertices, and a
//! fixed corpus of 50 such patterns.

#![allow(dead_code)]

use subquery_core::graph::{book, clique, path, star, triforce};
use subquery_core::oracle::pair_hash;
use subquery_core::PatternGraph;

fn adj(h: &PatternGraph) -> Vec<u32> {
    let mut a = vec![0u32; h.n()];
    for &(u, v) in h.edges() {
        a[u] |= 1 << v;
        a[v] |= 1 << u;
    }
    a
}

/// Largest minimum degree over all nonempty induced subgraphs.
pub fn degeneracy(h: &PatternGraph) -> usize {
    let a = adj(h);
    let n = h.n();
    (1u32..1 << n)
        .map(|s| {
            (0..n)
                .filter(|&v| s >> v & 1 == 1)
                .map(|v| (a[v] & s).count_ones() as usize)
                .min()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap(n, &mut cur, &mut out);
    out
}

fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap(k - 1, cur, out);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

/// Back-degree and longest increasing path (in edges) of an ordering.
pub fn ordering_stats(h: &PatternGraph, order: &[usize]) -> (usize, usize) {
    let a = adj(h);
    let mut pos = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut longest = vec![0usize; order.len()];
    let (mut back, mut depth) = (0, 0);
    for (i, &v) in order.iter().enumerate() {
        let earlier: Vec<usize> = (0..order.len())
            .filter(|&w| a[v] >> w & 1 == 1 && pos[w] < i)
            .collect();
        back = back.max(earlier.len());
        longest[v] = earlier.iter().map(|&w| longest[w] + 1).max().unwrap_or(0);
        depth = depth.max(longest[v]);
    }
    (back, depth)
}

/// Minimum over all orderings of the max back-degree.
pub fn degeneracy_by_orderings(h: &PatternGraph) -> usize {
    permutations(h.n())
        .iter()
        .map(|o| ordering_stats(h, o).0)
        .min()
        .unwrap_or(0)
}

/// Minimum longest increasing path over orderings with back-degree <= d.
pub fn depth(h: &PatternGraph, d: usize) -> Option<usize> {
    permutations(h.n())
        .iter()
        .map(|o| ordering_stats(h, o))
        .filter(|&(b, _)| b <= d)
        .map(|(_, l)| l)
        .min()
}

fn is_tree(a: &[u32], set: u32) -> bool {
    if set == 0 {
        return false;
    }
    let edges: u32 = (0..a.len())
        .filter(|&v| set >> v & 1 == 1)
        .map(|v| (a[v] & set).count_ones())
        .sum::<u32>()
        / 2;
    if edges + 1 != set.count_ones() {
        return false;
    }
    let mut seen = 1u32 << set.trailing_zeros();
    loop {
        let grow = (0..a.len())
            .filter(|&v| seen >> v & 1 == 1)
            .fold(seen, |m, v| m | (a[v] & set));
        if grow == seen {
            return seen == set;
        }
        seen = grow;
    }
}

/// Best `(layers, widest layer)` over all ordered partitions into induced
/// trees where each vertex has at most one neighbor in earlier layers.
pub fn tree_partition_score(h: &PatternGraph) -> Option<(usize, usize)> {
    let n = h.n();
    let a = adj(h);
    let mut best: Option<(usize, usize)> = None;
    let mut label = vec![0usize; n];
    let total = n.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for l in label.iter_mut() {
            *l = c % n;
            c /= n;
        }
        let layers = label.iter().max().map_or(0, |m| m + 1);
        let masks: Vec<u32> = (0..layers)
            .map(|k| (0..n).filter(|&v| label[v] == k).fold(0, |m, v| m | 1 << v))
            .collect();
        if masks.iter().any(|&m| m == 0) {
            continue;
        }
        let mut earlier = 0u32;
        let ok = masks.iter().all(|&m| {
            let good = is_tree(&a, m)
                && (0..n)
                    .filter(|&v| m >> v & 1 == 1)
                    .all(|v| (a[v] & earlier).count_ones() <= 1);
            earlier |= m;
            good
        });
        if ok {
            let widest = masks
                .iter()
                .map(|m| m.count_ones() as usize)
                .max()
                .unwrap_or(0);
            let score = (layers, widest);
            if best.is_none_or(|b| score < b) {
                best = Some(score);
            }
        }
    }
    best
}

/// 50 patterns on 1..=7 vertices: named families, then seeded random graphs.
pub fn corpus() -> Vec<PatternGraph> {
    let mut out = vec![
        PatternGraph::new(1, []).unwrap(),
        PatternGraph::new(3, []).unwrap(),
        clique(2).unwrap(),
        clique(3).unwrap(),
        clique(4).unwrap(),
        clique(5).unwrap(),
        path(3).unwrap(),
        path(5).unwrap(),
        path(7).unwrap(),
        star(3).unwrap(),
        star(6).unwrap(),
        triforce(),
        book(2, 1).unwrap(),
        book(2, 3).unwrap(),
        book(3, 2).unwrap(),
        book(2, 5).unwrap(),
    ];
    for n in [4, 5, 6, 7] {
        out.push(PatternGraph::new(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap());
    }
    // K_{3,3}, a wheel, two triangles sharing a vertex, a tree plus a matching
    out.push(PatternGraph::new(6, (0..3).flat_map(|u| (3..6).map(move |v| (u, v)))).unwrap());
    out.push(PatternGraph::new(6, (1..6).flat_map(|v| [(0, v), (v, v % 5 + 1)])).unwrap());
    out.push(PatternGraph::new(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap());
    out.push(
        PatternGraph::new(7, [(0, 1), (0, 2), (0, 3), (4, 5), (5, 6), (1, 4), (2, 5)]).unwrap(),
    );
    let mut i = 0u64;
    while out.len() < 50 {
        let n = 3 + (i % 5) as usize;
        let q = [0.3, 0.5, 0.7][(i % 3) as usize];
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| {
                (pair_hash(0xC0FFEE, i, u as u64, v as u64) >> 11) as f64 / (1u64 << 53) as f64 <= q
            })
            .collect();
        out.push(PatternGraph::new(n, edges).unwrap());
        i += 1;
    }
    out
}
