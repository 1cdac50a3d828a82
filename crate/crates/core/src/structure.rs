//! Degeneracy orderings, depth, and (1,1)-tree partitions of pattern graphs.
//!
//! Depth is handled in ordering form: an ordering with back-degree at most
//! `d` is the same thing as an acyclic orientation with out-degree at most
//! `d` (orient every edge from its later endpoint to its earlier one), and
//! longest directed paths become longest index-increasing paths.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{GraphError, PatternGraph};

/// Size cutoffs for the exhaustive routines. Defaults keep worst cases in
/// the seconds range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactLimits {
    pub depth: usize,
    pub tree_partition: usize,
    pub host: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            depth: 10,
            tree_partition: 12,
            host: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegeneracyOrdering {
    /// `order[i]` is the vertex at position `i`.
    pub order: Vec<usize>,
    /// Maximum back-degree over all positions.
    pub d: usize,
    /// `depths[i]`: longest index-increasing path (in edges) ending at
    /// position `i`.
    pub depths: Vec<usize>,
    pub delta: usize,
    /// Set when the ordering came from the large-graph heuristic rather than
    /// the exhaustive search.
    pub heuristic: bool,
}

impl DegeneracyOrdering {
    /// Wraps an explicit ordering, computing back-degree and depths.
    pub fn from_order(h: &PatternGraph, order: Vec<usize>) -> Result<Self, GraphError> {
        let n = h.n();
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&v| v >= n || core::mem::replace(&mut seen[v], true))
        {
            return Err(GraphError::InvalidParams {
                family: "ordering".into(),
                reason: "not a permutation of the vertex set".into(),
            });
        }
        let pos = positions(&order);
        let d = (0..n)
            .map(|i| left_neighbors_at(h, &order, &pos, i).count())
            .max()
            .unwrap_or(0);
        let depths = ordering_depths(h, &order);
        let delta = depths.iter().copied().max().unwrap_or(0);
        Ok(DegeneracyOrdering {
            order,
            d,
            depths,
            delta,
            heuristic: false,
        })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// `pos[v]` is the position of vertex `v`.
    pub fn positions(&self) -> Vec<usize> {
        positions(&self.order)
    }

    /// Positions `j < i` holding neighbors of the vertex at position `i`,
    /// ascending.
    pub fn left_neighbors(&self, h: &PatternGraph, i: usize) -> Vec<usize> {
        let pos = self.positions();
        let mut out: Vec<usize> = left_neighbors_at(h, &self.order, &pos, i).collect();
        out.sort_unstable();
        out
    }
}

fn positions(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

fn left_neighbors_at<'a>(
    h: &'a PatternGraph,
    order: &'a [usize],
    pos: &'a [usize],
    i: usize,
) -> impl Iterator<Item = usize> + 'a {
    h.neighbors(order[i])
        .iter()
        .map(move |&w| pos[w])
        .filter(move |&j| j < i)
}

/// Longest index-increasing path ending at each position.
pub fn ordering_depths(h: &PatternGraph, order: &[usize]) -> Vec<usize> {
    let pos = positions(order);
    let mut depths = vec![0usize; order.len()];
    for i in 0..order.len() {
        depths[i] = left_neighbors_at(h, order, &pos, i)
            .map(|j| depths[j] + 1)
            .max()
            .unwrap_or(0);
    }
    depths
}

/// Minimum-degree peeling, ties to the smallest label. Returns the peel
/// sequence and the largest degree seen at removal.
fn peel(h: &PatternGraph) -> (Vec<usize>, usize) {
    let n = h.n();
    let mut deg: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut seq = Vec::with_capacity(n);
    let mut d = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (deg[v], v))
            .expect("vertices remain");
        d = d.max(deg[v]);
        removed[v] = true;
        for &w in h.neighbors(v) {
            if !removed[w] {
                deg[w] -= 1;
            }
        }
        seq.push(v);
    }
    (seq, d)
}

/// Degeneracy ordering by iterated minimum-degree peeling; the reversed peel
/// sequence has back-degree equal to the degeneracy.
pub fn degeneracy_order(h: &PatternGraph) -> DegeneracyOrdering {
    let (mut seq, d) = peel(h);
    seq.reverse();
    let mut ord = DegeneracyOrdering::from_order(h, seq).expect("peel order is a permutation");
    debug_assert!(ord.d <= d);
    ord.d = d;
    ord
}

pub fn degeneracy(h: &PatternGraph) -> usize {
    peel(h).1
}

/// An ordering with back-degree at most `d` minimizing the longest
/// increasing path, using the default size cutoff.
pub fn depth_orientation(h: &PatternGraph, d: usize) -> Result<DegeneracyOrdering, GraphError> {
    depth_orientation_with_limit(h, d, ExactLimits::default().depth)
}

/// Exhaustive branch-and-bound for `n <= exact_limit`. Above the limit the
/// peeling ordering is returned with `heuristic = true`.
pub fn depth_orientation_with_limit(
    h: &PatternGraph,
    d: usize,
    exact_limit: usize,
) -> Result<DegeneracyOrdering, GraphError> {
    let degeneracy = degeneracy(h);
    if d < degeneracy {
        return Err(GraphError::DegeneracyTooLow {
            requested: d,
            degeneracy,
        });
    }
    let start = degeneracy_order(h);
    if h.n() > exact_limit.min(64) {
        let mut ord = start;
        ord.d = d;
        ord.heuristic = true;
        return Ok(ord);
    }

    let mut search = DepthSearch {
        masks: h.masks(),
        d,
        best: start.delta,
        best_order: start.order.clone(),
        order: Vec::with_capacity(h.n()),
        depth: vec![0; h.n()],
    };
    search.run(0, 0);
    let mut ord = DegeneracyOrdering::from_order(h, search.best_order)?;
    ord.d = d;
    Ok(ord)
}

struct DepthSearch {
    masks: Vec<u64>,
    d: usize,
    best: usize,
    best_order: Vec<usize>,
    order: Vec<usize>,
    depth: Vec<usize>,
}

impl DepthSearch {
    fn run(&mut self, placed: u64, cur_max: usize) {
        let n = self.masks.len();
        if self.order.len() == n {
            if cur_max < self.best {
                self.best = cur_max;
                self.best_order = self.order.clone();
            }
            return;
        }
        for v in 0..n {
            if placed >> v & 1 == 1 {
                continue;
            }
            let back = self.masks[v] & placed;
            if back.count_ones() as usize > self.d {
                continue;
            }
            let mut dv = 0;
            let mut m = back;
            while m != 0 {
                let w = m.trailing_zeros() as usize;
                m &= m - 1;
                dv = dv.max(self.depth[w] + 1);
            }
            let next_max = cur_max.max(dv);
            if next_max >= self.best {
                continue;
            }
            self.depth[v] = dv;
            self.order.push(v);
            self.run(placed | 1 << v, next_max);
            self.order.pop();
            if self.best == 0 {
                return;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreePartition {
    /// Layers `T_1..T_m`, each sorted ascending.
    pub layers: Vec<Vec<usize>>,
    /// `1 / max |T_k|`.
    pub epsilon: f64,
}

impl TreePartition {
    pub fn new(layers: Vec<Vec<usize>>) -> Self {
        let widest = layers.iter().map(Vec::len).max().unwrap_or(1).max(1);
        TreePartition {
            layers,
            epsilon: 1.0 / widest as f64,
        }
    }

    /// Checks the partition, tree, and single-back-neighbor conditions.
    pub fn is_valid_for(&self, h: &PatternGraph) -> bool {
        let n = h.n();
        let mut layer_of = vec![usize::MAX; n];
        for (k, layer) in self.layers.iter().enumerate() {
            for &v in layer {
                if v >= n || layer_of[v] != usize::MAX {
                    return false;
                }
                layer_of[v] = k;
            }
        }
        if layer_of.contains(&usize::MAX) {
            return false;
        }
        self.layers.iter().enumerate().all(|(k, layer)| {
            induced_is_tree(h, layer)
                && layer
                    .iter()
                    .all(|&v| h.neighbors(v).iter().filter(|&&w| layer_of[w] < k).count() <= 1)
        })
    }
}

fn induced_is_tree(h: &PatternGraph, set: &[usize]) -> bool {
    if set.is_empty() {
        return false;
    }
    let inside = |v: usize| set.contains(&v);
    let edges: usize = set
        .iter()
        .map(|&v| h.neighbors(v).iter().filter(|&&w| inside(w)).count())
        .sum::<usize>()
        / 2;
    if edges != set.len() - 1 {
        return false;
    }
    let mut seen = vec![set[0]];
    let mut stack = vec![set[0]];
    while let Some(v) = stack.pop() {
        for &w in h.neighbors(v) {
            if inside(w) && !seen.contains(&w) {
                seen.push(w);
                stack.push(w);
            }
        }
    }
    seen.len() == set.len()
}

/// Finds a (1,1)-tree partition with the default size cutoff.
pub fn find_tree_partition(h: &PatternGraph) -> Result<Option<TreePartition>, GraphError> {
    find_tree_partition_with_limit(h, ExactLimits::default().tree_partition)
}

/// Exhaustive search over ordered partitions, memoized on the set of
/// already-covered vertices. Among valid partitions the one with the fewest
/// layers is returned, then the one with the smallest widest layer (largest
/// `epsilon`); remaining ties go to the numerically smallest next layer.
pub fn find_tree_partition_with_limit(
    h: &PatternGraph,
    limit: usize,
) -> Result<Option<TreePartition>, GraphError> {
    let n = h.n();
    if n > limit.min(20) {
        return Err(GraphError::SizeLimit {
            what: "pattern",
            size: n,
            limit: limit.min(20),
        });
    }
    if n == 0 {
        return Ok(Some(TreePartition::new(Vec::new())));
    }
    let masks = h.masks();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut solver = PartitionSolver {
        masks: masks.iter().map(|&m| m as u32).collect(),
        full,
        memo: BTreeMap::new(),
    };
    let Some(_) = solver.best(0) else {
        return Ok(None);
    };
    let mut layers = Vec::new();
    let mut covered = 0u32;
    while covered != full {
        let (_, layer) = solver.memo[&covered].expect("reachable optimum");
        layers.push(bits(layer));
        covered |= layer;
    }
    Ok(Some(TreePartition::new(layers)))
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

type Score = (usize, usize);

struct PartitionSolver {
    masks: Vec<u32>,
    full: u32,
    memo: BTreeMap<u32, Option<(Score, u32)>>,
}

impl PartitionSolver {
    /// Best `(layers, widest)` for covering the complement of `covered`,
    /// with the first layer that achieves it.
    fn best(&mut self, covered: u32) -> Option<Score> {
        if covered == self.full {
            return Some((0, 0));
        }
        if let Some(hit) = self.memo.get(&covered) {
            return hit.map(|(s, _)| s);
        }
        let rest = self.full & !covered;
        // Only vertices with at most one covered neighbor may join the layer.
        let allowed = (0..self.masks.len())
            .filter(|&v| rest >> v & 1 == 1 && (self.masks[v] & covered).count_ones() <= 1)
            .fold(0u32, |m, v| m | 1 << v);
        let mut best: Option<(Score, u32)> = None;
        let mut sub = allowed;
        while sub != 0 {
            if self.is_tree(sub) {
                if let Some((layers, widest)) = self.best(covered | sub) {
                    let score = (layers + 1, widest.max(sub.count_ones() as usize));
                    let better = match best {
                        None => true,
                        Some((s, m)) => score < s || (score == s && sub < m),
                    };
                    if better {
                        best = Some((score, sub));
                    }
                }
            }
            sub = (sub - 1) & allowed;
        }
        self.memo.insert(covered, best);
        best.map(|(s, _)| s)
    }

    fn is_tree(&self, set: u32) -> bool {
        let size = set.count_ones();
        let mut edge_ends = 0;
        let mut m = set;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            edge_ends += (self.masks[v] & set).count_ones();
        }
        if edge_ends / 2 != size - 1 {
            return false;
        }
        let mut reach = 1u32 << set.trailing_zeros();
        loop {
            let mut next = reach;
            let mut m = reach;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                next |= self.masks[v] & set;
            }
            if next == reach {
                return reach == set;
            }
            reach = next;
        }
    }
}
