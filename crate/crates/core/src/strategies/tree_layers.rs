//! (1,1)-degenerate patterns, one tree layer at a time.
//!
//! The first layer is grown vertex by vertex. Each later layer `T_k` gets a
//! candidate set `C_v` of `⌈b^{1-ε_k}⌉` vertices per pattern vertex, drawn
//! as neighbors of the image of its back-neighbor when it has one, then the
//! tree is located inside the candidate sets by a rooted search that
//! queries `C_v × C_{v'}` pairs along tree edges.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    amplify, find_common_neighbors, Attempt, Phases, StrategyError, StrategyOutcome, StrategyParams,
};
use crate::embed::Embedding;
use crate::fmath;
use crate::graph::PatternGraph;
use crate::oracle::{EdgeOracle, HostId};
use crate::structure::TreePartition;

pub fn run_tree_layers(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    partition: &TreePartition,
    params: &StrategyParams,
) -> Result<StrategyOutcome, StrategyError> {
    params.validate()?;
    check_partition(h, partition)?;
    amplify(oracle, h, params.max_restarts, params.budget, |o, ph| {
        attempt_tree_layers(o, h, partition, params, ph)
    })
}

fn check_partition(h: &PatternGraph, partition: &TreePartition) -> Result<(), StrategyError> {
    if partition.is_valid_for(h) {
        Ok(())
    } else {
        Err(StrategyError::InvalidInput(
            "tree partition does not fit the pattern".into(),
        ))
    }
}

/// One attempt of [`run_tree_layers`]. Every layer may be redrawn up to
/// `max_restarts` times before the attempt gives up.
pub fn attempt_tree_layers(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    partition: &TreePartition,
    params: &StrategyParams,
    phases: &mut Phases,
) -> Result<Attempt, StrategyError> {
    check_partition(h, partition)?;
    let b = oracle.b();
    let mut layer_of = alloc::vec![usize::MAX; h.n()];
    let mut map: Vec<Option<HostId>> = alloc::vec![None; h.n()];
    let mut widest = 0;
    for (k, layer) in partition.layers.iter().enumerate() {
        for &v in layer {
            layer_of[v] = k;
        }
        widest = widest.max(layer.len());
        let eps = 1.0 / widest as f64;
        let tree = LayerTree::new(h, layer);
        let mut last = String::new();
        let mut placed = None;
        for _ in 0..params.max_restarts {
            let r = if k == 0 {
                grow_first(oracle, &tree, b, params, phases)?
            } else {
                let size = if layer.len() == 1 {
                    1
                } else {
                    fmath::ceil_count(fmath::powf(b, 1.0 - eps), 1)
                };
                place_layer(
                    oracle, h, &tree, &layer_of, &map, k, size, b, params, phases,
                )?
            };
            match r {
                Ok(images) => {
                    placed = Some(images);
                    break;
                }
                Err(stage) => last = stage,
            }
        }
        let Some(images) = placed else {
            return Ok(Err(last));
        };
        for (&v, x) in tree.vertices.iter().zip(images) {
            map[v] = Some(x);
        }
    }
    Ok(Ok(Embedding::new(
        map.into_iter().map(|x| x.unwrap_or_default()).collect(),
    )))
}

/// A layer as a tree rooted at its smallest vertex; `parent[i]` and
/// `children[i]` index into `vertices`, and `bfs` lists indices root first.
struct LayerTree {
    vertices: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    bfs: Vec<usize>,
}

impl LayerTree {
    fn new(h: &PatternGraph, layer: &[usize]) -> Self {
        let mut vertices = layer.to_vec();
        vertices.sort_unstable();
        let idx = |v: usize| vertices.iter().position(|&w| w == v);
        let n = vertices.len();
        let mut parent = alloc::vec![None; n];
        let mut children = alloc::vec![Vec::new(); n];
        let mut seen = alloc::vec![false; n];
        let mut bfs = alloc::vec![0];
        seen[0] = true;
        let mut head = 0;
        while head < bfs.len() {
            let i = bfs[head];
            head += 1;
            for &w in h.neighbors(vertices[i]) {
                if let Some(j) = idx(w) {
                    if !seen[j] {
                        seen[j] = true;
                        parent[j] = Some(i);
                        children[i].push(j);
                        bfs.push(j);
                    }
                }
            }
        }
        LayerTree {
            vertices,
            parent,
            children,
            bfs,
        }
    }
}

/// Images in the order of `LayerTree::vertices`, or the failing stage.
type LayerResult = Result<Vec<HostId>, String>;

fn grow_first(
    oracle: &mut EdgeOracle,
    tree: &LayerTree,
    b: f64,
    params: &StrategyParams,
    phases: &mut Phases,
) -> Result<LayerResult, StrategyError> {
    let budget = fmath::ceil_count(params.pool_multiplier * b, 1);
    let r = phases.track("layer1:tree", oracle, |o| {
        let mut images: Vec<HostId> = alloc::vec![0; tree.vertices.len()];
        for &i in &tree.bfs {
            images[i] = match tree.parent[i] {
                None => o.fresh_vertex()?,
                Some(p) => match find_common_neighbors(o, &[images[p]], 1, budget)?.first() {
                    Some(&w) => w,
                    None => return Ok(None),
                },
            };
        }
        Ok::<_, StrategyError>(Some(images))
    })?;
    Ok(r.ok_or_else(|| String::from("layer 1 tree")))
}

#[allow(clippy::too_many_arguments)]
fn place_layer(
    oracle: &mut EdgeOracle,
    h: &PatternGraph,
    tree: &LayerTree,
    layer_of: &[usize],
    map: &[Option<HostId>],
    k: usize,
    size: u64,
    b: f64,
    params: &StrategyParams,
    phases: &mut Phases,
) -> Result<LayerResult, StrategyError> {
    let label = format!("layer{}:candidates", k + 1);
    let budget = fmath::ceil_count(params.pool_multiplier * b * size as f64, 1);
    let cands = phases.track(&label, oracle, |o| {
        let mut cands = Vec::with_capacity(tree.vertices.len());
        for &v in &tree.vertices {
            let back = h
                .neighbors(v)
                .iter()
                .find(|&&w| layer_of[w] < k)
                .and_then(|&w| map[w]);
            let c = match back {
                Some(x) => find_common_neighbors(o, &[x], size as usize, budget)?,
                None => o.fresh_block(size)?.collect(),
            };
            if (c.len() as u64) < size {
                return Ok(None);
            }
            cands.push(c);
        }
        Ok::<_, StrategyError>(Some(cands))
    })?;
    let Some(cands) = cands else {
        return Ok(Err(format!("layer {} candidates", k + 1)));
    };

    let label = format!("layer{}:tree-search", k + 1);
    let found = phases.track(&label, oracle, |o| {
        let mut search = Search {
            tree,
            cands: &cands,
            failed: BTreeSet::new(),
            images: alloc::vec![0; tree.vertices.len()],
        };
        for &x in &cands[0] {
            if search.extend(o, 0, x)? {
                return Ok(Some(search.images));
            }
        }
        Ok::<_, StrategyError>(None)
    })?;
    Ok(found.ok_or_else(|| format!("layer {} tree-search", k + 1)))
}

struct Search<'a> {
    tree: &'a LayerTree,
    cands: &'a [Vec<HostId>],
    /// `(tree index, candidate)` pairs known not to carry their subtree.
    failed: BTreeSet<(usize, HostId)>,
    images: Vec<HostId>,
}

impl Search<'_> {
    /// Places tree vertex `i` at `x` and each child subtree at the first
    /// candidate adjacent to `x` that carries it.
    fn extend(&mut self, o: &mut EdgeOracle, i: usize, x: HostId) -> Result<bool, StrategyError> {
        if self.failed.contains(&(i, x)) {
            return Ok(false);
        }
        self.images[i] = x;
        for c in 0..self.tree.children[i].len() {
            let child = self.tree.children[i][c];
            let mut ok = false;
            for &y in &self.cands[child] {
                if o.query(x, y)? && self.extend(o, child, y)? {
                    ok = true;
                    break;
                }
            }
            if !ok {
                self.failed.insert((i, x));
                return Ok(false);
            }
        }
        Ok(true)
    }
}
