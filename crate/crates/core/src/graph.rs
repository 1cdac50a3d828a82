//! Pattern graphs, explicit host graphs, and the edge-list text format.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: vertex {label} out of range 0..{n}")]
    OutOfRange { line: usize, label: usize, n: usize },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("edge ({0}, {1}) is invalid for a graph on {2} vertices")]
    InvalidEdge(usize, usize, usize),
    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters for `{family}`: {reason}")]
    InvalidParams { family: String, reason: String },
    #[error("{what} has {size} vertices, above the exact-search limit of {limit}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("degeneracy bound {requested} is below the degeneracy {degeneracy}")]
    DegeneracyTooLow { requested: usize, degeneracy: usize },
}

/// A fixed target graph on vertices `0..n`.
///
/// Edges are stored normalized (`u < v`), sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPattern", into = "RawPattern")]
pub struct PatternGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    name: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RawPattern {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    name: Option<String>,
}

impl TryFrom<RawPattern> for PatternGraph {
    type Error = GraphError;

    fn try_from(raw: RawPattern) -> Result<Self, GraphError> {
        let mut g = PatternGraph::new(raw.n, raw.edges)?;
        g.name = raw.name;
        Ok(g)
    }
}

impl From<PatternGraph> for RawPattern {
    fn from(g: PatternGraph) -> Self {
        RawPattern {
            n: g.n,
            edges: g.edges,
            name: g.name,
        }
    }
}

impl PatternGraph {
    /// Builds a graph, collapsing duplicate edges. Self-loops and
    /// out-of-range endpoints are rejected.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(GraphError::InvalidEdge(u, v, n));
            }
            list.push(if u < v { (u, v) } else { (v, u) });
        }
        list.sort_unstable();
        list.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(PatternGraph {
            n,
            edges: list,
            adj,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Adjacency rows as bitmasks. Only meaningful for `n <= 64`.
    pub(crate) fn masks(&self) -> Vec<u64> {
        debug_assert!(self.n <= 64);
        self.adj
            .iter()
            .map(|nbrs| nbrs.iter().fold(0u64, |m, &w| m | (1u64 << w)))
            .collect()
    }

    /// Renders the graph in the edge-list format accepted by [`parse_graph`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Result of [`parse_graph`]: the graph plus how many duplicate edge lines
/// were collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedGraph {
    pub graph: PatternGraph,
    pub duplicate_edges: usize,
}

fn parse_usize(tok: &str, line: usize) -> Result<usize, GraphError> {
    tok.parse::<usize>().map_err(|_| GraphError::Malformed {
        line,
        reason: format!("expected a non-negative integer, found `{tok}`"),
    })
}

fn two_fields(text: &str, line: usize) -> Result<(usize, usize), GraphError> {
    let mut it = text.split_whitespace();
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(GraphError::Malformed {
            line,
            reason: format!("expected two integers, found `{}`", text.trim()),
        });
    };
    Ok((parse_usize(a, line)?, parse_usize(b, line)?))
}

/// Parses the edge-list format: a header line `n m`, then `m` lines `u v`
/// with 0-based labels. Trailing blank lines are ignored.
pub fn parse_graph(text: &str) -> Result<ParsedGraph, GraphError> {
    let lines: Vec<&str> = text.lines().collect();
    let last = lines
        .iter()
        .rposition(|l| !l.trim().is_empty())
        .map_or(0, |i| i + 1);
    let lines = &lines[..last];
    let Some(header) = lines.first() else {
        return Err(GraphError::Malformed {
            line: 1,
            reason: "missing header line `n m`".to_string(),
        });
    };
    let (n, m) = two_fields(header, 1)?;
    if lines.len() - 1 != m {
        return Err(GraphError::Malformed {
            line: lines.len().min(m + 1) + 1,
            reason: format!("header declares {m} edges, found {}", lines.len() - 1),
        });
    }
    let mut edges = Vec::with_capacity(m);
    for (i, l) in lines[1..].iter().enumerate() {
        let line = i + 2;
        let (u, v) = two_fields(l, line)?;
        for label in [u, v] {
            if label >= n {
                return Err(GraphError::OutOfRange { line, label, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop { line, vertex: u });
        }
        edges.push((u, v));
    }
    let graph = PatternGraph::new(n, edges)?;
    let duplicate_edges = m - graph.edge_count();
    Ok(ParsedGraph {
        graph,
        duplicate_edges,
    })
}

/// Names accepted by [`builtin_graph`].
pub const BUILTIN_NAMES: [&str; 5] = ["triforce", "book", "clique", "path", "star"];

/// The triforce: triangle `0,1,2` plus a common neighbor for each pair of
/// triangle vertices (`3 ~ {0,1}`, `4 ~ {1,2}`, `5 ~ {0,2}`).
pub fn triforce() -> PatternGraph {
    PatternGraph::new(
        6,
        [
            (0, 1),
            (1, 2),
            (0, 2),
            (0, 3),
            (1, 3),
            (1, 4),
            (2, 4),
            (0, 5),
            (2, 5),
        ],
    )
    .expect("static edge list")
    .with_name("triforce")
}

/// Book `B_{d,t}`: `K_{d+t}` minus a `K_t`. Spine is `0..d`, pages `d..d+t`.
pub fn book(d: usize, t: usize) -> Result<PatternGraph, GraphError> {
    if d == 0 || t == 0 {
        return Err(GraphError::InvalidParams {
            family: "book".into(),
            reason: format!("need d >= 1 and t >= 1, got d={d}, t={t}"),
        });
    }
    let n = d + t;
    let edges = (0..d).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Ok(PatternGraph::new(n, edges)?.with_name(format!("book:{d},{t}")))
}

pub fn clique(m: usize) -> Result<PatternGraph, GraphError> {
    if m == 0 {
        return Err(GraphError::InvalidParams {
            family: "clique".into(),
            reason: "need at least one vertex".into(),
        });
    }
    let edges = (0..m).flat_map(|u| (u + 1..m).map(move |v| (u, v)));
    Ok(PatternGraph::new(m, edges)?.with_name(format!("clique:{m}")))
}

/// Path on `n` vertices.
pub fn path(n: usize) -> Result<PatternGraph, GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidParams {
            family: "path".into(),
            reason: "need at least one vertex".into(),
        });
    }
    Ok(PatternGraph::new(n, (1..n).map(|v| (v - 1, v)))?.with_name(format!("path:{n}")))
}

/// Star `K_{1,leaves}` with center `0`.
pub fn star(leaves: usize) -> Result<PatternGraph, GraphError> {
    if leaves == 0 {
        return Err(GraphError::InvalidParams {
            family: "star".into(),
            reason: "need at least one leaf".into(),
        });
    }
    Ok(PatternGraph::new(leaves + 1, (1..=leaves).map(|v| (0, v)))?
        .with_name(format!("star:{leaves}")))
}

pub fn builtin_graph(name: &str, params: &[usize]) -> Result<PatternGraph, GraphError> {
    let arity = |want: usize| {
        if params.len() == want {
            Ok(())
        } else {
            Err(GraphError::InvalidParams {
                family: name.to_string(),
                reason: format!("expected {want} parameter(s), got {}", params.len()),
            })
        }
    };
    match name {
        "triforce" => arity(0).map(|_| triforce()),
        "book" => arity(2).and_then(|_| book(params[0], params[1])),
        "clique" => arity(1).and_then(|_| clique(params[0])),
        "path" => arity(1).and_then(|_| path(params[0])),
        "star" => arity(1).and_then(|_| star(params[0])),
        other => Err(GraphError::UnknownFamily(other.to_string())),
    }
}

/// Parses `name` or `name:a,b,...` into a builtin graph.
pub fn builtin_from_spec(spec: &str) -> Result<PatternGraph, GraphError> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim(), r.trim()),
        None => (spec.trim(), ""),
    };
    let params = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| GraphError::InvalidParams {
                        family: name.to_string(),
                        reason: format!("bad parameter `{t}`"),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    builtin_graph(name, &params)
}

/// An explicit undirected host graph stored as adjacency bitsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HostGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl HostGraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        HostGraph {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = HostGraph::empty(n);
        for (u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(GraphError::InvalidEdge(u, v, n));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn from_pattern(h: &PatternGraph) -> Self {
        HostGraph::from_edges(h.n(), h.edges().iter().copied()).expect("pattern edges are valid")
    }

    /// `G(n, p)` with every pair decided by the oracle's keyed hash under
    /// `(seed, trial)`, so a sampled host agrees with a finite-mode oracle
    /// using the same key.
    pub fn sample_gnp(n: usize, p: f64, seed: u64, trial: u64) -> Self {
        let mut g = HostGraph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if crate::oracle::keyed_outcome(seed, trial, u as u64, v as u64, p) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / 64] |= 1 << (v % 64);
        self.rows[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub(crate) fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(u).iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }
}
