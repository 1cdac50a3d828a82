//! Random pattern generators.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{GraphError, PatternGraph};

/// Random `d`-degenerate graph: start from `K_d` on `0..d`, then add
/// vertices `d..n` one at a time, each joined to `d` distinct earlier
/// vertices chosen uniformly.
pub fn random_d_degenerate(n: usize, d: usize, seed: u64) -> Result<PatternGraph, GraphError> {
    if d == 0 || n <= d {
        return Err(GraphError::InvalidParams {
            family: "random-degenerate".into(),
            reason: format!("need n > d >= 1, got n={n}, d={d}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (0..d)
        .flat_map(|u| (u + 1..d).map(move |v| (u, v)))
        .collect();
    for v in d..n {
        for u in index::sample(&mut rng, v, d).into_iter() {
            edges.push((u, v));
        }
    }
    Ok(PatternGraph::new(n, edges)?.with_name(format!("random-degenerate:{n},{d},{seed}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::clique;
    use crate::structure::degeneracy_order;

    #[test]
    fn smallest_case_is_clique() {
        for d in 1..5 {
            let g = random_d_degenerate(d + 1, d, 3).unwrap();
            assert_eq!(g.edges(), clique(d + 1).unwrap().edges());
        }
    }

    #[test]
    fn deterministic_and_degenerate() {
        let a = random_d_degenerate(10, 2, 42).unwrap();
        assert_eq!(a, random_d_degenerate(10, 2, 42).unwrap());
        assert!(degeneracy_order(&a).d <= 2);
        assert_eq!(a.edge_count(), 1 + 8 * 2);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(random_d_degenerate(2, 2, 0).is_err());
        assert!(random_d_degenerate(5, 0, 0).is_err());
    }
}
