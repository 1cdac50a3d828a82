//! Closed-form clique bounds on `G(n, 1/2)`, all in `log₂` space.

use serde::{Deserialize, Serialize};

use super::CliqueError;
use crate::fmath;

/// `log₂` of `t^m · n^{k-2m} · 2^{-C(k,2) + m(m-1)}`, the bound on the
/// expected `w_{k,m}(t)`. The `t^m` factor is dropped at `m = 0`.
pub fn clique_weight_bound(n: u64, k: u64, t: u64, m: u64) -> Result<f64, CliqueError> {
    if n < 1 || 2 * m > k {
        return Err(CliqueError::InvalidParams(alloc::format!(
            "need n >= 1 and 2m <= k, got n={n} k={k} m={m}"
        )));
    }
    let pairs = n as u128 * (n as u128).saturating_sub(1) / 2;
    if t as u128 > pairs {
        return Err(CliqueError::InvalidParams(alloc::format!(
            "t={t} exceeds the {pairs} pairs of an {n}-vertex host"
        )));
    }
    Ok(log_bound(n as f64, k, t as f64, m))
}

fn log_bound(n: f64, k: u64, t: f64, m: u64) -> f64 {
    let lt = if m == 0 {
        0.0
    } else {
        m as f64 * fmath::log2(t)
    };
    let (k, m) = (k as f64, m as f64);
    lt + (k - 2.0 * m) * fmath::log2(n) - k * (k - 1.0) / 2.0 + m * (m - 1.0)
}

/// `1 + √(1 − (2−δ)²/2)` on `[2 − √2, 2]`, where the radicand is
/// non-negative.
pub fn alpha_plus(delta: f64) -> Result<f64, CliqueError> {
    let lo = 2.0 - core::f64::consts::SQRT_2;
    if !(lo..=2.0).contains(&delta) {
        return Err(CliqueError::Domain(delta));
    }
    let r = 1.0 - (2.0 - delta) * (2.0 - delta) / 2.0;
    Ok(1.0 + fmath::sqrt(r.max(0.0)))
}

/// Outcome of [`infeasibility_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Infeasibility {
    /// The bound drops below `1/2` for the witness.
    pub infeasible: bool,
    /// `m ≤ k/2` minimizing the bound.
    pub witness_m: u64,
    pub log2_bound: f64,
}

/// Whether `k`-cliques are out of reach with `t` queries on `n` vertices at
/// probability `1/2`: some `m ≤ k/2` brings the bound below `1/2`. The
/// witness is the smallest such `m`, or the minimizer when there is none.
/// Unlike [`clique_weight_bound`], `t` may exceed the number of pairs.
pub fn infeasibility_check(n: u64, k: u64, t: u64) -> Infeasibility {
    let mut best = (0, log_bound(n as f64, k, t as f64, 0));
    for m in 1..=k / 2 {
        if best.1 < -1.0 {
            break;
        }
        let b = log_bound(n as f64, k, t as f64, m);
        if b < best.1 {
            best = (m, b);
        }
    }
    Infeasibility {
        infeasible: best.1 < -1.0,
        witness_m: best.0,
        log2_bound: best.1,
    }
}

/// One line of the feasibility table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityRow {
    pub n: u64,
    pub delta: f64,
    pub t: u64,
    /// Largest `k` the bound does not rule out.
    pub k_max_feasible: u64,
    pub k_over_lg_n: f64,
    pub alpha_plus: Option<f64>,
    /// The known achievable rate `1 + δ/2`.
    pub lower_line: f64,
}

pub fn feasibility_row(n: u64, delta: f64) -> Result<FeasibilityRow, CliqueError> {
    if n < 2 || !(delta > 0.0) {
        return Err(CliqueError::InvalidParams(alloc::format!(
            "need n >= 2 and delta > 0, got n={n} delta={delta}"
        )));
    }
    let lg = fmath::log2(n as f64);
    let t = fmath::ceil_count(fmath::powf(n as f64, delta), 1);
    let top = n.min(8 * libm::ceil(lg) as u64 + 8);
    let k_max = (1..=top)
        .filter(|&k| !infeasibility_check(n, k, t).infeasible)
        .max()
        .unwrap_or(0);
    Ok(FeasibilityRow {
        n,
        delta,
        t,
        k_max_feasible: k_max,
        k_over_lg_n: k_max as f64 / lg,
        alpha_plus: alpha_plus(delta).ok(),
        lower_line: 1.0 + delta / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert_eq!(clique_weight_bound(16, 4, 10, 0).unwrap(), 10.0);
        let direct = 3.0 * fmath::log2(10.0) - 3.0;
        assert!((clique_weight_bound(10, 3, 0, 0).unwrap() - direct).abs() < 1e-12);
        assert!(clique_weight_bound(10, 3, 46, 0).is_err());
        assert!(clique_weight_bound(10, 3, 4, 2).is_err());
        assert_eq!(clique_weight_bound(10, 4, 0, 1).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_plus(2.0).unwrap(), 2.0);
        assert!((alpha_plus(2.0 / 3.0).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!(alpha_plus(0.5).is_err());
        assert!(alpha_plus(2.01).is_err());
        assert!(alpha_plus(2.0 - core::f64::consts::SQRT_2).is_ok());
    }

    #[test]
    fn infeasibility_examples() {
        // n = 2^10, k = 20, t = n^2: the best m leaves the bound at 2^10
        let r = infeasibility_check(1 << 10, 20, 1 << 20);
        assert!(!r.infeasible);
        assert!((r.log2_bound - 10.0).abs() < 1e-9);
        // w_k(0) < 1/2 needs no queries
        let r = infeasibility_check(16, 12, 0);
        assert!(r.infeasible);
        assert_eq!(r.witness_m, 0);
    }

    #[test]
    fn table_respects_alpha_plus() {
        for e in [8u32, 12, 16, 20] {
            let n = 1u64 << e;
            for i in 0..20 {
                let delta = 0.7 + 1.3 * i as f64 / 19.0;
                let row = feasibility_row(n, delta).unwrap();
                let a = row.alpha_plus.unwrap();
                assert!(
                    row.k_over_lg_n <= a + 2.0 / e as f64,
                    "n=2^{e} delta={delta} {row:?}"
                );
            }
        }
    }
}
