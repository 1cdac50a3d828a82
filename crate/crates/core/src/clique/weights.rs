//! Weight functions over query transcripts on `G(n, 1/2)`.
//!
//! `w(U, t)` is the probability that `U` spans a clique given the first `t`
//! answers: `2^{-C(|U|,2) + e_t(U)}` when none of the `e_t(U)` queries inside
//! `U` failed, and zero otherwise. `w_k(t)` sums it over all `k`-sets and
//! `w_{k,m}(t)` over those whose known edges contain a matching of size `m`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{CliqueError, Dyadic, QueryTranscript};

/// Largest host for which weight sums enumerate all `k`-sets.
pub const MAX_WEIGHT_N: usize = 16;
/// Largest set size for weight sums.
pub const MAX_WEIGHT_K: usize = 6;
/// Largest set handed to [`max_matching_known`].
pub const MAX_MATCHING_SET: usize = 12;

fn choose2(k: usize) -> u32 {
    (k * k.saturating_sub(1) / 2) as u32
}

/// `w(U, t)`, exactly.
pub fn weight_of_set(tr: &QueryTranscript, set: &[usize], t: usize) -> Result<Dyadic, CliqueError> {
    let t = tr.check_prefix(t)?;
    let inside = |x: usize| set.contains(&x);
    let mut e = 0u32;
    for &((u, v), bit) in &tr.steps()[..t] {
        if inside(u) && inside(v) {
            if !bit {
                return Ok(Dyadic::ZERO);
            }
            e += 1;
        }
    }
    Ok(Dyadic::pow2(e as i32 - choose2(set.len()) as i32))
}

/// `m(U, t)`: maximum matching among the known edges inside `U`.
pub fn max_matching_known(
    tr: &QueryTranscript,
    set: &[usize],
    t: usize,
) -> Result<usize, CliqueError> {
    let t = tr.check_prefix(t)?;
    if set.len() > MAX_MATCHING_SET {
        return Err(CliqueError::SizeLimit {
            what: "matching set",
            size: set.len(),
            limit: MAX_MATCHING_SET,
        });
    }
    let mut adj = [0u16; MAX_MATCHING_SET];
    for &((u, v), bit) in &tr.steps()[..t] {
        if let (true, Some(i), Some(j)) = (
            bit,
            set.iter().position(|&x| x == u),
            set.iter().position(|&x| x == v),
        ) {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
    }
    Ok(matching(&adj, (1u32 << set.len()) as u16 - 1) as usize)
}

/// Maximum matching of the graph `adj` restricted to `mask`, by branching
/// on the lowest vertex.
fn matching(adj: &[u16], mask: u16) -> u32 {
    if mask == 0 {
        return 0;
    }
    let v = mask.trailing_zeros() as usize;
    let rest = mask & !(1 << v);
    let mut best = matching(adj, rest);
    let mut cand = adj[v] & rest;
    while cand != 0 {
        let w = cand.trailing_zeros();
        cand &= cand - 1;
        best = best.max(1 + matching(adj, rest & !(1 << w)));
    }
    best
}

/// Incremental `w_k` and `w_{k,m}` over all `k`-subsets of an `n`-vertex
/// host. Both sums share the denominator `2^{C(k,2)}`, so they are kept as
/// integer numerators.
#[derive(Debug, Clone)]
pub struct WeightState {
    n: usize,
    k: usize,
    m: usize,
    sets: Vec<u16>,
    edges_in: Vec<u8>,
    dead: Vec<bool>,
    matched: Vec<u8>,
    adj: [u16; MAX_WEIGHT_N],
    queried: [u16; MAX_WEIGHT_N],
    num_k: i128,
    num_km: i128,
}

impl WeightState {
    pub fn new(n: usize, k: usize, m: usize) -> Result<Self, CliqueError> {
        if n > MAX_WEIGHT_N {
            return Err(CliqueError::SizeLimit {
                what: "weight host",
                size: n,
                limit: MAX_WEIGHT_N,
            });
        }
        if k > MAX_WEIGHT_K {
            return Err(CliqueError::SizeLimit {
                what: "weight set",
                size: k,
                limit: MAX_WEIGHT_K,
            });
        }
        if k == 0 || k > n || 2 * m > k {
            return Err(CliqueError::InvalidParams(alloc::format!(
                "need 1 <= k <= n and 2m <= k, got n={n} k={k} m={m}"
            )));
        }
        let sets: Vec<u16> = (0u32..1 << n)
            .filter(|s| s.count_ones() as usize == k)
            .map(|s| s as u16)
            .collect();
        let count = sets.len() as i128;
        Ok(WeightState {
            n,
            k,
            m,
            edges_in: alloc::vec![0; sets.len()],
            dead: alloc::vec![false; sets.len()],
            matched: alloc::vec![0; sets.len()],
            sets,
            adj: [0; MAX_WEIGHT_N],
            queried: [0; MAX_WEIGHT_N],
            num_k: count,
            num_km: if m == 0 { count } else { 0 },
        })
    }

    fn set_num(&self, i: usize) -> i128 {
        if self.dead[i] {
            0
        } else {
            1i128 << self.edges_in[i]
        }
    }

    /// Reveals one answer. Re-revealing a pair is an error.
    pub fn apply(&mut self, u: usize, v: usize, bit: bool) -> Result<(), CliqueError> {
        if u == v || u >= self.n || v >= self.n {
            return Err(CliqueError::BadPair { u, v, n: self.n });
        }
        if self.queried[u] >> v & 1 == 1 {
            return Err(CliqueError::RepeatedPair { u, v });
        }
        self.queried[u] |= 1 << v;
        self.queried[v] |= 1 << u;
        if bit {
            self.adj[u] |= 1 << v;
            self.adj[v] |= 1 << u;
        }
        let pair = (1u16 << u) | (1 << v);
        for i in 0..self.sets.len() {
            let s = self.sets[i];
            if s & pair != pair || self.dead[i] {
                continue;
            }
            let before = self.set_num(i);
            let counted = self.matched[i] as usize >= self.m;
            if bit {
                self.edges_in[i] += 1;
                if !counted {
                    self.matched[i] = self.matching_in(s) as u8;
                }
            } else {
                self.dead[i] = true;
            }
            let after = self.set_num(i);
            self.num_k += after - before;
            let now_counted = self.matched[i] as usize >= self.m;
            self.num_km += if now_counted { after } else { 0 } - if counted { before } else { 0 };
        }
        Ok(())
    }

    fn matching_in(&self, s: u16) -> u32 {
        let verts: Vec<usize> = (0..self.n).filter(|&x| s >> x & 1 == 1).collect();
        let mut local = [0u16; MAX_WEIGHT_K];
        for (i, &x) in verts.iter().enumerate() {
            for (j, &y) in verts.iter().enumerate() {
                if self.adj[x] >> y & 1 == 1 {
                    local[i] |= 1 << j;
                }
            }
        }
        matching(&local, (1u16 << verts.len()) - 1)
    }

    /// `w_k(t)`.
    pub fn w_k(&self) -> Dyadic {
        Dyadic::new(self.num_k, choose2(self.k))
    }

    /// `w_{k,m}(t)`.
    pub fn w_km(&self) -> Dyadic {
        Dyadic::new(self.num_km, choose2(self.k))
    }
}

/// One point of a weight series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightPoint {
    pub t: usize,
    pub w_k: Dyadic,
    pub w_km: Dyadic,
}

/// `(w_k(t), w_{k,m}(t))` for `t = 0..=len`.
pub fn weight_sums(
    tr: &QueryTranscript,
    k: usize,
    m: usize,
) -> Result<Vec<WeightPoint>, CliqueError> {
    let mut st = WeightState::new(tr.n(), k, m)?;
    let mut out = Vec::with_capacity(tr.len() + 1);
    out.push(WeightPoint {
        t: 0,
        w_k: st.w_k(),
        w_km: st.w_km(),
    });
    for (i, &((u, v), bit)) in tr.steps().iter().enumerate() {
        st.apply(u, v, bit)?;
        out.push(WeightPoint {
            t: i + 1,
            w_k: st.w_k(),
            w_km: st.w_km(),
        });
    }
    Ok(out)
}

/// Weights after the full transcript.
pub fn final_weights(
    tr: &QueryTranscript,
    k: usize,
    m: usize,
) -> Result<(Dyadic, Dyadic), CliqueError> {
    let mut st = WeightState::new(tr.n(), k, m)?;
    for &((u, v), bit) in tr.steps() {
        st.apply(u, v, bit)?;
    }
    Ok((st.w_k(), st.w_km()))
}

/// `½·w(t+1 | edge) + ½·w(t+1 | non-edge) − w(t)` for the query at step
/// `t + 1`, for `w_k` (exactly zero) and for `w_{k,m}` (never negative).
pub fn martingale_residuals(
    tr: &QueryTranscript,
    k: usize,
    m: usize,
    t: usize,
) -> Result<(Dyadic, Dyadic), CliqueError> {
    if t >= tr.len() {
        return Err(CliqueError::NoNextStep { t, len: tr.len() });
    }
    let mut st = WeightState::new(tr.n(), k, m)?;
    for &((u, v), bit) in &tr.steps()[..t] {
        st.apply(u, v, bit)?;
    }
    let ((u, v), _) = tr.steps()[t];
    let mut yes = st.clone();
    yes.apply(u, v, true)?;
    let mut no = st.clone();
    no.apply(u, v, false)?;
    let rk = (yes.w_k() + no.w_k()).half() - st.w_k();
    let rkm = (yes.w_km() + no.w_km()).half() - st.w_km();
    Ok((rk, rkm))
}

/// Residual of the martingale identity for `w_k` at step `t`.
pub fn martingale_step_check(
    tr: &QueryTranscript,
    k: usize,
    t: usize,
) -> Result<Dyadic, CliqueError> {
    Ok(martingale_residuals(tr, k, 0, t)?.0)
}
