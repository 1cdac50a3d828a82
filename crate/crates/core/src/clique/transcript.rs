use alloc::vec::Vec;

use serde::Serialize;

use super::CliqueError;
use crate::oracle::HostId;

/// Ordered answers revealed on an `n`-vertex host; each pair at most once.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QueryTranscript {
    n: usize,
    steps: Vec<((usize, usize), bool)>,
    #[serde(skip)]
    seen: alloc::collections::BTreeSet<(usize, usize)>,
}

impl QueryTranscript {
    pub fn new(n: usize) -> Self {
        QueryTranscript {
            n,
            steps: Vec::new(),
            seen: Default::default(),
        }
    }

    /// Builds a transcript from an oracle log of `(lo, hi, bit)` triples.
    pub fn from_log(n: usize, log: &[(HostId, HostId, bool)]) -> Result<Self, CliqueError> {
        let mut t = QueryTranscript::new(n);
        for &(u, v, bit) in log {
            t.push(u as usize, v as usize, bit)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, u: usize, v: usize, bit: bool) -> Result<(), CliqueError> {
        if u == v || u >= self.n || v >= self.n {
            return Err(CliqueError::BadPair { u, v, n: self.n });
        }
        let pair = (u.min(v), u.max(v));
        if !self.seen.insert(pair) {
            return Err(CliqueError::RepeatedPair { u, v });
        }
        self.steps.push((pair, bit));
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Steps as `((lo, hi), bit)`.
    pub fn steps(&self) -> &[((usize, usize), bool)] {
        &self.steps
    }

    pub(crate) fn check_prefix(&self, t: usize) -> Result<usize, CliqueError> {
        if t > self.steps.len() {
            Err(CliqueError::InvalidParams(alloc::format!(
                "step {t} beyond transcript of length {}",
                self.steps.len()
            )))
        } else {
            Ok(t)
        }
    }
}
