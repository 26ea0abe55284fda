//! Sparse probability distributions over a dense integer domain.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Probability mass over item ids (words or topics).
///
/// Entries are kept sorted by id, every stored probability is strictly
/// positive, and the probabilities sum to one. Items outside the support have
/// probability zero and are simply absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SparseDistribution {
    entries: Vec<(usize, f64)>,
}

/// Allowed deviation of the total mass from one.
pub const SUM_TOLERANCE: f64 = 1e-9;

impl SparseDistribution {
    /// Normalizes nonnegative weights into a distribution.
    ///
    /// Zero weights are dropped and duplicate ids are summed. Returns `None`
    /// when no weight is positive or any weight is negative or non-finite.
    pub fn from_weights<I>(weights: I) -> Option<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for (id, w) in weights {
            if !w.is_finite() || w < 0.0 {
                return None;
            }
            if w > 0.0 {
                entries.push((id, w));
            }
        }
        entries.sort_by_key(|&(id, _)| id);
        entries.dedup_by(|next, kept| {
            if next.0 == kept.0 {
                kept.1 += next.1;
                true
            } else {
                false
            }
        });
        let total: f64 = entries.iter().map(|&(_, w)| w).sum();
        if !(total > 0.0) {
            return None;
        }
        for e in &mut entries {
            e.1 /= total;
        }
        Some(SparseDistribution { entries })
    }

    /// Dense vector to distribution; index is the item id.
    pub fn from_dense(values: &[f64]) -> Option<Self> {
        Self::from_weights(values.iter().copied().enumerate())
    }

    pub fn one_hot(id: usize) -> Self {
        SparseDistribution {
            entries: alloc::vec![(id, 1.0)],
        }
    }

    /// Probability of `id`, zero when absent.
    pub fn get(&self, id: usize) -> f64 {
        match self.entries.binary_search_by_key(&id, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(id, _)| id)
    }

    pub fn contains(&self, id: usize) -> bool {
        self.entries.binary_search_by_key(&id, |&(i, _)| i).is_ok()
    }

    /// Number of items with positive probability.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|&(_, p)| p).sum()
    }

    /// Largest item id in the support plus one.
    pub fn domain_bound(&self) -> usize {
        self.entries.last().map_or(0, |&(id, _)| id + 1)
    }

    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = alloc::vec![0.0; len];
        for &(id, p) in &self.entries {
            if id < len {
                out[id] = p;
            }
        }
        out
    }

    /// Item with the highest probability; ties go to the lowest id.
    pub fn argmax(&self) -> usize {
        let mut best = self.entries[0];
        for &(id, p) in &self.entries[1..] {
            if p > best.1 {
                best = (id, p);
            }
        }
        best.0
    }

    /// Sum of absolute differences halved.
    pub fn total_variation(&self, other: &SparseDistribution) -> f64 {
        let mut diff = 0.0;
        merge_join(&self.entries, &other.entries, |_, a, b| {
            diff += libm::fabs(a - b)
        });
        diff / 2.0
    }

    /// Checks the structural invariants; used after deserialization.
    pub fn is_valid(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].0 < w[1].0)
            && self.entries.iter().all(|&(_, p)| p > 0.0 && p.is_finite())
            && libm::fabs(self.total() - 1.0) <= SUM_TOLERANCE
    }
}

/// Walks the union of two sorted supports, calling `f(id, a, b)` with zero
/// filled in for the side that lacks the id.
pub(crate) fn merge_join(
    a: &[(usize, f64)],
    b: &[(usize, f64)],
    mut f: impl FnMut(usize, f64, f64),
) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ia, pa)), Some(&(ib, pb))) if ia == ib => {
                f(ia, pa, pb);
                i += 1;
                j += 1;
            }
            (Some(&(ia, pa)), Some(&(ib, _))) if ia < ib => {
                f(ia, pa, 0.0);
                i += 1;
            }
            (Some(&(ia, pa)), None) => {
                f(ia, pa, 0.0);
                i += 1;
            }
            (_, Some(&(ib, pb))) => {
                f(ib, 0.0, pb);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
}
