//! Topic distances and Rao's diversity coefficient.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_2_PI;

use crate::dist::{merge_join, SparseDistribution};
use crate::error::{Error, Result};
use crate::lda::TopicModel;

/// Normalized angular distance `(2/π)·arccos(cos(p, q))`, in `[0, 1]`.
///
/// The cosine is clamped to `[0, 1]`; it cannot be negative for probability
/// vectors, the clamp only absorbs rounding.
pub fn angular_distance(p: &SparseDistribution, q: &SparseDistribution) -> f64 {
    if p == q {
        return 0.0;
    }
    let (mut dot, mut pp, mut qq) = (0.0, 0.0, 0.0);
    merge_join(p.entries(), q.entries(), |_, a, b| {
        dot += a * b;
        pp += a * a;
        qq += b * b;
    });
    let cos = (dot / (libm::sqrt(pp) * libm::sqrt(qq))).clamp(0.0, 1.0);
    (FRAC_2_PI * libm::acos(cos)).clamp(0.0, 1.0)
}

/// Symmetric `T × T` matrix of topic distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicDistanceMatrix {
    size: usize,
    values: Vec<f64>,
}

impl TopicDistanceMatrix {
    /// Builds a matrix from row-major values, checking symmetry, range and the
    /// diagonal.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut values = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(Error::DimensionMismatch {
                    expected: size,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        let m = TopicDistanceMatrix { size, values };
        for i in 0..size {
            if m.get(i, i) != 0.0 {
                return Err(Error::InvalidConfig(
                    "distance diagonal must be zero".into(),
                ));
            }
            for j in 0..size {
                let d = m.get(i, j);
                if !(0.0..=1.0).contains(&d) || d != m.get(j, i) {
                    return Err(Error::InvalidConfig(
                        "distances must be symmetric and within [0, 1]".into(),
                    ));
                }
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.size..(i + 1) * self.size]
    }

    /// Mean distance over unordered pairs of distinct topics.
    pub fn mean_off_diagonal(&self) -> f64 {
        if self.size < 2 {
            return 0.0;
        }
        let mut sum = 0.0;
        for i in 0..self.size {
            for j in i + 1..self.size {
                sum += self.get(i, j);
            }
        }
        sum / (self.size * (self.size - 1) / 2) as f64
    }
}

/// Pairwise angular distances between the model's topics.
pub fn topic_distance_matrix(model: &TopicModel) -> Result<TopicDistanceMatrix> {
    let size = model.num_topics();
    if size < 2 {
        return Err(Error::TooFewTopics(size));
    }
    let upper = crate::par::map_range(size, |i| {
        (i + 1..size)
            .map(|j| angular_distance(&model.phi[i], &model.phi[j]))
            .collect::<Vec<_>>()
    });
    let mut values = alloc::vec![0.0; size * size];
    for (i, row) in upper.iter().enumerate() {
        for (k, &d) in row.iter().enumerate() {
            let j = i + 1 + k;
            values[i * size + j] = d;
            values[j * size + i] = d;
        }
    }
    Ok(TopicDistanceMatrix { size, values })
}

/// Expected distance between two topics drawn from `theta_row`:
/// `Σ_i Σ_j p_i p_j δ(i, j)` over ordered pairs.
///
/// The double sum is divided by `(Σ_i p_i)²`, which is 1 for a distribution
/// but cancels the rounding left over from normalizing the row. Both sums are
/// accumulated in double-double precision, so a uniform row over `T` topics
/// at unit distances scores exactly `(T-1)/T`.
///
/// Topics outside the matrix are ignored.
pub fn rao_diversity(theta_row: &SparseDistribution, distances: &TopicDistanceMatrix) -> f64 {
    let entries: Vec<(usize, f64)> = theta_row
        .iter()
        .filter(|&(t, _)| t < distances.size())
        .collect();
    let mut num = DoubleDouble::default();
    let mut mass = DoubleDouble::default();
    for &(i, pi) in &entries {
        mass.add(pi, 0.0);
        let row = distances.row(i);
        for &(j, pj) in &entries {
            let d = row[j];
            if d == 0.0 {
                continue;
            }
            let (ph, pl) = two_product(pi, pj);
            let (th, te) = two_product(ph, d);
            num.add(th, te + pl * d);
        }
    }
    if num.hi == 0.0 {
        return 0.0;
    }
    // (Σ p)² in double-double, then one corrected division.
    let (sh, sl) = two_product(mass.hi, mass.hi);
    let (dh, dl) = (sh, sl + 2.0 * mass.hi * mass.lo);
    let q = num.hi / dh;
    let (ph, pl) = two_product(q, dh);
    let r = (num.hi - ph) - pl + num.lo - q * dl;
    q + r / dh
}

/// An unevaluated sum `hi + lo` with `|lo|` below half an ulp of `hi`.
#[derive(Debug, Default, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn add(&mut self, hi: f64, lo: f64) {
        let (s, e) = two_sum(self.hi, hi);
        let lo = self.lo + lo + e;
        let (s, e) = two_sum(s, lo);
        self.hi = s;
        self.lo = e;
    }
}

/// `a·b` as an unevaluated sum of two doubles.
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

/// `a + b` as an unevaluated sum of two doubles.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    (s, (a - (s - v)) + (b - v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityScore {
    pub doc_id: String,
    pub score: f64,
}

/// Diversity of every `(doc_id, P(t|d))` row.
pub fn score_documents<'a, I>(rows: I, distances: &TopicDistanceMatrix) -> Vec<DiversityScore>
where
    I: IntoIterator<Item = (&'a str, &'a SparseDistribution)>,
{
    rows.into_iter()
        .map(|(doc_id, row)| DiversityScore {
            doc_id: doc_id.into(),
            score: rao_diversity(row, distances),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn dist(pairs: &[(usize, f64)]) -> SparseDistribution {
        SparseDistribution::from_weights(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn angular_examples() {
        let p = dist(&[(0, 0.3), (1, 0.7)]);
        assert_eq!(angular_distance(&p, &p), 0.0);
        assert_eq!(
            angular_distance(&dist(&[(0, 1.0)]), &dist(&[(1, 1.0)])),
            1.0
        );
        let half = angular_distance(&dist(&[(0, 1.0)]), &dist(&[(0, 0.5), (1, 0.5)]));
        assert!((half - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rao_examples() {
        let m = TopicDistanceMatrix::from_rows(&[vec![0.0, 0.38], vec![0.38, 0.0]]).unwrap();
        assert_eq!(rao_diversity(&dist(&[(1, 1.0)]), &m), 0.0);
        let div = rao_diversity(&dist(&[(0, 0.5), (1, 0.5)]), &m);
        assert!((div - 0.19).abs() < 1e-12);
    }

    #[test]
    fn uniform_over_unit_distances() {
        for t in [2usize, 3, 7, 10] {
            let rows: Vec<Vec<f64>> = (0..t)
                .map(|i| (0..t).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
                .collect();
            let m = TopicDistanceMatrix::from_rows(&rows).unwrap();
            let p = SparseDistribution::from_weights((0..t).map(|i| (i, 1.0))).unwrap();
            let expect = (t - 1) as f64 / t as f64;
            assert!((rao_diversity(&p, &m) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_validation() {
        assert!(TopicDistanceMatrix::from_rows(&[vec![0.0, 0.2], vec![0.3, 0.0]]).is_err());
        assert!(TopicDistanceMatrix::from_rows(&[vec![0.1, 0.2], vec![0.2, 0.0]]).is_err());
        assert!(TopicDistanceMatrix::from_rows(&[vec![0.0, 1.2], vec![1.2, 0.0]]).is_err());
        assert!(TopicDistanceMatrix::from_rows(&[vec![0.0], vec![0.0, 0.0]]).is_err());
    }

    #[test]
    fn mean_off_diagonal() {
        let m = TopicDistanceMatrix::from_rows(&[
            vec![0.0, 0.2, 0.4],
            vec![0.2, 0.0, 0.6],
            vec![0.4, 0.6, 0.0],
        ])
        .unwrap();
        assert!((m.mean_off_diagonal() - 0.4).abs() < 1e-15);
    }
}
