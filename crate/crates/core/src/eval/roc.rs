use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScore {
    pub doc_id: String,
    pub score: f64,
    /// `true` for the positive (diverse) class.
    pub label: bool,
}

impl LabeledScore {
    pub fn new(doc_id: impl Into<String>, score: f64, label: bool) -> Self {
        LabeledScore {
            doc_id: doc_id.into(),
            score,
            label,
        }
    }
}

/// One operating point: documents scoring at least `threshold` are predicted
/// positive. The first point uses an infinite threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub auc: f64,
    pub points: Vec<RocPoint>,
}

/// AUC as the Mann-Whitney rank statistic (ties count one half) and the ROC
/// curve swept over every distinct score.
pub fn roc_auc(scores: &[LabeledScore]) -> Result<RocCurve> {
    if scores.iter().any(|s| s.score.is_nan()) {
        return Err(Error::InvalidConfig("scores must not be NaN".into()));
    }
    let positives = scores.iter().filter(|s| s.label).count();
    let negatives = scores.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }

    let mut order: Vec<&LabeledScore> = scores.iter().collect();
    order.sort_by(|a, b| a.score.total_cmp(&b.score));

    // Sum of 1-based mid-ranks of the positives.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && order[j].score == order[i].score {
            j += 1;
        }
        let mid = (i + 1 + j) as f64 / 2.0;
        rank_sum += mid * order[i..j].iter().filter(|s| s.label).count() as f64;
        i = j;
    }
    let (p, n) = (positives as f64, negatives as f64);
    let u = rank_sum - p * (p + 1.0) / 2.0;
    let auc = u / (p * n);

    let mut points = alloc::vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = order.len();
    while k > 0 {
        let threshold = order[k - 1].score;
        while k > 0 && order[k - 1].score == threshold {
            if order[k - 1].label {
                tp += 1;
            } else {
                fp += 1;
            }
            k -= 1;
        }
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / n,
            tpr: tp as f64 / p,
        });
    }

    Ok(RocCurve { auc, points })
}

/// Area under piecewise-linear ROC points.
pub fn trapezoid_area(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(pos: &[f64], neg: &[f64]) -> Vec<LabeledScore> {
        pos.iter()
            .map(|&s| LabeledScore::new("p", s, true))
            .chain(neg.iter().map(|&s| LabeledScore::new("n", s, false)))
            .collect()
    }

    #[test]
    fn perfect_ranking() {
        let roc = roc_auc(&scores(&[0.8, 0.9], &[0.1, 0.2, 0.3])).unwrap();
        assert_eq!(roc.auc, 1.0);
    }

    #[test]
    fn total_ties() {
        let roc = roc_auc(&scores(&[0.4, 0.4], &[0.4, 0.4, 0.4])).unwrap();
        assert_eq!(roc.auc, 0.5);
        assert_eq!(roc.points.len(), 2);
    }

    #[test]
    fn hand_counted_pairs() {
        // (0.9 > 0.6), (0.9 > 0.1), (0.4 > 0.1) concordant; (0.4 < 0.6) not.
        let roc = roc_auc(&scores(&[0.9, 0.4], &[0.6, 0.1])).unwrap();
        assert_eq!(roc.auc, 0.75);
        assert_eq!(trapezoid_area(&roc.points), 0.75);
    }

    #[test]
    fn curve_endpoints_and_monotone() {
        let roc = roc_auc(&scores(&[0.3, 0.7, 0.7, 0.2], &[0.1, 0.7, 0.5])).unwrap();
        let first = roc.points[0];
        let last = *roc.points.last().unwrap();
        assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        for w in roc.points.windows(2) {
            assert!(w[1].fpr >= w[0].fpr && w[1].tpr >= w[0].tpr);
        }
        assert!((trapezoid_area(&roc.points) - roc.auc).abs() < 1e-12);
    }

    #[test]
    fn single_class_is_an_error() {
        assert_eq!(roc_auc(&scores(&[0.1], &[])), Err(Error::SingleClass));
        assert_eq!(roc_auc(&scores(&[], &[0.1])), Err(Error::SingleClass));
        assert!(roc_auc(&scores(&[f64::NAN], &[0.1])).is_err());
    }
}
