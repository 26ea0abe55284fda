//! External clustering quality: purity and normalized mutual information.
//! Each topic is a cluster and each document belongs to its most probable
//! topic.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hitr::DocumentTopicMatrix;

/// `doc_id → argmax_t P(t|d)`, ties going to the lowest topic id.
pub fn cluster_assignments(theta: &DocumentTopicMatrix) -> BTreeMap<String, usize> {
    theta
        .iter()
        .map(|(id, row)| (String::from(id), row.argmax()))
        .collect()
}

fn paired<'a, C: Clone>(
    assignments: &'a BTreeMap<String, C>,
    gold: &'a BTreeMap<String, String>,
) -> Result<(Vec<C>, Vec<&'a str>)> {
    let mut clusters = Vec::with_capacity(assignments.len());
    let mut classes = Vec::with_capacity(assignments.len());
    for (doc, c) in assignments {
        let class = gold
            .get(doc)
            .ok_or_else(|| Error::MissingLabel(doc.clone()))?;
        clusters.push(c.clone());
        classes.push(class.as_str());
    }
    Ok((clusters, classes))
}

/// Purity of the argmax clustering of `theta` against `gold` classes.
pub fn clustering_purity(
    theta: &DocumentTopicMatrix,
    gold: &BTreeMap<String, String>,
) -> Result<f64> {
    let assignments = cluster_assignments(theta);
    let (clusters, classes) = paired(&assignments, gold)?;
    Ok(purity_of_labels(&clusters, &classes))
}

/// `(1/N) Σ_clusters max_class |cluster ∩ class|`.
pub fn purity_of_labels<A: Ord, B: Ord>(clusters: &[A], classes: &[B]) -> f64 {
    assert_eq!(clusters.len(), classes.len());
    if clusters.is_empty() {
        return 0.0;
    }
    let table = contingency(clusters, classes);
    let mut best: BTreeMap<&A, usize> = BTreeMap::new();
    for ((a, _), &n) in &table {
        let slot = best.entry(*a).or_insert(0);
        *slot = (*slot).max(n);
    }
    best.values().sum::<usize>() as f64 / clusters.len() as f64
}

/// NMI between a clustering and gold classes over the same documents.
pub fn nmi(assignments: &BTreeMap<String, usize>, gold: &BTreeMap<String, String>) -> Result<f64> {
    if assignments.len() != gold.len() {
        return Err(Error::DimensionMismatch {
            expected: gold.len(),
            found: assignments.len(),
        });
    }
    let (clusters, classes) = paired(assignments, gold)?;
    Ok(nmi_of_labels(&clusters, &classes))
}

/// `2·I(A;B) / (H(A) + H(B))`; 1 when both entropies vanish, 0 when only one
/// does.
///
/// The mutual information is taken as `H(A) + H(B) − H(A,B)` with every
/// entropy summed in ascending count order, so labelings that agree up to
/// renaming score exactly 1.
pub fn nmi_of_labels<A: Ord, B: Ord>(a: &[A], b: &[B]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    if a.is_empty() {
        return 0.0;
    }
    let entropy = |counts: Vec<usize>| -> f64 {
        let mut counts = counts;
        counts.sort_unstable();
        counts
            .into_iter()
            .map(|c| {
                let p = c as f64 / n;
                -p * libm::log(p)
            })
            .sum()
    };
    let ha = entropy(marginal(a).into_values().collect());
    let hb = entropy(marginal(b).into_values().collect());
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    if ha == 0.0 || hb == 0.0 {
        return 0.0;
    }
    let hab = entropy(contingency(a, b).into_values().collect());
    let mi = ha + hb - hab;
    (2.0 * mi / (ha + hb)).clamp(0.0, 1.0)
}

fn marginal<A: Ord>(labels: &[A]) -> BTreeMap<&A, usize> {
    let mut m = BTreeMap::new();
    for l in labels {
        *m.entry(l).or_insert(0) += 1;
    }
    m
}

fn contingency<'a, A: Ord, B: Ord>(a: &'a [A], b: &'a [B]) -> BTreeMap<(&'a A, &'a B), usize> {
    let mut m = BTreeMap::new();
    for pair in a.iter().zip(b) {
        *m.entry(pair).or_insert(0) += 1;
    }
    m
}
