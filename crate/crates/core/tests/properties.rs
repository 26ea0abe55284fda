use std::collections::BTreeMap;

use hitr_core::corpus::Document;
use hitr_core::diversity::{angular_distance, rao_diversity, TopicDistanceMatrix};
use hitr_core::eval::cluster::{nmi_of_labels, purity_of_labels};
use hitr_core::eval::coherence::pair_npmi;
use hitr_core::eval::kfold::kfold_splits;
use hitr_core::eval::roc::trapezoid_area;
use hitr_core::eval::synthetic::combine_documents;
use hitr_core::eval::{roc_auc, LabeledScore};
use hitr_core::hitr::floor_counts;
use hitr_core::parsimony::{parsimonize, ParsimonyConfig};
use hitr_core::SparseDistribution;
use proptest::prelude::*;

fn weights(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, 1..max_len)
        .prop_filter("needs positive mass", |w| w.iter().any(|&x| x > 1e-6))
}

fn distribution(max_len: usize) -> impl Strategy<Value = SparseDistribution> {
    weights(max_len).prop_map(|w| SparseDistribution::from_dense(&w).unwrap())
}

fn distance_matrix(size: usize) -> impl Strategy<Value = TopicDistanceMatrix> {
    prop::collection::vec(0.0f64..=1.0, size * size).prop_map(move |v| {
        let mut rows = vec![vec![0.0; size]; size];
        for i in 0..size {
            for j in i + 1..size {
                rows[i][j] = v[i * size + j];
                rows[j][i] = v[i * size + j];
            }
        }
        TopicDistanceMatrix::from_rows(&rows).unwrap()
    })
}

proptest! {
    #[test]
    fn parsimonize_returns_a_distribution_on_the_mass_support(
        mass in weights(12),
        bg in prop::collection::vec(0.01f64..1.0, 12),
        lambda in 0.01f64..=1.0,
        threshold in 0.0f64..0.05,
    ) {
        let background = SparseDistribution::from_dense(&bg).unwrap();
        let mass: Vec<(usize, f64)> = mass.into_iter().enumerate().collect();
        let config = ParsimonyConfig { lambda, prune_threshold: threshold, ..Default::default() };
        let p = parsimonize(&mass, &background, &config).unwrap();
        prop_assert!(p.is_valid());
        for (id, v) in p.iter() {
            prop_assert!(mass[id].1 > 0.0);
            prop_assert!(v >= threshold);
        }
    }

    #[test]
    fn parsimonize_at_lambda_one_is_the_normalized_mass(mass in weights(12)) {
        let background = SparseDistribution::from_dense(&[1.0]).unwrap();
        let entries: Vec<(usize, f64)> = mass.iter().copied().enumerate().collect();
        let p = parsimonize(&entries, &background, &ParsimonyConfig::default()).unwrap();
        let total: f64 = mass.iter().sum();
        for (id, &m) in mass.iter().enumerate() {
            prop_assert!((p.get(id) - m / total).abs() <= 1e-15);
        }
    }

    #[test]
    fn angular_distance_is_a_bounded_symmetric_dissimilarity(
        p in distribution(8),
        q in distribution(8),
    ) {
        let d = angular_distance(&p, &q);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, angular_distance(&q, &p));
        prop_assert_eq!(angular_distance(&p, &p), 0.0);
    }

    #[test]
    fn rao_is_bounded_by_the_largest_distance(
        theta in distribution(6),
        delta in distance_matrix(6),
    ) {
        let r = rao_diversity(&theta, &delta);
        let max = (0..6).flat_map(|i| (0..6).map(move |j| (i, j))).map(|(i, j)| delta.get(i, j)).fold(0.0, f64::max);
        prop_assert!(r >= 0.0 && r <= max + 1e-15);
    }

    #[test]
    fn one_hot_rows_have_zero_diversity(t in 0usize..6, delta in distance_matrix(6)) {
        prop_assert_eq!(rao_diversity(&SparseDistribution::one_hot(t), &delta), 0.0);
    }

    #[test]
    fn roc_curve_shape_and_auc_symmetry(
        raw in prop::collection::vec((0u8..20, any::<bool>()), 2..60)
            .prop_filter("both classes", |v| v.iter().any(|x| x.1) && v.iter().any(|x| !x.1)),
    ) {
        let scores: Vec<LabeledScore> = raw.iter().enumerate()
            .map(|(i, &(s, l))| LabeledScore::new(format!("d{i}"), s as f64 / 4.0, l)).collect();
        let roc = roc_auc(&scores).unwrap();
        let first = roc.points.first().unwrap();
        let last = roc.points.last().unwrap();
        prop_assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        prop_assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        for w in roc.points.windows(2) {
            prop_assert!(w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr);
        }
        prop_assert!((roc.auc - trapezoid_area(&roc.points)).abs() <= 1e-12);

        let flipped: Vec<LabeledScore> = scores.iter()
            .map(|s| LabeledScore::new(s.doc_id.clone(), -s.score, s.label)).collect();
        prop_assert!((roc_auc(&flipped).unwrap().auc - (1.0 - roc.auc)).abs() <= 1e-12);
    }

    #[test]
    fn npmi_pair_scores_stay_in_range(
        n in 1u32..50,
        a in 0u32..50,
        b in 0u32..50,
        c in 0u32..50,
    ) {
        // Documents containing i, j and both, kept consistent.
        let (ni, nj) = (a.min(n), b.min(n));
        let lo = (ni + nj).saturating_sub(n);
        let nij = c.clamp(lo, ni.min(nj));
        prop_assume!(ni > 0 && nj > 0);
        let f = |x: u32| x as f64 / n as f64;
        let s = pair_npmi(f(ni), f(nj), f(nij));
        prop_assert!((-1.0..=1.0).contains(&s));
    }

    #[test]
    fn purity_and_nmi_are_bounded_and_nmi_is_symmetric(
        pairs in prop::collection::vec((0u8..4, 0u8..4), 1..40),
    ) {
        let (a, b): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        let purity = purity_of_labels(&a, &b);
        prop_assert!((0.0..=1.0).contains(&purity));
        let nmi = nmi_of_labels(&a, &b);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&nmi));
        prop_assert!((nmi - nmi_of_labels(&b, &a)).abs() <= 1e-12);
        prop_assert_eq!(nmi_of_labels(&a, &a), 1.0);
    }

    #[test]
    fn floor_counts_never_exceed_the_length(p in distribution(10), len in 1u64..500) {
        let counts = floor_counts(&p, len);
        let total: u64 = counts.iter().map(|&(_, c)| c as u64).sum();
        prop_assert!(total <= len);
        for &(w, c) in &counts {
            prop_assert!((c as f64) <= p.get(w) * len as f64 + 1e-6);
        }
    }

    #[test]
    fn combining_a_document_with_itself_is_the_identity(
        counts in prop::collection::btree_map(0usize..30, 1u32..20, 1..10),
    ) {
        let doc = Document::new("x", counts.clone());
        let merged = combine_documents("x", &doc, &doc).unwrap();
        let back: BTreeMap<usize, u32> = merged.counts().iter().copied().collect();
        prop_assert_eq!(back, counts);
    }

    #[test]
    fn kfold_rounds_partition_the_items(n in 3usize..60, k in 3usize..8, seed in any::<u64>()) {
        prop_assume!(n >= k);
        for fold in kfold_splits(n, k, seed).unwrap() {
            let mut all: Vec<usize> = fold.train.iter().chain(&fold.dev).chain(&fold.test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }
}
