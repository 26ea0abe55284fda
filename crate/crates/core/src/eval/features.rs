use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::hitr::DocumentTopicMatrix;

/// Dense `P(t|d)` feature vector for an external classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub doc_id: String,
    pub label: Option<String>,
    pub values: Vec<f64>,
}

pub fn export_features(
    theta: &DocumentTopicMatrix,
    gold: &BTreeMap<String, String>,
    num_topics: usize,
) -> Vec<FeatureRow> {
    theta
        .iter()
        .map(|(id, row)| FeatureRow {
            doc_id: id.into(),
            label: gold.get(id).cloned(),
            values: row.to_dense(num_topics),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::SparseDistribution;
    use crate::hitr::{PipelineVariant, Provenance, ReestimationConfig};
    use alloc::vec;

    #[test]
    fn dense_rows_with_labels() {
        let theta = DocumentTopicMatrix {
            rows: vec![
                ("a".into(), SparseDistribution::one_hot(2)),
                (
                    "b".into(),
                    SparseDistribution::from_dense(&[0.25, 0.75, 0.0]).unwrap(),
                ),
            ],
            provenance: Provenance::new(PipelineVariant::Lda, &ReestimationConfig::default(), 0),
        };
        let gold = [("a".into(), "x".into())].into_iter().collect();
        let rows = export_features(&theta, &gold, 3);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].values, vec![0.0, 0.0, 1.0]);
        assert_eq!(rows[0].label.as_deref(), Some("x"));
        assert_eq!(rows[1].values, vec![0.25, 0.75, 0.0]);
        assert_eq!(rows[1].label, None);
    }
}
