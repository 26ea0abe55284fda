//! Diversity classification AUC for a pipeline variant, and λ sweeps of a
//! single re-estimation stage.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::diversity::{score_documents, topic_distance_matrix, DiversityScore};
use crate::error::{Error, Result};
use crate::eval::roc::{roc_auc, LabeledScore, RocCurve};
use crate::hitr::{run_pipeline, PipelineOutput, PipelineVariant, ReestimationConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Dr,
    Tr,
    Tar,
}

impl Stage {
    pub fn variant(self) -> PipelineVariant {
        match self {
            Stage::Dr => PipelineVariant::LdaDr,
            Stage::Tr => PipelineVariant::LdaTr,
            Stage::Tar => PipelineVariant::LdaTar,
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "dr" => Some(Stage::Dr),
            "tr" => Some(Stage::Tr),
            "tar" => Some(Stage::Tar),
            _ => None,
        }
    }

    pub fn with_lambda(self, config: &ReestimationConfig, lambda: f64) -> ReestimationConfig {
        let mut c = *config;
        match self {
            Stage::Dr => c.lambda_dr = lambda,
            Stage::Tr => c.lambda_tr = lambda,
            Stage::Tar => c.lambda_tar = lambda,
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub auc: f64,
}

/// Reads a binary class label: `1`/`true`/`diverse`/`pos` or
/// `0`/`false`/`non-diverse`/`neg`.
pub fn parse_binary_label(label: &str) -> Option<bool> {
    match label.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "diverse" | "pos" | "positive" => Some(true),
        "0" | "false" | "non-diverse" | "nondiverse" | "neg" | "negative" => Some(false),
        _ => None,
    }
}

/// Rao diversity of every document in the pipeline output.
pub fn diversity_scores(output: &PipelineOutput) -> Result<Vec<DiversityScore>> {
    let distances = topic_distance_matrix(&output.model)?;
    Ok(score_documents(output.assignments.iter(), &distances))
}

/// Pairs scores with the class labels of `corpus`; unlabelled documents are
/// skipped.
pub fn label_scores(scores: &[DiversityScore], corpus: &Corpus) -> Result<Vec<LabeledScore>> {
    let mut out = Vec::with_capacity(scores.len());
    for s in scores {
        let Some(label) = corpus
            .document(&s.doc_id)
            .and_then(|d| d.class_label.as_deref())
        else {
            continue;
        };
        let positive = parse_binary_label(label).ok_or_else(|| Error::InvalidLabel {
            doc: s.doc_id.clone(),
            label: label.into(),
        })?;
        out.push(LabeledScore::new(s.doc_id.clone(), s.score, positive));
    }
    Ok(out)
}

/// Runs `variant` on a labelled corpus and returns the ROC of its diversity
/// scores.
pub fn diversity_roc(
    corpus: &Corpus,
    variant: PipelineVariant,
    config: &ReestimationConfig,
    seed: u64,
) -> Result<RocCurve> {
    let output = run_pipeline(corpus, variant, config, seed)?;
    let scores = diversity_scores(&output)?;
    roc_auc(&label_scores(&scores, corpus)?)
}

pub fn diversity_auc(
    corpus: &Corpus,
    variant: PipelineVariant,
    config: &ReestimationConfig,
    seed: u64,
) -> Result<f64> {
    Ok(diversity_roc(corpus, variant, config, seed)?.auc)
}

/// AUC of the single-stage variant for one λ.
pub fn sweep_point(
    corpus: &Corpus,
    stage: Stage,
    lambda: f64,
    config: &ReestimationConfig,
    seed: u64,
) -> Result<SweepPoint> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidConfig(alloc::format!(
            "sweep lambda must lie in (0, 1], got {lambda}"
        )));
    }
    let auc = diversity_auc(
        corpus,
        stage.variant(),
        &stage.with_lambda(config, lambda),
        seed,
    )?;
    Ok(SweepPoint { lambda, auc })
}

/// AUC of LDA plus `stage` for every λ in `grid`, all with the same seed.
pub fn lambda_sweep(
    corpus: &Corpus,
    stage: Stage,
    grid: &[f64],
    config: &ReestimationConfig,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    grid.iter()
        .map(|&lambda| sweep_point(corpus, stage, lambda, config, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(parse_binary_label("1"), Some(true));
        assert_eq!(parse_binary_label(" Diverse "), Some(true));
        assert_eq!(parse_binary_label("non-diverse"), Some(false));
        assert_eq!(parse_binary_label("maybe"), None);
    }

    #[test]
    fn stage_names() {
        assert_eq!(Stage::from_name("TAR"), Some(Stage::Tar));
        assert_eq!(Stage::Tr.variant(), PipelineVariant::LdaTr);
        let c = Stage::Dr.with_lambda(&ReestimationConfig::default(), 0.9);
        assert_eq!(c.lambda_dr, 0.9);
        assert_eq!(c.lambda_tr, 0.7);
    }
}
