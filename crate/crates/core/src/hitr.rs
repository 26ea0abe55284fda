//! The three re-estimation stages and the pipeline variants built from them.
//!
//! Stages always run in the order document re-estimation (DR), LDA training,
//! topic re-estimation (TR, followed by fold-in re-assignment), and topic
//! assignment re-estimation (TAR). A variant selects which of DR, TR and TAR
//! take part.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{collection_language_model, Corpus, Document};
use crate::dist::SparseDistribution;
use crate::error::{Error, Result};
use crate::lda::{self, LdaConfig, TopicModel};
use crate::parsimony::{parsimonize, smoothed_background, ParsimonyConfig};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineVariant {
    Lda,
    LdaDr,
    LdaTr,
    LdaTar,
    LdaDrTr,
    LdaDrTar,
    LdaTrTar,
    Hitr,
}

impl PipelineVariant {
    pub const ALL: [PipelineVariant; 8] = [
        PipelineVariant::Lda,
        PipelineVariant::LdaDr,
        PipelineVariant::LdaTr,
        PipelineVariant::LdaTar,
        PipelineVariant::LdaDrTr,
        PipelineVariant::LdaDrTar,
        PipelineVariant::LdaTrTar,
        PipelineVariant::Hitr,
    ];

    pub fn from_stages(dr: bool, tr: bool, tar: bool) -> Self {
        match (dr, tr, tar) {
            (false, false, false) => PipelineVariant::Lda,
            (true, false, false) => PipelineVariant::LdaDr,
            (false, true, false) => PipelineVariant::LdaTr,
            (false, false, true) => PipelineVariant::LdaTar,
            (true, true, false) => PipelineVariant::LdaDrTr,
            (true, false, true) => PipelineVariant::LdaDrTar,
            (false, true, true) => PipelineVariant::LdaTrTar,
            (true, true, true) => PipelineVariant::Hitr,
        }
    }

    pub fn has_dr(self) -> bool {
        matches!(
            self,
            PipelineVariant::LdaDr
                | PipelineVariant::LdaDrTr
                | PipelineVariant::LdaDrTar
                | PipelineVariant::Hitr
        )
    }

    pub fn has_tr(self) -> bool {
        matches!(
            self,
            PipelineVariant::LdaTr
                | PipelineVariant::LdaDrTr
                | PipelineVariant::LdaTrTar
                | PipelineVariant::Hitr
        )
    }

    pub fn has_tar(self) -> bool {
        matches!(
            self,
            PipelineVariant::LdaTar
                | PipelineVariant::LdaDrTar
                | PipelineVariant::LdaTrTar
                | PipelineVariant::Hitr
        )
    }

    /// Command-line spelling: `lda`, `dr`, `tr`, `tar`, `dr+tr`, `dr+tar`,
    /// `tr+tar`, `hitr`.
    pub fn flag_name(self) -> &'static str {
        match self {
            PipelineVariant::Lda => "lda",
            PipelineVariant::LdaDr => "dr",
            PipelineVariant::LdaTr => "tr",
            PipelineVariant::LdaTar => "tar",
            PipelineVariant::LdaDrTr => "dr+tr",
            PipelineVariant::LdaDrTar => "dr+tar",
            PipelineVariant::LdaTrTar => "tr+tar",
            PipelineVariant::Hitr => "hitr",
        }
    }

    pub fn from_flag_name(name: &str) -> Option<Self> {
        let name = name.trim().to_ascii_lowercase();
        let name = name.strip_prefix("lda+").unwrap_or(&name);
        match name {
            "hitr" | "dr+tr+tar" => return Some(PipelineVariant::Hitr),
            "lda" => return Some(PipelineVariant::Lda),
            _ => {}
        }
        let (mut dr, mut tr, mut tar) = (false, false, false);
        for part in name.split('+') {
            let slot = match part {
                "dr" => &mut dr,
                "tr" => &mut tr,
                "tar" => &mut tar,
                _ => return None,
            };
            if *slot {
                return None;
            }
            *slot = true;
        }
        Some(PipelineVariant::from_stages(dr, tr, tar))
    }
}

impl fmt::Display for PipelineVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PipelineVariant::Lda => "LDA",
            PipelineVariant::LdaDr => "LDA+DR",
            PipelineVariant::LdaTr => "LDA+TR",
            PipelineVariant::LdaTar => "LDA+TAR",
            PipelineVariant::LdaDrTr => "LDA+DR+TR",
            PipelineVariant::LdaDrTar => "LDA+DR+TAR",
            PipelineVariant::LdaTrTar => "LDA+TR+TAR",
            PipelineVariant::Hitr => "HITR",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReestimationConfig {
    pub lambda_dr: f64,
    pub lambda_tr: f64,
    pub lambda_tar: f64,
    /// EM settings shared by all stages; its `lambda` is replaced per stage.
    pub parsimony: ParsimonyConfig,
    pub lda: LdaConfig,
    /// Added to every background item seen in a foreground before the TR and
    /// TAR backgrounds are normalized.
    pub background_smoothing_epsilon: f64,
    /// Gibbs sweeps used when re-assigning topics after TR.
    pub fold_in_iterations: usize,
}

impl Default for ReestimationConfig {
    fn default() -> Self {
        ReestimationConfig {
            lambda_dr: 0.4,
            lambda_tr: 0.7,
            lambda_tar: 0.03,
            parsimony: ParsimonyConfig::default(),
            lda: LdaConfig::default(),
            background_smoothing_epsilon: 1e-12,
            fold_in_iterations: 100,
        }
    }
}

impl ReestimationConfig {
    pub fn validate(&self) -> Result<()> {
        for lambda in [self.lambda_dr, self.lambda_tr, self.lambda_tar] {
            self.parsimony.with_lambda(lambda).validate()?;
        }
        if !(self.background_smoothing_epsilon >= 0.0) {
            return Err(Error::InvalidConfig(
                "background smoothing epsilon must be nonnegative".into(),
            ));
        }
        if self.fold_in_iterations == 0 {
            return Err(Error::InvalidConfig(
                "fold_in_iterations must be positive".into(),
            ));
        }
        self.lda.validate()
    }
}

/// One executed stage with its input and output sizes (tokens for DR and
/// LDA, total support size for TR and TAR).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub size_in: u64,
    pub size_out: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub variant: PipelineVariant,
    pub lambda_dr: Option<f64>,
    pub lambda_tr: Option<f64>,
    pub lambda_tar: Option<f64>,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
}

impl Provenance {
    pub fn new(variant: PipelineVariant, config: &ReestimationConfig, seed: u64) -> Self {
        Provenance {
            variant,
            lambda_dr: variant.has_dr().then_some(config.lambda_dr),
            lambda_tr: variant.has_tr().then_some(config.lambda_tr),
            lambda_tar: variant.has_tar().then_some(config.lambda_tar),
            seed,
            stages: Vec::new(),
        }
    }

    fn record(&mut self, stage: &str, size_in: u64, size_out: u64) {
        self.stages.push(StageRecord {
            stage: stage.to_string(),
            size_in,
            size_out,
        });
    }
}

/// Final `P(t|d)` per document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentTopicMatrix {
    pub rows: Vec<(String, SparseDistribution)>,
    pub provenance: Provenance,
}

impl DocumentTopicMatrix {
    pub fn from_model(model: &TopicModel, provenance: Provenance) -> Self {
        DocumentTopicMatrix {
            rows: model
                .doc_ids
                .iter()
                .cloned()
                .zip(model.theta.iter().cloned())
                .collect(),
            provenance,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &SparseDistribution)> {
        self.rows.iter().map(|(id, row)| (id.as_str(), row))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, doc_id: &str) -> Option<&SparseDistribution> {
        self.rows
            .iter()
            .find(|(id, _)| id == doc_id)
            .map(|(_, r)| r)
    }

    fn support_size(&self) -> u64 {
        self.rows.iter().map(|(_, r)| r.len() as u64).sum()
    }
}

/// Parsimonizes every document against the collection language model and
/// rewrites its counts as `floor(P(w|d̃)·|d|)`.
///
/// Words whose count floors to zero disappear; documents left empty are
/// dropped and recorded in the preprocess log. Word ids are kept as they are.
pub fn document_reestimate(
    corpus: &Corpus,
    lambda_dr: f64,
    parsimony: &ParsimonyConfig,
) -> Result<Corpus> {
    let config = parsimony.with_lambda(lambda_dr);
    config.validate()?;
    let background = collection_language_model(corpus)?;
    let rewritten = crate::par::map(corpus.documents(), |_, doc| {
        let mass: Vec<(usize, f64)> = doc.counts().iter().map(|&(w, c)| (w, c as f64)).collect();
        let specific = parsimonize(&mass, &background, &config)?;
        Ok(
            Document::new(doc.id.clone(), floor_counts(&specific, doc.length()))
                .with_group(doc.group.clone())
                .with_label(doc.class_label.clone()),
        )
    });
    let mut documents = Vec::with_capacity(corpus.len());
    let mut dropped = Vec::new();
    for doc in rewritten {
        let doc: Document = doc?;
        if doc.is_empty() {
            log::debug!("document re-estimation emptied `{}`", doc.id);
            dropped.push(doc.id);
        } else {
            documents.push(doc);
        }
    }
    if documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut out = corpus.with_documents(documents)?;
    out.preprocess_log_mut().dropped_documents.extend(dropped);
    Ok(out)
}

/// `floor(P(w)·length)` per word, zeros included.
pub fn floor_counts(dist: &SparseDistribution, length: u64) -> Vec<(usize, u32)> {
    let len = length as f64;
    // The small offset keeps exact products such as (3/7)·7 from flooring to
    // 2 after rounding.
    dist.iter()
        .map(|(w, p)| (w, libm::floor(p * len + 1e-9) as u32))
        .collect()
}

/// Parsimonizes every topic-word row against the average of all rows.
pub fn reestimate_topics(
    phi: &[SparseDistribution],
    lambda_tr: f64,
    parsimony: &ParsimonyConfig,
    smoothing_epsilon: f64,
) -> Result<Vec<SparseDistribution>> {
    let config = parsimony.with_lambda(lambda_tr);
    config.validate()?;
    if phi.len() < 2 {
        return Err(Error::TooFewTopics(phi.len()));
    }
    if lambda_tr == 1.0 {
        return Ok(phi.to_vec());
    }
    let background = smoothed_background(phi, smoothing_epsilon)?;
    crate::par::map(phi, |_, row| {
        parsimonize(row.entries(), &background, &config)
    })
    .into_iter()
    .collect()
}

/// Topic re-estimation followed by fold-in re-assignment of `corpus`
/// against the re-estimated topics.
///
/// With `λ = 1` topics are left alone, so the model (including its `theta`)
/// is returned unchanged.
pub fn topic_reestimate(
    model: &TopicModel,
    corpus: &Corpus,
    config: &ReestimationConfig,
    seed: u64,
) -> Result<TopicModel> {
    if model.num_topics() < 2 {
        return Err(Error::TooFewTopics(model.num_topics()));
    }
    if config.lambda_tr == 1.0 {
        config.parsimony.with_lambda(1.0).validate()?;
        return Ok(model.clone());
    }
    let phi = reestimate_topics(
        &model.phi,
        config.lambda_tr,
        &config.parsimony,
        config.background_smoothing_epsilon,
    )?;
    let mut out = TopicModel {
        config: model.config,
        vocab_size: model.vocab_size,
        phi,
        theta: Vec::new(),
        doc_ids: corpus.documents().iter().map(|d| d.id.clone()).collect(),
    };
    out.theta = lda::fold_in(&out, corpus, config.fold_in_iterations, seed)?;
    Ok(out)
}

/// Parsimonizes every document's topic distribution against the
/// collection-wide topic distribution.
pub fn assignment_reestimate(
    theta: &DocumentTopicMatrix,
    lambda_tar: f64,
    parsimony: &ParsimonyConfig,
    smoothing_epsilon: f64,
) -> Result<DocumentTopicMatrix> {
    let config = parsimony.with_lambda(lambda_tar);
    config.validate()?;
    if theta.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if lambda_tar == 1.0 {
        return Ok(theta.clone());
    }
    let rows: Vec<SparseDistribution> = theta.rows.iter().map(|(_, r)| r.clone()).collect();
    let background = smoothed_background(&rows, smoothing_epsilon)?;
    let rows = crate::par::map(&theta.rows, |_, (id, row)| {
        Ok((
            id.clone(),
            parsimonize(row.entries(), &background, &config)?,
        ))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(DocumentTopicMatrix {
        rows,
        provenance: theta.provenance.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    /// The corpus LDA was trained on (re-estimated when DR ran).
    pub corpus: Corpus,
    /// Final topics; `theta` holds the final assignments.
    pub model: TopicModel,
    pub assignments: DocumentTopicMatrix,
}

/// Runs the stages selected by `variant` in the order DR, LDA, TR, TAR.
///
/// `seed` replaces the LDA config seed; fold-in uses a stream derived from it.
pub fn run_pipeline(
    corpus: &Corpus,
    variant: PipelineVariant,
    config: &ReestimationConfig,
    seed: u64,
) -> Result<PipelineOutput> {
    config.validate()?;
    let mut provenance = Provenance::new(variant, config, seed);

    let training = if variant.has_dr() {
        let out = document_reestimate(corpus, config.lambda_dr, &config.parsimony)
            .map_err(|e| e.in_stage("document re-estimation"))?;
        provenance.record("dr", corpus.total_tokens(), out.total_tokens());
        out
    } else {
        corpus.clone()
    };

    let lda_config = config.lda.seed(seed);
    let model = lda::train(&training, &lda_config).map_err(|e| e.in_stage("lda"))?;
    provenance.record("lda", training.total_tokens(), training.len() as u64);
    finish_pipeline(training, model, variant, config, seed, provenance)
}

/// Runs the TR and TAR stages selected by `variant` on an already trained
/// model. `training` must be the corpus the model was trained on and `seed`
/// the seed used for training; the result then equals [`run_pipeline`].
pub fn reestimate_trained(
    training: &Corpus,
    model: &TopicModel,
    variant: PipelineVariant,
    config: &ReestimationConfig,
    seed: u64,
) -> Result<PipelineOutput> {
    config.validate()?;
    if variant.has_dr() {
        return Err(Error::InvalidConfig(
            "document re-estimation must run before LDA training".into(),
        ));
    }
    if model.doc_ids.len() != training.len() {
        return Err(Error::DimensionMismatch {
            expected: model.doc_ids.len(),
            found: training.len(),
        });
    }
    let mut provenance = Provenance::new(variant, config, seed);
    provenance.record("lda", training.total_tokens(), training.len() as u64);
    finish_pipeline(
        training.clone(),
        model.clone(),
        variant,
        config,
        seed,
        provenance,
    )
}

fn finish_pipeline(
    training: Corpus,
    mut model: TopicModel,
    variant: PipelineVariant,
    config: &ReestimationConfig,
    seed: u64,
    mut provenance: Provenance,
) -> Result<PipelineOutput> {
    if variant.has_tr() {
        let before: u64 = model.phi.iter().map(|r| r.len() as u64).sum();
        model = topic_reestimate(
            &model,
            &training,
            config,
            seed::derive(seed, seed::STREAM_FOLD_IN),
        )
        .map_err(|e| e.in_stage("topic re-estimation"))?;
        let after: u64 = model.phi.iter().map(|r| r.len() as u64).sum();
        provenance.record("tr", before, after);
    }

    let mut assignments = DocumentTopicMatrix::from_model(&model, provenance.clone());
    if variant.has_tar() {
        let before = assignments.support_size();
        assignments = assignment_reestimate(
            &assignments,
            config.lambda_tar,
            &config.parsimony,
            config.background_smoothing_epsilon,
        )
        .map_err(|e| e.in_stage("topic assignment re-estimation"))?;
        provenance.record("tar", before, assignments.support_size());
        model.theta = assignments.rows.iter().map(|(_, r)| r.clone()).collect();
    }
    assignments.provenance = provenance;

    Ok(PipelineOutput {
        corpus: training,
        model,
        assignments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn variant_names_round_trip() {
        for v in PipelineVariant::ALL {
            assert_eq!(PipelineVariant::from_flag_name(v.flag_name()), Some(v));
            assert_eq!(
                PipelineVariant::from_stages(v.has_dr(), v.has_tr(), v.has_tar()),
                v
            );
        }
        assert_eq!(
            PipelineVariant::from_flag_name("LDA+TR+DR"),
            Some(PipelineVariant::LdaDrTr)
        );
        assert_eq!(PipelineVariant::from_flag_name("dr+dr"), None);
        assert_eq!(PipelineVariant::from_flag_name("xyz"), None);
        assert_eq!(PipelineVariant::Hitr.to_string(), "HITR");
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = ReestimationConfig::default();
        assert_eq!((c.lambda_dr, c.lambda_tr, c.lambda_tar), (0.4, 0.7, 0.03));
        assert_eq!(c.parsimony.prune_threshold, 1e-4);
        assert!(c.validate().is_ok());
        let bad = ReestimationConfig {
            lambda_tar: 0.0,
            ..c
        };
        assert!(bad.validate().is_err());
    }

    fn toy_corpus() -> Corpus {
        let words = (0..4).map(|i| alloc::format!("w{i}")).collect();
        Corpus::from_parts(
            words,
            vec![
                Document::new("a", [(0, 4), (1, 3)]),
                Document::new("b", [(0, 4), (2, 3)]),
                Document::new("c", [(0, 4), (3, 3)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn dr_identity_at_lambda_one() {
        let corpus = toy_corpus();
        let out = document_reestimate(&corpus, 1.0, &ParsimonyConfig::default()).unwrap();
        assert_eq!(out, corpus);
    }

    #[test]
    fn dr_floor_arithmetic() {
        let half = SparseDistribution::from_dense(&[0.5, 0.5]).unwrap();
        assert_eq!(floor_counts(&half, 7), vec![(0, 3), (1, 3)]);
        let thirds = SparseDistribution::from_dense(&[3.0, 4.0]).unwrap();
        assert_eq!(floor_counts(&thirds, 7), vec![(0, 3), (1, 4)]);
    }

    #[test]
    fn dr_drops_emptied_documents() {
        // Document "z" only contains the word every other document uses a lot.
        let words = (0..3).map(|i| alloc::format!("w{i}")).collect();
        let corpus = Corpus::from_parts(
            words,
            vec![
                Document::new("x", [(0, 50), (1, 5)]),
                Document::new("y", [(0, 50), (2, 5)]),
                Document::new("z", [(0, 1), (1, 1), (2, 1)]),
            ],
        )
        .unwrap();
        let out = document_reestimate(&corpus, 0.05, &ParsimonyConfig::default()).unwrap();
        assert!(out.len() <= 3);
        for doc in out.documents() {
            assert!(!doc.is_empty());
        }
        assert_eq!(out.len() + out.preprocess_log().dropped_documents.len(), 3);
    }

    #[test]
    fn tar_identity_and_one_hot() {
        let provenance =
            Provenance::new(PipelineVariant::LdaTar, &ReestimationConfig::default(), 0);
        let theta = DocumentTopicMatrix {
            rows: vec![
                (
                    "a".into(),
                    SparseDistribution::from_dense(&[0.5, 0.3, 0.2]).unwrap(),
                ),
                ("b".into(), SparseDistribution::one_hot(2)),
            ],
            provenance,
        };
        let same = assignment_reestimate(&theta, 1.0, &ParsimonyConfig::default(), 1e-12).unwrap();
        assert_eq!(same, theta);
        let out = assignment_reestimate(&theta, 0.1, &ParsimonyConfig::default(), 1e-12).unwrap();
        assert_eq!(out.rows[1].1, SparseDistribution::one_hot(2));
        assert!(out.rows[0].1.len() <= 3);
    }

    #[test]
    fn tr_identity_at_lambda_one() {
        let phi = vec![
            SparseDistribution::from_dense(&[0.6, 0.0, 0.4]).unwrap(),
            SparseDistribution::from_dense(&[0.0, 0.6, 0.4]).unwrap(),
        ];
        let out = reestimate_topics(&phi, 1.0, &ParsimonyConfig::default(), 1e-12).unwrap();
        assert_eq!(out, phi);
        assert!(reestimate_topics(&phi[..1], 0.5, &ParsimonyConfig::default(), 0.0).is_err());
    }
}
