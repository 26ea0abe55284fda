//! On-disk formats: versioned corpus and model JSON, and the CSV outputs.
//!
//! Model files ending in `.gz` are gzip-compressed. Probabilities are written
//! with 12 significant digits and rows are renormalized when read back.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use hitr_core::corpus::{Corpus, Document, PreprocessLog};
use hitr_core::diversity::{DiversityScore, TopicDistanceMatrix};
use hitr_core::eval::features::FeatureRow;
use hitr_core::eval::roc::RocPoint;
use hitr_core::eval::SweepPoint;
use hitr_core::hitr::{Provenance, ReestimationConfig};
use hitr_core::lda::{LdaConfig, TopicModel};
use hitr_core::SparseDistribution;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CORPUS_FORMAT: &str = "hitr-corpus";
pub const MODEL_FORMAT: &str = "hitr-model";
pub const FORMAT_VERSION: u32 = 1;

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out: Box<dyn Write> = if is_gzip(path) {
        Box::new(GzEncoder::new(BufWriter::new(file), Compression::default()))
    } else {
        Box::new(BufWriter::new(file))
    };
    serde_json::to_writer(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let input: Box<dyn Read> = if is_gzip(path) {
        Box::new(GzDecoder::new(BufReader::new(file)))
    } else {
        Box::new(BufReader::new(file))
    };
    serde_json::from_reader(input).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Serialize, Deserialize)]
struct CorpusFile {
    format: String,
    version: u32,
    vocab: Vec<String>,
    docs: Vec<DocRecord>,
    #[serde(default)]
    preprocess: PreprocessLog,
}

#[derive(Serialize, Deserialize)]
struct DocRecord {
    id: String,
    counts: Vec<(usize, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

fn check_header(path: &Path, format: &str, version: u32, expected: &str) -> Result<()> {
    ensure!(
        format == expected,
        "{} is not a {expected} file (format {format:?})",
        path.display()
    );
    ensure!(
        version == FORMAT_VERSION,
        "{}: unsupported {expected} version {version}",
        path.display()
    );
    Ok(())
}

pub fn write_corpus(path: &Path, corpus: &Corpus) -> Result<()> {
    let file = CorpusFile {
        format: CORPUS_FORMAT.into(),
        version: FORMAT_VERSION,
        vocab: corpus.vocabulary().words().to_vec(),
        docs: corpus
            .documents()
            .iter()
            .map(|d| DocRecord {
                id: d.id.clone(),
                counts: d.counts().to_vec(),
                group: d.group.clone(),
                label: d.class_label.clone(),
            })
            .collect(),
        preprocess: corpus.preprocess_log().clone(),
    };
    write_json(path, &file)
}

pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let file: CorpusFile = read_json(path)?;
    check_header(path, &file.format, file.version, CORPUS_FORMAT)?;
    let docs = file
        .docs
        .into_iter()
        .map(|r| {
            Document::new(r.id, r.counts)
                .with_group(r.group)
                .with_label(r.label)
        })
        .collect();
    let corpus = Corpus::from_parts(file.vocab, docs)
        .with_context(|| format!("invalid corpus in {}", path.display()))?;
    Ok(corpus.with_preprocess_log(file.preprocess))
}

/// Identifies the vocabulary a model's word ids refer to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabRef {
    pub size: usize,
    pub sha256: String,
}

impl VocabRef {
    pub fn of(words: &[String]) -> Self {
        let mut hasher = Sha256::new();
        for w in words {
            hasher.update(w.as_bytes());
            hasher.update(b"\n");
        }
        VocabRef {
            size: words.len(),
            sha256: hex::encode(hasher.finalize()),
        }
    }

    pub fn check(&self, corpus: &Corpus) -> Result<()> {
        let actual = VocabRef::of(corpus.vocabulary().words());
        ensure!(
            *self == actual,
            "model vocabulary ({} words, sha256 {}) does not match the corpus ({} words, sha256 {})",
            self.size,
            self.sha256,
            actual.size,
            actual.sha256
        );
        Ok(())
    }
}

/// A topic model together with how it was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelArtifact {
    pub model: TopicModel,
    pub vocab_ref: VocabRef,
    /// Present once any re-estimation pipeline has run.
    pub reestimation: Option<ReestimationConfig>,
    pub provenance: Option<Provenance>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    config: LdaConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reestimation: Option<ReestimationConfig>,
    vocab_ref: VocabRef,
    phi: Vec<Vec<(usize, f64)>>,
    theta: Vec<Vec<(usize, f64)>>,
    doc_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn rows_out(rows: &[SparseDistribution]) -> Vec<Vec<(usize, f64)>> {
    rows.iter()
        .map(|r| r.iter().map(|(i, p)| (i, round_sig12(p))).collect())
        .collect()
}

fn rows_in(
    path: &Path,
    what: &str,
    rows: Vec<Vec<(usize, f64)>>,
) -> Result<Vec<SparseDistribution>> {
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            SparseDistribution::from_weights(row).with_context(|| {
                format!(
                    "{}: {what} row {i} is not a probability distribution",
                    path.display()
                )
            })
        })
        .collect()
}

pub fn write_model(path: &Path, artifact: &ModelArtifact) -> Result<()> {
    let m = &artifact.model;
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        version: FORMAT_VERSION,
        config: m.config,
        reestimation: artifact.reestimation,
        vocab_ref: artifact.vocab_ref.clone(),
        phi: rows_out(&m.phi),
        theta: rows_out(&m.theta),
        doc_ids: m.doc_ids.clone(),
        provenance: artifact.provenance.clone(),
    };
    write_json(path, &file)
}

pub fn read_model(path: &Path) -> Result<ModelArtifact> {
    let file: ModelFile = read_json(path)?;
    check_header(path, &file.format, file.version, MODEL_FORMAT)?;
    let model = TopicModel {
        config: file.config,
        vocab_size: file.vocab_ref.size,
        phi: rows_in(path, "phi", file.phi)?,
        theta: rows_in(path, "theta", file.theta)?,
        doc_ids: file.doc_ids,
    };
    model
        .validate()
        .with_context(|| format!("invalid model in {}", path.display()))?;
    Ok(ModelArtifact {
        model,
        vocab_ref: file.vocab_ref,
        reestimation: file.reestimation,
        provenance: file.provenance,
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

pub fn write_scores(path: &Path, scores: &[DiversityScore]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["doc_id", "diversity"])?;
    for s in scores {
        w.write_record([s.doc_id.as_str(), &s.score.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scores(path: &Path) -> Result<Vec<DiversityScore>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = r.headers()?.clone();
    ensure!(
        headers.iter().eq(["doc_id", "diversity"]),
        "{}: expected header doc_id,diversity",
        path.display()
    );
    let mut out = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec?;
        let score: f64 = rec[1].parse().with_context(|| {
            format!("{}: row {}: bad score {:?}", path.display(), n + 1, &rec[1])
        })?;
        out.push(DiversityScore {
            doc_id: rec[0].to_string(),
            score,
        });
    }
    Ok(out)
}

/// Square matrix with a `topic` column followed by one column per topic.
pub fn write_distance_matrix(path: &Path, matrix: &TopicDistanceMatrix) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["topic".to_string()];
    header.extend((0..matrix.size()).map(|t| format!("t{t}")));
    w.write_record(&header)?;
    for i in 0..matrix.size() {
        let mut rec = vec![i.to_string()];
        rec.extend(matrix.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_roc(path: &Path, points: &[RocPoint]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["threshold", "fpr", "tpr"])?;
    for p in points {
        w.write_record([
            p.threshold.to_string(),
            p.fpr.to_string(),
            p.tpr.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["lambda", "auc"])?;
    for p in points {
        w.write_record([p.lambda.to_string(), p.auc.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coherence(path: &Path, per_topic: &[f64]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["topic_id", "npmi"])?;
    for (t, v) in per_topic.iter().enumerate() {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `metric,value` rows.
pub fn write_metrics(path: &Path, metrics: &[(&str, f64)]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["metric", "value"])?;
    for (name, v) in metrics {
        w.write_record([*name, &v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_features(path: &Path, rows: &[FeatureRow], num_topics: usize) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["doc_id".to_string(), "label".to_string()];
    header.extend((0..num_topics).map(|t| format!("t{t}")));
    w.write_record(&header)?;
    for row in rows {
        if row.values.len() != num_topics {
            bail!(
                "feature row {} has {} values, expected {num_topics}",
                row.doc_id,
                row.values.len()
            );
        }
        let mut rec = vec![row.doc_id.clone(), row.label.clone().unwrap_or_default()];
        rec.extend(row.values.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features(path: &Path) -> Result<Vec<FeatureRow>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        ensure!(
            rec.len() >= 2,
            "{}: feature rows need doc_id and label",
            path.display()
        );
        let values = rec
            .iter()
            .skip(2)
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("{}: bad feature value", path.display()))?;
        out.push(FeatureRow {
            doc_id: rec[0].to_string(),
            label: (!rec[1].is_empty()).then(|| rec[1].to_string()),
            values,
        });
    }
    Ok(out)
}
