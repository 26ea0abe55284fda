//! The `hitr` command line.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors. Data
//! errors are reported with the name of the stage that failed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use hitr_core::corpus::{build_corpus, BuildOptions, Corpus};
use hitr_core::diversity::{score_documents, topic_distance_matrix};
use hitr_core::eval::cluster::{cluster_assignments, clustering_purity, nmi};
use hitr_core::eval::features::export_features;
use hitr_core::eval::sweep::{label_scores, sweep_point};
use hitr_core::eval::synthetic::SyntheticSpec;
use hitr_core::eval::{generate_diversity_dataset, npmi_coherence, roc_auc, Stage};
use hitr_core::hitr::{reestimate_trained, run_pipeline, PipelineVariant, ReestimationConfig};
use hitr_core::lda::{self, LdaConfig};
use hitr_core::parsimony::ParsimonyConfig;
use rayon::prelude::*;
use serde_json::json;

use crate::formats::{self, ModelArtifact, VocabRef};
use crate::io;
use crate::manifest::ManifestBuilder;

#[derive(Debug, Parser)]
#[command(
    name = "hitr",
    version,
    about = "Hierarchical re-estimation of topic models and topical diversity"
)]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize raw documents into a corpus JSON file.
    Ingest(IngestArgs),
    /// Train LDA on a corpus.
    Train(TrainArgs),
    /// Run a re-estimation pipeline variant.
    Reestimate(ReestimateArgs),
    /// Score documents by Rao diversity.
    Diversity(DiversityArgs),
    /// Build a labelled high/low diversity corpus from a grouped corpus.
    GenSynthetic(GenSyntheticArgs),
    /// Evaluation reports.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// AUC of one re-estimation stage over a grid of λ values.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Directory of .txt files or a JSON-lines file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub top_k_remove: usize,
    #[arg(long, default_value_t = 5)]
    pub min_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Auto,
    Value(f64),
}

impl FromStr for Alpha {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Alpha::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Alpha::Value(v)),
            _ => Err(format!("expected `auto` or a positive number, got `{s}`")),
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Auto => f.write_str("auto"),
            Alpha::Value(v) => write!(f, "{v}"),
        }
    }
}

fn parse_variant(s: &str) -> Result<PipelineVariant, String> {
    PipelineVariant::from_flag_name(s).ok_or_else(|| {
        format!(
            "unknown variant `{s}`; expected one of lda, dr, tr, tar, dr+tr, dr+tar, tr+tar, hitr"
        )
    })
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    Stage::from_name(s).ok_or_else(|| format!("unknown stage `{s}`; expected dr, tr or tar"))
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(':') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.into(), b.into())),
        _ => Err(format!("expected GROUP_A:GROUP_B, got `{s}`")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct LdaArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub topics: usize,
    /// Document-topic prior; `auto` means 1/topics.
    #[arg(long, default_value_t = Alpha::Auto)]
    pub alpha: Alpha,
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    /// Total Gibbs sweeps.
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    #[arg(long, default_value_t = 800)]
    pub burn_in: usize,
    /// Average the counts of this many final sweeps.
    #[arg(long, default_value_t = 1)]
    pub average_last: usize,
}

impl LdaArgs {
    fn config(&self) -> LdaConfig {
        let mut c = LdaConfig::with_topics(self.topics).iterations(self.iters, self.burn_in);
        if let Alpha::Value(a) = self.alpha {
            c.alpha = a;
        }
        c.beta = self.beta;
        c.average_last = self.average_last;
        c.seed(self.seed)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReestArgs {
    #[arg(long, default_value_t = 0.4)]
    pub lambda_dr: f64,
    #[arg(long, default_value_t = 0.7)]
    pub lambda_tr: f64,
    #[arg(long, default_value_t = 0.03)]
    pub lambda_tar: f64,
    #[arg(long, default_value_t = 0.0001)]
    pub prune_threshold: f64,
    #[arg(long, default_value_t = 50)]
    pub max_em_iters: usize,
    /// EM stops once no probability moves by more than this.
    #[arg(long, default_value_t = 1e-6)]
    pub em_tol: f64,
    /// Gibbs sweeps when re-assigning topics after topic re-estimation.
    #[arg(long, default_value_t = 100)]
    pub fold_in_iters: usize,
}

impl ReestArgs {
    fn config(&self, lda: LdaConfig) -> Result<ReestimationConfig, CliError> {
        for (flag, v) in [
            ("--lambda-dr", self.lambda_dr),
            ("--lambda-tr", self.lambda_tr),
            ("--lambda-tar", self.lambda_tar),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(CliError::usage(format!(
                    "{flag} must lie in (0, 1], got {v}"
                )));
            }
        }
        if !(self.prune_threshold >= 0.0 && self.prune_threshold < 1.0) {
            return Err(CliError::usage("--prune-threshold must lie in [0, 1)"));
        }
        if self.max_em_iters == 0 {
            return Err(CliError::usage("--max-em-iters must be positive"));
        }
        if self.fold_in_iters == 0 {
            return Err(CliError::usage("--fold-in-iters must be positive"));
        }
        Ok(ReestimationConfig {
            lambda_dr: self.lambda_dr,
            lambda_tr: self.lambda_tr,
            lambda_tar: self.lambda_tar,
            parsimony: ParsimonyConfig {
                lambda: 1.0,
                prune_threshold: self.prune_threshold,
                max_iterations: self.max_em_iters,
                convergence_tol: self.em_tol,
            },
            lda,
            fold_in_iterations: self.fold_in_iters,
            ..ReestimationConfig::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Model JSON; a `.gz` suffix compresses it.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub lda: LdaArgs,
}

#[derive(Debug, Args)]
pub struct ReestimateArgs {
    /// The corpus the model was (or will be) trained on.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Trained LDA model. Required unless the variant includes DR, which
    /// retrains LDA on the re-estimated corpus.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_parser = parse_variant)]
    pub variant: PipelineVariant,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the corpus LDA was trained on (after DR when it ran).
    #[arg(long)]
    pub corpus_out: Option<PathBuf>,
    #[command(flatten)]
    pub lda: LdaArgs,
    #[command(flatten)]
    pub reest: ReestArgs,
}

#[derive(Debug, Args)]
pub struct DiversityArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Score these documents by folding them into the model's topics instead
    /// of using the stored assignments.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the topic distance matrix.
    #[arg(long)]
    pub distances: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub fold_in_iters: usize,
}

#[derive(Debug, Args)]
pub struct GenSyntheticArgs {
    /// Corpus whose documents carry group labels.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Unrelated group pair `A:B`; repeat for more pairs.
    #[arg(long = "pair", required = true, value_parser = parse_pair)]
    pub pairs: Vec<(String, String)>,
    #[arg(long, default_value_t = 50)]
    pub docs_per_pair: usize,
    #[arg(long, default_value_t = 25)]
    pub docs_per_group: usize,
    /// Groups for non-diverse documents (default: every group named in a pair).
    #[arg(long, value_delimiter = ',')]
    pub groups: Option<Vec<String>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// ROC curve and AUC of diversity scores against binary labels.
    Auc(AucArgs),
    /// NPMI coherence of the top words of every topic.
    Coherence(CoherenceArgs),
    /// Purity and NMI of argmax topic clusters against gold classes.
    Cluster(GoldArgs),
    /// Dense P(t|d) feature matrix with gold labels.
    Features(GoldArgs),
}

#[derive(Debug, Args)]
pub struct AucArgs {
    /// `doc_id,diversity` CSV.
    #[arg(long)]
    pub scores: PathBuf,
    /// Corpus whose labels are 1 (diverse) or 0 (non-diverse).
    #[arg(long)]
    pub labels: PathBuf,
    /// ROC curve CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CoherenceArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Corpus supplying the model's vocabulary.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Co-occurrence reference (default: the corpus).
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub top_n: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GoldArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Corpus whose document labels are the gold classes.
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Labelled diversity corpus.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_parser = parse_stage)]
    pub stage: Stage,
    /// Comma-separated λ values in (0, 1].
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub lda: LdaArgs,
    #[command(flatten)]
    pub reest: ReestArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data {
        stage: String,
        source: anyhow::Error,
    },
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data { .. } => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Data { stage, source } => write!(f, "error in stage `{stage}`: {source:#}"),
        }
    }
}

trait StageContext<T> {
    fn stage(self, stage: &str) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> StageContext<T> for Result<T, E> {
    fn stage(self, stage: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::Data {
            stage: stage.into(),
            source: e.into(),
        })
    }
}

/// Parses `args` (including the program name) and runs the command,
/// printing errors to stderr. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("HITR_LOG")).try_init();
    let argv = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(cli, argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli, argv: Vec<String>) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().stage("thread pool")?;
    pool.install(|| match cli.command {
        Command::Ingest(a) => ingest(a, argv),
        Command::Train(a) => train(a, argv),
        Command::Reestimate(a) => reestimate(a, argv),
        Command::Diversity(a) => diversity(a, argv),
        Command::GenSynthetic(a) => gen_synthetic(a, argv),
        Command::Eval(EvalCommand::Auc(a)) => eval_auc(a, argv),
        Command::Eval(EvalCommand::Coherence(a)) => eval_coherence(a, argv),
        Command::Eval(EvalCommand::Cluster(a)) => eval_cluster(a, argv),
        Command::Eval(EvalCommand::Features(a)) => eval_features(a, argv),
        Command::Sweep(a) => sweep(a, argv),
    })
}

fn load_corpus(path: &Path) -> Result<Corpus, CliError> {
    formats::read_corpus(path).stage("read corpus")
}

fn load_model(path: &Path) -> Result<ModelArtifact, CliError> {
    formats::read_model(path).stage("read model")
}

fn finish(
    manifest: ManifestBuilder,
    config: serde_json::Value,
    seed: Option<u64>,
    inputs: &[&Path],
    outputs: &[&Path],
) -> Result<(), CliError> {
    let inputs: Vec<PathBuf> = inputs.iter().map(|p| p.to_path_buf()).collect();
    let outputs: Vec<PathBuf> = outputs.iter().map(|p| p.to_path_buf()).collect();
    manifest
        .finish(config, seed, &inputs, &outputs)
        .stage("write manifest")?;
    Ok(())
}

fn ingest(a: IngestArgs, argv: Vec<String>) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("ingest", argv);
    if a.min_count == 0 {
        return Err(CliError::usage("--min-count must be at least 1"));
    }
    let raw = io::read_raw_documents(&a.input).stage("read input")?;
    let stopwords = match &a.stopwords {
        Some(p) => io::read_stopwords(p).stage("read stopwords")?,
        None => Default::default(),
    };
    let options = BuildOptions {
        stopwords,
        top_k_remove: a.top_k_remove,
        min_count: a.min_count,
    };
    let corpus = build_corpus(&raw, &options).stage("ingest")?;
    log::info!(
        "ingested {} documents, {} words, {} tokens",
        corpus.len(),
        corpus.vocabulary().len(),
        corpus.total_tokens()
    );
    formats::write_corpus(&a.out, &corpus).stage("write corpus")?;
    let mut inputs = vec![a.input.as_path()];
    inputs.extend(a.stopwords.as_deref());
    finish(
        manifest,
        json!({"top_k_remove": a.top_k_remove, "min_count": a.min_count}),
        None,
        &inputs,
        &[&a.out],
    )
}

fn train(a: TrainArgs, argv: Vec<String>) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("train", argv);
    let config = a.lda.config();
    config
        .validate()
        .map_err(|e| CliError::usage(format!("invalid LDA flags: {e}")))?;
    let corpus = load_corpus(&a.corpus)?;
    let model = lda::train(&corpus, &config).stage("lda")?;
    let artifact = ModelArtifact {
        model,
        vocab_ref: VocabRef::of(corpus.vocabulary().words()),
        reestimation: None,
        provenance: None,
    };
    formats::write_model(&a.out, &artifact).stage("write model")?;
    finish(
        manifest,
        json!({"lda": config}),
        Some(a.lda.seed),
        &[&a.corpus],
        &[&a.out],
    )
}

fn reestimate(a: ReestimateArgs, argv: Vec<String>) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("reestimate", argv);
    let corpus = load_corpus(&a.corpus)?;
    let trained = a.model.as_deref().map(load_model).transpose()?;
    if let Some(t) = &trained {
        t.vocab_ref.check(&corpus).stage("read model")?;
    }
    // A stored model fixes the LDA settings and seed it was trained with.
    let (lda_config, seed) = match &trained {
        Some(t) => (t.model.config, t.model.config.seed),
        None => (a.lda.config(), a.lda.seed),
    };
    let config = a.reest.config(lda_config)?;
    config
        .validate()
        .map_err(|e| CliError::usage(format!("invalid flags: {e}")))?;

    let output = match &trained {
        Some(t) if !a.variant.has_dr() => {
            reestimate_trained(&corpus, &t.model, a.variant, &config, seed).stage("reestimate")?
        }
        _ => run_pipeline(&corpus, a.variant, &config, seed).stage("reestimate")?,
    };
    let artifact = ModelArtifact {
        vocab_ref: VocabRef::of(output.corpus.vocabulary().words()),
        model: output.model,
        reestimation: Some(config),
        provenance: Some(output.assignments.provenance),
    };
    formats::write_model(&a.out, &artifact).stage("write model")?;
    let mut outputs = vec![a.out.as_path()];
    if let Some(p) = &a.corpus_out {
        formats::write_corpus(p, &output.corpus).stage("write corpus")?;
        outputs.push(p);
    }
    let mut inputs = vec![a.corpus.as_path()];
    inputs.extend(a.model.as_deref());
    finish(
        manifest,
        json!({"variant": a.variant.flag_name(), "reestimation": config}),
        Some(seed),
        &inputs,
        &outputs,
    )
}

fn diversity(a: DiversityArgs, argv: Vec<String>) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("diversity", argv);
    if a.fold_in_iters == 0 {
        return Err(CliError::usage("--fold-in-iters must be positive"));
    }
    let artifact = load_model(&a.model)?;
    let model = &artifact.model;
    let distances = topic_distance_matrix(model).stage("diversity")?;
    let scores = match &a.corpus {
        None => score_documents(
            model.doc_ids.iter().map(String::as_str).zip(&model.theta),
            &distances,
        ),
        Some(path) => {
            let corpus = load_corpus(path)?;
            artifact.vocab_ref.check(&corpus).stage("fold-in")?;
            let rows = lda::fold_in(model, &corpus, a.fold_in_iters, a.seed).stage("fold-in")?;
            score_documents(
                corpus.documents().iter().map(|d| d.id.as_str()).zip(&rows),
                &distances,
            )
        }
    };
    formats::write_scores(&a.out, &scores).stage("write scores")?;
    let mut outputs = vec![a.out.as_path()];
    if let Some(p) = &a.distances {
        formats::write_distance_matrix(p, &distances).stage("write distances")?;
        outputs.push(p);
    }
    let mut inputs = vec![a.model.as_path()];
    inputs.extend(a.corpus.as_deref());
    finish(
        manifest,
        json!({"fold_in_iterations": a.corpus.as_ref().map(|_| a.fold_in_iters)}),
        a.corpus.as_ref().map(|_| a.seed),
        &inputs,
        &outputs,
    )
}

fn gen_synthetic(a: GenSyntheticArgs, argv: Vec<String>) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("gen-synthetic", argv);
    let corpus = load_corpus(&a.corpus)?;
    let mut spec =
        SyntheticSpec::from_pairs(a.pairs.clone(), a.docs_per_pair, a.docs_per_group, a.seed);
    if let Some(groups) = &a.groups {
        spec.nondiverse_groups = groups.clone();
    }
    let out = generate_diversity_dataset(&corpus, &spec).stage("gen-synthetic")?;
    formats::write_corpus(&a.out, &out).stage("write corpus")?;
    finish(
        manifest,
        serde_json::to_value(&spec).stage("write manifest")?,
        Some(a.seed),
        &[&a.corpus],
        &[&a.out],
    )
}

fn eval_auc(a: AucArgs, argv: Vec<String>) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("eval auc", argv);
    let scores = formats::read_scores(&a.scores).stage("read scores")?;
    let labels = load_corpus(&a.labels)?;
    let labelled = label_scores(&scores, &labels).stage("eval auc")?;
    let roc = roc_auc(&labelled).stage("eval auc")?;
    formats::write_roc(&a.out, &roc.points).stage("write roc")?;
    println!("auc\t{}", roc.auc);
    finish(
        manifest,
        json!({"auc": roc.auc, "scored": labelled.len()}),
        None,
        &[&a.scores, &a.labels],
        &[&a.out],
    )
}

fn eval_coherence(a: CoherenceArgs, argv: Vec<String>) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("eval coherence", argv);
    if a.top_n < 2 {
        return Err(CliError::usage("--top-n must be at least 2"));
    }
    let artifact = load_model(&a.model)?;
    let corpus = load_corpus(&a.corpus)?;
    artifact.vocab_ref.check(&corpus).stage("eval coherence")?;
    let reference = match &a.reference {
        Some(p) => load_corpus(p)?,
        None => corpus.clone(),
    };
    let report = npmi_coherence(
        &artifact.model.phi,
        corpus.vocabulary(),
        a.top_n,
        &reference,
    )
    .stage("eval coherence")?;
    formats::write_coherence(&a.out, &report.per_topic).stage("write coherence")?;
    println!("mean_npmi\t{}", report.mean);
    let mut inputs = vec![a.model.as_path(), a.corpus.as_path()];
    inputs.extend(a.reference.as_deref());
    finish(
        manifest,
        json!({"top_n": a.top_n, "mean_npmi": report.mean}),
        None,
        &inputs,
        &[&a.out],
    )
}

fn gold_labels(corpus: &Corpus) -> BTreeMap<String, String> {
    corpus
        .documents()
        .iter()
        .filter_map(|d| d.class_label.clone().map(|l| (d.id.clone(), l)))
        .collect()
}

fn eval_cluster(a: GoldArgs, argv: Vec<String>) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("eval cluster", argv);
    let artifact = load_model(&a.model)?;
    let gold = gold_labels(&load_corpus(&a.gold)?);
    let theta = theta_matrix(&artifact);
    let purity = clustering_purity(&theta, &gold).stage("eval cluster")?;
    let nmi_value = nmi(&cluster_assignments(&theta), &gold).stage("eval cluster")?;
    formats::write_metrics(&a.out, &[("purity", purity), ("nmi", nmi_value)])
        .stage("write metrics")?;
    println!("purity\t{purity}\nnmi\t{nmi_value}");
    finish(
        manifest,
        json!({"purity": purity, "nmi": nmi_value}),
        None,
        &[&a.model, &a.gold],
        &[&a.out],
    )
}

fn eval_features(a: GoldArgs, argv: Vec<String>) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("eval features", argv);
    let artifact = load_model(&a.model)?;
    let gold = gold_labels(&load_corpus(&a.gold)?);
    let t = artifact.model.num_topics();
    let rows = export_features(&theta_matrix(&artifact), &gold, t);
    formats::write_features(&a.out, &rows, t).stage("write features")?;
    finish(
        manifest,
        json!({"num_topics": t}),
        None,
        &[&a.model, &a.gold],
        &[&a.out],
    )
}

fn theta_matrix(artifact: &ModelArtifact) -> hitr_core::hitr::DocumentTopicMatrix {
    let provenance = artifact.provenance.clone().unwrap_or_else(|| {
        hitr_core::hitr::Provenance::new(
            PipelineVariant::Lda,
            &ReestimationConfig::default(),
            artifact.model.config.seed,
        )
    });
    hitr_core::hitr::DocumentTopicMatrix::from_model(&artifact.model, provenance)
}

fn sweep(a: SweepArgs, argv: Vec<String>) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("sweep", argv);
    if let Some(bad) = a.grid.iter().find(|&&l| !(l > 0.0 && l <= 1.0)) {
        return Err(CliError::usage(format!(
            "--grid values must lie in (0, 1], got {bad}"
        )));
    }
    let config = a.reest.config(a.lda.config())?;
    config
        .validate()
        .map_err(|e| CliError::usage(format!("invalid flags: {e}")))?;
    let corpus = load_corpus(&a.corpus)?;
    // Every grid point reuses the same seed so λ = 1 reproduces plain LDA.
    let points = a
        .grid
        .par_iter()
        .map(|&lambda| sweep_point(&corpus, a.stage, lambda, &config, a.lda.seed))
        .collect::<Result<Vec<_>, _>>()
        .stage("sweep")?;
    formats::write_sweep(&a.out, &points).stage("write sweep")?;
    finish(
        manifest,
        json!({"stage": a.stage, "grid": a.grid, "reestimation": config}),
        Some(a.lda.seed),
        &[&a.corpus],
        &[&a.out],
    )
}
