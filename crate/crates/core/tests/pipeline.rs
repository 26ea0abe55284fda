use hitr_core::eval::{lambda_sweep, Stage};
use hitr_core::hitr::{reestimate_trained, run_pipeline, PipelineVariant, ReestimationConfig};
use hitr_core::lda::LdaConfig;
use hitr_core::planted::{diversity_benchmark, grouped_corpus, GroupedSpec};
use hitr_core::Error;

fn small_spec() -> GroupedSpec {
    GroupedSpec {
        num_groups: 6,
        docs_per_group: 10,
        doc_length: 60,
        ..GroupedSpec::default()
    }
}

fn small_config() -> ReestimationConfig {
    ReestimationConfig {
        lda: LdaConfig::with_topics(8).iterations(60, 40),
        fold_in_iterations: 20,
        ..ReestimationConfig::default()
    }
}

#[test]
fn reestimating_a_trained_model_matches_the_full_pipeline() {
    let corpus = grouped_corpus(&small_spec()).unwrap().corpus;
    let config = small_config();
    let seed = 11;
    let lda = run_pipeline(&corpus, PipelineVariant::Lda, &config, seed).unwrap();
    for variant in [
        PipelineVariant::LdaTr,
        PipelineVariant::LdaTar,
        PipelineVariant::LdaTrTar,
    ] {
        let direct = run_pipeline(&corpus, variant, &config, seed).unwrap();
        let reused = reestimate_trained(&corpus, &lda.model, variant, &config, seed).unwrap();
        assert_eq!(direct, reused, "{variant}");
    }
}

#[test]
fn reestimating_a_trained_model_rejects_dr_and_foreign_corpora() {
    let corpus = grouped_corpus(&small_spec()).unwrap().corpus;
    let config = small_config();
    let lda = run_pipeline(&corpus, PipelineVariant::Lda, &config, 0).unwrap();
    assert!(matches!(
        reestimate_trained(&corpus, &lda.model, PipelineVariant::Hitr, &config, 0),
        Err(Error::InvalidConfig(_))
    ));
    let fewer = corpus
        .with_documents(corpus.documents()[1..].to_vec())
        .unwrap();
    assert!(matches!(
        reestimate_trained(&fewer, &lda.model, PipelineVariant::LdaTr, &config, 0),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn every_variant_at_lambda_one_reproduces_lda() {
    let corpus = grouped_corpus(&small_spec()).unwrap().corpus;
    let mut config = small_config();
    config.lambda_dr = 1.0;
    config.lambda_tr = 1.0;
    config.lambda_tar = 1.0;
    let lda = run_pipeline(&corpus, PipelineVariant::Lda, &config, 3).unwrap();
    for variant in PipelineVariant::ALL {
        let out = run_pipeline(&corpus, variant, &config, 3).unwrap();
        assert_eq!(out.corpus, lda.corpus, "{variant}");
        assert_eq!(out.model, lda.model, "{variant}");
        assert_eq!(out.assignments.rows, lda.assignments.rows, "{variant}");
    }
}

#[test]
fn sweep_at_lambda_one_reproduces_the_baseline_auc() {
    let spec = small_spec();
    let corpus = diversity_benchmark(&spec, 4, 6, 4).unwrap();
    let config = small_config();
    let baseline =
        hitr_core::eval::diversity_auc(&corpus, PipelineVariant::Lda, &config, 5).unwrap();
    for stage in [Stage::Dr, Stage::Tr, Stage::Tar] {
        let points = lambda_sweep(&corpus, stage, &[0.5, 1.0], &config, 5).unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[1].lambda, 1.0);
        assert_eq!(points[1].auc, baseline, "{stage:?}");
    }
}

#[test]
fn low_lambda_tar_does_not_lose_auc_on_the_planted_benchmark() {
    let spec = GroupedSpec::default();
    let corpus = diversity_benchmark(&spec, 5, 10, 5).unwrap();
    let config = ReestimationConfig {
        lda: LdaConfig::with_topics(25).iterations(300, 200),
        ..ReestimationConfig::default()
    };
    let points = lambda_sweep(&corpus, Stage::Tar, &[0.05, 0.5, 1.0], &config, 0).unwrap();
    assert!(points[0].auc >= points[2].auc, "{points:?}");
}
