//! Latent Dirichlet allocation by collapsed Gibbs sampling, plus fold-in
//! inference of document-topic proportions against fixed topics.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::dist::SparseDistribution;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub num_topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub train_iterations: usize,
    pub burn_in: usize,
    /// Point estimates average the counts of this many final sweeps.
    pub average_last: usize,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig::with_topics(100)
    }
}

impl LdaConfig {
    /// `T` topics with `α = 1/T`, `β = 0.01`.
    pub fn with_topics(num_topics: usize) -> Self {
        LdaConfig {
            num_topics,
            alpha: 1.0 / num_topics as f64,
            beta: 0.01,
            train_iterations: 1000,
            burn_in: 800,
            average_last: 1,
            seed: 0,
        }
    }

    pub fn iterations(self, train_iterations: usize, burn_in: usize) -> Self {
        LdaConfig {
            train_iterations,
            burn_in,
            ..self
        }
    }

    pub fn seed(self, seed: u64) -> Self {
        LdaConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.num_topics < 2 {
            return Err(Error::TooFewTopics(self.num_topics));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if self.train_iterations == 0 {
            return bad("train_iterations must be positive");
        }
        if self.burn_in >= self.train_iterations {
            return bad("burn_in must be smaller than train_iterations");
        }
        if self.average_last == 0 || self.average_last > self.train_iterations - self.burn_in {
            return bad("average_last must lie in [1, train_iterations - burn_in]");
        }
        Ok(())
    }
}

/// Topic-word distributions `phi` (one row per topic) and document-topic
/// distributions `theta` (one row per document, aligned with `doc_ids`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub config: LdaConfig,
    pub vocab_size: usize,
    pub phi: Vec<SparseDistribution>,
    pub theta: Vec<SparseDistribution>,
    pub doc_ids: Vec<String>,
}

impl TopicModel {
    pub fn num_topics(&self) -> usize {
        self.phi.len()
    }

    /// Checks shapes and that every row is a distribution over the right domain.
    pub fn validate(&self) -> Result<()> {
        if self.phi.len() != self.config.num_topics {
            return Err(Error::DimensionMismatch {
                expected: self.config.num_topics,
                found: self.phi.len(),
            });
        }
        if self.theta.len() != self.doc_ids.len() {
            return Err(Error::DimensionMismatch {
                expected: self.doc_ids.len(),
                found: self.theta.len(),
            });
        }
        let check = |rows: &[SparseDistribution], bound: usize| {
            for row in rows {
                if !row.is_valid() || row.is_empty() || row.domain_bound() > bound {
                    return Err(Error::DimensionMismatch {
                        expected: bound,
                        found: row.domain_bound(),
                    });
                }
            }
            Ok(())
        };
        check(&self.phi, self.vocab_size)?;
        check(&self.theta, self.num_topics())
    }
}

struct Tokens {
    words: Vec<u32>,
    /// Start offset of each document in `words`, plus a final end offset.
    offsets: Vec<usize>,
}

impl Tokens {
    fn new(docs: &[Document]) -> Self {
        let mut words = Vec::new();
        let mut offsets = Vec::with_capacity(docs.len() + 1);
        offsets.push(0);
        for d in docs {
            words.extend(d.tokens().map(|w| w as u32));
            offsets.push(words.len());
        }
        Tokens { words, offsets }
    }
}

/// Draws an index with probability proportional to `weights[..]`.
fn sample(weights: &[f64], total: f64, rng: &mut impl Rng) -> usize {
    let mut u = rng.gen::<f64>() * total;
    for (k, &w) in weights.iter().enumerate() {
        u -= w;
        if u < 0.0 {
            return k;
        }
    }
    // Rounding can leave u marginally non-negative; take the last live weight.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Trains LDA with a single sequential collapsed Gibbs chain.
///
/// `phi[t][w] = (n_tw + β) / (n_t + Vβ)` and
/// `theta[d][t] = (n_dt + α) / (|d| + Tα)`, where the counts are averaged over
/// the last `average_last` sweeps.
pub fn train(corpus: &Corpus, config: &LdaConfig) -> Result<TopicModel> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if let Some(d) = corpus.documents().iter().find(|d| d.is_empty()) {
        return Err(Error::EmptyDocument(d.id.clone()));
    }

    let t_count = config.num_topics;
    let v_count = corpus.vocabulary().len();
    let d_count = corpus.len();
    let (alpha, beta) = (config.alpha, config.beta);
    let v_beta = v_count as f64 * beta;

    let tokens = Tokens::new(corpus.documents());
    let mut rng = seed::rng(seed::derive(config.seed, seed::STREAM_LDA));

    let mut z: Vec<u32> = Vec::with_capacity(tokens.words.len());
    let mut n_dt = alloc::vec![0u32; d_count * t_count];
    // word-major so the inner loop over topics is contiguous
    let mut n_wt = alloc::vec![0u32; v_count * t_count];
    let mut n_t = alloc::vec![0u32; t_count];

    for d in 0..d_count {
        for i in tokens.offsets[d]..tokens.offsets[d + 1] {
            let w = tokens.words[i] as usize;
            let t = rng.gen_range(0..t_count);
            z.push(t as u32);
            n_dt[d * t_count + t] += 1;
            n_wt[w * t_count + t] += 1;
            n_t[t] += 1;
        }
    }

    let mut sum_dt = alloc::vec![0.0f64; d_count * t_count];
    let mut sum_wt = alloc::vec![0.0f64; v_count * t_count];
    let mut sum_t = alloc::vec![0.0f64; t_count];
    let average_from = config.train_iterations - config.average_last;

    let mut weights = alloc::vec![0.0f64; t_count];
    for sweep in 0..config.train_iterations {
        for d in 0..d_count {
            let dt = &mut n_dt[d * t_count..(d + 1) * t_count];
            // `i` indexes both the token words and their topic labels.
            #[allow(clippy::needless_range_loop)]
            for i in tokens.offsets[d]..tokens.offsets[d + 1] {
                let w = tokens.words[i] as usize;
                let wt = &mut n_wt[w * t_count..(w + 1) * t_count];
                let old = z[i] as usize;
                dt[old] -= 1;
                wt[old] -= 1;
                n_t[old] -= 1;

                let mut total = 0.0;
                for t in 0..t_count {
                    let p =
                        (dt[t] as f64 + alpha) * (wt[t] as f64 + beta) / (n_t[t] as f64 + v_beta);
                    weights[t] = p;
                    total += p;
                }
                let new = sample(&weights, total, &mut rng);
                z[i] = new as u32;
                dt[new] += 1;
                wt[new] += 1;
                n_t[new] += 1;
            }
        }
        if sweep >= average_from {
            sum_dt
                .iter_mut()
                .zip(&n_dt)
                .for_each(|(s, &c)| *s += c as f64);
            sum_wt
                .iter_mut()
                .zip(&n_wt)
                .for_each(|(s, &c)| *s += c as f64);
            sum_t
                .iter_mut()
                .zip(&n_t)
                .for_each(|(s, &c)| *s += c as f64);
        }
    }

    let k = config.average_last as f64;
    let phi = (0..t_count)
        .map(|t| {
            let denom = sum_t[t] / k + v_beta;
            let row = (0..v_count).map(|w| (w, (sum_wt[w * t_count + t] / k + beta) / denom));
            SparseDistribution::from_weights(row).expect("beta > 0 keeps phi rows positive")
        })
        .collect();
    let theta = corpus
        .documents()
        .iter()
        .enumerate()
        .map(|(d, doc)| {
            let denom = doc.length() as f64 + t_count as f64 * alpha;
            let row = (0..t_count).map(|t| (t, (sum_dt[d * t_count + t] / k + alpha) / denom));
            SparseDistribution::from_weights(row).expect("alpha > 0 keeps theta rows positive")
        })
        .collect();

    Ok(TopicModel {
        config: *config,
        vocab_size: v_count,
        phi,
        theta,
        doc_ids: corpus.documents().iter().map(|d| d.id.clone()).collect(),
    })
}

/// Fold-in sampler: topic assignments are resampled with `phi` held fixed.
///
/// Each document gets its own RNG stream derived from the seed and its
/// position, so documents can be processed in any order or in parallel with
/// identical results.
pub struct FoldIn<'a> {
    model: &'a TopicModel,
    /// word-major `V × T`
    phi: Vec<f64>,
    live: Vec<bool>,
}

impl<'a> FoldIn<'a> {
    pub fn new(model: &'a TopicModel) -> Self {
        let t_count = model.num_topics();
        let v_count = model.vocab_size;
        let mut phi = alloc::vec![0.0; v_count * t_count];
        let mut live = alloc::vec![false; v_count];
        for (t, row) in model.phi.iter().enumerate() {
            for (w, p) in row.iter() {
                if w < v_count {
                    phi[w * t_count + t] = p;
                    live[w] = true;
                }
            }
        }
        FoldIn { model, phi, live }
    }

    /// Infers `P(t|d)` for one document.
    ///
    /// Tokens whose word has zero probability under every topic carry no
    /// information and are skipped; a document with no usable token gets the
    /// uniform prior. Counts are averaged over the second half of the sweeps.
    pub fn infer(
        &self,
        doc: &Document,
        doc_index: usize,
        iterations: usize,
        seed: u64,
    ) -> Result<SparseDistribution> {
        if iterations == 0 {
            return Err(Error::InvalidConfig(
                "fold-in needs at least one iteration".into(),
            ));
        }
        let t_count = self.model.num_topics();
        let alpha = self.model.config.alpha;
        let mut words = Vec::with_capacity(doc.length() as usize);
        for w in doc.tokens() {
            if w >= self.model.vocab_size {
                return Err(Error::OutOfVocabulary {
                    word: w,
                    vocab_size: self.model.vocab_size,
                });
            }
            if self.live[w] {
                words.push(w);
            }
        }
        if words.is_empty() {
            log::warn!("document `{}` has no word covered by the topics", doc.id);
            return Ok(
                SparseDistribution::from_weights((0..t_count).map(|t| (t, 1.0)))
                    .expect("uniform row"),
            );
        }

        let mut rng = seed::rng(seed::derive(seed, seed::STREAM_DOC + doc_index as u64));
        let mut n_dt = alloc::vec![0u32; t_count];
        let mut weights = alloc::vec![0.0f64; t_count];
        let mut z = Vec::with_capacity(words.len());
        for &w in &words {
            let row = &self.phi[w * t_count..(w + 1) * t_count];
            let total: f64 = row.iter().sum();
            let t = sample(row, total, &mut rng);
            z.push(t);
            n_dt[t] += 1;
        }

        let average_from = iterations / 2;
        let mut sum_dt = alloc::vec![0.0f64; t_count];
        for sweep in 0..iterations {
            for (i, &w) in words.iter().enumerate() {
                n_dt[z[i]] -= 1;
                let row = &self.phi[w * t_count..(w + 1) * t_count];
                let mut total = 0.0;
                for t in 0..t_count {
                    let p = (n_dt[t] as f64 + alpha) * row[t];
                    weights[t] = p;
                    total += p;
                }
                let t = sample(&weights, total, &mut rng);
                z[i] = t;
                n_dt[t] += 1;
            }
            if sweep >= average_from {
                sum_dt
                    .iter_mut()
                    .zip(&n_dt)
                    .for_each(|(s, &c)| *s += c as f64);
            }
        }

        let k = (iterations - average_from) as f64;
        let denom = words.len() as f64 + t_count as f64 * alpha;
        Ok(SparseDistribution::from_weights(
            sum_dt
                .iter()
                .enumerate()
                .map(|(t, &s)| (t, (s / k + alpha) / denom)),
        )
        .expect("alpha > 0 keeps theta rows positive"))
    }
}

/// Infers `P(t|d)` for every document of `corpus` against the model's topics.
pub fn fold_in(
    model: &TopicModel,
    corpus: &Corpus,
    iterations: usize,
    seed: u64,
) -> Result<Vec<SparseDistribution>> {
    let folder = FoldIn::new(model);
    crate::par::map(corpus.documents(), |i, doc| {
        folder.infer(doc, i, iterations, seed)
    })
    .into_iter()
    .collect()
}
