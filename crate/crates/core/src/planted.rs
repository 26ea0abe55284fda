//! Corpora sampled from known topic structure, used to check that the
//! re-estimation stages move results in the expected direction.
//!
//! Every topic owns a disjoint block of words and draws words uniformly from
//! its block. Word tokens are named `<topic>_<index>`, e.g. `g0_3` for a
//! general topic or `s7_12` for a specific one.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::eval::{generate_diversity_dataset, SyntheticSpec};
use crate::seed;

/// Documents mixing one specific topic with general words.
///
/// Every document gives a fixed share of its tokens to general words, all
/// drawn from one of two general topics. Because the general topic varies
/// between documents, LDA cannot fold the general words into the specific
/// topics and recovers them as topics of their own.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralTopicSpec {
    pub num_docs: usize,
    pub num_specific: usize,
    /// Share of every document taken by the two general topics together.
    pub general_share: f64,
    /// Probability that a document's general words come from the first
    /// general topic rather than the second.
    pub first_general_prob: f64,
    pub words_per_topic: usize,
    pub doc_length: usize,
    pub seed: u64,
}

impl Default for GeneralTopicSpec {
    /// 500 documents of 400 tokens, 10 specific topics, general words
    /// taking 40% of every document.
    fn default() -> Self {
        GeneralTopicSpec {
            num_docs: 500,
            num_specific: 10,
            general_share: 0.4,
            first_general_prob: 0.8,
            words_per_topic: 25,
            doc_length: 400,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedCorpus {
    pub corpus: Corpus,
    /// Word ids owned by each planted topic: general topics first, then
    /// specific ones.
    pub topic_words: Vec<Vec<usize>>,
    pub num_general: usize,
    /// Index into `topic_words` of each document's specific topic.
    pub doc_topic: Vec<usize>,
}

impl PlantedCorpus {
    /// Probability mass `row` puts on the words of planted topic `k`.
    pub fn mass_on(&self, row: &crate::SparseDistribution, k: usize) -> f64 {
        self.topic_words[k].iter().map(|&w| row.get(w)).sum()
    }

    /// The planted topic sharing the most probability mass with `row`.
    pub fn closest_topic(&self, row: &crate::SparseDistribution) -> usize {
        let mut best = (0, f64::MIN);
        for k in 0..self.topic_words.len() {
            let m = self.mass_on(row, k);
            if m > best.1 {
                best = (k, m);
            }
        }
        best.0
    }
}

fn vocabulary(names: &[String], words_per_topic: usize) -> (Vec<String>, Vec<Vec<usize>>) {
    let mut words = Vec::new();
    let mut blocks = Vec::new();
    for name in names {
        let start = words.len();
        for i in 0..words_per_topic {
            words.push(alloc::format!("{name}_{i}"));
        }
        blocks.push((start..words.len()).collect());
    }
    (words, blocks)
}

fn draw_words(block: &[usize], n: usize, rng: &mut impl Rng, out: &mut Vec<(usize, u32)>) {
    for _ in 0..n {
        out.push((block[rng.gen_range(0..block.len())], 1));
    }
}

pub fn general_topic_corpus(spec: &GeneralTopicSpec) -> Result<PlantedCorpus> {
    if spec.num_docs == 0
        || spec.num_specific == 0
        || spec.words_per_topic == 0
        || spec.doc_length == 0
        || !(0.0..1.0).contains(&spec.general_share)
        || !(0.0..=1.0).contains(&spec.first_general_prob)
    {
        return Err(Error::InvalidConfig("degenerate planted corpus".into()));
    }
    let mut names: Vec<String> = alloc::vec!["g0".into(), "g1".into()];
    names.extend((0..spec.num_specific).map(|s| alloc::format!("s{s}")));
    let (words, blocks) = vocabulary(&names, spec.words_per_topic);

    let mut rng = seed::rng(seed::derive(spec.seed, 0x91A7));
    let n_general = libm::round(spec.general_share * spec.doc_length as f64) as usize;
    let mut docs = Vec::with_capacity(spec.num_docs);
    let mut doc_topic = Vec::with_capacity(spec.num_docs);
    for d in 0..spec.num_docs {
        let specific = 2 + d % spec.num_specific;
        let general = if rng.gen::<f64>() < spec.first_general_prob {
            0
        } else {
            1
        };
        let mut counts = Vec::with_capacity(spec.doc_length);
        draw_words(&blocks[general], n_general, &mut rng, &mut counts);
        draw_words(
            &blocks[specific],
            spec.doc_length - n_general,
            &mut rng,
            &mut counts,
        );
        let name = &names[specific];
        docs.push(
            Document::new(alloc::format!("doc{d:04}"), counts)
                .with_group(Some(name.clone()))
                .with_label(Some(name.clone())),
        );
        doc_topic.push(specific);
    }
    Ok(PlantedCorpus {
        corpus: Corpus::from_parts(words, docs)?,
        topic_words: blocks,
        num_general: 2,
        doc_topic,
    })
}

/// Groups of documents with disjoint topics, each document also carrying a
/// share of general words that depends on its group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSpec {
    pub num_groups: usize,
    pub docs_per_group: usize,
    pub words_per_group: usize,
    pub general_words: usize,
    pub doc_length: usize,
    /// Each consecutive pair of groups shares a general-word level; the levels
    /// are evenly spaced over this range, in a seeded random order.
    pub general_share: (f64, f64),
    /// Each document's share deviates from its group's uniformly by at most
    /// this much.
    pub share_jitter: f64,
    pub seed: u64,
}

impl Default for GroupedSpec {
    fn default() -> Self {
        GroupedSpec {
            num_groups: 20,
            docs_per_group: 20,
            words_per_group: 30,
            general_words: 40,
            doc_length: 150,
            general_share: (0.05, 0.75),
            share_jitter: 0.05,
            seed: 0,
        }
    }
}

impl GroupedSpec {
    pub fn group_name(k: usize) -> String {
        alloc::format!("grp{k:02}")
    }

    /// Consecutive groups paired up: (0, 1), (2, 3), ...
    pub fn consecutive_pairs(&self) -> Vec<(String, String)> {
        (0..self.num_groups / 2)
            .map(|k| (Self::group_name(2 * k), Self::group_name(2 * k + 1)))
            .collect()
    }
}

/// General words form planted topic 0, group `k` is planted topic `k + 1`.
pub fn grouped_corpus(spec: &GroupedSpec) -> Result<PlantedCorpus> {
    let (lo, hi) = spec.general_share;
    if spec.num_groups == 0
        || spec.docs_per_group == 0
        || spec.words_per_group == 0
        || spec.doc_length == 0
        || !(0.0 <= lo && lo <= hi && hi < 1.0)
        || !(spec.share_jitter >= 0.0)
        || (hi > 0.0 && spec.general_words == 0)
    {
        return Err(Error::InvalidConfig("degenerate grouped corpus".into()));
    }
    let mut words: Vec<String> = (0..spec.general_words)
        .map(|i| alloc::format!("gen_{i}"))
        .collect();
    let mut blocks: Vec<Vec<usize>> = alloc::vec![(0..spec.general_words).collect()];
    for k in 0..spec.num_groups {
        let start = words.len();
        for i in 0..spec.words_per_group {
            words.push(alloc::format!("{}_{i}", GroupedSpec::group_name(k)));
        }
        blocks.push((start..words.len()).collect());
    }

    let mut rng = seed::rng(seed::derive(spec.seed, 0x6209));
    let num_pairs = spec.num_groups.div_ceil(2);
    let mut pair_levels: Vec<f64> = (0..num_pairs)
        .map(|k| lo + (hi - lo) * k as f64 / (num_pairs.max(2) - 1) as f64)
        .collect();
    pair_levels.shuffle(&mut rng);
    let levels: Vec<f64> = (0..spec.num_groups).map(|k| pair_levels[k / 2]).collect();
    let mut docs = Vec::new();
    let mut doc_topic = Vec::new();
    for k in 0..spec.num_groups {
        let name = GroupedSpec::group_name(k);
        for i in 0..spec.docs_per_group {
            let jitter = spec.share_jitter * (2.0 * rng.gen::<f64>() - 1.0);
            let share = (levels[k] + jitter).clamp(0.0, 0.95);
            let n_general = libm::round(share * spec.doc_length as f64) as usize;
            let mut counts = Vec::with_capacity(spec.doc_length);
            draw_words(&blocks[0], n_general, &mut rng, &mut counts);
            draw_words(
                &blocks[k + 1],
                spec.doc_length - n_general,
                &mut rng,
                &mut counts,
            );
            docs.push(
                Document::new(alloc::format!("{name}-{i:03}"), counts)
                    .with_group(Some(name.clone())),
            );
            doc_topic.push(k + 1);
        }
    }
    Ok(PlantedCorpus {
        corpus: Corpus::from_parts(words, docs)?,
        topic_words: blocks,
        num_general: 1,
        doc_topic,
    })
}

/// The grouped corpus followed by labelled pseudo-documents merged from its
/// documents: `docs_per_pair` diverse ones per consecutive group pair and
/// `docs_per_group` non-diverse ones for each of the first
/// `nondiverse_groups` groups. Only the pseudo-documents carry labels.
pub fn diversity_benchmark(
    spec: &GroupedSpec,
    docs_per_pair: usize,
    nondiverse_groups: usize,
    docs_per_group: usize,
) -> Result<Corpus> {
    let planted = grouped_corpus(spec)?;
    let mut synthetic = SyntheticSpec::from_pairs(
        spec.consecutive_pairs(),
        docs_per_pair,
        docs_per_group,
        spec.seed,
    );
    synthetic.nondiverse_groups.truncate(nondiverse_groups);
    let pseudo = generate_diversity_dataset(&planted.corpus, &synthetic)?;
    let mut docs = planted.corpus.documents().to_vec();
    docs.extend(pseudo.documents().iter().cloned());
    planted.corpus.with_documents(docs)
}

/// Topic-disjoint groups of documents into which a small set of frequent
/// general words is injected independently of the group.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectedSpec {
    pub num_groups: usize,
    pub docs_per_group: usize,
    pub words_per_group: usize,
    /// Tokens drawn from the document's group.
    pub specific_tokens: usize,
    pub general_words: usize,
    /// Chance that a given general word appears in a given document.
    pub general_presence: f64,
    /// Occurrences of a present general word, uniform in this range.
    pub general_count: (u32, u32),
    pub seed: u64,
}

impl Default for InjectedSpec {
    fn default() -> Self {
        InjectedSpec {
            num_groups: 10,
            docs_per_group: 50,
            words_per_group: 30,
            specific_tokens: 60,
            general_words: 10,
            general_presence: 0.5,
            general_count: (2, 6),
            seed: 0,
        }
    }
}

/// General words form planted topic 0, group `k` is planted topic `k + 1`.
pub fn injected_general_corpus(spec: &InjectedSpec) -> Result<PlantedCorpus> {
    let (lo, hi) = spec.general_count;
    if spec.num_groups == 0
        || spec.docs_per_group == 0
        || spec.words_per_group == 0
        || spec.specific_tokens == 0
        || !(0.0..=1.0).contains(&spec.general_presence)
        || lo > hi
    {
        return Err(Error::InvalidConfig("degenerate injected corpus".into()));
    }
    let mut words: Vec<String> = (0..spec.general_words)
        .map(|i| alloc::format!("gen_{i}"))
        .collect();
    let mut blocks: Vec<Vec<usize>> = alloc::vec![(0..spec.general_words).collect()];
    for k in 0..spec.num_groups {
        let start = words.len();
        for i in 0..spec.words_per_group {
            words.push(alloc::format!("{}_{i}", GroupedSpec::group_name(k)));
        }
        blocks.push((start..words.len()).collect());
    }

    let mut rng = seed::rng(seed::derive(spec.seed, 0x1413));
    let mut docs = Vec::new();
    let mut doc_topic = Vec::new();
    for k in 0..spec.num_groups {
        let name = GroupedSpec::group_name(k);
        for i in 0..spec.docs_per_group {
            let mut counts = Vec::new();
            draw_words(&blocks[k + 1], spec.specific_tokens, &mut rng, &mut counts);
            for w in 0..spec.general_words {
                if rng.gen::<f64>() < spec.general_presence {
                    counts.push((w, rng.gen_range(lo..=hi)));
                }
            }
            docs.push(
                Document::new(alloc::format!("{name}-{i:03}"), counts)
                    .with_group(Some(name.clone()))
                    .with_label(Some(name.clone())),
            );
            doc_topic.push(k + 1);
        }
    }
    Ok(PlantedCorpus {
        corpus: Corpus::from_parts(words, docs)?,
        topic_words: blocks,
        num_general: 1,
        doc_topic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_corpus_shape() {
        let planted = general_topic_corpus(&GeneralTopicSpec::default()).unwrap();
        assert_eq!(planted.corpus.len(), 500);
        assert_eq!(planted.corpus.vocabulary().len(), 12 * 25);
        for doc in planted.corpus.documents() {
            assert_eq!(doc.length(), 400);
            let general: u32 = doc
                .counts()
                .iter()
                .filter(|&&(w, _)| w < 50)
                .map(|&(_, c)| c)
                .sum();
            assert_eq!(general, 160);
        }
    }

    #[test]
    fn grouped_corpus_shape() {
        let spec = GroupedSpec::default();
        let planted = grouped_corpus(&spec).unwrap();
        assert_eq!(planted.corpus.len(), 400);
        assert_eq!(planted.corpus.groups().len(), 20);
        assert_eq!(spec.consecutive_pairs().len(), 10);
        assert_eq!(planted, grouped_corpus(&spec).unwrap());
    }
}
