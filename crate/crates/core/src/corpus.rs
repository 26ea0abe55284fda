//! Tokenization, preprocessing and the integer-coded bag-of-words corpus.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::SparseDistribution;
use crate::error::{Error, Result};

/// Lowercases `text`, splits it on whitespace and strips every
/// non-alphabetic character from each piece. Pieces left empty are skipped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|piece| {
            let token: String = piece
                .chars()
                .filter(|c| c.is_alphabetic())
                .flat_map(char::to_lowercase)
                .collect();
            (!token.is_empty()).then_some(token)
        })
        .collect()
}

/// Token strings with dense ids plus per-word frequency statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: BTreeMap<String, usize>,
    doc_frequency: Vec<u64>,
    collection_frequency: Vec<u64>,
}

impl Vocabulary {
    fn from_words(words: Vec<String>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (id, w) in words.iter().enumerate() {
            if index.insert(w.clone(), id).is_some() {
                return Err(Error::InvalidConfig(alloc::format!(
                    "duplicate vocabulary entry `{w}`"
                )));
            }
        }
        let n = words.len();
        Ok(Vocabulary {
            words,
            index,
            doc_frequency: alloc::vec![0; n],
            collection_frequency: alloc::vec![0; n],
        })
    }

    fn recount(&mut self, documents: &[Document]) {
        self.doc_frequency.iter_mut().for_each(|f| *f = 0);
        self.collection_frequency.iter_mut().for_each(|f| *f = 0);
        for doc in documents {
            for &(w, c) in &doc.counts {
                self.doc_frequency[w] += 1;
                self.collection_frequency[w] += u64::from(c);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn doc_frequency(&self, id: usize) -> u64 {
        self.doc_frequency[id]
    }

    pub fn collection_frequency(&self, id: usize) -> u64 {
        self.collection_frequency[id]
    }
}

/// A bag of words: sorted `(word id, term frequency)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    counts: Vec<(usize, u32)>,
    length: u64,
    pub group: Option<String>,
    pub class_label: Option<String>,
}

impl Document {
    /// Builds a document from possibly repeated, unsorted counts. Zero counts
    /// are dropped and repeated ids are summed.
    pub fn new<I>(id: impl Into<String>, counts: I) -> Self
    where
        I: IntoIterator<Item = (usize, u32)>,
    {
        let mut merged: BTreeMap<usize, u32> = BTreeMap::new();
        for (w, c) in counts {
            if c > 0 {
                *merged.entry(w).or_insert(0) += c;
            }
        }
        let counts: Vec<(usize, u32)> = merged.into_iter().collect();
        let length = counts.iter().map(|&(_, c)| u64::from(c)).sum();
        Document {
            id: id.into(),
            counts,
            length,
            group: None,
            class_label: None,
        }
    }

    pub fn with_group(mut self, group: Option<String>) -> Self {
        self.group = group;
        self
    }

    pub fn with_label(mut self, label: Option<String>) -> Self {
        self.class_label = label;
        self
    }

    pub fn counts(&self) -> &[(usize, u32)] {
        &self.counts
    }

    /// Number of tokens.
    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn count(&self, word: usize) -> u32 {
        match self.counts.binary_search_by_key(&word, |&(w, _)| w) {
            Ok(pos) => self.counts[pos].1,
            Err(_) => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    /// Token stream in word-id order, one entry per occurrence.
    pub fn tokens(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts
            .iter()
            .flat_map(|&(w, c)| core::iter::repeat_n(w, c as usize))
    }
}

/// What preprocessing removed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessLog {
    pub stopwords_removed: Vec<String>,
    pub frequent_removed: Vec<String>,
    pub rare_removed: Vec<String>,
    pub dropped_documents: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    vocabulary: Vocabulary,
    preprocess_log: PreprocessLog,
}

impl Corpus {
    /// Assembles a corpus from an existing vocabulary and documents,
    /// recomputing the frequency statistics.
    pub fn from_parts(words: Vec<String>, documents: Vec<Document>) -> Result<Self> {
        let mut vocabulary = Vocabulary::from_words(words)?;
        if documents.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        for doc in &documents {
            if doc.is_empty() {
                return Err(Error::EmptyDocument(doc.id.clone()));
            }
            if let Some(&(w, _)) = doc.counts.last() {
                if w >= vocabulary.len() {
                    return Err(Error::OutOfVocabulary {
                        word: w,
                        vocab_size: vocabulary.len(),
                    });
                }
            }
        }
        vocabulary.recount(&documents);
        Ok(Corpus {
            documents,
            vocabulary,
            preprocess_log: PreprocessLog::default(),
        })
    }

    /// Same vocabulary, different documents.
    pub fn with_documents(&self, documents: Vec<Document>) -> Result<Self> {
        let mut out = Corpus::from_parts(self.vocabulary.words.clone(), documents)?;
        out.preprocess_log = self.preprocess_log.clone();
        Ok(out)
    }

    pub fn with_preprocess_log(mut self, log: PreprocessLog) -> Self {
        self.preprocess_log = log;
        self
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn preprocess_log(&self) -> &PreprocessLog {
        &self.preprocess_log
    }

    pub(crate) fn preprocess_log_mut(&mut self) -> &mut PreprocessLog {
        &mut self.preprocess_log
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn total_tokens(&self) -> u64 {
        self.documents.iter().map(Document::length).sum()
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    /// Distinct group labels in first-seen order.
    pub fn groups(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.documents
            .iter()
            .filter_map(|d| d.group.as_deref())
            .filter(|g| seen.insert(*g))
            .collect()
    }
}

/// One input document before preprocessing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    pub group: Option<String>,
    pub label: Option<String>,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        RawDocument {
            id: id.into(),
            text: text.into(),
            group: None,
            label: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildOptions {
    pub stopwords: BTreeSet<String>,
    /// Number of most frequent words removed after stopword filtering.
    pub top_k_remove: usize,
    /// Words occurring fewer times than this in the collection are removed.
    pub min_count: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            stopwords: BTreeSet::new(),
            top_k_remove: 100,
            min_count: 5,
        }
    }
}

/// Tokenizes and filters raw documents into a corpus.
///
/// Word ids follow first occurrence, which also breaks ties when picking the
/// most frequent words. Documents left without tokens are dropped and logged.
pub fn build_corpus(raw: &[RawDocument], options: &BuildOptions) -> Result<Corpus> {
    if options.min_count == 0 {
        return Err(Error::InvalidConfig("min_count must be at least 1".into()));
    }
    let mut log = PreprocessLog::default();
    let mut stop_seen = BTreeSet::new();

    // Candidate words in first-occurrence order with collection counts.
    let mut order: Vec<String> = Vec::new();
    let mut candidate: BTreeMap<String, usize> = BTreeMap::new();
    let mut freq: Vec<u64> = Vec::new();
    let mut tokenized: Vec<Vec<usize>> = Vec::with_capacity(raw.len());

    for doc in raw {
        let mut ids = Vec::new();
        for token in tokenize(&doc.text) {
            if options.stopwords.contains(&token) {
                if stop_seen.insert(token.clone()) {
                    log.stopwords_removed.push(token);
                }
                continue;
            }
            let id = match candidate.get(&token) {
                Some(&id) => id,
                None => {
                    let id = order.len();
                    candidate.insert(token.clone(), id);
                    order.push(token);
                    freq.push(0);
                    id
                }
            };
            freq[id] += 1;
            ids.push(id);
        }
        tokenized.push(ids);
    }

    let mut keep = alloc::vec![true; order.len()];
    let mut by_freq: Vec<usize> = (0..order.len()).collect();
    by_freq.sort_by(|&a, &b| freq[b].cmp(&freq[a]).then(a.cmp(&b)));
    for &id in by_freq.iter().take(options.top_k_remove) {
        keep[id] = false;
        log.frequent_removed.push(order[id].clone());
    }
    for id in 0..order.len() {
        if keep[id] && freq[id] < options.min_count {
            keep[id] = false;
            log.rare_removed.push(order[id].clone());
        }
    }

    let mut remap = alloc::vec![usize::MAX; order.len()];
    let mut words = Vec::new();
    for (id, word) in order.into_iter().enumerate() {
        if keep[id] {
            remap[id] = words.len();
            words.push(word);
        }
    }

    let mut documents = Vec::new();
    for (doc, ids) in raw.iter().zip(tokenized) {
        let counts = ids
            .into_iter()
            .filter(|&id| keep[id])
            .map(|id| (remap[id], 1u32));
        let d = Document::new(doc.id.clone(), counts)
            .with_group(doc.group.clone())
            .with_label(doc.label.clone());
        if d.is_empty() {
            log::debug!("dropping document `{}`: no tokens left", doc.id);
            log.dropped_documents.push(doc.id.to_string());
        } else {
            documents.push(d);
        }
    }
    if documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut corpus = Corpus::from_parts(words, documents)?;
    corpus.preprocess_log = log;
    Ok(corpus)
}

/// Maximum-likelihood unigram model of the whole collection.
pub fn collection_language_model(corpus: &Corpus) -> Result<SparseDistribution> {
    let vocab = corpus.vocabulary();
    SparseDistribution::from_weights(
        (0..vocab.len()).map(|w| (w, vocab.collection_frequency(w) as f64)),
    )
    .ok_or(Error::EmptyCorpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn raw(texts: &[&str]) -> Vec<RawDocument> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| RawDocument::new(alloc::format!("d{i}"), *t))
            .collect()
    }

    fn identity() -> BuildOptions {
        BuildOptions {
            stopwords: BTreeSet::new(),
            top_k_remove: 0,
            min_count: 1,
        }
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize("Reward Networks in the Brain"),
            vec!["reward", "networks", "in", "the", "brain"]
        );
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("IL-6 levels (p<0.05)"), vec!["il", "levels", "p"]);
        assert!(tokenize("  2015 -- 42% ").is_empty());
    }

    #[test]
    fn min_count_threshold() {
        // "alpha" 5x, "beta" 6x, the other eight words once or twice.
        let docs = raw(&[
            "alpha alpha beta beta c d e",
            "alpha alpha beta beta f g h",
            "alpha beta beta i j j",
        ]);
        let opts = BuildOptions {
            min_count: 5,
            ..identity()
        };
        let corpus = build_corpus(&docs, &opts).unwrap();
        assert_eq!(corpus.vocabulary().words(), &["alpha", "beta"]);
        assert_eq!(corpus.vocabulary().collection_frequency(0), 5);
        assert_eq!(corpus.vocabulary().collection_frequency(1), 6);
    }

    #[test]
    fn identity_configuration_keeps_all_tokens() {
        let docs = raw(&["x y z", "z w", "y"]);
        let corpus = build_corpus(&docs, &identity()).unwrap();
        assert_eq!(corpus.vocabulary().words(), &["x", "y", "z", "w"]);
        assert_eq!(corpus.total_tokens(), 6);
    }

    #[test]
    fn top_k_removes_most_frequent() {
        // the=7, cat=3, dog=3, sat=2, mat=1
        let docs = raw(&[
            "the cat sat",
            "the dog the",
            "the cat mat",
            "the dog sat the",
            "the cat dog",
        ]);
        let opts = BuildOptions {
            top_k_remove: 1,
            ..identity()
        };
        let corpus = build_corpus(&docs, &opts).unwrap();
        assert!(corpus.vocabulary().id("the").is_none());
        assert_eq!(corpus.preprocess_log().frequent_removed, vec!["the"]);
        assert_eq!(corpus.vocabulary().words(), &["cat", "sat", "dog", "mat"]);

        // tie between cat and dog (3 each) goes to the earlier word
        let opts = BuildOptions {
            top_k_remove: 2,
            ..identity()
        };
        let corpus = build_corpus(&docs, &opts).unwrap();
        assert!(corpus.vocabulary().id("cat").is_none());
        assert!(corpus.vocabulary().id("dog").is_some());
    }

    #[test]
    fn stopwords_and_empty_documents() {
        let docs = raw(&["the and of", "gene protein", "of gene"]);
        let opts = BuildOptions {
            stopwords: ["the", "and", "of"].iter().map(|s| s.to_string()).collect(),
            ..identity()
        };
        let corpus = build_corpus(&docs, &opts).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.preprocess_log().dropped_documents, vec!["d0"]);
        assert_eq!(
            corpus.preprocess_log().stopwords_removed,
            vec!["the", "and", "of"]
        );
    }

    #[test]
    fn all_documents_empty_is_an_error() {
        let docs = raw(&["a b", "c"]);
        let opts = BuildOptions {
            min_count: 5,
            ..identity()
        };
        assert_eq!(build_corpus(&docs, &opts), Err(Error::EmptyCorpus));
        assert!(build_corpus(
            &docs,
            &BuildOptions {
                min_count: 0,
                ..identity()
            }
        )
        .is_err());
    }

    #[test]
    fn collection_model_examples() {
        let corpus = build_corpus(&raw(&["a a b b"]), &identity()).unwrap();
        let clm = collection_language_model(&corpus).unwrap();
        assert_eq!(clm.entries(), &[(0, 0.5), (1, 0.5)]);

        let corpus = build_corpus(&raw(&["a a a", "b"]), &identity()).unwrap();
        let clm = collection_language_model(&corpus).unwrap();
        assert_eq!(clm.entries(), &[(0, 0.75), (1, 0.25)]);
    }

    #[test]
    fn collection_model_hand_counts() {
        // the=7, cat=3, sat=2, dog=3, mat=1 over 16 tokens
        let docs = raw(&[
            "the cat sat",
            "the dog the",
            "the cat mat",
            "the dog sat the",
            "the cat dog",
        ]);
        let corpus = build_corpus(&docs, &identity()).unwrap();
        let clm = collection_language_model(&corpus).unwrap();
        let v = corpus.vocabulary();
        for (word, count) in [
            ("the", 7.0),
            ("cat", 3.0),
            ("sat", 2.0),
            ("dog", 3.0),
            ("mat", 1.0),
        ] {
            assert!((clm.get(v.id(word).unwrap()) - count / 16.0).abs() < 1e-15);
        }
        assert!((clm.total() - 1.0).abs() < 1e-9);
        assert_eq!(v.doc_frequency(v.id("the").unwrap()), 5);
        assert_eq!(v.collection_frequency(v.id("the").unwrap()), 7);
    }

    #[test]
    fn from_parts_validates() {
        let words = vec!["a".to_string(), "b".to_string()];
        let bad = Document::new("x", [(5, 1)]);
        assert!(matches!(
            Corpus::from_parts(words.clone(), vec![bad]),
            Err(Error::OutOfVocabulary { .. })
        ));
        let empty = Document::new("e", [(0, 0)]);
        assert!(matches!(
            Corpus::from_parts(words.clone(), vec![empty]),
            Err(Error::EmptyDocument(_))
        ));
        let dup = vec!["a".to_string(), "a".to_string()];
        assert!(Corpus::from_parts(dup, vec![Document::new("x", [(0, 1)])]).is_err());
    }

    #[test]
    fn document_merges_counts() {
        let d = Document::new("d", [(3, 1), (1, 2), (3, 4), (2, 0)]);
        assert_eq!(d.counts(), &[(1, 2), (3, 5)]);
        assert_eq!(d.length(), 7);
        assert_eq!(d.tokens().collect::<Vec<_>>(), vec![1, 1, 3, 3, 3, 3, 3]);
    }
}
