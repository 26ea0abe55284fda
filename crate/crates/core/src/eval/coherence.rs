//! Topic coherence as summed NPMI over pairs of top words, with
//! co-occurrence counted at document level in a reference corpus.

use alloc::vec::Vec;

use crate::corpus::{Corpus, Vocabulary};
use crate::dist::SparseDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub per_topic: Vec<f64>,
    pub mean: f64,
}

/// NPMI of one word pair from document probabilities.
///
/// Pairs that never co-occur score −1; pairs present in every document
/// score 1.
pub fn pair_npmi(p_i: f64, p_j: f64, p_ij: f64) -> f64 {
    if p_ij <= 0.0 {
        return -1.0;
    }
    if p_ij >= 1.0 {
        return 1.0;
    }
    let log_ij = libm::log(p_ij);
    let pmi = log_ij - libm::log(p_i) - libm::log(p_j);
    (pmi / -log_ij).clamp(-1.0, 1.0)
}

/// The `n` most probable items; ties go to the lower id.
pub fn top_items(row: &SparseDistribution, n: usize) -> Vec<usize> {
    let mut entries: Vec<(usize, f64)> = row.iter().collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    entries.into_iter().take(n).map(|(id, _)| id).collect()
}

/// Per-topic coherence: the sum of NPMI over all unordered pairs of the
/// topic's `top_n` words (fewer when the topic's support is smaller).
///
/// Topic word ids refer to `vocab`; they are matched to `reference` by
/// their token strings.
pub fn npmi_coherence(
    phi: &[SparseDistribution],
    vocab: &Vocabulary,
    top_n: usize,
    reference: &Corpus,
) -> Result<CoherenceReport> {
    if top_n < 2 {
        return Err(Error::InvalidConfig("top_n must be at least 2".into()));
    }
    if reference.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n_docs = reference.len() as f64;
    let ref_vocab = reference.vocabulary();

    // Postings (sorted document indices) for each reference word we need.
    let mut needed: Vec<Option<Vec<u32>>> = alloc::vec![None; ref_vocab.len()];
    let mut tops: Vec<Vec<usize>> = Vec::with_capacity(phi.len());
    for row in phi {
        let mut ids = Vec::new();
        for w in top_items(row, top_n) {
            if w >= vocab.len() {
                return Err(Error::OutOfVocabulary {
                    word: w,
                    vocab_size: vocab.len(),
                });
            }
            let word = vocab.word(w);
            let rid = ref_vocab
                .id(word)
                .filter(|&r| ref_vocab.doc_frequency(r) > 0)
                .ok_or_else(|| Error::MissingReferenceWord(word.into()))?;
            needed[rid] = Some(Vec::new());
            ids.push(rid);
        }
        tops.push(ids);
    }
    for (d, doc) in reference.documents().iter().enumerate() {
        for &(w, _) in doc.counts() {
            if let Some(list) = needed[w].as_mut() {
                list.push(d as u32);
            }
        }
    }
    let postings = |w: usize| needed[w].as_deref().unwrap_or(&[]);

    let mut per_topic = Vec::with_capacity(tops.len());
    for ids in &tops {
        let mut sum = 0.0;
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                let (pa, pb) = (postings(ids[a]), postings(ids[b]));
                let co = intersection_size(pa, pb);
                sum += pair_npmi(
                    pa.len() as f64 / n_docs,
                    pb.len() as f64 / n_docs,
                    co as f64 / n_docs,
                );
            }
        }
        per_topic.push(sum);
    }
    let mean = if per_topic.is_empty() {
        0.0
    } else {
        per_topic.iter().sum::<f64>() / per_topic.len() as f64
    };
    Ok(CoherenceReport { per_topic, mean })
}

fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use alloc::string::{String, ToString};
    use alloc::vec;

    fn corpus(words: &[&str], docs: &[&[usize]]) -> Corpus {
        let words: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        let docs = docs
            .iter()
            .enumerate()
            .map(|(i, ws)| Document::new(alloc::format!("d{i}"), ws.iter().map(|&w| (w, 1))))
            .collect();
        Corpus::from_parts(words, docs).unwrap()
    }

    #[test]
    fn pair_anchors() {
        assert_eq!(pair_npmi(0.4, 0.4, 0.4), 1.0);
        assert_eq!(pair_npmi(0.1, 0.1, 0.1), 1.0);
        assert!(pair_npmi(0.5, 0.5, 0.25).abs() < 1e-12);
        assert_eq!(pair_npmi(0.5, 0.5, 0.0), -1.0);
        assert_eq!(pair_npmi(1.0, 1.0, 1.0), 1.0);
    }

    #[test]
    fn top_items_ordering() {
        let row = SparseDistribution::from_dense(&[0.1, 0.3, 0.3, 0.2, 0.1]).unwrap();
        assert_eq!(top_items(&row, 3), vec![1, 2, 3]);
        assert_eq!(top_items(&row, 10).len(), 5);
    }

    #[test]
    fn hand_corpus_three_word_topic() {
        // docs: {a,b} {a,b,c} {a} {c} {b,c}
        // P(a)=3/5 P(b)=3/5 P(c)=3/5, P(ab)=2/5 P(ac)=1/5 P(bc)=2/5
        let c = corpus(
            &["a", "b", "c"],
            &[&[0, 1], &[0, 1, 2], &[0], &[2], &[1, 2]],
        );
        let topic = SparseDistribution::from_dense(&[0.5, 0.3, 0.2]).unwrap();
        let report = npmi_coherence(&[topic], c.vocabulary(), 3, &c).unwrap();
        let npmi = |pij: f64| libm::log(pij / (0.6 * 0.6)) / -libm::log(pij);
        let expect = npmi(0.4) + npmi(0.2) + npmi(0.4);
        assert!((report.per_topic[0] - expect).abs() < 1e-12);
        assert!((report.mean - expect).abs() < 1e-12);
    }

    #[test]
    fn words_matched_by_string() {
        let reference = corpus(&["x", "a", "b"], &[&[1, 2], &[1, 2], &[0]]);
        let model_vocab = corpus(&["a", "b"], &[&[0, 1]]);
        let topic = SparseDistribution::from_dense(&[0.5, 0.5]).unwrap();
        let report = npmi_coherence(&[topic], model_vocab.vocabulary(), 10, &reference).unwrap();
        assert_eq!(report.per_topic, vec![1.0]);
    }

    #[test]
    fn missing_reference_word() {
        let reference = corpus(&["a"], &[&[0]]);
        let model_vocab = corpus(&["a", "zzz"], &[&[0, 1]]);
        let topic = SparseDistribution::from_dense(&[0.5, 0.5]).unwrap();
        assert_eq!(
            npmi_coherence(&[topic], model_vocab.vocabulary(), 2, &reference),
            Err(Error::MissingReferenceWord("zzz".into()))
        );
        assert!(npmi_coherence(&[], model_vocab.vocabulary(), 1, &reference).is_err());
    }
}
