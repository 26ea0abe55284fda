//! Synthetic high/low diversity documents built by merging pairs of real
//! documents, either from two unrelated groups (diverse) or from the same
//! group (non-diverse).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::seed;

pub const DIVERSE_LABEL: &str = "1";
pub const NON_DIVERSE_LABEL: &str = "0";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub group_pairs: Vec<(String, String)>,
    pub docs_per_pair: usize,
    pub nondiverse_groups: Vec<String>,
    pub docs_per_group: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Non-diverse documents are drawn from every group named in `pairs`.
    pub fn from_pairs(
        pairs: Vec<(String, String)>,
        docs_per_pair: usize,
        docs_per_group: usize,
        seed: u64,
    ) -> Self {
        let mut groups: Vec<String> = Vec::new();
        for (a, b) in &pairs {
            for g in [a, b] {
                if !groups.contains(g) {
                    groups.push(g.clone());
                }
            }
        }
        SyntheticSpec {
            group_pairs: pairs,
            docs_per_pair,
            nondiverse_groups: groups,
            docs_per_group,
            seed,
        }
    }

    pub fn expected_counts(&self) -> (usize, usize) {
        (
            self.group_pairs.len() * self.docs_per_pair,
            self.nondiverse_groups.len() * self.docs_per_group,
        )
    }
}

/// Word-wise `floor((a + b) / 2)`.
pub fn combine_documents(id: impl Into<String>, a: &Document, b: &Document) -> Result<Document> {
    let mut sum: BTreeMap<usize, u32> = BTreeMap::new();
    for &(w, c) in a.counts().iter().chain(b.counts()) {
        *sum.entry(w).or_insert(0) += c;
    }
    let doc = Document::new(id, sum.into_iter().map(|(w, c)| (w, c / 2)));
    if doc.is_empty() {
        return Err(Error::EmptyPseudoDocument(a.id.clone(), b.id.clone()));
    }
    Ok(doc)
}

/// Builds the labelled pseudo-document corpus described by `spec`.
///
/// Within one pair (or one non-diverse group) source documents are drawn
/// without replacement. Diverse documents are labelled `"1"`, non-diverse
/// ones `"0"`; the vocabulary is shared with `corpus`.
pub fn generate_diversity_dataset(corpus: &Corpus, spec: &SyntheticSpec) -> Result<Corpus> {
    if spec.docs_per_pair == 0 && spec.docs_per_group == 0 {
        return Err(Error::InvalidConfig("no pseudo-documents requested".into()));
    }
    let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, doc) in corpus.documents().iter().enumerate() {
        if let Some(g) = doc.group.as_deref() {
            members.entry(g).or_default().push(i);
        }
    }
    let draw =
        |group: &str, needed: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Result<Vec<usize>> {
            let pool = members
                .get(group)
                .ok_or_else(|| Error::UnknownGroup(group.to_string()))?;
            if pool.len() < needed {
                return Err(Error::GroupExhausted {
                    group: group.to_string(),
                    available: pool.len(),
                    needed,
                });
            }
            let mut pool = pool.clone();
            pool.shuffle(rng);
            pool.truncate(needed);
            Ok(pool)
        };

    let mut rng = seed::rng(seed::derive(spec.seed, 0x5EED));
    let docs = corpus.documents();
    let mut out = Vec::new();

    for (k, (a, b)) in spec.group_pairs.iter().enumerate() {
        let from_a = draw(a, spec.docs_per_pair, &mut rng)?;
        let from_b = draw(b, spec.docs_per_pair, &mut rng)?;
        for (i, (&da, &db)) in from_a.iter().zip(&from_b).enumerate() {
            let id = alloc::format!("diverse-{k:03}-{i:03}");
            let doc = combine_documents(id, &docs[da], &docs[db])?
                .with_group(Some(alloc::format!("{a}+{b}")))
                .with_label(Some(DIVERSE_LABEL.into()));
            out.push(doc);
        }
    }
    for (k, g) in spec.nondiverse_groups.iter().enumerate() {
        let picked = draw(g, 2 * spec.docs_per_group, &mut rng)?;
        for (i, pair) in picked.chunks_exact(2).enumerate() {
            let id = alloc::format!("nondiverse-{k:03}-{i:03}");
            let doc = combine_documents(id, &docs[pair[0]], &docs[pair[1]])?
                .with_group(Some(g.clone()))
                .with_label(Some(NON_DIVERSE_LABEL.into()));
            out.push(doc);
        }
    }
    corpus.with_documents(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn grouped(groups: &[(&str, usize)]) -> Corpus {
        let mut docs = Vec::new();
        let mut w = 0;
        for &(g, n) in groups {
            for i in 0..n {
                docs.push(
                    Document::new(
                        alloc::format!("{g}{i}"),
                        [(w, 2 + i as u32 % 3), (w + 1, 2)],
                    )
                    .with_group(Some(g.to_string())),
                );
            }
            w += 2;
        }
        let words = (0..w).map(|i| alloc::format!("w{i}")).collect();
        Corpus::from_parts(words, docs).unwrap()
    }

    #[test]
    fn combine_examples() {
        let a = Document::new("a", [(0, 4)]);
        let b = Document::new("b", [(1, 2)]);
        assert_eq!(
            combine_documents("x", &a, &b).unwrap().counts(),
            &[(0, 2), (1, 1)]
        );
        let c = Document::new("c", [(0, 3), (5, 1)]);
        assert_eq!(combine_documents("x", &c, &c).unwrap().counts(), c.counts());
        let one = Document::new("o", [(0, 1)]);
        let other = Document::new("p", [(1, 1)]);
        assert!(matches!(
            combine_documents("x", &one, &other),
            Err(Error::EmptyPseudoDocument(..))
        ));
    }

    #[test]
    fn counts_follow_spec() {
        let names: Vec<String> = (0..20).map(|i| alloc::format!("g{i:02}")).collect();
        let corpus = grouped(&names.iter().map(|g| (g.as_str(), 100)).collect::<Vec<_>>());
        let pairs = (0..10)
            .map(|k| (names[2 * k].clone(), names[2 * k + 1].clone()))
            .collect();
        let spec = SyntheticSpec::from_pairs(pairs, 50, 25, 1);
        assert_eq!(spec.expected_counts(), (500, 500));
        let out = generate_diversity_dataset(&corpus, &spec).unwrap();
        let diverse = out
            .documents()
            .iter()
            .filter(|d| d.class_label.as_deref() == Some(DIVERSE_LABEL))
            .count();
        assert_eq!(diverse, 500);
        assert_eq!(out.len() - diverse, 500);
    }

    #[test]
    fn reproducible_and_seed_sensitive() {
        let corpus = grouped(&[("a", 10), ("b", 10)]);
        let spec = SyntheticSpec::from_pairs(vec![("a".into(), "b".into())], 5, 3, 9);
        let x = generate_diversity_dataset(&corpus, &spec).unwrap();
        let y = generate_diversity_dataset(&corpus, &spec).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.vocabulary().words(), corpus.vocabulary().words());
    }

    #[test]
    fn diverse_documents_mix_both_groups() {
        let corpus = grouped(&[("a", 6), ("b", 6)]);
        let spec = SyntheticSpec::from_pairs(vec![("a".into(), "b".into())], 6, 3, 2);
        let out = generate_diversity_dataset(&corpus, &spec).unwrap();
        for doc in out.documents() {
            let has_a = doc.count(0) > 0 || doc.count(1) > 0;
            let has_b = doc.count(2) > 0 || doc.count(3) > 0;
            if doc.class_label.as_deref() == Some(DIVERSE_LABEL) {
                assert!(has_a && has_b);
            } else {
                assert!(has_a != has_b);
            }
        }
    }

    #[test]
    fn exhausted_and_unknown_groups() {
        let corpus = grouped(&[("a", 4), ("b", 4)]);
        let spec = SyntheticSpec::from_pairs(vec![("a".into(), "b".into())], 5, 1, 0);
        assert!(matches!(
            generate_diversity_dataset(&corpus, &spec),
            Err(Error::GroupExhausted { .. })
        ));
        let spec = SyntheticSpec::from_pairs(vec![("a".into(), "b".into())], 2, 3, 0);
        assert!(matches!(
            generate_diversity_dataset(&corpus, &spec),
            Err(Error::GroupExhausted { needed: 6, .. })
        ));
        let spec = SyntheticSpec::from_pairs(vec![("a".into(), "zz".into())], 1, 1, 0);
        assert_eq!(
            generate_diversity_dataset(&corpus, &spec),
            Err(Error::UnknownGroup("zz".into()))
        );
    }
}
