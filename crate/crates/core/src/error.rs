use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("corpus is empty after preprocessing")]
    EmptyCorpus,

    #[error("document `{0}` has no tokens")]
    EmptyDocument(String),

    #[error("mass has no positive entry")]
    EmptyMass,

    #[error("item {0} has zero background probability")]
    ZeroBackground(usize),

    #[error("pruning removed every item from the distribution")]
    PrunedToEmpty,

    #[error("word id {word} is outside the model vocabulary of size {vocab_size}")]
    OutOfVocabulary { word: usize, vocab_size: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("a model needs at least 2 topics, found {0}")]
    TooFewTopics(usize),

    #[error("scores contain only one class")]
    SingleClass,

    #[error("group `{0}` does not exist in the corpus")]
    UnknownGroup(String),

    #[error("group `{group}` has {available} documents, {needed} needed")]
    GroupExhausted {
        group: String,
        available: usize,
        needed: usize,
    },

    #[error("combining documents `{0}` and `{1}` produced an empty pseudo-document")]
    EmptyPseudoDocument(String, String),

    #[error("word `{0}` never occurs in the reference corpus")]
    MissingReferenceWord(String),

    #[error("document `{0}` has no gold label")]
    MissingLabel(String),

    #[error("invalid label `{label}` for document `{doc}`")]
    InvalidLabel { doc: String, label: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
