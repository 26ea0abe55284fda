//! Evaluation machinery: synthetic diversity benchmarks, ROC/AUC, NPMI
//! coherence, clustering purity and NMI, feature export, λ sweeps and
//! cross-validation splits.

pub mod cluster;
pub mod coherence;
pub mod features;
pub mod kfold;
pub mod roc;
pub mod sweep;
pub mod synthetic;

pub use cluster::{clustering_purity, nmi};
pub use coherence::{npmi_coherence, CoherenceReport};
pub use roc::{roc_auc, LabeledScore, RocCurve};
pub use sweep::{diversity_auc, lambda_sweep, Stage, SweepPoint};
pub use synthetic::{generate_diversity_dataset, SyntheticSpec};
