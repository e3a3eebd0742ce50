//! Supervised dimensionality reduction by within-class gravitation.
//!
//! Each class's points attract one another, iteration by iteration, so
//! classes contract around their own mass while staying where they are
//! relative to each other. Two families of dynamics are provided: a
//! Newtonian pass that accumulates unit inverse-distance pulls (any
//! dimensionality), and relativity passes that take metric-weighted steps
//! inside a 3D PCA subspace, using either the Schwarzschild metric around
//! the attracting point or the flat Minkowski metric.
//!
//! The high-level entry point is [`run_gdr`]; [`GdrSession`] exposes the
//! same run one iteration at a time. Dataset I/O lives in [`dataset`],
//! evaluation helpers (intra-class variance, leave-one-out 1-NN accuracy)
//! in [`engine`].

pub mod dataset;
pub mod density;
pub mod engine;
pub mod error;
pub mod newtonian;
pub mod pca;
pub mod relativity;
pub mod rng;

pub use dataset::{load_csv, make_blobs, write_csv, LabeledDataset};
pub use engine::{
    has_converged, intra_class_variance, knn_loo_accuracy, run_gdr, GdrConfig, GdrSession,
    IterationReport, Method,
};
pub use error::{Error, Result};
pub use newtonian::StepGuards;
pub use pca::{fit_pca3, PcaModel};
pub use relativity::AlphaWeights;
