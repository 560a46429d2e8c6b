//! Fisher's linear discriminant for two groups, per-category accuracy,
//! bootstrap error bars and the Zipf-exponent baseline.

mod bootstrap;
mod lda;
pub mod linalg;
mod zipf;

pub use bootstrap::{
    bootstrap_accuracy, mean_and_error, BootstrapMode, BootstrapOptions, BootstrapReport, CategoryBootstrap,
    Sampling,
};
pub use lda::{
    evaluate, mean_vector, median, midpoint_from_projections, midpoint_variant, pooled_covariance,
    train_discriminant, CategoryAccuracy, DiscriminantModel, Evaluation, Group, LdaOptions, MidpointMode,
};
pub use zipf::{rank_frequencies, zipf_exponent};
