//! # storynet
//!
//! Tells fictional storytelling (novel-like) from non-fictional storytelling
//! (news-like) by turning each text sample into a word co-occurrence network
//! and classifying the power-law exponents of that network.
//!
//! The pipeline, one module per stage:
//!
//! * [`corpus`]: manifests of labeled texts, word windows, control/eval splits
//! * [`tokenize`]: case folding, punctuation stripping, lemma grouping
//! * [`semnet`]: the undirected, unweighted network at word distance `m`
//! * [`measures`]: degree, clustering, degree distribution, `C(k)`, mean geodesic
//! * [`fitting`]: running-average binning, log-log power-law fits, the
//!   `(γ1, γ2, γ3)` feature vector
//! * [`classify`]: Fisher's linear discriminant, bootstrap error bars and the
//!   Zipf word-frequency baseline
//! * [`experiment`]: end-to-end composition used by the command line tool
//!
//! The numerical stages are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! command line tool uses.
//!
//! ```
//! use storynet::{semnet::SemanticNetwork, tokenize::{make_stream, IdentityLemmatizer}};
//!
//! let text = "To those who do not know mathematics it is difficult to get across \
//!             a real feeling as to the beauty, the deepest beauty, of nature...";
//! let stream = make_stream(text, "feynman", &IdentityLemmatizer);
//! let net = SemanticNetwork::build(&stream, 2).unwrap();
//! assert_eq!(net.n_vertices(), 21);
//! assert_eq!(net.degree_of("beauty"), Some(5));
//! ```

pub mod classify;
pub mod corpus;
pub mod error;
pub mod experiment;
pub mod fitting;
pub mod measures;
pub mod scalar;
pub mod semnet;
pub mod table;
pub mod tokenize;

pub use error::{Error, ErrorKind, Result};
pub use scalar::Scalar;

/// Per-vertex clustering summary grouped by degree, in `f64`.
pub type ClusteringByDegree = measures::ClusteringByDegree<f64>;
/// Mean geodesic distance summary, in `f64`.
pub type GeodesicSummary = measures::GeodesicSummary<f64>;
/// Small-world report, in `f64`.
pub type SmallWorldReport = measures::SmallWorldReport<f64>;
/// Running-average binned series, in `f64`.
pub type BinnedSeries = fitting::BinnedSeries<f64>;
/// Log-log least-squares power-law fit, in `f64`.
pub type PowerLawFit = fitting::PowerLawFit<f64>;
/// `(γ1, γ2, γ3[, l])` for one text sample, in `f64`.
pub type FeatureVector = fitting::FeatureVector<f64>;
/// Trained Fisher discriminant, in `f64`.
pub type DiscriminantModel = classify::DiscriminantModel<f64>;
/// Bootstrap accuracy distribution, in `f64`.
pub type BootstrapReport = classify::BootstrapReport<f64>;
