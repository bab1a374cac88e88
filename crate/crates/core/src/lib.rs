//! Diversity-based minibatch sampling over learned feature embeddings.
//!
//! Minibatches drawn uniformly at random cover the support of a feature
//! distribution poorly, which makes distribution-distance estimates (and the
//! gradients derived from them) noisy. This crate provides two diversity-based
//! samplers that act as drop-in replacements for a weighted random sampler:
//!
//! * a weighted k-DPP with an RBF-mixture likelihood kernel, sampled exactly
//!   via spectral decomposition ([`dpp`]),
//! * weighted k-means++ seeding used purely as a subset selector ([`kmeanspp`]).
//!
//! [`engine`] wraps the three samplers behind one minibatch-stream interface
//! with a periodic refresh policy, and [`metrics`] provides the evaluation
//! side: quantisation error of drawn subsets, kernel MMD between domains, and
//! MAPE of small-sample MMD estimates against a full-data ground truth.
//! [`synth`] generates multi-domain Gaussian-mixture feature sets so the
//! benchmark trends can be exercised without any real dataset.

pub mod dpp;
pub mod engine;
pub mod error;
pub mod feature_store;
pub mod kernels;
pub mod kmeanspp;
pub mod metrics;
pub mod seed;
pub mod synth;

pub use dpp::{decompose, esp_table, kdpp_subset_probability, KdppSampler, Subset};
pub use engine::{RefreshPolicy, SamplerEngine, SamplerKind};
pub use error::{Error, Result};
pub use feature_store::{DomainCollection, FeatureTable};
pub use kernels::{GammaSet, GramMatrix, LikelihoodKernel};
