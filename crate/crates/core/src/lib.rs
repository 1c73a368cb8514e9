//! Ordinal-pattern time series features and the small classifiers used to
//! turn them into transportation-mode predictions.
//!
//! The pipeline is: a series becomes an [`OrdinalSequence`] of Bandt–Pompe
//! patterns, the sequence yields a [`PatternDistribution`] (permutation
//! entropy and Jensen–Shannon statistical complexity) and a
//! [`TransitionGraph`] (probability of self-transition). Per-trajectory
//! feature vectors are then classified with k-NN, SMO-trained SVMs or a CART
//! tree under stratified k-fold cross-validation.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is off.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod classify;
pub mod error;
pub mod eval;
pub mod features;
pub mod graph;
pub mod ordinal;
pub mod quantifiers;
pub mod signals;

pub use error::{Error, Result};
pub use graph::TransitionGraph;
pub use ordinal::{EmbeddingParams, OrdinalSequence, Pattern, PatternDistribution, TimeSeries};
pub use quantifiers::QuantifierPair;
