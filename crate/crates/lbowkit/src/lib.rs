//! Linear bag-of-words text classification.
//!
//! `lbowkit` trains, evaluates, compresses, and stress-tests the simplest
//! text classifier that works: average the word vectors of a document,
//! project linearly, and normalize with a softmax. The interesting part is
//! what that linearity buys and costs:
//!
//! * [`transforms`] removes the hidden layer and one full dimension from any
//!   trained model **without changing a single prediction** — the folded and
//!   reduced models are mathematically equivalent, not approximations.
//! * [`adversarial`] constructs, for any model whose word vectors live in
//!   fewer dimensions than it has classes, a pair of documents the model
//!   *provably cannot tell apart* — with an exact integer certificate, not a
//!   search result.
//!
//! The supporting cast: [`corpus`] (tokenization and encoding), [`model`]
//! (the classifier itself), [`train`] (SGD training), [`persist`] (a
//! versioned binary model format), and [`bench`] (exact multiply counting and
//! throughput measurement).
//!
//! Numeric behavior is part of the contract throughout: document vectors are
//! bitwise independent of token order and of self-concatenation, training is
//! bitwise reproducible from a seed, and the adversarial pipeline runs on
//! exact rational arithmetic.

pub mod adversarial;
pub mod bench;
pub mod corpus;
pub mod model;
pub mod persist;
pub mod train;
pub mod transforms;

pub use corpus::{Dataset, Document, Vocabulary};
pub use model::{ClassDistribution, LBoWModel, Matrix, SoftmaxVariant};
pub use persist::TextClassifier;
pub use train::TrainConfig;
