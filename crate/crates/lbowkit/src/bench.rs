//! Work accounting and throughput measurement.
//!
//! The point of compressing a model is to do less arithmetic per document,
//! and this module makes that claim checkable two ways:
//!
//! * **Exact counting.** [`counted_probabilities`] runs a reference forward
//!   pass that spends one multiply per embedding coordinate per *word
//!   occurrence* — the natural cost model for bag-of-words scoring — plus
//!   the hidden projection, and tallies every multiply. For a document of
//!   `N` occurrences the counter is exactly `N·n + m·n` with a hidden layer,
//!   `N·m` after folding, and `N·(m−1)` after shift-reduction: integer
//!   equalities, no measurement noise. (The production path in
//!   [`LBoWModel`] merges repeated words before multiplying, so it is
//!   cheaper than this reference on repetitive documents; the counter
//!   measures the *model shape*, not that implementation shortcut.)
//! * **Wall-clock timing.** [`run_bench`] times the production path on the
//!   original and compressed models over the same documents and reports
//!   documents per second. The multiply ratio is exact; the speed ratio is
//!   hardware-dependent and only reported.

use std::time::Instant;

use crate::corpus::Document;
use crate::model::{reduced_softmax, softmax, ClassDistribution, LBoWModel, ModelError, SoftmaxVariant};
use crate::transforms::{compress, TransformError};

/// Probabilities computed by the counting reference pass, with the tally.
#[derive(Debug, Clone)]
pub struct CountedResult {
    /// The class distribution (agrees with the production path up to
    /// summation order).
    pub probs: ClassDistribution,
    /// Exactly how many floating-point multiplies the reference pass spent.
    pub multiplies: u64,
}

/// Reference forward pass that pays one multiply per embedding coordinate
/// per word occurrence, plus `m·n` for the hidden projection when present.
///
/// Exponentials and the single `1/N` division are not multiplies and are
/// not counted.
pub fn counted_probabilities(
    model: &LBoWModel,
    doc: &Document,
) -> Result<CountedResult, ModelError> {
    if doc.is_empty() {
        return Err(ModelError::EmptyDocument);
    }
    let n = model.dim();
    let inv_total = 1.0 / doc.len() as f64;
    let mut multiplies = 0u64;

    let mut y = vec![0.0; n];
    for (w, count) in doc.index_counts() {
        let row = model.embeddings().row(w);
        for _ in 0..count {
            for (yj, xj) in y.iter_mut().zip(row) {
                *yj += inv_total * xj;
            }
            multiplies += n as u64;
        }
    }

    let scores = match model.hidden() {
        Some(b) => {
            multiplies += (b.rows() * b.cols()) as u64;
            b.mul_vec(&y)
        }
        None => y,
    };
    let probs = match model.variant() {
        SoftmaxVariant::Full => softmax(&scores),
        SoftmaxVariant::Reduced => reduced_softmax(&scores),
    };
    Ok(CountedResult { probs, multiplies })
}

/// Throughput and work figures for one model over one document set.
#[derive(Debug, Clone)]
pub struct ModelBenchStats {
    /// Documents classified per second on the production path.
    pub docs_per_second: f64,
    /// Total reference multiplies over the document set (counted once,
    /// independent of `repeat`).
    pub total_multiplies: u64,
    /// Mean reference multiplies per document.
    pub multiplies_per_document: f64,
}

/// Side-by-side work accounting for a model and its compressed form.
#[derive(Debug, Clone)]
pub struct BenchReport {
    /// Figures for the model as given.
    pub original: ModelBenchStats,
    /// Figures for its compressed form.
    pub compressed: ModelBenchStats,
    /// `original.total_multiplies / compressed.total_multiplies`.
    pub multiply_ratio: f64,
    /// Documents in the evaluation set.
    pub n_documents: usize,
    /// How many timed passes over the set each model got.
    pub repeat: usize,
}

fn time_production_pass(
    model: &LBoWModel,
    docs: &[Document],
    repeat: usize,
) -> Result<f64, ModelError> {
    let start = Instant::now();
    for _ in 0..repeat {
        for doc in docs {
            // The distribution is what a serving path would compute; argmax
            // alone would let the compiler skip the softmax.
            std::hint::black_box(model.probabilities(doc)?);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok((docs.len() * repeat) as f64 / elapsed.max(f64::MIN_POSITIVE))
}

/// Compresses `model`, then measures both forms over `docs`.
///
/// Multiply counters are exact tallies from [`counted_probabilities`]; the
/// timing numbers come from `repeat` passes of the production path over the
/// whole set.
///
/// # Panics
///
/// Panics when `docs` is empty or `repeat` is zero — there would be nothing
/// to measure.
pub fn run_bench(
    model: &LBoWModel,
    docs: &[Document],
    repeat: usize,
) -> Result<BenchReport, TransformError> {
    assert!(!docs.is_empty(), "benchmark needs at least one document");
    assert!(repeat >= 1, "benchmark needs at least one pass");
    let small = compress(model)?;

    let stats = |m: &LBoWModel| -> Result<ModelBenchStats, TransformError> {
        let mut total = 0u64;
        for doc in docs {
            total += counted_probabilities(m, doc)
                .map_err(TransformError::from)?
                .multiplies;
        }
        Ok(ModelBenchStats {
            docs_per_second: time_production_pass(m, docs, repeat).map_err(TransformError::from)?,
            total_multiplies: total,
            multiplies_per_document: total as f64 / docs.len() as f64,
        })
    };

    let original = stats(model)?;
    let compressed = stats(&small)?;
    let multiply_ratio = original.total_multiplies as f64 / compressed.total_multiplies as f64;
    Ok(BenchReport {
        original,
        compressed,
        multiply_ratio,
        n_documents: docs.len(),
        repeat,
    })
}
