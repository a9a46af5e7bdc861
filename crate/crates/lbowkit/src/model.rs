//! The linear bag-of-words classifier.
//!
//! A model scores a document in three steps: average the word vectors of the
//! document's occurrences ([`LBoWModel::document_vector`]), optionally project
//! through a hidden layer ([`classification_vector`]), and normalize with a
//! softmax ([`softmax`], or [`reduced_softmax`] for models whose last class
//! score is implicitly zero). Prediction takes the highest-scoring class,
//! breaking ties toward the lowest index.
//!
//! Floating-point behavior is part of the contract here, not an afterthought:
//! the document average accumulates per distinct word index in ascending
//! order, weighting each word by `count/N` (a single correctly-rounded
//! division). That makes the document vector bitwise independent of token
//! order, and bitwise invariant under concatenating a document with itself —
//! `(k·count)/(k·N)` rounds to the identical float — so the classifier's
//! scale-invariance holds exactly, not just approximately.

use thiserror::Error;

use crate::corpus::Document;

/// Errors produced by model construction and evaluation.
#[derive(Debug, Error)]
pub enum ModelError {
    /// A document with no word occurrences was scored.
    #[error("document has no word occurrences")]
    EmptyDocument,
    /// A vector's length did not match the matrix it was applied to.
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A matrix entry was NaN or infinite.
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    /// The model's parts do not fit together.
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

impl ModelError {
    /// Stable machine-readable name of this error case.
    pub fn name(&self) -> &'static str {
        match self {
            ModelError::EmptyDocument => "EmptyDocument",
            ModelError::DimensionMismatch { .. } => "DimensionMismatch",
            ModelError::NonFiniteEntry { .. } => "NonFiniteEntry",
            ModelError::InvalidModel(_) => "InvalidModel",
        }
    }
}

/// A dense row-major matrix of `f64`.
///
/// Deliberately minimal: the classifier needs predictable summation order and
/// exact operation counts, so every product here is a plain nested loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// A `rows x cols` matrix of zeros.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row slices.
    ///
    /// # Panics
    ///
    /// Panics when the rows have unequal lengths or there are no rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            assert_eq!(row.len(), cols, "matrix rows must have equal lengths");
            data.extend_from_slice(row);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix from a row-major buffer.
    ///
    /// # Panics
    ///
    /// Panics when `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer does not match dimensions");
        Matrix { rows, cols, data }
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row `i` as a mutable slice.
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Entry at `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Sets the entry at `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    /// The row-major backing buffer.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Matrix-vector product `self · v`, accumulating left to right.
    ///
    /// # Panics
    ///
    /// Panics when `v.len() != self.cols()`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = 0.0;
            for (a, b) in self.row(i).iter().zip(v) {
                acc += a * b;
            }
            out.push(acc);
        }
        out
    }

    /// Transposed product `selfᵀ · v` (length = column count).
    ///
    /// # Panics
    ///
    /// Panics when `v.len() != self.rows()`.
    pub fn mul_vec_transposed(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "vector length must match row count");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += vi * a;
            }
        }
        out
    }

    /// True when both matrices have identical shape and bit-identical entries.
    ///
    /// Unlike `==` this distinguishes `0.0` from `-0.0` and treats equal NaN
    /// payloads as equal, which is what determinism tests need.
    pub fn bitwise_eq(&self, other: &Matrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| (p / self.cols, p % self.cols))
    }
}

/// Which normalization the model's scores feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoftmaxVariant {
    /// Scores for all `m` classes are materialized.
    Full,
    /// Only `m-1` scores are materialized; the last class is pinned at 0.
    Reduced,
}

/// A probability distribution over the model's classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDistribution {
    probs: Vec<f64>,
}

impl ClassDistribution {
    /// The probabilities, in class-index order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of classes.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// True when the distribution has no entries (never produced by a model).
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Consumes the distribution, returning the raw probabilities.
    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

/// Index of the largest entry, breaking ties toward the lowest index.
///
/// # Panics
///
/// Panics on an empty slice.
pub fn argmax(values: &[f64]) -> usize {
    assert!(!values.is_empty(), "argmax of an empty slice");
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Softmax over a full score vector, computed with the usual max-shift.
///
/// Subtracting the maximum score changes nothing mathematically (the softmax
/// is invariant under adding a constant to every score) and keeps `exp` from
/// overflowing.
pub fn softmax(scores: &[f64]) -> ClassDistribution {
    assert!(!scores.is_empty(), "softmax of an empty slice");
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    ClassDistribution {
        probs: exps.iter().map(|&e| e / sum).collect(),
    }
}

/// Softmax over `m-1` scores with the last class's score pinned at 0.
///
/// Returns a distribution over all `m` classes. Equivalent to
/// [`softmax`] on the extended vector `[scores, 0]`, including the stability
/// shift by `max(0, max(scores))`.
pub fn reduced_softmax(scores: &[f64]) -> ClassDistribution {
    let max = scores.iter().cloned().fold(0.0_f64, f64::max);
    let mut exps: Vec<f64> = scores.iter().map(|&v| (v - max).exp()).collect();
    exps.push((-max).exp());
    let sum: f64 = exps.iter().sum();
    ClassDistribution {
        probs: exps.iter().map(|&e| e / sum).collect(),
    }
}

/// Projects a document vector through the hidden layer: `z = hidden · y`.
///
/// Returns [`ModelError::DimensionMismatch`] when `y`'s length differs from
/// the layer's column count.
pub fn classification_vector(hidden: &Matrix, y: &[f64]) -> Result<Vec<f64>, ModelError> {
    if y.len() != hidden.cols() {
        return Err(ModelError::DimensionMismatch {
            expected: hidden.cols(),
            got: y.len(),
        });
    }
    Ok(hidden.mul_vec(y))
}

/// The canonical document-average computation shared by evaluation and
/// training: `y = Σ_w (count_w / N) · x_w` over distinct word indices in
/// ascending order.
pub(crate) fn weighted_document_sum(
    embeddings: &Matrix,
    doc: &Document,
) -> Result<Vec<f64>, ModelError> {
    if doc.is_empty() {
        return Err(ModelError::EmptyDocument);
    }
    let total = doc.len() as f64;
    let mut y = vec![0.0; embeddings.cols()];
    for (word, count) in doc.index_counts() {
        assert!(
            word < embeddings.rows(),
            "word index {word} out of range for vocabulary of {}",
            embeddings.rows()
        );
        let weight = count as f64 / total;
        for (yj, xj) in y.iter_mut().zip(embeddings.row(word)) {
            *yj += weight * xj;
        }
    }
    Ok(y)
}

/// A trained (or constructed) linear bag-of-words classifier.
///
/// Holds the word-vector matrix `X` (`|vocab| x n`), an optional hidden layer
/// `B` (`m x n`), the class label names, and the softmax variant. Shapes are
/// validated at construction:
///
/// * a hidden layer forces the full softmax and must be `m x n`;
/// * without a hidden layer, the full softmax requires `n = m` and the
///   reduced softmax requires `n = m - 1`;
/// * every matrix entry must be finite.
#[derive(Debug, Clone)]
pub struct LBoWModel {
    embeddings: Matrix,
    hidden: Option<Matrix>,
    labels: Vec<String>,
    variant: SoftmaxVariant,
}

impl LBoWModel {
    /// Assembles and validates a model.
    pub fn new(
        embeddings: Matrix,
        hidden: Option<Matrix>,
        labels: Vec<String>,
        variant: SoftmaxVariant,
    ) -> Result<Self, ModelError> {
        let m = labels.len();
        let n = embeddings.cols();
        if m < 2 {
            return Err(ModelError::InvalidModel(format!(
                "need at least 2 classes, got {m}"
            )));
        }
        if embeddings.rows() == 0 || n == 0 {
            return Err(ModelError::InvalidModel(
                "embedding matrix must be nonempty".to_string(),
            ));
        }
        if let Some((row, col)) = embeddings.first_non_finite() {
            return Err(ModelError::NonFiniteEntry { row, col });
        }
        match (&hidden, variant) {
            (Some(b), SoftmaxVariant::Full) => {
                if b.rows() != m || b.cols() != n {
                    return Err(ModelError::InvalidModel(format!(
                        "hidden layer is {}x{}, expected {m}x{n}",
                        b.rows(),
                        b.cols()
                    )));
                }
                if let Some((row, col)) = b.first_non_finite() {
                    return Err(ModelError::NonFiniteEntry { row, col });
                }
            }
            (Some(_), SoftmaxVariant::Reduced) => {
                return Err(ModelError::InvalidModel(
                    "a hidden layer requires the full softmax".to_string(),
                ));
            }
            (None, SoftmaxVariant::Full) => {
                if n != m {
                    return Err(ModelError::InvalidModel(format!(
                        "without a hidden layer the full softmax needs n = m, got n={n}, m={m}"
                    )));
                }
            }
            (None, SoftmaxVariant::Reduced) => {
                if n != m - 1 {
                    return Err(ModelError::InvalidModel(format!(
                        "the reduced softmax needs n = m-1, got n={n}, m={m}"
                    )));
                }
            }
        }
        Ok(LBoWModel {
            embeddings,
            hidden,
            labels,
            variant,
        })
    }

    /// Vocabulary size (`|D|`, rows of the embedding matrix).
    pub fn vocab_size(&self) -> usize {
        self.embeddings.rows()
    }

    /// Word-vector dimensionality (`n`).
    pub fn dim(&self) -> usize {
        self.embeddings.cols()
    }

    /// Number of classes (`m`).
    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }

    /// Class label names, in index order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// The word-vector matrix `X`.
    pub fn embeddings(&self) -> &Matrix {
        &self.embeddings
    }

    /// The hidden layer `B`, when present.
    pub fn hidden(&self) -> Option<&Matrix> {
        self.hidden.as_ref()
    }

    /// Which softmax the model's scores feed.
    pub fn variant(&self) -> SoftmaxVariant {
        self.variant
    }

    /// The document vector `y`: the average of the document's word vectors.
    ///
    /// Bitwise invariant under permuting the document and under concatenating
    /// the document with itself (see the module docs).
    pub fn document_vector(&self, doc: &Document) -> Result<Vec<f64>, ModelError> {
        weighted_document_sum(&self.embeddings, doc)
    }

    /// Per-class decision scores, always of length `m`.
    ///
    /// With a hidden layer this is `z = B·y`; without one it is `y` itself,
    /// extended by the pinned 0 for reduced-softmax models. Predictions are
    /// the argmax of these scores.
    pub fn class_scores(&self, doc: &Document) -> Result<Vec<f64>, ModelError> {
        let y = self.document_vector(doc)?;
        Ok(match (&self.hidden, self.variant) {
            (Some(b), _) => b.mul_vec(&y),
            (None, SoftmaxVariant::Full) => y,
            (None, SoftmaxVariant::Reduced) => {
                let mut scores = y;
                scores.push(0.0);
                scores
            }
        })
    }

    /// The class distribution the model assigns to `doc`.
    pub fn probabilities(&self, doc: &Document) -> Result<ClassDistribution, ModelError> {
        let y = self.document_vector(doc)?;
        Ok(match (&self.hidden, self.variant) {
            (Some(b), _) => softmax(&b.mul_vec(&y)),
            (None, SoftmaxVariant::Full) => softmax(&y),
            (None, SoftmaxVariant::Reduced) => reduced_softmax(&y),
        })
    }

    /// The predicted class index: argmax of the scores, ties to the lowest
    /// index.
    pub fn predict(&self, doc: &Document) -> Result<usize, ModelError> {
        Ok(argmax(&self.class_scores(doc)?))
    }

    /// True when both models are structurally identical down to the bits of
    /// every matrix entry.
    pub fn bitwise_eq(&self, other: &LBoWModel) -> bool {
        self.variant == other.variant
            && self.labels == other.labels
            && self.embeddings.bitwise_eq(&other.embeddings)
            && match (&self.hidden, &other.hidden) {
                (Some(a), Some(b)) => a.bitwise_eq(b),
                (None, None) => true,
                _ => false,
            }
    }
}
