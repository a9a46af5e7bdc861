//! Exact model compression: hidden-layer folding and dimension reduction.
//!
//! Both transforms preserve the classifier's behavior *mathematically*, not
//! approximately:
//!
//! * [`fold_hidden_layer`] replaces each word vector `x_i` with `B·x_i` and
//!   drops the hidden layer. Averaging commutes with the linear projection,
//!   so every document's class scores — and therefore probabilities — are
//!   unchanged in real arithmetic.
//! * [`shift_reduce`] subtracts each word vector's last coordinate from all
//!   of its coordinates. The softmax is invariant under adding a constant to
//!   every score, and after the shift the last score of every document is
//!   exactly 0, so it can be dropped and re-pinned by the reduced softmax.
//!
//! [`compress`] chains the two, taking any model to the minimal form: `m-1`
//! dimensions, no hidden layer. The only discrepancy a verifier can observe
//! is floating-point re-association, which stays far below the default
//! [`DEFAULT_TOLERANCE`] at practical scales; [`verify_equivalence`] measures
//! it.

use thiserror::Error;

use crate::corpus::Document;
use crate::model::{LBoWModel, Matrix, ModelError, SoftmaxVariant};

/// Default probability tolerance for [`verify_equivalence`].
///
/// The transforms are algebraically exact; only summation re-association
/// drifts, and that stays orders of magnitude below this bound at practical
/// model sizes.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Errors produced by the compression transforms and the verifier.
#[derive(Debug, Error)]
pub enum TransformError {
    /// Folding requires a hidden layer.
    #[error("model has no hidden layer to fold")]
    NoHiddenLayer,
    /// Reduction requires the hidden layer to be folded first.
    #[error("model still has a hidden layer; fold it first")]
    HasHiddenLayer,
    /// Reduction requires word vectors of dimension n = m.
    #[error("wrong dimensionality: n={dim} but m={classes} classes (need n = m)")]
    WrongDimensionality { dim: usize, classes: usize },
    /// The two models disagree on the number of classes.
    #[error("label count mismatch: {a} vs {b} classes")]
    LabelCountMismatch { a: usize, b: usize },
    /// An underlying model evaluation failed.
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl TransformError {
    /// Stable machine-readable name of this error case.
    pub fn name(&self) -> &'static str {
        match self {
            TransformError::NoHiddenLayer => "NoHiddenLayer",
            TransformError::HasHiddenLayer => "HasHiddenLayer",
            TransformError::WrongDimensionality { .. } => "WrongDimensionality",
            TransformError::LabelCountMismatch { .. } => "LabelCountMismatch",
            TransformError::Model(e) => e.name(),
        }
    }
}

/// Eliminates the hidden layer by pushing it into the word vectors.
///
/// The returned model has embedding rows `x̂_i = B·x_i`, no hidden layer,
/// dimension `n = m`, and the same labels. Because the document vector is a
/// weighted sum, `B·(Σ w_i·x_i) = Σ w_i·(B·x_i)`: the folded model computes
/// the same class scores as its precursor for every document.
pub fn fold_hidden_layer(model: &LBoWModel) -> Result<LBoWModel, TransformError> {
    let hidden = model.hidden().ok_or(TransformError::NoHiddenLayer)?;
    let mut rows = Vec::with_capacity(model.vocab_size());
    for i in 0..model.vocab_size() {
        rows.push(hidden.mul_vec(model.embeddings().row(i)));
    }
    Ok(LBoWModel::new(
        Matrix::from_rows(rows),
        None,
        model.labels().to_vec(),
        SoftmaxVariant::Full,
    )?)
}

/// Drops one dimension by shifting each word vector by its last coordinate.
///
/// Requires a model without a hidden layer and with `n = m`. Each row
/// `(x_1, …, x_m)` becomes `(x_1 - x_m, …, x_{m-1} - x_m)`: the shift adds a
/// per-word constant to every coordinate, which document averaging turns into
/// a per-document constant added to every class score — invisible to the
/// softmax. The now-identically-zero last coordinate is dropped and the model
/// switches to the reduced softmax, which pins it back.
pub fn shift_reduce(model: &LBoWModel) -> Result<LBoWModel, TransformError> {
    if model.hidden().is_some() {
        return Err(TransformError::HasHiddenLayer);
    }
    let m = model.num_classes();
    if model.dim() != m {
        return Err(TransformError::WrongDimensionality {
            dim: model.dim(),
            classes: m,
        });
    }
    let mut rows = Vec::with_capacity(model.vocab_size());
    for i in 0..model.vocab_size() {
        let row = model.embeddings().row(i);
        let last = row[m - 1];
        rows.push(row[..m - 1].iter().map(|&v| v - last).collect());
    }
    Ok(LBoWModel::new(
        Matrix::from_rows(rows),
        None,
        model.labels().to_vec(),
        SoftmaxVariant::Reduced,
    )?)
}

/// Takes any model to its minimal equivalent form: no hidden layer and
/// `n = m - 1` dimensions.
///
/// Folds the hidden layer when present, then shift-reduces. Already-reduced
/// models are returned unchanged, so `compress` is idempotent (bitwise).
pub fn compress(model: &LBoWModel) -> Result<LBoWModel, TransformError> {
    if model.variant() == SoftmaxVariant::Reduced {
        return Ok(model.clone());
    }
    let folded;
    let full = if model.hidden().is_some() {
        folded = fold_hidden_layer(model)?;
        &folded
    } else {
        model
    };
    shift_reduce(full)
}

/// The verdict of comparing two models over a document set.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// Number of documents compared.
    pub n_documents: usize,
    /// Largest absolute per-class probability difference observed.
    pub max_abs_prob_diff: f64,
    /// Documents on which the predicted classes differ.
    pub n_label_disagreements: usize,
    /// Probabilities agree within tolerance on every document (and the
    /// predictions agree, so strict implies plain).
    pub strict: bool,
    /// Predictions agree on every document, tie-breaks included.
    pub plain: bool,
}

/// Compares two models document by document.
///
/// `plain` holds when the predicted classes agree everywhere; `strict`
/// additionally requires every per-class probability to agree within `tol`.
/// Both models must have the same class count and be applicable to every
/// document (same underlying vocabulary — the caller's responsibility).
///
/// # Panics
///
/// Panics when `tol` is negative or not finite.
pub fn verify_equivalence(
    model_a: &LBoWModel,
    model_b: &LBoWModel,
    docs: &[Document],
    tol: f64,
) -> Result<EquivalenceReport, TransformError> {
    assert!(tol.is_finite() && tol >= 0.0, "tolerance must be >= 0");
    if model_a.num_classes() != model_b.num_classes() {
        return Err(TransformError::LabelCountMismatch {
            a: model_a.num_classes(),
            b: model_b.num_classes(),
        });
    }
    let mut max_abs_prob_diff = 0.0_f64;
    let mut n_label_disagreements = 0usize;
    for doc in docs {
        let pa = model_a.probabilities(doc)?;
        let pb = model_b.probabilities(doc)?;
        for (a, b) in pa.probs().iter().zip(pb.probs()) {
            max_abs_prob_diff = max_abs_prob_diff.max((a - b).abs());
        }
        if model_a.predict(doc)? != model_b.predict(doc)? {
            n_label_disagreements += 1;
        }
    }
    let plain = n_label_disagreements == 0;
    Ok(EquivalenceReport {
        n_documents: docs.len(),
        max_abs_prob_diff,
        n_label_disagreements,
        // Tolerance on probabilities alone could in principle hold across an
        // argmax flip at a near-tie; strict means "equivalent", so it
        // requires the predictions to agree too.
        strict: max_abs_prob_diff <= tol && plain,
        plain,
    })
}
