//! Softmax-regression training by stochastic gradient descent.
//!
//! Training produces exactly the model that evaluation scores: a full softmax
//! over class scores, with or without a hidden layer. The optimizer is the
//! simplest deterministic scheme that converges on these convex problems —
//! per-epoch seeded shuffling, a linearly decaying learning rate, and sparse
//! updates touching only the word-vector rows present in the current
//! document. Runs are bitwise reproducible for a fixed `(dataset, config)`
//! pair.
//!
//! [`finite_difference_gradient`] provides an independent oracle for the
//! analytic gradient: it only ever calls [`loss`], so a bug in the gradient
//! path cannot hide in its own check.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{Dataset, Document, Vocabulary};
use crate::model::{softmax, weighted_document_sum, LBoWModel, Matrix, ModelError, SoftmaxVariant};

/// Errors produced by training and its loss/gradient helpers.
#[derive(Debug, Error)]
pub enum TrainError {
    /// A configuration field violated its documented range.
    #[error("invalid train config: {0}")]
    InvalidConfig(String),
    /// A document without a gold label reached a loss or gradient computation.
    #[error("document has no gold label")]
    MissingLabel,
    /// The dataset holds no documents.
    #[error("dataset has no documents")]
    EmptyDataset,
    /// An underlying model evaluation failed.
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl TrainError {
    /// Stable machine-readable name of this error case.
    ///
    /// Wrapped model errors report the underlying name (e.g.
    /// `EmptyDocument`).
    pub fn name(&self) -> &'static str {
        match self {
            TrainError::InvalidConfig(_) => "InvalidConfig",
            TrainError::MissingLabel => "MissingLabel",
            TrainError::EmptyDataset => "EmptyDataset",
            TrainError::Model(e) => e.name(),
        }
    }
}

/// Hyperparameters and reproducibility knobs for a training run.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Word-vector dimensionality `n` (forced to `m` when `use_hidden` is
    /// off).
    pub dim: usize,
    /// Whether to train a hidden layer `B` on top of the word vectors.
    pub use_hidden: bool,
    /// Initial learning rate; decays linearly to 0 over all steps.
    pub learning_rate: f64,
    /// Number of passes over the dataset.
    pub epochs: usize,
    /// Minimum corpus frequency for a word to enter the vocabulary.
    pub min_count: u64,
    /// Seed for initialization and epoch shuffling.
    pub seed: u64,
    /// Whether tokenization lowercases.
    pub lowercase: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            use_hidden: false,
            learning_rate: 0.1,
            epochs: 5,
            min_count: 1,
            seed: 42,
            lowercase: false,
        }
    }
}

impl TrainConfig {
    /// Checks every field against its documented range.
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.dim < 1 {
            return Err(TrainError::InvalidConfig("dim must be >= 1".to_string()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(TrainError::InvalidConfig(
                "learning_rate must be positive and finite".to_string(),
            ));
        }
        if self.epochs < 1 {
            return Err(TrainError::InvalidConfig("epochs must be >= 1".to_string()));
        }
        if self.min_count < 1 {
            return Err(TrainError::InvalidConfig(
                "min_count must be >= 1".to_string(),
            ));
        }
        Ok(())
    }

    /// The effective word-vector dimensionality for `m` classes: without a
    /// hidden layer the scores are the document vector itself, so `n = m`.
    pub fn effective_dim(&self, m: usize) -> usize {
        if self.use_hidden {
            self.dim
        } else {
            m
        }
    }
}

/// Builds the initial model for a training run.
///
/// Word vectors are drawn uniformly from `[-1/(2n), 1/(2n)]` using a
/// generator seeded from `cfg.seed` (row-major order, so two calls with the
/// same arguments are bitwise identical). The hidden layer, when requested,
/// starts as the zero matrix. The produced model always uses the full
/// softmax.
pub fn init_model(
    vocabulary: &Vocabulary,
    labels: &[String],
    cfg: &TrainConfig,
) -> Result<LBoWModel, TrainError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    init_model_with_rng(vocabulary.len(), labels, cfg, &mut rng)
}

fn init_model_with_rng(
    vocab_size: usize,
    labels: &[String],
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<LBoWModel, TrainError> {
    let m = labels.len();
    let n = cfg.effective_dim(m);
    let half = 1.0 / (2.0 * n as f64);
    let mut data = Vec::with_capacity(vocab_size * n);
    for _ in 0..vocab_size * n {
        data.push(rng.random_range(-half..half));
    }
    let embeddings = Matrix::from_vec(vocab_size, n, data);
    let hidden = cfg.use_hidden.then(|| Matrix::zeros(m, n));
    Ok(LBoWModel::new(
        embeddings,
        hidden,
        labels.to_vec(),
        SoftmaxVariant::Full,
    )?)
}

/// Negative log-likelihood of a labeled document under the model.
pub fn loss(model: &LBoWModel, doc: &Document) -> Result<f64, TrainError> {
    let label = doc.label().ok_or(TrainError::MissingLabel)?;
    let p = model.probabilities(doc)?;
    Ok(-p.probs()[label].ln())
}

/// The gradient of [`loss`] at one document.
///
/// Only the word-vector rows occurring in the document carry gradient; they
/// are reported sparsely, in ascending index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    /// `(word index, ∂loss/∂x_word)` for each distinct word in the document.
    pub embedding_rows: Vec<(usize, Vec<f64>)>,
    /// `∂loss/∂B`, when the model has a hidden layer.
    pub hidden: Option<Matrix>,
}

/// Analytic gradient of the loss at one labeled document.
///
/// Chain rule through average, projection, and softmax:
/// `∂loss/∂z = p - onehot(label)`, `∂loss/∂B = (p - onehot)·yᵀ`,
/// `∂loss/∂y = Bᵀ(p - onehot)` (or `p - onehot` itself without a hidden
/// layer), and `∂loss/∂x_w = (count_w/N)·∂loss/∂y`.
pub fn gradient(model: &LBoWModel, doc: &Document) -> Result<Gradients, TrainError> {
    let label = doc.label().ok_or(TrainError::MissingLabel)?;
    let y = model.document_vector(doc)?;
    let scores = match model.hidden() {
        Some(b) => b.mul_vec(&y),
        None => y.clone(),
    };
    let mut g_scores = softmax(&scores).into_vec();
    g_scores[label] -= 1.0;

    let (g_y, g_hidden) = match model.hidden() {
        Some(b) => {
            let mut g_b = Matrix::zeros(b.rows(), b.cols());
            for (r, &g) in g_scores.iter().enumerate() {
                for (cell, &yc) in g_b.row_mut(r).iter_mut().zip(&y) {
                    *cell = g * yc;
                }
            }
            (b.mul_vec_transposed(&g_scores), Some(g_b))
        }
        None => (g_scores, None),
    };

    let total = doc.len() as f64;
    let embedding_rows = doc
        .index_counts()
        .into_iter()
        .map(|(word, count)| {
            let weight = count as f64 / total;
            (word, g_y.iter().map(|&g| weight * g).collect())
        })
        .collect();

    Ok(Gradients {
        embedding_rows,
        hidden: g_hidden,
    })
}

/// Central finite-difference approximation of the gradient.
///
/// Every touched word-vector entry and every hidden-layer entry is perturbed
/// by `±h` and the loss re-evaluated; nothing here shares code with
/// [`gradient`], which is the point.
pub fn finite_difference_gradient(
    model: &LBoWModel,
    doc: &Document,
    h: f64,
) -> Result<Gradients, TrainError> {
    let label = doc.label();
    if label.is_none() {
        return Err(TrainError::MissingLabel);
    }

    let loss_with = |embeddings: Matrix, hidden: Option<Matrix>| -> Result<f64, TrainError> {
        let perturbed = LBoWModel::new(
            embeddings,
            hidden,
            model.labels().to_vec(),
            model.variant(),
        )?;
        loss(&perturbed, doc)
    };

    let mut embedding_rows = Vec::new();
    for (word, _) in doc.index_counts() {
        let mut row_grad = Vec::with_capacity(model.dim());
        for j in 0..model.dim() {
            let base = model.embeddings().get(word, j);
            let mut plus = model.embeddings().clone();
            plus.set(word, j, base + h);
            let mut minus = model.embeddings().clone();
            minus.set(word, j, base - h);
            let lp = loss_with(plus, model.hidden().cloned())?;
            let lm = loss_with(minus, model.hidden().cloned())?;
            row_grad.push((lp - lm) / (2.0 * h));
        }
        embedding_rows.push((word, row_grad));
    }

    let hidden = match model.hidden() {
        Some(b) => {
            let mut g_b = Matrix::zeros(b.rows(), b.cols());
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    let base = b.get(r, c);
                    let mut plus = b.clone();
                    plus.set(r, c, base + h);
                    let mut minus = b.clone();
                    minus.set(r, c, base - h);
                    let lp = loss_with(model.embeddings().clone(), Some(plus))?;
                    let lm = loss_with(model.embeddings().clone(), Some(minus))?;
                    g_b.set(r, c, (lp - lm) / (2.0 * h));
                }
            }
            Some(g_b)
        }
        None => None,
    };

    Ok(Gradients {
        embedding_rows,
        hidden,
    })
}

/// A completed training run: the final model plus per-epoch mean losses.
#[derive(Debug, Clone)]
pub struct TrainRun {
    /// The trained model.
    pub model: LBoWModel,
    /// Mean per-document loss of each epoch (measured before each step).
    pub epoch_losses: Vec<f64>,
}

/// Trains a model on a labeled dataset. See [`train_with_history`] for the
/// loss curve.
pub fn train(dataset: &Dataset, cfg: &TrainConfig) -> Result<LBoWModel, TrainError> {
    Ok(train_with_history(dataset, cfg)?.model)
}

/// Trains a model, also recording the per-epoch mean loss.
///
/// One RNG stream seeded from `cfg.seed` drives initialization and every
/// epoch's shuffle, so identical `(dataset, cfg)` pairs produce bitwise
/// identical models.
pub fn train_with_history(dataset: &Dataset, cfg: &TrainConfig) -> Result<TrainRun, TrainError> {
    cfg.validate()?;
    let docs = dataset.documents();
    if docs.is_empty() {
        return Err(TrainError::EmptyDataset);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let labels = dataset.labels().to_vec();
    let m = labels.len();
    let init = init_model_with_rng(dataset.vocabulary().len(), &labels, cfg, &mut rng)?;
    let mut embeddings = init.embeddings().clone();
    let mut hidden = init.hidden().cloned();

    let total_steps = (cfg.epochs * docs.len()) as f64;
    let mut step = 0usize;
    let mut order: Vec<usize> = (0..docs.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for &di in &order {
            let doc = &docs[di];
            let label = doc.label().ok_or(TrainError::MissingLabel)?;
            let rate = cfg.learning_rate * (1.0 - step as f64 / total_steps);

            let y = weighted_document_sum(&embeddings, doc)?;
            let scores = match &hidden {
                Some(b) => b.mul_vec(&y),
                None => y.clone(),
            };
            let p = softmax(&scores);
            loss_sum += -p.probs()[label].ln();

            let mut g_scores = p.into_vec();
            g_scores[label] -= 1.0;

            let g_y = match &mut hidden {
                Some(b) => {
                    let g_y = b.mul_vec_transposed(&g_scores);
                    for (r, &g) in g_scores.iter().enumerate().take(m) {
                        let coef = rate * g;
                        for (cell, &yc) in b.row_mut(r).iter_mut().zip(&y) {
                            *cell -= coef * yc;
                        }
                    }
                    g_y
                }
                None => g_scores,
            };

            let total = doc.len() as f64;
            for (word, count) in doc.index_counts() {
                let coef = rate * (count as f64 / total);
                for (xj, &gj) in embeddings.row_mut(word).iter_mut().zip(&g_y) {
                    *xj -= coef * gj;
                }
            }
            step += 1;
        }
        epoch_losses.push(loss_sum / docs.len() as f64);
    }

    let model = LBoWModel::new(embeddings, hidden, labels, SoftmaxVariant::Full)?;
    Ok(TrainRun {
        model,
        epoch_losses,
    })
}

/// Fraction of labeled documents the model classifies correctly.
pub fn accuracy(model: &LBoWModel, docs: &[Document]) -> Result<f64, TrainError> {
    if docs.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut correct = 0usize;
    for doc in docs {
        let label = doc.label().ok_or(TrainError::MissingLabel)?;
        if model.predict(doc)? == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / docs.len() as f64)
}
