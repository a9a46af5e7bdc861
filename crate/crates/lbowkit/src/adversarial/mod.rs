//! Why word-vector dimensionality can't drop below the class count.
//!
//! This module makes a lower-bound argument executable. The *most-frequent-
//! word problem* ([`MfwProblem`]) labels each document by its most frequent
//! word; [`exact_classifier`] solves it perfectly with one-hot word vectors
//! of dimension `m`. But any classifier whose word vectors live in `q < m`
//! dimensions is provably forced into errors on this problem, and the proof
//! is constructive:
//!
//! 1. `q < m` word vectors are linearly dependent. [`find_integer_dependence`]
//!    finds integer coefficients `a` with `Σ a_i·x_i = 0` — exactly, in
//!    rational arithmetic over the model's own floats (every finite float *is*
//!    a rational).
//! 2. [`construct_counterexample`] turns the coefficients into two documents
//!    with different true labels whose summed word vectors are positively
//!    proportional: putting positive terms on one side and negative terms on
//!    the other when signs are mixed, or concatenating a zero-sum document
//!    when they all agree.
//! 3. Any linear classifier scores positively-proportional document vectors
//!    identically (scaling preserves the score order), so it must predict the
//!    same class for both documents — [`demonstrate_failure`] checks this with
//!    an exact rational forward pass and reports the forced error.
//!
//! [`run_demo`] wires the three steps together over a seeded random model.

mod nullspace;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::Document;
use crate::model::{LBoWModel, Matrix, SoftmaxVariant};

/// Ceiling on the total occurrence count of a constructed counterexample
/// document. Dependence coefficients grow like q-dimensional integer minors,
/// so this guards against materializing an absurdly long document when the
/// embedding dimension is large.
pub const MAX_COUNTEREXAMPLE_LEN: u64 = 10_000_000;

/// Errors produced by the adversarial pipeline.
#[derive(Debug, Error)]
pub enum AdversarialError {
    /// The most-frequent-word label of an empty document is undefined.
    #[error("document has no word occurrences")]
    EmptyDocument,
    /// No usable dependence certificate exists for these rows (e.g. the only
    /// kernel direction touches a single word, or all coefficients tie).
    #[error("degenerate dependence certificate: {0}")]
    DegenerateCertificate(String),
    /// The counterexample does not fit the model it was checked against.
    #[error("invalid counterexample: {0}")]
    InvalidCounterexample(String),
    /// The dependence coefficients are too large to materialize as documents.
    #[error("counterexample would need {total} word occurrences (limit {MAX_COUNTEREXAMPLE_LEN})")]
    CounterexampleTooLarge {
        /// Word occurrences the documents would need in total.
        total: BigInt,
    },
}

impl AdversarialError {
    /// Stable machine-readable name of this error case.
    pub fn name(&self) -> &'static str {
        match self {
            AdversarialError::EmptyDocument => "EmptyDocument",
            AdversarialError::DegenerateCertificate(_) => "DegenerateCertificate",
            AdversarialError::InvalidCounterexample(_) => "InvalidCounterexample",
            AdversarialError::CounterexampleTooLarge { .. } => "CounterexampleTooLarge",
        }
    }
}

/// The most-frequent-word problem: `m` words, `m` classes, and the rule that
/// a document's class is its most frequent word (ties to the lowest index).
#[derive(Debug, Clone)]
pub struct MfwProblem {
    words: Vec<String>,
}

impl MfwProblem {
    /// A problem instance over the synthetic vocabulary `w0 … w{m-1}`.
    ///
    /// # Panics
    ///
    /// Panics when `m < 2`.
    pub fn new(m: usize) -> Self {
        assert!(m >= 2, "the most-frequent-word problem needs m >= 2");
        MfwProblem {
            words: (0..m).map(|i| format!("w{i}")).collect(),
        }
    }

    /// Number of words = number of classes.
    pub fn num_classes(&self) -> usize {
        self.words.len()
    }

    /// The synthetic vocabulary, index-aligned with the class labels.
    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// The true label of `doc` under the most-frequent-word rule: the index of
/// the most frequent word, ties broken toward the lowest index.
///
/// # Panics
///
/// Panics when a word index is not below `m`.
pub fn mfw_label(doc: &Document, m: usize) -> Result<usize, AdversarialError> {
    if doc.is_empty() {
        return Err(AdversarialError::EmptyDocument);
    }
    let mut counts = vec![0u64; m];
    for &w in doc.word_indices() {
        assert!(w < m, "word index {w} out of range for m={m}");
        counts[w] += 1;
    }
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = i;
        }
    }
    Ok(best)
}

/// The one-hot classifier that solves the most-frequent-word problem exactly.
///
/// Word `i` gets the `i`-th standard basis vector, so a document's vector is
/// exactly its frequency histogram (each coordinate is `count_i/N`, one
/// correctly-rounded division) and the argmax — lowest index on ties — *is*
/// the most-frequent-word rule.
///
/// # Panics
///
/// Panics when `m < 2`.
pub fn exact_classifier(m: usize) -> LBoWModel {
    let problem = MfwProblem::new(m);
    let mut x = Matrix::zeros(m, m);
    for i in 0..m {
        x.set(i, i, 1.0);
    }
    LBoWModel::new(x, None, problem.words().to_vec(), SoftmaxVariant::Full)
        .expect("identity embeddings always form a valid model")
}

/// Converts a float matrix to exact rationals, row by row.
///
/// Every finite `f64` is a rational number with a power-of-two denominator;
/// the conversion is exact, so downstream rational arithmetic reasons about
/// literally the same matrix the float forward pass uses.
pub fn rational_rows(matrix: &Matrix) -> Vec<Vec<BigRational>> {
    (0..matrix.rows())
        .map(|i| {
            matrix
                .row(i)
                .iter()
                .map(|&v| {
                    BigRational::from_float(v).expect("model entries are finite by invariant")
                })
                .collect()
        })
        .collect()
}

/// Whether the certificate's nonzero coefficients carry one sign or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignCase {
    /// Every nonzero coefficient has the same sign.
    AllSameSign,
    /// Positive and negative coefficients both occur.
    MixedSigns,
}

/// An exact integer linear dependence among embedding rows:
/// `Σ coefficients[i] · rows[i] = 0`, verified in rational arithmetic.
///
/// Canonical form: at least two nonzero coefficients, gcd of the nonzero
/// magnitudes 1, first nonzero coefficient positive.
#[derive(Debug, Clone)]
pub struct DependenceCertificate {
    coefficients: Vec<BigInt>,
    sign_case: SignCase,
    rows: Vec<Vec<BigRational>>,
}

impl DependenceCertificate {
    /// The integer coefficients, one per embedding row.
    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    /// Whether the nonzero coefficients mix signs.
    pub fn sign_case(&self) -> SignCase {
        self.sign_case
    }

    /// The exact rational rows the certificate is stated over.
    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    /// Number of nonzero coefficients.
    pub fn nonzero_count(&self) -> usize {
        self.coefficients.iter().filter(|c| !c.is_zero()).count()
    }

    /// Recomputes `Σ a_i·x_i` in rational arithmetic and checks it is the
    /// zero vector. No tolerance is involved anywhere.
    pub fn verify(&self) -> bool {
        let dim = self.rows.first().map(|r| r.len()).unwrap_or(0);
        let mut sum = vec![BigRational::zero(); dim];
        for (a, row) in self.coefficients.iter().zip(&self.rows) {
            let a = BigRational::from_integer(a.clone());
            for (acc, x) in sum.iter_mut().zip(row) {
                *acc += &a * x;
            }
        }
        sum.iter().all(|v| v.is_zero())
    }

    /// Checks the canonical-form invariants: at least two nonzero
    /// coefficients, gcd 1, and a positive leading nonzero coefficient.
    pub fn is_canonical(&self) -> bool {
        use num_integer::Integer;
        if self.nonzero_count() < 2 {
            return false;
        }
        let mut gcd = BigInt::zero();
        for c in &self.coefficients {
            gcd = gcd.gcd(c);
        }
        if gcd != BigInt::from(1) {
            return false;
        }
        self.coefficients
            .iter()
            .find(|c| !c.is_zero())
            .is_some_and(|c| c.is_positive())
    }
}

/// Finds an exact integer linear dependence among `rows`.
///
/// `rows` are the `m` embedding rows, each of dimension `q < m`; the
/// dependence is guaranteed to exist because `m` vectors in `q` dimensions
/// cannot be linearly independent. The returned certificate is canonical
/// (gcd 1, positive leading coefficient) and deterministic for given rows.
///
/// Certificates need at least two nonzero coefficients to ever produce two
/// distinct documents; when the kernel only offers single-word directions
/// (some embedding row is itself zero and the kernel is one-dimensional),
/// that is reported as [`AdversarialError::DegenerateCertificate`].
///
/// # Panics
///
/// Panics when rows have unequal dimensions or `q >= m`.
pub fn find_integer_dependence(
    rows: &[Vec<BigRational>],
) -> Result<DependenceCertificate, AdversarialError> {
    let m = rows.len();
    assert!(m >= 2, "need at least two rows");
    let q = rows[0].len();
    assert!(
        rows.iter().all(|r| r.len() == q),
        "rows must share one dimension"
    );
    assert!(q < m, "dependence is only guaranteed for q < m");

    // Kernel of the q x m matrix whose i-th column is rows[i].
    let mut transposed = vec![vec![BigRational::zero(); m]; q];
    for (i, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            transposed[c][i] = v.clone();
        }
    }
    let basis = nullspace::kernel_basis(&transposed, m);
    assert!(!basis.is_empty(), "q < m guarantees a nontrivial kernel");

    let nonzeros = |v: &[BigRational]| v.iter().filter(|x| !x.is_zero()).count();

    // Prefer the first basis vector already touching two words; failing
    // that, add two single-word directions together (their free columns
    // differ, so the sum touches both). A single one-dimensional single-word
    // kernel means some embedding row is exactly zero — no two-word
    // dependence exists.
    let chosen: Vec<BigRational> = if let Some(v) = basis.iter().find(|v| nonzeros(v) >= 2) {
        v.clone()
    } else if basis.len() >= 2 {
        basis[0]
            .iter()
            .zip(&basis[1])
            .map(|(a, b)| a + b)
            .collect()
    } else {
        return Err(AdversarialError::DegenerateCertificate(
            "kernel is spanned by a single-word direction".to_string(),
        ));
    };

    let coefficients = nullspace::integerize(&chosen);
    let has_pos = coefficients.iter().any(|c| c.is_positive());
    let has_neg = coefficients.iter().any(|c| c.is_negative());
    let cert = DependenceCertificate {
        coefficients,
        sign_case: if has_pos && has_neg {
            SignCase::MixedSigns
        } else {
            SignCase::AllSameSign
        },
        rows: rows.to_vec(),
    };
    debug_assert!(cert.verify(), "emitted certificate must verify exactly");
    debug_assert!(cert.is_canonical(), "emitted certificate must be canonical");
    Ok(cert)
}

/// Two documents with different true labels that any classifier over the
/// certified embeddings must label identically.
#[derive(Debug, Clone)]
pub struct Counterexample {
    /// The left document.
    pub doc_left: Document,
    /// The right document.
    pub doc_right: Document,
    /// Most-frequent-word label of `doc_left`.
    pub true_label_left: usize,
    /// Most-frequent-word label of `doc_right` (differs from the left).
    pub true_label_right: usize,
    /// The common summed word vector of the two documents, up to positive
    /// scale, in exact rationals.
    pub shared_direction: Vec<BigRational>,
}

fn occurrences_of(counts: &[u64]) -> Vec<usize> {
    let mut indices = Vec::new();
    for (w, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            indices.push(w);
        }
    }
    indices
}

/// Converts exact per-word counts to `u64` after checking the documents
/// would fit under [`MAX_COUNTEREXAMPLE_LEN`] occurrences in total.
fn materializable_counts(counts: &[BigInt]) -> Result<Vec<u64>, AdversarialError> {
    let total: BigInt = counts.iter().sum();
    if total > BigInt::from(MAX_COUNTEREXAMPLE_LEN) {
        return Err(AdversarialError::CounterexampleTooLarge { total });
    }
    Ok(counts
        .iter()
        .map(|c| c.to_u64().expect("bounded by the total check"))
        .collect())
}

/// Exact rational sum `Σ counts[i] · rows[i]`.
fn weighted_rational_sum(counts: &[u64], rows: &[Vec<BigRational>]) -> Vec<BigRational> {
    let dim = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut sum = vec![BigRational::zero(); dim];
    for (&c, row) in counts.iter().zip(rows) {
        if c == 0 {
            continue;
        }
        let c = BigRational::from_integer(BigInt::from(c));
        for (acc, x) in sum.iter_mut().zip(row) {
            *acc += &c * x;
        }
    }
    sum
}

/// Builds the document pair a dependence certificate forces errors on.
///
/// * **Mixed signs**: the positive coefficients become the left document
///   (word `j` repeated `a_j` times) and the negated negative ones the right.
///   The word sets are disjoint — so the most-frequent-word labels differ —
///   and `Σ a_i·x_i = 0` makes the two summed word vectors exactly equal.
/// * **One sign**: the whole certificate is a zero-sum document `d_0`.
///   The left document is a single word `s` chosen with a smaller
///   coefficient than `d_0`'s top word `t`; the right document is that word
///   followed by `k` copies of `d_0`, with `k ∈ {1, 2}` the minimal count
///   (under the tie rule) making `t` the right document's most frequent
///   word. Concatenating a zero-sum document changes the sum by nothing, so
///   the sums differ only by the positive factor `N_right/N_left`.
///
/// When every coefficient is equal, no word can be promoted past the tied
/// top word and no counterexample exists — such models genuinely solve the
/// problem — reported as [`AdversarialError::DegenerateCertificate`].
pub fn construct_counterexample(
    cert: &DependenceCertificate,
    problem: &MfwProblem,
) -> Result<Counterexample, AdversarialError> {
    let m = problem.num_classes();
    assert_eq!(
        cert.coefficients().len(),
        m,
        "certificate and problem must agree on m"
    );

    match cert.sign_case() {
        SignCase::MixedSigns => {
            let mut exact = vec![BigInt::zero(); 2 * m];
            for (w, c) in cert.coefficients().iter().enumerate() {
                if c.is_positive() {
                    exact[w] = c.clone();
                } else if c.is_negative() {
                    exact[m + w] = c.abs();
                }
            }
            let both = materializable_counts(&exact)?;
            let (left_counts, right_counts) = both.split_at(m);
            let doc_left = Document::new(occurrences_of(left_counts), None);
            let doc_right = Document::new(occurrences_of(right_counts), None);
            let true_label_left = mfw_label(&doc_left, m)?;
            let true_label_right = mfw_label(&doc_right, m)?;
            let shared_direction = weighted_rational_sum(left_counts, cert.rows());
            debug_assert_eq!(
                shared_direction,
                weighted_rational_sum(right_counts, cert.rows()),
                "mixed-sign sums must be exactly equal"
            );
            Ok(Counterexample {
                doc_left,
                doc_right,
                true_label_left,
                true_label_right,
                shared_direction,
            })
        }
        SignCase::AllSameSign => {
            // Canonical form makes all nonzero coefficients positive: the
            // certificate itself is a zero-sum document d_0, whose top word
            // (lowest index on ties) is t.
            let a = cert.coefficients();
            let mut t = 0;
            for w in 1..m {
                if a[w] > a[t] {
                    t = w;
                }
            }

            // The left document is one word s with a strictly smaller
            // coefficient than t's; concatenation can then promote t past it.
            let Some(s) = (0..m).find(|&w| a[w] < a[t]) else {
                return Err(AdversarialError::DegenerateCertificate(
                    "all coefficients are equal; no word can dominate".to_string(),
                ));
            };

            // Right-document counts are k·a_i plus one extra s. k = 1 works
            // unless s would tie t at k = 1 and win the tie on index.
            let one = BigInt::from(1);
            let k = if t < s || &a[s] + &one < a[t] { 1u32 } else { 2 };

            let mut exact: Vec<BigInt> = a.iter().map(|c| c * BigInt::from(k)).collect();
            exact[s] += &one;
            let right_counts = materializable_counts(&exact)?;

            let doc_left = Document::new(vec![s], None);
            let doc_right = Document::new(occurrences_of(&right_counts), None);
            let true_label_left = s;
            let true_label_right = mfw_label(&doc_right, m)?;
            debug_assert_eq!(true_label_right, t, "concatenation must promote t");

            Ok(Counterexample {
                doc_left,
                doc_right,
                true_label_left,
                true_label_right,
                shared_direction: cert.rows()[s].clone(),
            })
        }
    }
}

/// The forced error a counterexample produces on a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FailureReport {
    /// The class the model assigns to *both* documents.
    pub predicted: usize,
    /// True label of the left document.
    pub true_label_left: usize,
    /// True label of the right document.
    pub true_label_right: usize,
}

impl FailureReport {
    /// How many of the two documents are misclassified (always at least 1:
    /// one prediction cannot match two different truths).
    pub fn misclassified_count(&self) -> usize {
        usize::from(self.predicted != self.true_label_left)
            + usize::from(self.predicted != self.true_label_right)
    }
}

/// Exact rational document vector: `Σ (count_w/N) · emb[w]`.
fn rational_document_vector(emb: &[Vec<BigRational>], doc: &Document) -> Vec<BigRational> {
    let dim = emb.first().map(|r| r.len()).unwrap_or(0);
    let n = BigInt::from(doc.len());
    let mut y = vec![BigRational::zero(); dim];
    for (w, c) in doc.index_counts() {
        let weight = BigRational::new(BigInt::from(c), n.clone());
        for (acc, x) in y.iter_mut().zip(&emb[w]) {
            *acc += &weight * x;
        }
    }
    y
}

fn rational_argmax(scores: &[BigRational]) -> usize {
    let mut best = 0;
    for (i, v) in scores.iter().enumerate().skip(1) {
        if v > &scores[best] {
            best = i;
        }
    }
    best
}

/// Checks `left = λ·right` for some exact rational λ > 0 (zero vectors count
/// as proportional to each other only).
fn positively_proportional(left: &[BigRational], right: &[BigRational]) -> bool {
    if left.len() != right.len() {
        return false;
    }
    let Some(i) = right.iter().position(|v| !v.is_zero()) else {
        return left.iter().all(|v| v.is_zero());
    };
    if left[i].is_zero() {
        return false;
    }
    let lambda = &left[i] / &right[i];
    if !lambda.is_positive() {
        return false;
    }
    left.iter()
        .zip(right)
        .all(|(l, r)| *l == &lambda * r)
}

/// Evaluates both counterexample documents on the model and reports the
/// forced error.
///
/// The model's word-vector dimension must be `q < m` and the counterexample
/// must have been built over this model's embeddings. Scoring runs in exact
/// rational arithmetic (the model's floats converted exactly), so "equal
/// predictions" is checked with zero tolerance: the two document vectors are
/// positively proportional, a linear score map preserves that, and
/// proportional scores have the same argmax under the same tie rule. A
/// prediction mismatch therefore signals a broken counterexample — reported
/// as [`AdversarialError::InvalidCounterexample`] — never float luck.
pub fn demonstrate_failure(
    model: &LBoWModel,
    cx: &Counterexample,
) -> Result<FailureReport, AdversarialError> {
    let q = model.dim();
    let m = model.num_classes();
    if cx.shared_direction.len() != q {
        return Err(AdversarialError::InvalidCounterexample(format!(
            "counterexample is over {}-dimensional embeddings, model has q={q}",
            cx.shared_direction.len()
        )));
    }
    let max_index = cx
        .doc_left
        .word_indices()
        .iter()
        .chain(cx.doc_right.word_indices())
        .max()
        .copied()
        .unwrap_or(0);
    if max_index >= model.vocab_size() {
        return Err(AdversarialError::InvalidCounterexample(format!(
            "document mentions word {max_index}, model only has {}",
            model.vocab_size()
        )));
    }
    if cx.true_label_left == cx.true_label_right {
        return Err(AdversarialError::InvalidCounterexample(
            "true labels do not differ".to_string(),
        ));
    }

    let emb = rational_rows(model.embeddings());
    let y_left = rational_document_vector(&emb, &cx.doc_left);
    let y_right = rational_document_vector(&emb, &cx.doc_right);
    if !positively_proportional(&y_left, &y_right) {
        return Err(AdversarialError::InvalidCounterexample(
            "document vectors are not positively proportional over this model".to_string(),
        ));
    }
    if !(positively_proportional(&y_left, &cx.shared_direction)
        || y_left.iter().all(|v| v.is_zero()))
    {
        return Err(AdversarialError::InvalidCounterexample(
            "document vectors do not follow the certified shared direction".to_string(),
        ));
    }

    let scores = |y: &[BigRational]| -> Vec<BigRational> {
        match (model.hidden(), model.variant()) {
            (Some(b), _) => {
                let b = rational_rows(b);
                b.iter()
                    .map(|row| {
                        let mut acc = BigRational::zero();
                        for (a, v) in row.iter().zip(y) {
                            acc += a * v;
                        }
                        acc
                    })
                    .collect()
            }
            (None, SoftmaxVariant::Reduced) => {
                let mut s = y.to_vec();
                s.push(BigRational::zero());
                s
            }
            (None, SoftmaxVariant::Full) => y.to_vec(),
        }
    };

    let pred_left = rational_argmax(&scores(&y_left));
    let pred_right = rational_argmax(&scores(&y_right));
    if pred_left != pred_right {
        return Err(AdversarialError::InvalidCounterexample(format!(
            "predictions differ ({pred_left} vs {pred_right}); the certificate is broken"
        )));
    }
    debug_assert!(
        mfw_label(&cx.doc_left, m).is_ok_and(|l| l == cx.true_label_left)
            && mfw_label(&cx.doc_right, m).is_ok_and(|l| l == cx.true_label_right),
        "stored true labels must match the labeling rule"
    );

    Ok(FailureReport {
        predicted: pred_left,
        true_label_left: cx.true_label_left,
        true_label_right: cx.true_label_right,
    })
}

/// Everything one end-to-end demonstration produces.
#[derive(Debug, Clone)]
pub struct AdversarialDemo {
    /// The under-dimensioned random model.
    pub model: LBoWModel,
    /// The exact dependence among its word vectors.
    pub certificate: DependenceCertificate,
    /// The document pair the dependence forces together.
    pub counterexample: Counterexample,
    /// The forced error.
    pub report: FailureReport,
}

/// Grid resolution for random dyadic embeddings, graded so that dependence
/// coefficients (which grow like q×q integer minors) stay small enough to
/// materialize as documents.
fn grid_exponent(q: usize) -> u32 {
    match q {
        0..=2 => 8,
        3 => 5,
        4 => 4,
        5 => 3,
        6 | 7 => 2,
        _ => 1,
    }
}

/// Runs the whole pipeline on a seeded random model: build an `m`-class
/// model with `q`-dimensional word vectors and a random hidden layer, find
/// the dependence, construct the counterexample, and demonstrate the forced
/// error.
///
/// Embedding entries are drawn from a dyadic grid (`k/2^e`, exactly
/// representable as floats), so the rational pipeline certifies literally
/// the float matrix the model computes with.
///
/// # Panics
///
/// Panics when `m < 2` or `q` is not in `1..m`.
pub fn run_demo(m: usize, q: usize, seed: u64) -> Result<AdversarialDemo, AdversarialError> {
    assert!(m >= 2, "need m >= 2 classes");
    assert!(q >= 1 && q < m, "need word-vector dimension 1 <= q < m");
    let problem = MfwProblem::new(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let denom = 1i64 << grid_exponent(q);
    let x = Matrix::from_vec(
        m,
        q,
        (0..m * q)
            .map(|_| rng.random_range(-denom..=denom) as f64 / denom as f64)
            .collect(),
    );
    let b = Matrix::from_vec(
        m,
        q,
        (0..m * q).map(|_| rng.random_range(-1.0..1.0)).collect(),
    );
    let model = LBoWModel::new(x, Some(b), problem.words().to_vec(), SoftmaxVariant::Full)
        .expect("demo shapes are valid by construction");

    let certificate = find_integer_dependence(&rational_rows(model.embeddings()))?;
    let counterexample = construct_counterexample(&certificate, &problem)?;
    let report = demonstrate_failure(&model, &counterexample)?;
    Ok(AdversarialDemo {
        model,
        certificate,
        counterexample,
        report,
    })
}
