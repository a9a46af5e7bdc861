//! Text ingestion: tokenization, vocabulary construction, and document encoding.
//!
//! The pipeline is deliberately small and deterministic:
//!
//! 1. [`tokenize`] splits raw text on Unicode whitespace, optionally lowercasing.
//! 2. [`build_vocabulary`] assigns dense indices to words in order of first
//!    appearance, dropping words rarer than a minimum count.
//! 3. [`encode_document`] maps a token sequence to a [`Document`] of word
//!    indices, silently dropping out-of-vocabulary tokens.
//!
//! Labeled corpora use one document per line with a `__label__<name>` token
//! (see [`parse_labeled_line`]); [`load_training_data`] drives the whole
//! pipeline over such a file and produces a [`Dataset`].

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use thiserror::Error;

/// Prefix marking a label token in the line-oriented corpus format.
pub const LABEL_PREFIX: &str = "__label__";

/// Errors produced by corpus construction and encoding.
#[derive(Debug, Error)]
pub enum CorpusError {
    /// No word in the corpus met the minimum count threshold.
    #[error("no word meets the minimum count threshold; vocabulary would be empty")]
    EmptyVocabulary,
    /// A document contained no in-vocabulary tokens.
    #[error("document has no in-vocabulary tokens")]
    EmptyDocument,
    /// A label name was not present in the dataset's label list.
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    /// A line that must carry a label did not contain one.
    #[error("line has no {LABEL_PREFIX} token")]
    MissingLabel,
    /// A line contained more than one label token.
    #[error("line has more than one {LABEL_PREFIX} token")]
    DuplicateLabel,
    /// A label token had an empty name (the bare prefix).
    #[error("label token has an empty name")]
    EmptyLabelName,
    /// A training corpus defined fewer than two distinct labels.
    #[error("training data defines {0} label(s); at least 2 are required")]
    TooFewLabels(usize),
    /// An underlying I/O failure while reading a corpus.
    #[error("i/o error reading corpus: {0}")]
    Io(#[from] std::io::Error),
    /// An error attributed to a specific 1-based input line.
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<CorpusError>,
    },
}

impl CorpusError {
    /// Stable machine-readable name of this error case.
    ///
    /// Line-context wrappers report the name of the underlying error.
    pub fn name(&self) -> &'static str {
        match self {
            CorpusError::EmptyVocabulary => "EmptyVocabulary",
            CorpusError::EmptyDocument => "EmptyDocument",
            CorpusError::UnknownLabel(_) => "UnknownLabel",
            CorpusError::MissingLabel => "MissingLabel",
            CorpusError::DuplicateLabel => "DuplicateLabel",
            CorpusError::EmptyLabelName => "EmptyLabelName",
            CorpusError::TooFewLabels(_) => "TooFewLabels",
            CorpusError::Io(_) => "Io",
            CorpusError::Line { source, .. } => source.name(),
        }
    }

    fn at_line(self, line: usize) -> CorpusError {
        CorpusError::Line {
            line,
            source: Box::new(self),
        }
    }
}

/// Splits text into tokens on Unicode whitespace.
///
/// No punctuation stripping or other normalization is performed; when
/// `lowercase` is set each token is mapped through [`str::to_lowercase`].
pub fn tokenize(text: &str, lowercase: bool) -> Vec<String> {
    text.split_whitespace()
        .map(|t| {
            if lowercase {
                t.to_lowercase()
            } else {
                t.to_string()
            }
        })
        .collect()
}

/// A fixed word list with dense indices and corpus frequencies.
///
/// Indices are assigned in order of first appearance in the corpus, so
/// vocabulary construction is deterministic for a given corpus order.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
    counts: Vec<u64>,
}

impl Vocabulary {
    /// Number of words in the vocabulary.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// True when the vocabulary holds no words.
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// All words, in index order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// The word stored at `index`.
    ///
    /// # Panics
    ///
    /// Panics when `index` is out of range.
    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }

    /// The dense index of `word`, if present.
    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// The corpus frequency of `word`, if present.
    pub fn count_of(&self, word: &str) -> Option<u64> {
        self.index_of(word).map(|i| self.counts[i])
    }

    /// Corpus frequencies, in index order.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Builds a [`Vocabulary`] from tokenized documents.
///
/// Words are counted across the whole corpus; words occurring fewer than
/// `min_count` times are dropped. Surviving words receive indices in order of
/// first appearance. Returns [`CorpusError::EmptyVocabulary`] when nothing
/// survives the threshold.
pub fn build_vocabulary(corpus: &[Vec<String>], min_count: u64) -> Result<Vocabulary, CorpusError> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    // First-appearance order over the raw corpus; filtered below.
    let mut order: Vec<&str> = Vec::new();
    for doc in corpus {
        for token in doc {
            let count = counts.entry(token.as_str()).or_insert(0);
            if *count == 0 {
                order.push(token.as_str());
            }
            *count += 1;
        }
    }

    let mut words = Vec::new();
    let mut index = HashMap::new();
    let mut kept_counts = Vec::new();
    for word in order {
        let count = counts[word];
        if count >= min_count {
            index.insert(word.to_string(), words.len());
            words.push(word.to_string());
            kept_counts.push(count);
        }
    }
    if words.is_empty() {
        return Err(CorpusError::EmptyVocabulary);
    }
    Ok(Vocabulary {
        words,
        index,
        counts: kept_counts,
    })
}

/// A document encoded as a sequence of word indices, with an optional label.
///
/// One entry per word occurrence; the original token order is preserved.
/// Classification itself only depends on occurrence counts, so permuting a
/// document never changes any downstream result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    word_indices: Vec<usize>,
    label: Option<usize>,
}

impl Document {
    /// Wraps a raw index sequence and optional label index.
    pub fn new(word_indices: Vec<usize>, label: Option<usize>) -> Self {
        Document {
            word_indices,
            label,
        }
    }

    /// Number of word occurrences (the document length `N`).
    pub fn len(&self) -> usize {
        self.word_indices.len()
    }

    /// True when the document holds no occurrences.
    pub fn is_empty(&self) -> bool {
        self.word_indices.is_empty()
    }

    /// The occurrence sequence, in original order.
    pub fn word_indices(&self) -> &[usize] {
        &self.word_indices
    }

    /// The label index, if the document is labeled.
    pub fn label(&self) -> Option<usize> {
        self.label
    }

    /// Returns a copy with the label replaced.
    pub fn with_label(&self, label: Option<usize>) -> Document {
        Document {
            word_indices: self.word_indices.clone(),
            label,
        }
    }

    /// Occurrence counts per distinct word index, in ascending index order.
    pub fn index_counts(&self) -> Vec<(usize, u64)> {
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for &w in &self.word_indices {
            *counts.entry(w).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }

    /// The document concatenated with itself `k` times (`k >= 1`).
    ///
    /// # Panics
    ///
    /// Panics when `k` is zero.
    pub fn repeat(&self, k: usize) -> Document {
        assert!(k >= 1, "repetition count must be at least 1");
        let mut word_indices = Vec::with_capacity(self.word_indices.len() * k);
        for _ in 0..k {
            word_indices.extend_from_slice(&self.word_indices);
        }
        Document {
            word_indices,
            label: self.label,
        }
    }
}

/// Core of document encoding: maps tokens to indices via `lookup`, dropping
/// tokens for which `lookup` returns `None`.
///
/// Returns [`CorpusError::EmptyDocument`] when nothing survives.
pub fn encode_tokens_with<F>(tokens: &[String], lookup: F) -> Result<Vec<usize>, CorpusError>
where
    F: Fn(&str) -> Option<usize>,
{
    let word_indices: Vec<usize> = tokens.iter().filter_map(|t| lookup(t)).collect();
    if word_indices.is_empty() {
        return Err(CorpusError::EmptyDocument);
    }
    Ok(word_indices)
}

/// Encodes a tokenized document against a vocabulary and label list.
///
/// Out-of-vocabulary tokens are dropped (callers wanting a dropped-token count
/// can compare lengths). `label`, when given, must name an entry of `labels`;
/// otherwise [`CorpusError::UnknownLabel`] is returned. A document whose
/// tokens are all out-of-vocabulary yields [`CorpusError::EmptyDocument`].
pub fn encode_document(
    tokens: &[String],
    vocabulary: &Vocabulary,
    label: Option<&str>,
    labels: &[String],
) -> Result<Document, CorpusError> {
    let label_index = match label {
        Some(name) => Some(
            labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| CorpusError::UnknownLabel(name.to_string()))?,
        ),
        None => None,
    };
    let word_indices = encode_tokens_with(tokens, |t| vocabulary.index_of(t))?;
    Ok(Document::new(word_indices, label_index))
}

/// One parsed line of the labeled corpus format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLine {
    /// Label name (without the `__label__` prefix), when present.
    pub label: Option<String>,
    /// Tokenized text with the label token removed.
    pub tokens: Vec<String>,
}

/// Parses one line of the labeled corpus format.
///
/// A token starting with [`LABEL_PREFIX`] names the line's label and may
/// appear anywhere in the line. At most one label token is allowed
/// ([`CorpusError::DuplicateLabel`] otherwise), and the name after the prefix
/// must be nonempty. Label names are taken verbatim; only the text tokens are
/// subject to `lowercase`.
pub fn parse_labeled_line(line: &str, lowercase: bool) -> Result<ParsedLine, CorpusError> {
    let mut label: Option<String> = None;
    let mut tokens = Vec::new();
    for raw in line.split_whitespace() {
        if let Some(name) = raw.strip_prefix(LABEL_PREFIX) {
            if name.is_empty() {
                return Err(CorpusError::EmptyLabelName);
            }
            if label.is_some() {
                return Err(CorpusError::DuplicateLabel);
            }
            label = Some(name.to_string());
        } else if lowercase {
            tokens.push(raw.to_lowercase());
        } else {
            tokens.push(raw.to_string());
        }
    }
    Ok(ParsedLine { label, tokens })
}

/// A labeled, encoded corpus ready for training.
#[derive(Debug, Clone)]
pub struct Dataset {
    vocabulary: Vocabulary,
    documents: Vec<Document>,
    labels: Vec<String>,
}

impl Dataset {
    /// Assembles a dataset, checking the label set and document labels.
    ///
    /// Requires at least two distinct labels and a label on every document.
    pub fn new(
        vocabulary: Vocabulary,
        documents: Vec<Document>,
        labels: Vec<String>,
    ) -> Result<Self, CorpusError> {
        if labels.len() < 2 {
            return Err(CorpusError::TooFewLabels(labels.len()));
        }
        for doc in &documents {
            match doc.label() {
                None => return Err(CorpusError::MissingLabel),
                Some(l) => {
                    // Encoding can only produce indices into the label list,
                    // so anything else is a construction bug.
                    assert!(l < labels.len(), "document label index out of range");
                }
            }
        }
        Ok(Dataset {
            vocabulary,
            documents,
            labels,
        })
    }

    /// The vocabulary shared by all documents.
    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    /// The encoded documents.
    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    /// Label names, in index order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of classes.
    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }
}

/// Counters describing a corpus load.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadSummary {
    /// Lines that produced a document.
    pub documents: usize,
    /// Blank lines skipped.
    pub blank_lines: usize,
    /// Tokens dropped for being out-of-vocabulary.
    pub oov_dropped: usize,
}

/// Reads a labeled training corpus (one document per line) and encodes it.
///
/// Every non-blank line must carry exactly one label token. The vocabulary is
/// built from the text tokens with the given `min_count`; labels are indexed
/// in order of first appearance and at least two distinct labels are required.
/// Documents left empty by vocabulary pruning are rejected (with their line
/// number) rather than silently skipped.
pub fn load_training_data(
    reader: impl BufRead,
    min_count: u64,
    lowercase: bool,
) -> Result<(Dataset, LoadSummary), CorpusError> {
    // (line number, label name, tokens) per non-blank line.
    let mut lines: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut summary = LoadSummary::default();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            summary.blank_lines += 1;
            continue;
        }
        let parsed = parse_labeled_line(&line, lowercase).map_err(|e| e.at_line(lineno))?;
        let label = parsed
            .label
            .ok_or(CorpusError::MissingLabel)
            .map_err(|e| e.at_line(lineno))?;
        lines.push((lineno, label, parsed.tokens));
    }

    let token_docs: Vec<Vec<String>> = lines.iter().map(|(_, _, t)| t.clone()).collect();
    let vocabulary = build_vocabulary(&token_docs, min_count)?;

    let mut labels: Vec<String> = Vec::new();
    for (_, label, _) in &lines {
        if !labels.contains(label) {
            labels.push(label.clone());
        }
    }
    if labels.len() < 2 {
        return Err(CorpusError::TooFewLabels(labels.len()));
    }

    let mut documents = Vec::with_capacity(lines.len());
    for (lineno, label, tokens) in &lines {
        let doc = encode_document(tokens, &vocabulary, Some(label), &labels)
            .map_err(|e| e.at_line(*lineno))?;
        summary.oov_dropped += tokens.len() - doc.len();
        documents.push(doc);
    }
    summary.documents = documents.len();

    let dataset = Dataset::new(vocabulary, documents, labels)?;
    Ok((dataset, summary))
}
