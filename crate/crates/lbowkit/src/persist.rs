//! Versioned binary model files.
//!
//! A model file bundles everything prediction needs: the class labels, the
//! vocabulary in index order, the embedding matrix, and the optional hidden
//! layer — wrapped as a [`TextClassifier`]. The format is little-endian and
//! fixed-width with an explicit magic/version header, so a write→read→write
//! cycle is byte-identical (float bit patterns round-trip untouched) and the
//! round trip itself serves as a test oracle.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic         8 bytes   "LBOWKIT\0"
//! version       u32       1
//! m             u32       number of classes
//! n             u32       word-vector dimension
//! d             u32       vocabulary size
//! flags         u32       bit 0 = has hidden layer, bit 1 = reduced softmax
//! labels        m strings (u32 byte length + UTF-8 bytes)
//! vocabulary    d strings (u32 byte length + UTF-8 bytes), index order
//! X             d·n f64, row-major
//! B             m·n f64, row-major — present iff bit 0 is set
//! ```
//!
//! Readers validate the header — magic, version, flag exclusivity, and the
//! dimension rules (reduced ⇒ `n = m−1`; no hidden and full softmax ⇒
//! `n = m`) — before allocating anything sized by the file's claims, and
//! every block is length-checked before it is read.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::corpus::{encode_tokens_with, CorpusError, Document};
use crate::model::{LBoWModel, Matrix, ModelError, SoftmaxVariant};

/// The 8 magic bytes opening every model file.
pub const MAGIC: [u8; 8] = *b"LBOWKIT\0";

/// The one format version this library reads and writes.
pub const FORMAT_VERSION: u32 = 1;

const FLAG_HAS_HIDDEN: u32 = 1 << 0;
const FLAG_REDUCED: u32 = 1 << 1;

/// Errors produced when reading or writing model files.
#[derive(Debug, Error)]
pub enum PersistError {
    /// The file does not start with [`MAGIC`].
    #[error("not a model file (bad magic bytes)")]
    BadMagic,
    /// The file's format version is one this library does not read.
    #[error("unsupported format version {0} (this library reads version {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    /// The header's dimensions or flags contradict each other.
    #[error("corrupt dimensions: {0}")]
    CorruptDimensions(String),
    /// The file ends before a declared block does.
    #[error("truncated file: missing {missing} bytes of {what}")]
    TruncatedFile {
        /// Which block the missing bytes belong to.
        what: &'static str,
        /// How many bytes short the file is.
        missing: usize,
    },
    /// The file continues past the end of the model payload.
    #[error("{0} trailing bytes after the model payload")]
    TrailingBytes(usize),
    /// The flags field has bits set that this format version does not define.
    #[error("unknown flag bits {0:#010x}")]
    UnexpectedFlags(u32),
    /// A label or vocabulary entry is not valid UTF-8.
    #[error("{0} is not valid UTF-8")]
    InvalidString(&'static str),
    /// The underlying file could not be read or written.
    #[error(transparent)]
    Io(#[from] io::Error),
    /// The decoded payload does not form a valid model.
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl PersistError {
    /// Stable machine-readable name of this error case.
    pub fn name(&self) -> &'static str {
        match self {
            PersistError::BadMagic => "BadMagic",
            PersistError::UnsupportedVersion(_) => "UnsupportedVersion",
            PersistError::CorruptDimensions(_) => "CorruptDimensions",
            PersistError::TruncatedFile { .. } => "TruncatedFile",
            PersistError::TrailingBytes(_) => "TrailingBytes",
            PersistError::UnexpectedFlags(_) => "UnexpectedFlags",
            PersistError::InvalidString(_) => "InvalidString",
            PersistError::Io(_) => "Io",
            PersistError::Model(e) => e.name(),
        }
    }
}

/// A model plus the vocabulary it was trained over — the unit that model
/// files store, and everything needed to classify raw text.
#[derive(Debug, Clone)]
pub struct TextClassifier {
    words: Vec<String>,
    index: HashMap<String, usize>,
    model: LBoWModel,
}

impl TextClassifier {
    /// Bundles a model with its vocabulary.
    ///
    /// `words` must be distinct and index-aligned with the model's embedding
    /// rows (one word per row).
    pub fn new(words: Vec<String>, model: LBoWModel) -> Result<Self, PersistError> {
        if words.len() != model.vocab_size() {
            return Err(PersistError::CorruptDimensions(format!(
                "{} vocabulary words for {} embedding rows",
                words.len(),
                model.vocab_size()
            )));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(PersistError::CorruptDimensions(format!(
                    "vocabulary word {w:?} appears twice"
                )));
            }
        }
        Ok(TextClassifier {
            words,
            index,
            model,
        })
    }

    /// The vocabulary, in embedding-row order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// The underlying model.
    pub fn model(&self) -> &LBoWModel {
        &self.model
    }

    /// Index of `word`, if it is in the vocabulary.
    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Encodes tokens against this vocabulary, dropping out-of-vocabulary
    /// tokens; errors when nothing survives.
    pub fn encode(&self, tokens: &[String]) -> Result<Document, CorpusError> {
        let indices = encode_tokens_with(tokens, |t| self.word_index(t))?;
        Ok(Document::new(indices, None))
    }

    /// Bitwise equality of vocabulary, labels, and parameters.
    pub fn bitwise_eq(&self, other: &TextClassifier) -> bool {
        self.words == other.words && self.model.bitwise_eq(&other.model)
    }
}

fn u32_field(value: usize, what: &'static str) -> Result<u32, PersistError> {
    u32::try_from(value)
        .map_err(|_| PersistError::CorruptDimensions(format!("{what} {value} exceeds u32 range")))
}

fn push_string(buf: &mut Vec<u8>, s: &str, what: &'static str) -> Result<(), PersistError> {
    buf.extend_from_slice(&u32_field(s.len(), what)?.to_le_bytes());
    buf.extend_from_slice(s.as_bytes());
    Ok(())
}

/// Serializes a classifier to the binary model format.
pub fn to_bytes(classifier: &TextClassifier) -> Result<Vec<u8>, PersistError> {
    let model = classifier.model();
    let m = model.num_classes();
    let n = model.dim();
    let d = model.vocab_size();
    let mut flags = 0u32;
    if model.hidden().is_some() {
        flags |= FLAG_HAS_HIDDEN;
    }
    if model.variant() == SoftmaxVariant::Reduced {
        flags |= FLAG_REDUCED;
    }

    let mut buf = Vec::new();
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&u32_field(m, "class count")?.to_le_bytes());
    buf.extend_from_slice(&u32_field(n, "dimension")?.to_le_bytes());
    buf.extend_from_slice(&u32_field(d, "vocabulary size")?.to_le_bytes());
    buf.extend_from_slice(&flags.to_le_bytes());
    for label in model.labels() {
        push_string(&mut buf, label, "label length")?;
    }
    for word in classifier.words() {
        push_string(&mut buf, word, "word length")?;
    }
    for &v in model.embeddings().data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(b) = model.hidden() {
        for &v in b.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(buf)
}

/// A length-checking cursor over the file image: every read states what it
/// is for, so truncation errors name the missing block.
struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize, what: &'static str) -> Result<&'a [u8], PersistError> {
        let available = self.buf.len() - self.pos;
        if available < len {
            return Err(PersistError::TruncatedFile {
                what,
                missing: len - available,
            });
        }
        let slice = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(slice)
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, PersistError> {
        let bytes = self.take(4, what)?;
        Ok(u32::from_le_bytes(bytes.try_into().expect("4 bytes")))
    }

    fn string(&mut self, what: &'static str) -> Result<String, PersistError> {
        let len = self.u32(what)? as usize;
        let bytes = self.take(len, what)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| PersistError::InvalidString(what))
    }

    fn f64_block(&mut self, count: usize, what: &'static str) -> Result<Vec<f64>, PersistError> {
        let bytes = self.take(count.checked_mul(8).expect("block size"), what)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

/// Deserializes a classifier from the binary model format.
pub fn from_bytes(bytes: &[u8]) -> Result<TextClassifier, PersistError> {
    let mut cur = Cursor {
        buf: bytes,
        pos: 0,
    };

    if cur.take(MAGIC.len(), "magic bytes")? != MAGIC {
        return Err(PersistError::BadMagic);
    }
    let version = cur.u32("format version")?;
    if version != FORMAT_VERSION {
        return Err(PersistError::UnsupportedVersion(version));
    }
    let m = cur.u32("class count")? as usize;
    let n = cur.u32("dimension")? as usize;
    let d = cur.u32("vocabulary size")? as usize;
    let flags = cur.u32("flags")?;

    let unknown = flags & !(FLAG_HAS_HIDDEN | FLAG_REDUCED);
    if unknown != 0 {
        return Err(PersistError::UnexpectedFlags(unknown));
    }
    let has_hidden = flags & FLAG_HAS_HIDDEN != 0;
    let reduced = flags & FLAG_REDUCED != 0;
    if has_hidden && reduced {
        return Err(PersistError::CorruptDimensions(
            "hidden-layer and reduced-softmax flags are mutually exclusive".to_string(),
        ));
    }
    if m < 2 {
        return Err(PersistError::CorruptDimensions(format!(
            "class count {m} is below 2"
        )));
    }
    if d == 0 {
        return Err(PersistError::CorruptDimensions(
            "empty vocabulary".to_string(),
        ));
    }
    if n == 0 {
        return Err(PersistError::CorruptDimensions(
            "zero-dimensional word vectors".to_string(),
        ));
    }
    if reduced && n != m - 1 {
        return Err(PersistError::CorruptDimensions(format!(
            "reduced softmax requires dimension {} for {m} classes, file says {n}",
            m - 1
        )));
    }
    if !has_hidden && !reduced && n != m {
        return Err(PersistError::CorruptDimensions(format!(
            "a hidden-free full-softmax model requires dimension {m} for {m} classes, file says {n}"
        )));
    }
    // The declared payload must fit in the file before any block of it is
    // allocated; string lengths are checked entry by entry below.
    let float_bytes = d
        .checked_mul(n)
        .and_then(|xs| {
            if has_hidden {
                m.checked_mul(n).map(|bs| xs + bs)
            } else {
                Some(xs)
            }
        })
        .and_then(|floats| floats.checked_mul(8))
        .ok_or_else(|| {
            PersistError::CorruptDimensions("declared matrix sizes overflow".to_string())
        })?;
    if float_bytes > bytes.len() {
        return Err(PersistError::TruncatedFile {
            what: "matrix blocks",
            missing: float_bytes - bytes.len(),
        });
    }

    let labels: Vec<String> = (0..m)
        .map(|_| cur.string("label"))
        .collect::<Result<_, _>>()?;
    let words: Vec<String> = (0..d)
        .map(|_| cur.string("vocabulary word"))
        .collect::<Result<_, _>>()?;
    let x = Matrix::from_vec(d, n, cur.f64_block(d * n, "embedding matrix")?);
    let b = if has_hidden {
        Some(Matrix::from_vec(m, n, cur.f64_block(m * n, "hidden layer")?))
    } else {
        None
    };
    if cur.remaining() > 0 {
        return Err(PersistError::TrailingBytes(cur.remaining()));
    }

    let variant = if reduced {
        SoftmaxVariant::Reduced
    } else {
        SoftmaxVariant::Full
    };
    let model = LBoWModel::new(x, b, labels, variant)?;
    TextClassifier::new(words, model)
}

/// Writes a classifier to `writer` in the binary model format.
pub fn write_model(classifier: &TextClassifier, writer: &mut impl Write) -> Result<(), PersistError> {
    writer.write_all(&to_bytes(classifier)?)?;
    Ok(())
}

/// Reads a classifier from `reader` (which must end with the payload).
pub fn read_model(reader: &mut impl Read) -> Result<TextClassifier, PersistError> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

/// Saves a classifier to a file.
pub fn save_model(classifier: &TextClassifier, path: impl AsRef<Path>) -> Result<(), PersistError> {
    fs::write(path, to_bytes(classifier)?)?;
    Ok(())
}

/// Loads a classifier from a file.
pub fn load_model(path: impl AsRef<Path>) -> Result<TextClassifier, PersistError> {
    from_bytes(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_classifier(seed: u64, shape: u8) -> TextClassifier {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(2..=5);
        let (n, hidden, variant) = match shape {
            0 => (rng.random_range(1..=8), true, SoftmaxVariant::Full),
            1 => (m, false, SoftmaxVariant::Full),
            _ => (m - 1, false, SoftmaxVariant::Reduced),
        };
        let d = rng.random_range(1..=12);
        let x = Matrix::from_vec(d, n, (0..d * n).map(|_| rng.random_range(-2.0..2.0)).collect());
        let b = hidden.then(|| {
            Matrix::from_vec(m, n, (0..m * n).map(|_| rng.random_range(-2.0..2.0)).collect())
        });
        let labels = (0..m).map(|i| format!("label{i}")).collect();
        let words = (0..d).map(|i| format!("word{i}")).collect();
        let model = LBoWModel::new(x, b, labels, variant).unwrap();
        TextClassifier::new(words, model).unwrap()
    }

    #[test]
    fn round_trip_preserves_every_bit() {
        for seed in 0..30u64 {
            for shape in 0..3u8 {
                let original = random_classifier(seed, shape);
                let first = to_bytes(&original).unwrap();
                let loaded = from_bytes(&first).unwrap();
                assert!(loaded.bitwise_eq(&original), "seed {seed} shape {shape}");
                let second = to_bytes(&loaded).unwrap();
                assert_eq!(first, second, "seed {seed} shape {shape}");
            }
        }
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        let original = random_classifier(7, 0);
        save_model(&original, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert!(loaded.bitwise_eq(&original));
        let path2 = dir.path().join("model2.bin");
        save_model(&loaded, &path2).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    #[test]
    fn missing_file_reports_io() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_model(dir.path().join("absent.bin")).unwrap_err();
        assert_eq!(err.name(), "Io");
    }

    #[test]
    fn rejects_bad_magic() {
        let mut bytes = to_bytes(&random_classifier(1, 0)).unwrap();
        bytes[3] ^= 0xff;
        assert_eq!(from_bytes(&bytes).unwrap_err().name(), "BadMagic");
    }

    #[test]
    fn rejects_unsupported_version() {
        let mut bytes = to_bytes(&random_classifier(1, 0)).unwrap();
        bytes[8..12].copy_from_slice(&2u32.to_le_bytes());
        let err = from_bytes(&bytes).unwrap_err();
        assert_eq!(err.name(), "UnsupportedVersion");
    }

    #[test]
    fn rejects_both_flag_bits_as_corrupt_dimensions() {
        let mut bytes = to_bytes(&random_classifier(1, 1)).unwrap();
        bytes[24..28].copy_from_slice(&(FLAG_HAS_HIDDEN | FLAG_REDUCED).to_le_bytes());
        let err = from_bytes(&bytes).unwrap_err();
        assert_eq!(err.name(), "CorruptDimensions");
    }

    #[test]
    fn rejects_unknown_flag_bits() {
        let mut bytes = to_bytes(&random_classifier(1, 1)).unwrap();
        bytes[24..28].copy_from_slice(&(1u32 << 5).to_le_bytes());
        let err = from_bytes(&bytes).unwrap_err();
        assert_eq!(err.name(), "UnexpectedFlags");
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        // A hidden-free full-softmax file claiming n != m.
        let mut bytes = to_bytes(&random_classifier(1, 1)).unwrap();
        let m = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
        bytes[16..20].copy_from_slice(&(m + 1).to_le_bytes());
        let err = from_bytes(&bytes).unwrap_err();
        assert_eq!(err.name(), "CorruptDimensions");

        // A reduced file claiming n != m - 1.
        let mut bytes = to_bytes(&random_classifier(2, 2)).unwrap();
        let m = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
        bytes[16..20].copy_from_slice(&m.to_le_bytes());
        let err = from_bytes(&bytes).unwrap_err();
        assert_eq!(err.name(), "CorruptDimensions");
    }

    #[test]
    fn rejects_single_class_files() {
        let mut bytes = to_bytes(&random_classifier(1, 1)).unwrap();
        bytes[12..16].copy_from_slice(&1u32.to_le_bytes());
        assert_eq!(from_bytes(&bytes).unwrap_err().name(), "CorruptDimensions");
    }

    #[test]
    fn rejects_truncation_everywhere() {
        let bytes = to_bytes(&random_classifier(3, 0)).unwrap();
        // Chop the file at every proper prefix length; every cut lands
        // inside some declared block and must be caught.
        for len in 0..bytes.len() {
            let err = from_bytes(&bytes[..len]).unwrap_err();
            assert_eq!(
                err.name(),
                "TruncatedFile",
                "prefix of {len} bytes must be rejected as truncated"
            );
        }
    }

    #[test]
    fn rejects_trailing_bytes() {
        let mut bytes = to_bytes(&random_classifier(4, 2)).unwrap();
        bytes.push(0);
        let err = from_bytes(&bytes).unwrap_err();
        assert_eq!(err.name(), "TrailingBytes");
    }

    #[test]
    fn rejects_invalid_utf8_strings() {
        let classifier = random_classifier(5, 1);
        let mut bytes = to_bytes(&classifier).unwrap();
        // The first label's bytes start right after the 28-byte header and
        // its own 4-byte length.
        bytes[32] = 0xff;
        bytes[33] = 0xfe;
        let err = from_bytes(&bytes).unwrap_err();
        assert_eq!(err.name(), "InvalidString");
    }

    #[test]
    fn rejects_oversized_string_lengths_without_allocating() {
        let mut bytes = to_bytes(&random_classifier(5, 1)).unwrap();
        bytes[28..32].copy_from_slice(&u32::MAX.to_le_bytes());
        let err = from_bytes(&bytes).unwrap_err();
        assert_eq!(err.name(), "TruncatedFile");
    }

    #[test]
    fn rejects_non_finite_parameters() {
        let classifier = random_classifier(6, 1);
        let mut bytes = to_bytes(&classifier).unwrap();
        let tail = bytes.len() - 8;
        bytes[tail..].copy_from_slice(&f64::NAN.to_le_bytes());
        let err = from_bytes(&bytes).unwrap_err();
        assert_eq!(err.name(), "NonFiniteEntry");
    }

    #[test]
    fn rejects_duplicate_vocabulary_words() {
        let model = random_classifier(8, 1).model().clone();
        let words: Vec<String> = (0..model.vocab_size()).map(|_| "same".to_string()).collect();
        if words.len() >= 2 {
            let err = TextClassifier::new(words, model).unwrap_err();
            assert_eq!(err.name(), "CorruptDimensions");
        }
    }

    #[test]
    fn encode_drops_oov_and_rejects_empty() {
        let classifier = random_classifier(9, 1);
        let tokens: Vec<String> = vec!["word0".into(), "nope".into(), "word0".into()];
        let doc = classifier.encode(&tokens).unwrap();
        assert_eq!(doc.word_indices(), &[0, 0]);
        let err = classifier.encode(&["nope".to_string()]).unwrap_err();
        assert_eq!(err.name(), "EmptyDocument");
    }
}
