//! Acceptance suite: ten checks covering the library's headline guarantees.
//!
//! Each test prints one `criterion NN PASS` line (run with
//! `cargo test --test acceptance -- --nocapture` to see them); a failing
//! criterion fails its test. Tolerances are stated inline — exact (bitwise
//! or integer) wherever the contract is exactness, 1e−9 for the compression
//! equivalences.

use std::time::Instant;

use lbowkit::adversarial::{exact_classifier, mfw_label, run_demo};
use lbowkit::bench::{counted_probabilities, run_bench};
use lbowkit::corpus::{build_vocabulary, encode_document, tokenize, Dataset, Document};
use lbowkit::model::{LBoWModel, Matrix, SoftmaxVariant};
use lbowkit::persist::{from_bytes, to_bytes, TextClassifier};
use lbowkit::train::{accuracy, finite_difference_gradient, gradient, train, TrainConfig};
use lbowkit::transforms::{compress, fold_hidden_layer, shift_reduce, verify_equivalence};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn class_labels(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("class{i}")).collect()
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(
        rows,
        cols,
        (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect(),
    )
}

fn random_hidden_model(rng: &mut ChaCha8Rng, d: usize, n: usize, m: usize) -> LBoWModel {
    let x = random_matrix(rng, d, n);
    let b = random_matrix(rng, m, n);
    LBoWModel::new(x, Some(b), class_labels(m), SoftmaxVariant::Full).unwrap()
}

fn random_square_model(rng: &mut ChaCha8Rng, d: usize, m: usize) -> LBoWModel {
    let x = random_matrix(rng, d, m);
    LBoWModel::new(x, None, class_labels(m), SoftmaxVariant::Full).unwrap()
}

fn random_doc(rng: &mut ChaCha8Rng, d: usize, max_len: usize) -> Document {
    let len = rng.random_range(1..=max_len);
    Document::new((0..len).map(|_| rng.random_range(0..d)).collect(), None)
}

#[test]
fn criterion_01_fold_equivalence() {
    let start = Instant::now();
    let (m, n, d) = (5, 50, 200);
    let mut worst = 0.0_f64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
        let model = random_hidden_model(&mut rng, d, n, m);
        let folded = fold_hidden_layer(&model).unwrap();
        let docs: Vec<Document> = (0..1_000).map(|_| random_doc(&mut rng, d, 50)).collect();
        let report = verify_equivalence(&model, &folded, &docs, 1e-9).unwrap();
        assert!(
            report.strict,
            "fold model {seed}: max |Δp| = {:e}, disagreements = {}",
            report.max_abs_prob_diff, report.n_label_disagreements
        );
        worst = worst.max(report.max_abs_prob_diff);
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "took {elapsed:.1}s, limit 10s");
    println!(
        "criterion 01 PASS — hidden-layer folding: 20 models x 1000 docs, \
         max |Δp| = {worst:.2e} ≤ 1e-9 ({elapsed:.1}s)"
    );
}

#[test]
fn criterion_02_shift_reduce_equivalence() {
    let (m, d) = (5, 200);
    let mut worst = 0.0_f64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2_000 + seed);
        let model = random_square_model(&mut rng, d, m);
        let reduced = shift_reduce(&model).unwrap();
        let docs: Vec<Document> = (0..1_000).map(|_| random_doc(&mut rng, d, 50)).collect();
        let report = verify_equivalence(&model, &reduced, &docs, 1e-9).unwrap();
        assert!(
            report.strict,
            "shift-reduce model {seed}: max |Δp| = {:e}, disagreements = {}",
            report.max_abs_prob_diff, report.n_label_disagreements
        );
        worst = worst.max(report.max_abs_prob_diff);
    }
    println!(
        "criterion 02 PASS — shift-reduction: 20 models x 1000 docs, \
         max |Δp| = {worst:.2e} ≤ 1e-9"
    );
}

#[test]
fn criterion_03_compression_shape_and_idempotence() {
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3_000 + seed);
        let model = random_hidden_model(&mut rng, 40, 12, 4);
        let once = compress(&model).unwrap();
        assert_eq!(once.dim(), model.num_classes() - 1);
        assert!(once.hidden().is_none());
        assert_eq!(once.variant(), SoftmaxVariant::Reduced);
        let twice = compress(&once).unwrap();
        assert!(
            twice.bitwise_eq(&once),
            "seed {seed}: compressing twice changed the model"
        );
    }
    println!(
        "criterion 03 PASS — compression: output has m-1 dimensions and no hidden layer; \
         compress∘compress = compress bitwise on 20 models"
    );
}

#[test]
fn criterion_04_repetition_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(4_000);
    let mut checked = 0;
    for trial in 0..1_000 {
        let m = rng.random_range(2..=5);
        let d = rng.random_range(1..=30);
        let model = if trial % 2 == 0 {
            let n = rng.random_range(1..=8);
            random_hidden_model(&mut rng, d, n, m)
        } else {
            random_square_model(&mut rng, d, m)
        };
        let doc = random_doc(&mut rng, d, 20);
        let k = rng.random_range(1..=10);
        assert_eq!(
            model.predict(&doc).unwrap(),
            model.predict(&doc.repeat(k)).unwrap(),
            "trial {trial}: prediction changed under {k}x repetition"
        );
        checked += 1;
    }
    println!(
        "criterion 04 PASS — repetition invariance: predict(doc x k) = predict(doc) \
         exactly on {checked}/1000 (model, doc, k) triples"
    );
}

#[test]
fn criterion_05_dependence_pipeline() {
    let start = Instant::now();
    let mut trials = 0;
    for m in 3..=6usize {
        for trial in 0..100u64 {
            let demo = run_demo(m, m - 1, m as u64 * 10_000 + trial)
                .unwrap_or_else(|e| panic!("m={m} trial={trial}: {e}"));
            assert!(demo.certificate.verify(), "m={m} trial={trial}: bad certificate");
            assert!(demo.certificate.is_canonical());
            assert!(demo.certificate.nonzero_count() >= 2);
            // run_demo only returns once the exact forward pass has given
            // both documents the same argmax; the labels must still differ.
            assert_ne!(
                demo.report.true_label_left, demo.report.true_label_right,
                "m={m} trial={trial}: labels agree"
            );
            assert_eq!(
                mfw_label(&demo.counterexample.doc_left, m).unwrap(),
                demo.report.true_label_left
            );
            assert_eq!(
                mfw_label(&demo.counterexample.doc_right, m).unwrap(),
                demo.report.true_label_right
            );
            assert!(demo.report.misclassified_count() >= 1);
            trials += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "took {elapsed:.1}s, limit 30s");
    println!(
        "criterion 05 PASS — dependence pipeline: {trials}/400 trials (m ∈ {{3,4,5,6}}, q = m-1) \
         produced exactly-verified certificates and forced errors ({elapsed:.1}s)"
    );
}

#[test]
fn criterion_06_exact_classifier() {
    let m = 4;
    let model = exact_classifier(m);

    // Every ordered document of length 1..=4 over the m words.
    let mut exhaustive = 0;
    for len in 1..=4usize {
        let total = m.pow(len as u32);
        for code in 0..total {
            let mut indices = Vec::with_capacity(len);
            let mut c = code;
            for _ in 0..len {
                indices.push(c % m);
                c /= m;
            }
            let doc = Document::new(indices, None);
            assert_eq!(
                model.predict(&doc).unwrap(),
                mfw_label(&doc, m).unwrap(),
                "disagreement on {:?}",
                doc.word_indices()
            );
            exhaustive += 1;
        }
    }
    assert_eq!(exhaustive, 340);

    let mut rng = ChaCha8Rng::seed_from_u64(6_000);
    for _ in 0..10_000 {
        let doc = random_doc(&mut rng, m, 50);
        assert_eq!(
            model.predict(&doc).unwrap(),
            mfw_label(&doc, m).unwrap(),
            "disagreement on {:?}",
            doc.word_indices()
        );
    }
    println!(
        "criterion 06 PASS — exact classifier: one-hot model matches the labeling rule on \
         all 340 documents of length ≤ 4 and 10000 random documents of length ≤ 50"
    );
}

#[test]
fn criterion_07_gradient_oracle() {
    const H: f64 = 1e-6;
    const REL_TOL: f64 = 1e-5;
    const ABS_FLOOR: f64 = 1e-8;

    let close = |a: f64, f: f64| -> bool {
        let scale = a.abs().max(f.abs());
        if scale < ABS_FLOOR {
            (a - f).abs() < ABS_FLOOR
        } else {
            (a - f).abs() / scale < REL_TOL
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(7_000);
    let mut compared = 0usize;
    for instance in 0..50 {
        let m = rng.random_range(2..=4);
        let d = rng.random_range(1..=6);
        let model = if instance % 2 == 0 {
            let n = rng.random_range(1..=5);
            random_hidden_model(&mut rng, d, n, m)
        } else {
            random_square_model(&mut rng, d, m)
        };
        let len = rng.random_range(1..=6);
        let indices = (0..len).map(|_| rng.random_range(0..d)).collect();
        let doc = Document::new(indices, Some(rng.random_range(0..m)));

        let analytic = gradient(&model, &doc).unwrap();
        let numeric = finite_difference_gradient(&model, &doc, H).unwrap();

        assert_eq!(analytic.embedding_rows.len(), numeric.embedding_rows.len());
        for ((wa, ga), (wn, gn)) in analytic
            .embedding_rows
            .iter()
            .zip(&numeric.embedding_rows)
        {
            assert_eq!(wa, wn);
            for (&a, &f) in ga.iter().zip(gn) {
                assert!(close(a, f), "instance {instance}, word {wa}: {a} vs {f}");
                compared += 1;
            }
        }
        match (&analytic.hidden, &numeric.hidden) {
            (None, None) => {}
            (Some(ga), Some(gn)) => {
                for (&a, &f) in ga.data().iter().zip(gn.data()) {
                    assert!(close(a, f), "instance {instance}, hidden: {a} vs {f}");
                    compared += 1;
                }
            }
            _ => panic!("instance {instance}: hidden gradient presence mismatch"),
        }
    }
    println!(
        "criterion 07 PASS — gradient oracle: analytic and central-difference gradients \
         (h = 1e-6) agree within rel 1e-5 (abs floor 1e-8) on 50 instances, \
         {compared} entries compared"
    );
}

fn marker_dataset(m: usize, docs_per_class: usize) -> Dataset {
    let mut token_docs = Vec::new();
    let mut doc_labels = Vec::new();
    for c in 0..m {
        for i in 0..docs_per_class {
            let fillers = [(i + c) % 3, (i * 2 + 1) % 3];
            let text = format!("marker{c} fill{} fill{}", fillers[0], fillers[1]);
            token_docs.push(tokenize(&text, false));
            doc_labels.push(c);
        }
    }
    let vocab = build_vocabulary(&token_docs, 1).unwrap();
    let label_names = class_labels(m);
    let documents = token_docs
        .iter()
        .zip(&doc_labels)
        .map(|(tokens, &c)| {
            encode_document(tokens, &vocab, Some(&label_names[c]), &label_names).unwrap()
        })
        .collect();
    Dataset::new(vocab, documents, label_names).unwrap()
}

#[test]
fn criterion_08_training_sanity() {
    let dataset = marker_dataset(4, 200);
    let cfg = TrainConfig {
        dim: 4,
        use_hidden: false,
        learning_rate: 0.5,
        epochs: 20,
        min_count: 1,
        seed: 8_000,
        lowercase: false,
    };
    let model = train(&dataset, &cfg).unwrap();
    let acc = accuracy(&model, dataset.documents()).unwrap();
    assert!(acc >= 0.99, "training accuracy {acc} below 0.99");

    let again = train(&dataset, &cfg).unwrap();
    assert!(again.bitwise_eq(&model), "training is not deterministic");

    println!(
        "criterion 08 PASS — training sanity: 4-class marker dataset (200 docs/class, \
         n = m = 4, lr = 0.5, 20 epochs) reaches {:.1}% accuracy, bitwise-deterministic",
        acc * 100.0
    );
}

#[test]
fn criterion_09_work_accounting() {
    let mut rng = ChaCha8Rng::seed_from_u64(9_000);
    let (d, n, m) = (30, 8, 4);
    let model = random_hidden_model(&mut rng, d, n, m);
    let folded = fold_hidden_layer(&model).unwrap();
    let reduced = shift_reduce(&folded).unwrap();

    let docs: Vec<Document> = (0..100).map(|_| random_doc(&mut rng, d, 40)).collect();
    for doc in &docs {
        let occurrences = doc.len() as u64;
        assert_eq!(
            counted_probabilities(&model, doc).unwrap().multiplies,
            occurrences * n as u64 + (m * n) as u64,
            "hidden-model count off on a document of {occurrences} occurrences"
        );
        assert_eq!(
            counted_probabilities(&folded, doc).unwrap().multiplies,
            occurrences * m as u64,
            "folded count off on a document of {occurrences} occurrences"
        );
        assert_eq!(
            counted_probabilities(&reduced, doc).unwrap().multiplies,
            occurrences * (m as u64 - 1),
            "reduced count off on a document of {occurrences} occurrences"
        );
    }

    let report = run_bench(&model, &docs, 5).unwrap();
    println!(
        "criterion 09 PASS — work accounting: counters equal N·n + m·n (hidden) and N·m \
         (folded) on 100/100 documents; measured multiply ratio {:.2}, wall-clock \
         {:.0} vs {:.0} docs/s (reported, not thresholded)",
        report.multiply_ratio,
        report.original.docs_per_second,
        report.compressed.docs_per_second
    );
}

#[test]
fn criterion_10_persistence() {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    for trial in 0..100 {
        let m = rng.random_range(2..=5);
        let (model, shape) = match trial % 3 {
            0 => {
                let n = rng.random_range(1..=8);
                let d = rng.random_range(1..=12);
                (random_hidden_model(&mut rng, d, n, m), "hidden")
            }
            1 => {
                let d = rng.random_range(1..=12);
                (random_square_model(&mut rng, d, m), "square")
            }
            _ => {
                let d = rng.random_range(1..=12);
                let x = random_matrix(&mut rng, d, m - 1);
                (
                    LBoWModel::new(x, None, class_labels(m), SoftmaxVariant::Reduced).unwrap(),
                    "reduced",
                )
            }
        };
        let words = (0..model.vocab_size()).map(|i| format!("w{i}")).collect();
        let classifier = TextClassifier::new(words, model).unwrap();
        let first = to_bytes(&classifier).unwrap();
        let loaded = from_bytes(&first).unwrap();
        assert!(loaded.bitwise_eq(&classifier), "trial {trial} ({shape})");
        let second = to_bytes(&loaded).unwrap();
        assert_eq!(first, second, "trial {trial} ({shape}): bytes differ");
    }

    // The four corruption classes, each rejected with its specific error.
    let mut rng = ChaCha8Rng::seed_from_u64(10_100);
    let model = random_hidden_model(&mut rng, 6, 3, 3);
    let words = (0..6).map(|i| format!("w{i}")).collect();
    let classifier = TextClassifier::new(words, model).unwrap();
    let good = to_bytes(&classifier).unwrap();

    let mut bad_magic = good.clone();
    bad_magic[0] ^= 0xff;
    assert_eq!(from_bytes(&bad_magic).unwrap_err().name(), "BadMagic");

    let mut bad_version = good.clone();
    bad_version[8..12].copy_from_slice(&9u32.to_le_bytes());
    assert_eq!(
        from_bytes(&bad_version).unwrap_err().name(),
        "UnsupportedVersion"
    );

    let mut bad_flags = good.clone();
    bad_flags[24..28].copy_from_slice(&0b11u32.to_le_bytes());
    assert_eq!(
        from_bytes(&bad_flags).unwrap_err().name(),
        "CorruptDimensions"
    );

    let truncated = &good[..good.len() - 5];
    assert_eq!(from_bytes(truncated).unwrap_err().name(), "TruncatedFile");

    println!(
        "criterion 10 PASS — persistence: 100 models round-trip save→load→save \
         byte-identically; magic/version/flags/truncation corruption rejected with \
         BadMagic/UnsupportedVersion/CorruptDimensions/TruncatedFile"
    );
}
