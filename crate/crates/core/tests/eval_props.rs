mod common;

use std::sync::Arc;

use ariel_core::adapter::{
    AdapterError, ArielEmbedder, ConstantEmbedder, Embedder, EmbedderInfo, NoiseMode, NoisyChannel,
    NoisyChannelConfig, ScriptedEmbedder,
};
use ariel_core::dataset::{generate_biased, generate_unbiased, ObjectCatalog};
use ariel_core::eval::{
    canonicalize, eval_generalization, eval_generation, eval_reconstruction, generation_metrics, Granularity,
};
use ariel_core::grammar::sample_sentence;
use ariel_core::{fixtures, Codec, CodecConfig, Grammar, SymbolModel};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{language, words, Sentence};

fn ariel(g: &Arc<Grammar>, dims: usize) -> ArielEmbedder {
    ArielEmbedder::new(Codec::new(g.clone(), CodecConfig::new(dims)).unwrap())
}

/// Wraps an embedder and canonicalizes every reconstruction.
struct Canonicalizing {
    inner: ArielEmbedder,
    grammar: Arc<Grammar>,
}

impl Embedder for Canonicalizing {
    fn info(&self) -> EmbedderInfo {
        self.inner.info()
    }

    fn encode(&mut self, tokens: &[String]) -> Result<Vec<f64>, AdapterError> {
        self.inner.encode(tokens)
    }

    fn decode(&mut self, v: &[f64]) -> Result<Vec<String>, AdapterError> {
        let s = self.inner.decode(v)?;
        Ok(canonicalize(&self.grammar, &s).unwrap())
    }
}

/// Reconstructs catalog-consistent sentences and garbles the rest.
struct BiasOnly {
    inner: ArielEmbedder,
    grammar: Arc<Grammar>,
    catalog: ObjectCatalog,
}

impl Embedder for BiasOnly {
    fn info(&self) -> EmbedderInfo {
        self.inner.info()
    }

    fn encode(&mut self, tokens: &[String]) -> Result<Vec<f64>, AdapterError> {
        self.inner.encode(tokens)
    }

    fn decode(&mut self, v: &[f64]) -> Result<Vec<String>, AdapterError> {
        let s = self.inner.decode(v)?;
        if self.catalog.is_consistent(&self.grammar, &s) {
            Ok(s)
        } else {
            Ok(words("can it speak ?"))
        }
    }
}

fn questions() -> Arc<Grammar> {
    Arc::new(Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap())
}

#[test]
fn ariel_validity_equals_uniqueness() {
    let g = questions();
    let mut e = ariel(&g, 16);
    let r = eval_generation(&mut e, &g, 2_000, 3, Granularity::Rules).unwrap();
    assert_eq!(r.validity, r.uniqueness);
    assert_eq!(r.distinct, r.distinct_grammatical);
    assert_eq!(r.class_hits.values().sum::<usize>(), 2_000);
}

#[test]
fn generation_is_deterministic_under_seed() {
    let g = questions();
    let a = eval_generation(&mut ariel(&g, 16), &g, 500, 8, Granularity::Templates).unwrap();
    let b = eval_generation(&mut ariel(&g, 16), &g, 500, 8, Granularity::Templates).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.classes_total, 15_396u32.into());
}

#[test]
fn constant_stub() {
    let g = Grammar::parse(fixtures::TOY_GRAMMAR).unwrap();
    let mut e = ConstantEmbedder {
        dims: 2,
        sentence: words("A B"),
    };
    let r = eval_generation(&mut e, &g, 100, 0, Granularity::Sentences).unwrap();
    assert_eq!((r.uniqueness, r.validity), (0.01, 0.01));
    assert_eq!(r.vocabulary_coverage, 2.0 / 3.0);
}

#[test]
fn scripted_stub() {
    let g = Grammar::parse(fixtures::TOY_GRAMMAR).unwrap();
    let mut script: Vec<Sentence> = language(&g).into_iter().collect();
    script.extend([words("C"), words("B A")]);
    let mut e = ScriptedEmbedder::new(2, script);
    let r = eval_generation(&mut e, &g, 10, 0, Granularity::Sentences).unwrap();
    assert_eq!((r.uniqueness, r.validity, r.grammar_coverage), (1.0, 0.8, 1.0));
}

#[test]
fn permuted_coordinations_are_semantic_matches() {
    let g = questions();
    let mut e = Canonicalizing {
        inner: ariel(&g, 16),
        grammar: g.clone(),
    };
    let test = vec![
        words("is it red and blue ?"),
        words("is it textured , average-sized and saddle brown ?"),
        words("is it a white toilet ?"),
    ];
    let r = eval_reconstruction(&mut e, &test, &g).unwrap();
    assert!(r.reconstruction_accuracy < 1.0);
    assert_eq!(r.semantic_accuracy, 1.0);
    assert_eq!(r.grammar_accuracy, 1.0);
}

#[test]
fn bias_only_embedder_has_positive_gap() {
    let g = questions();
    let catalog = ObjectCatalog::parse(fixtures::OBJECT_CATALOG).unwrap();
    let biased = generate_biased(&g, &catalog, 200, 1).unwrap();
    let unbiased = generate_unbiased(&g, 200, 1).unwrap();
    let mut e = BiasOnly {
        inner: ariel(&g, 16),
        grammar: g.clone(),
        catalog,
    };
    let r = eval_generalization(&mut e, &biased, &unbiased, &g).unwrap();
    assert_eq!(r.biased.reconstruction_accuracy, 1.0);
    assert!(r.gap > 0.0);
}

#[test]
fn noisy_channel_accuracies() {
    let g = Arc::new(Grammar::parse(fixtures::TOY_GRAMMAR).unwrap());
    let lang: Vec<Sentence> = language(&g).into_iter().collect();
    let test: Vec<Sentence> = (0..10_000).map(|i| lang[i % lang.len()].clone()).collect();
    for (p, expected) in [(0.0, 1.0), (0.2, 0.8 + 0.2 / 8.0), (1.0, 1.0 / 8.0)] {
        let mut e = NoisyChannel::new(
            ariel(&g, 2),
            g.clone(),
            NoisyChannelConfig {
                p,
                mode: NoiseMode::Resample,
                seed: 17,
            },
        );
        let r = eval_reconstruction(&mut e, &test, &g).unwrap();
        assert!((r.reconstruction_accuracy - expected).abs() < 0.02, "p={p}: {}", r.reconstruction_accuracy);
        assert_eq!(r.grammar_accuracy, 1.0);
    }
}

#[test]
fn canonicalize_is_idempotent_and_preserves_words() {
    let g = questions();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1_000 {
        let s = sample_sentence(&g, &SymbolModel::UniformSentence, &mut rng);
        let c = canonicalize(&g, &s).unwrap();
        assert_eq!(canonicalize(&g, &c).unwrap(), c);
        assert!(g.accepts(&c));
        let mut a = s.clone();
        let mut b = c.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}

proptest! {
    #[test]
    fn validity_never_exceeds_uniqueness(picks in prop::collection::vec(0usize..12, 1..60)) {
        let g = Grammar::parse(fixtures::TOY_GRAMMAR).unwrap();
        let mut pool: Vec<Sentence> = language(&g).into_iter().collect();
        pool.extend([words("C"), words("A A A"), words("B C"), words("")]);
        let samples: Vec<Sentence> = picks.iter().map(|&i| pool[i].clone()).collect();
        for gran in [Granularity::Rules, Granularity::Templates, Granularity::Sentences] {
            let r = generation_metrics(&g, &samples, gran).unwrap();
            prop_assert!(r.validity <= r.uniqueness);
            for x in [r.validity, r.uniqueness, r.grammar_coverage, r.vocabulary_coverage] {
                prop_assert!((0.0..=1.0).contains(&x));
            }
        }
    }

    #[test]
    fn reconstruction_never_exceeds_semantic(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let g = Arc::new(Grammar::parse(fixtures::MINI_GRAMMAR).unwrap());
        let test = generate_unbiased(&g, 50, seed).unwrap();
        let mut e = NoisyChannel::new(ariel(&g, 3), g.clone(), NoisyChannelConfig { p, mode: NoiseMode::Resample, seed });
        let r = eval_reconstruction(&mut e, &test, &g).unwrap();
        prop_assert!(r.reconstruction_accuracy <= r.semantic_accuracy);
        prop_assert!(r.reconstruction_accuracy <= r.grammar_accuracy);
    }
}
