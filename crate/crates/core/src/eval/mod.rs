//! Generation, reconstruction and generalization metrics for any
//! [`Embedder`].
//!
//! Generation samples the latent space and decodes:
//!
//! - grammar coverage: observed coverage classes / all classes,
//! - vocabulary coverage: observed vocabulary words / vocabulary size,
//! - uniqueness: distinct samples / samples,
//! - validity: distinct grammatical samples / samples.
//!
//! Reconstruction encodes and decodes a test set and reports exact matches,
//! grammatical outputs, and matches up to coordination order.

mod canonical;
mod coverage;
mod report;

use std::collections::{BTreeMap, HashSet};

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::adapter::{AdapterError, Embedder};
use crate::grammar::{Grammar, GrammarError};
use crate::ErrorCode;

pub use canonical::canonicalize;
pub use coverage::{CoverageClasses, Granularity, FIXED_SENTENCES};
pub use report::{Table1Row, TABLE1_HEADER};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("embedder failed: {0}")]
    Adapter(#[from] AdapterError),
    #[error("sentence is not in the language: {0}")]
    NotInLanguage(String),
    #[error("the {0} test set is empty")]
    EmptyTestSet(&'static str),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

impl ErrorCode for EvalError {
    fn code(&self) -> &'static str {
        match self {
            EvalError::Adapter(_) => "E_ADAPTER_FAILURE",
            EvalError::NotInLanguage(_) => "E_NOT_IN_LANGUAGE",
            EvalError::EmptyTestSet(_) => "E_EMPTY_TEST_SET",
            EvalError::InvalidArgument(_) => "E_INVALID_ARGUMENT",
            EvalError::Grammar(e) => e.code(),
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationReport {
    pub samples: usize,
    pub granularity: Granularity,
    pub classes_total: num_bigint::BigUint,
    pub classes_observed: usize,
    pub grammar_coverage: f64,
    pub vocabulary_size: usize,
    pub words_observed: usize,
    pub vocabulary_coverage: f64,
    pub distinct: usize,
    pub distinct_grammatical: usize,
    pub uniqueness: f64,
    pub validity: f64,
    /// Grammatical samples per coverage class.
    pub class_hits: BTreeMap<String, usize>,
    /// Occurrences of each vocabulary word across all samples.
    pub word_hits: BTreeMap<String, usize>,
}

/// Generation metrics over already decoded samples.
pub fn generation_metrics<S: AsRef<str>>(
    grammar: &Grammar,
    samples: &[Vec<S>],
    granularity: Granularity,
) -> Result<GenerationReport, EvalError> {
    let classes = CoverageClasses::new(grammar, granularity)?;
    let mut distinct: HashSet<Vec<&str>> = HashSet::new();
    let mut distinct_grammatical = 0;
    let mut class_hits: BTreeMap<String, usize> = BTreeMap::new();
    let mut word_hits: BTreeMap<String, usize> = BTreeMap::new();
    for s in samples {
        for w in s {
            let w = w.as_ref();
            if grammar.word_id(w).is_some() {
                *word_hits.entry(w.to_owned()).or_default() += 1;
            }
        }
        let class = classes.class_of(s);
        let key: Vec<&str> = s.iter().map(|w| w.as_ref()).collect();
        if distinct.insert(key) && class.is_some() {
            distinct_grammatical += 1;
        }
        if let Some(c) = class {
            *class_hits.entry(c).or_default() += 1;
        }
    }
    let total = classes.total().clone();
    let grammar_coverage = match total.to_f64() {
        Some(t) if t > 0.0 => class_hits.len() as f64 / t,
        _ => 0.0,
    };
    let vocabulary_size = grammar.vocabulary().len();
    Ok(GenerationReport {
        samples: samples.len(),
        granularity,
        classes_total: total,
        classes_observed: class_hits.len(),
        grammar_coverage,
        vocabulary_size,
        words_observed: word_hits.len(),
        vocabulary_coverage: ratio(word_hits.len(), vocabulary_size),
        distinct: distinct.len(),
        distinct_grammatical,
        uniqueness: ratio(distinct.len(), samples.len()),
        validity: ratio(distinct_grammatical, samples.len()),
        class_hits,
        word_hits,
    })
}

/// Decode `k` latent samples drawn with `seed` and score them.
pub fn eval_generation(
    embedder: &mut dyn Embedder,
    grammar: &Grammar,
    k: usize,
    seed: u64,
    granularity: Granularity,
) -> Result<GenerationReport, EvalError> {
    if k == 0 {
        return Err(EvalError::InvalidArgument("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(k);
    for _ in 0..k {
        let v = embedder.sample_latent(&mut rng);
        samples.push(embedder.decode(&v)?);
    }
    generation_metrics(grammar, &samples, granularity)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub exact: bool,
    pub grammatical: bool,
    pub semantic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub count: usize,
    pub reconstruction_accuracy: f64,
    pub grammar_accuracy: f64,
    pub semantic_accuracy: f64,
    pub outcomes: Vec<Outcome>,
}

/// Encode and decode every test sentence.
pub fn eval_reconstruction(
    embedder: &mut dyn Embedder,
    testset: &[Vec<String>],
    grammar: &Grammar,
) -> Result<ReconstructionReport, EvalError> {
    reconstruction(embedder, testset, grammar, "reconstruction")
}

fn reconstruction(
    embedder: &mut dyn Embedder,
    testset: &[Vec<String>],
    grammar: &Grammar,
    which: &'static str,
) -> Result<ReconstructionReport, EvalError> {
    if testset.is_empty() {
        return Err(EvalError::EmptyTestSet(which));
    }
    let mut outcomes = Vec::with_capacity(testset.len());
    for input in testset {
        let canonical_input = canonicalize(grammar, input)?;
        let v = embedder.encode(input)?;
        let output = embedder.decode(&v)?;
        let exact = output == *input;
        let grammatical = exact || grammar.accepts(&output);
        let semantic = exact || (grammatical && canonicalize(grammar, &output)? == canonical_input);
        outcomes.push(Outcome {
            input: input.clone(),
            output,
            exact,
            grammatical,
            semantic,
        });
    }
    let n = outcomes.len();
    let count = |f: fn(&Outcome) -> bool| outcomes.iter().filter(|o| f(o)).count();
    Ok(ReconstructionReport {
        count: n,
        reconstruction_accuracy: ratio(count(|o| o.exact), n),
        grammar_accuracy: ratio(count(|o| o.grammatical), n),
        semantic_accuracy: ratio(count(|o| o.semantic), n),
        outcomes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizationReport {
    pub biased: ReconstructionReport,
    pub unbiased: ReconstructionReport,
    /// Biased minus unbiased reconstruction accuracy.
    pub gap: f64,
}

pub fn eval_generalization(
    embedder: &mut dyn Embedder,
    biased: &[Vec<String>],
    unbiased: &[Vec<String>],
    grammar: &Grammar,
) -> Result<GeneralizationReport, EvalError> {
    if biased.is_empty() {
        return Err(EvalError::EmptyTestSet("biased"));
    }
    if unbiased.is_empty() {
        return Err(EvalError::EmptyTestSet("unbiased"));
    }
    let biased = reconstruction(embedder, biased, grammar, "biased")?;
    let unbiased = reconstruction(embedder, unbiased, grammar, "unbiased")?;
    let gap = biased.reconstruction_accuracy - unbiased.reconstruction_accuracy;
    Ok(GeneralizationReport { biased, unbiased, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapter::{ArielEmbedder, ConstantEmbedder, ScriptedEmbedder};
    use crate::{fixtures, Codec, CodecConfig};
    use std::sync::Arc;

    fn words(s: &str) -> Vec<String> {
        s.split(' ').map(str::to_owned).collect()
    }

    #[test]
    fn constant_embedder_metrics() {
        let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
        let mut e = ConstantEmbedder {
            dims: 4,
            sentence: words("is it a white toilet ?"),
        };
        let r = eval_generation(&mut e, &g, 100, 0, Granularity::Rules).unwrap();
        assert_eq!(r.uniqueness, 0.01);
        assert_eq!(r.validity, 0.01);
        assert_eq!(r.vocabulary_coverage, 6.0 / g.vocabulary().len() as f64);
        assert_eq!(r.classes_observed, 1);
    }

    #[test]
    fn scripted_toy_metrics() {
        let g = Grammar::parse(fixtures::TOY_GRAMMAR).unwrap();
        let mut script = g.sentences(8).unwrap();
        script.push(words("C"));
        script.push(words("C A"));
        let mut e = ScriptedEmbedder::new(2, script);
        let r = eval_generation(&mut e, &g, 10, 0, Granularity::Sentences).unwrap();
        assert_eq!(r.uniqueness, 1.0);
        assert_eq!(r.validity, 0.8);
        assert_eq!(r.grammar_coverage, 1.0);
        assert_eq!(r.vocabulary_coverage, 1.0);
    }

    #[test]
    fn ariel_reconstructs_everything() {
        let g = Arc::new(Grammar::parse(fixtures::TOY_GRAMMAR).unwrap());
        let mut e = ArielEmbedder::new(Codec::new(g.clone(), CodecConfig::new(2)).unwrap());
        let test = g.sentences(8).unwrap();
        let r = eval_reconstruction(&mut e, &test, &g).unwrap();
        assert_eq!(
            (r.reconstruction_accuracy, r.grammar_accuracy, r.semantic_accuracy),
            (1.0, 1.0, 1.0)
        );
        let gen = eval_generalization(&mut e, &test, &test[..3], &g).unwrap();
        assert_eq!(gen.gap, 0.0);
    }

    #[test]
    fn empty_and_ungrammatical_test_sets() {
        let g = Arc::new(Grammar::parse(fixtures::TOY_GRAMMAR).unwrap());
        let mut e = ArielEmbedder::new(Codec::new(g.clone(), CodecConfig::new(2)).unwrap());
        let test = g.sentences(8).unwrap();
        assert!(matches!(
            eval_generalization(&mut e, &test, &[], &g),
            Err(EvalError::EmptyTestSet("unbiased"))
        ));
        assert!(matches!(
            eval_reconstruction(&mut e, &[words("C")], &g),
            Err(EvalError::NotInLanguage(_))
        ));
        assert!(matches!(
            eval_generation(&mut e, &g, 0, 0, Granularity::Rules),
            Err(EvalError::InvalidArgument(_))
        ));
    }
}
