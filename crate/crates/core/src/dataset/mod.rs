//! Sentence datasets: unbiased draws from the whole language, biased draws
//! that respect an [`ObjectCatalog`], and seeded train/test splits.

mod catalog;

use std::collections::HashSet;
use std::io::{self, Write};
use std::path::Path;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grammar::{sample_sentence, Grammar, GrammarError};
use crate::model::SymbolModel;
use crate::vector::format_sentence;
use crate::ErrorCode;

pub use catalog::{Axis, CatalogEntry, ObjectCatalog, SentenceFacts, OBJECT_CATEGORY};

pub type Sentence = Vec<String>;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("requested {requested} distinct sentences but the language has only {available}")]
    LanguageTooSmall { requested: usize, available: BigUint },
    #[error("catalog does not match the grammar: {0}")]
    CatalogMismatch(String),
    #[error("found only {found} of {requested} distinct catalog-consistent sentences after {attempts} draws")]
    ExhaustedBias {
        requested: usize,
        found: usize,
        attempts: usize,
    },
    #[error("need {requested} sentences but only {available} are available")]
    InsufficientSentences { requested: usize, available: usize },
    #[error("catalog line {line}: {message}")]
    CatalogSyntax { line: usize, message: String },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl ErrorCode for DatasetError {
    fn code(&self) -> &'static str {
        match self {
            DatasetError::LanguageTooSmall { .. } => "E_LANGUAGE_TOO_SMALL",
            DatasetError::CatalogMismatch(_) => "E_CATALOG_MISMATCH",
            DatasetError::ExhaustedBias { .. } => "E_EXHAUSTED_BIAS",
            DatasetError::InsufficientSentences { .. } => "E_INSUFFICIENT_SENTENCES",
            DatasetError::CatalogSyntax { .. } => "E_CATALOG_SYNTAX",
            DatasetError::Grammar(e) => e.code(),
            DatasetError::Io(_) => "E_IO",
        }
    }
}

/// Draws allowed per requested sentence before biased generation gives up.
pub const DEFAULT_RETRY_FACTOR: usize = 100;

/// `n` distinct sentences drawn uniformly from the language.
pub fn generate_unbiased(grammar: &Grammar, n: usize, seed: u64) -> Result<Vec<Sentence>, DatasetError> {
    let size = grammar.count_language();
    if BigUint::from(n) > size {
        return Err(DatasetError::LanguageTooSmall {
            requested: n,
            available: size,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Rejection would crawl once most of a small language is taken.
    if size <= BigUint::from(n) * 2u32 {
        let mut all = grammar
            .sentences(usize::MAX)
            .expect("language no larger than 2n");
        let (picked, _) = all.partial_shuffle(&mut rng, n);
        return Ok(picked.to_vec());
    }
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let s = sample_sentence(grammar, &SymbolModel::UniformSentence, &mut rng);
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    Ok(out)
}

/// `n` distinct sentences in which every object and attribute is licensed
/// by a single catalog entry.
///
/// Each draw picks a random entry, samples uniformly from the sub-grammar
/// restricted to that entry's values, and keeps the sentence if it is new
/// and passes [`ObjectCatalog::is_consistent`].
pub fn generate_biased(
    grammar: &Grammar,
    catalog: &ObjectCatalog,
    n: usize,
    seed: u64,
) -> Result<Vec<Sentence>, DatasetError> {
    generate_biased_with_retries(grammar, catalog, n, seed, DEFAULT_RETRY_FACTOR.saturating_mul(n))
}

pub fn generate_biased_with_retries(
    grammar: &Grammar,
    catalog: &ObjectCatalog,
    n: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<Vec<Sentence>, DatasetError> {
    catalog.validate(grammar)?;
    let restricted: Vec<Grammar> = catalog
        .entries
        .iter()
        .filter_map(|e| catalog.restrict_to(grammar, e))
        .collect();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    if restricted.is_empty() {
        return Err(DatasetError::ExhaustedBias {
            requested: n,
            found: 0,
            attempts: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        if attempts >= max_attempts {
            return Err(DatasetError::ExhaustedBias {
                requested: n,
                found: out.len(),
                attempts,
            });
        }
        attempts += 1;
        let g = &restricted[rng.gen_range(0..restricted.len())];
        let s = sample_sentence(g, &SymbolModel::UniformSentence, &mut rng);
        if !seen.insert(s.clone()) {
            continue;
        }
        if catalog.is_consistent(grammar, &s) {
            out.push(s);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    /// Training sentences to keep; `None` keeps everything not in the test set.
    pub train: Option<usize>,
    pub test: usize,
    pub seed: u64,
    pub dedup: bool,
}

/// Shuffle with the seed and cut into (train, test).
pub fn split(sentences: &[Sentence], spec: &SplitSpec) -> Result<(Vec<Sentence>, Vec<Sentence>), DatasetError> {
    let mut pool: Vec<Sentence> = if spec.dedup {
        let mut seen = HashSet::new();
        sentences
            .iter()
            .filter(|s| seen.insert(*s))
            .cloned()
            .collect()
    } else {
        sentences.to_vec()
    };
    let needed = spec.test + spec.train.unwrap_or(0);
    if needed > pool.len() {
        return Err(DatasetError::InsufficientSentences {
            requested: needed,
            available: pool.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    pool.shuffle(&mut rng);
    let mut train = pool.split_off(spec.test);
    if let Some(k) = spec.train {
        train.truncate(k);
    }
    Ok((train, pool))
}

/// Write one sentence per line after `header` (already `#`-prefixed lines).
pub fn write_sentences<W: Write>(mut out: W, header: &str, sentences: &[Sentence]) -> io::Result<()> {
    out.write_all(header.as_bytes())?;
    for s in sentences {
        writeln!(out, "{}", format_sentence(s))?;
    }
    out.flush()
}

/// Split and write `train` and `test` files, each headed by `header`.
pub fn split_and_write(
    sentences: &[Sentence],
    spec: &SplitSpec,
    train_path: &Path,
    test_path: &Path,
    header: &str,
) -> Result<(usize, usize), DatasetError> {
    let (train, test) = split(sentences, spec)?;
    write_sentences(io::BufWriter::new(std::fs::File::create(train_path)?), header, &train)?;
    write_sentences(io::BufWriter::new(std::fs::File::create(test_path)?), header, &test)?;
    Ok((train.len(), test.len()))
}

/// Sentences from a file body: one per line, skipping blanks and `#` lines.
pub fn read_sentences(text: &str) -> Vec<Sentence> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(crate::vector::parse_sentence)
        .collect()
}
