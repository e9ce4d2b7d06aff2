//! Symbol models: how a prefix state's interval is shared among its options.
//!
//! Every model hands out positive integer weights, one per option (STOP first
//! when the prefix is complete, then continuation words in vocabulary order).
//! Probabilities are weights over their sum, so they are exact rationals that
//! sum to one.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::One;
use sha2::{Digest, Sha256};

use crate::grammar::{Grammar, PrefixState, StateId, WordId};

const SENTENCE_START: &str = "<s>";
const SENTENCE_END: &str = "</s>";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SymbolModel {
    /// Weight of an option = number of sentences it leads to. Every sentence
    /// gets the same probability, 1/|L|.
    #[default]
    UniformSentence,
    /// Every option at a state gets the same weight.
    UniformBranch,
    /// Previous-word conditioned counts with add-one backoff.
    Empirical(EmpiricalModel),
}

/// One entry of a partition: `None` is STOP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Branch {
    pub word: Option<WordId>,
    pub target: Option<StateId>,
}

impl SymbolModel {
    pub fn name(&self) -> String {
        match self {
            SymbolModel::UniformSentence => "uniform-sentence".into(),
            SymbolModel::UniformBranch => "uniform-branch".into(),
            SymbolModel::Empirical(m) => format!("empirical:{}", m.fingerprint()),
        }
    }

    /// The options at `state` and their weights, in canonical order.
    pub(crate) fn branches(&self, state: &PrefixState<'_>) -> (Vec<Branch>, Vec<BigUint>) {
        let edges = state.edges();
        let mut branches = Vec::with_capacity(edges.len() + 1);
        if state.is_complete() {
            branches.push(Branch {
                word: None,
                target: None,
            });
        }
        branches.extend(edges.iter().map(|&(w, t)| Branch {
            word: Some(w),
            target: Some(t),
        }));
        let weights = match self {
            SymbolModel::UniformSentence => branches
                .iter()
                .map(|b| match b.target {
                    None => BigUint::one(),
                    Some(t) => state.count_of(t),
                })
                .collect(),
            SymbolModel::UniformBranch => vec![BigUint::one(); branches.len()],
            SymbolModel::Empirical(m) => {
                let g = state.grammar();
                let context = state
                    .word_ids()
                    .last()
                    .map_or(SENTENCE_START, |&w| g.word(w));
                branches
                    .iter()
                    .map(|b| {
                        let next = b.word.map_or(SENTENCE_END, |w| g.word(w));
                        BigUint::from(m.count(context, next) + 1)
                    })
                    .collect()
            }
        };
        (branches, weights)
    }

    /// Exact probabilities of every option at `state`, as (numerator, denominator).
    pub fn probabilities(&self, state: &PrefixState<'_>) -> Vec<(Option<String>, BigUint, BigUint)> {
        let (branches, weights) = self.branches(state);
        let total: BigUint = weights.iter().sum();
        let g = state.grammar();
        branches
            .into_iter()
            .zip(weights)
            .map(|(b, w)| (b.word.map(|w| g.word(w).to_owned()), w, total.clone()))
            .collect()
    }
}

/// Bigram counts over a training corpus, including sentence boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmpiricalModel {
    counts: HashMap<(String, String), u64>,
}

impl EmpiricalModel {
    pub fn fit<S: AsRef<str>>(sentences: impl IntoIterator<Item = Vec<S>>) -> Self {
        let mut counts = HashMap::new();
        for sentence in sentences {
            let mut prev = SENTENCE_START.to_owned();
            for w in &sentence {
                let w = w.as_ref().to_owned();
                *counts.entry((prev, w.clone())).or_insert(0) += 1;
                prev = w;
            }
            *counts.entry((prev, SENTENCE_END.to_owned())).or_insert(0) += 1;
        }
        EmpiricalModel { counts }
    }

    /// Fit only on sentences the grammar accepts.
    pub fn fit_grammatical<S: AsRef<str>>(grammar: &Grammar, sentences: &[Vec<S>]) -> Self {
        Self::fit(
            sentences
                .iter()
                .filter(|s| grammar.accepts(s))
                .map(|s| s.iter().map(|w| w.as_ref().to_owned()).collect::<Vec<_>>()),
        )
    }

    pub fn count(&self, context: &str, next: &str) -> u64 {
        self.counts
            .get(&(context.to_owned(), next.to_owned()))
            .copied()
            .unwrap_or(0)
    }

    /// Short content hash identifying the fitted counts.
    pub fn fingerprint(&self) -> String {
        let sorted: BTreeMap<_, _> = self.counts.iter().collect();
        let mut h = Sha256::new();
        for ((a, b), c) in sorted {
            h.update(format!("{a}\t{b}\t{c}\n").as_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn uniform_sentence_weights_are_completion_counts() {
        let g = Grammar::parse(fixtures::TOY_GRAMMAR).unwrap();
        let a = g.prefix_state(&["A"]).unwrap();
        let (branches, weights) = SymbolModel::UniformSentence.branches(&a);
        assert_eq!(branches[0].word, None);
        let w: Vec<u32> = weights.iter().map(|w| w.try_into().unwrap()).collect();
        // STOP, A, B (A B, A B C), C
        assert_eq!(w, vec![1, 1, 2, 1]);
    }

    #[test]
    fn empirical_weights_are_smoothed_counts() {
        let g = Grammar::parse(fixtures::TOY_GRAMMAR).unwrap();
        let m = EmpiricalModel::fit(vec![vec!["A", "B"], vec!["A", "B"], vec!["A"]]);
        assert_eq!(m.count("A", "B"), 2);
        assert_eq!(m.count("A", SENTENCE_END), 1);
        let a = g.prefix_state(&["A"]).unwrap();
        let (_, weights) = SymbolModel::Empirical(m).branches(&a);
        let w: Vec<u32> = weights.iter().map(|w| w.try_into().unwrap()).collect();
        assert_eq!(w, vec![2, 1, 3, 1]);
    }

    #[test]
    fn fingerprint_is_order_independent() {
        let a = EmpiricalModel::fit(vec![vec!["x"], vec!["y"]]);
        let b = EmpiricalModel::fit(vec![vec!["y"], vec!["x"]]);
        assert_eq!(a.fingerprint(), b.fingerprint());
    }
}
