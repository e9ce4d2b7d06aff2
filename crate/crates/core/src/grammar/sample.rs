use num_bigint::{BigUint, RandBigInt};
use rand::Rng;

use super::{Grammar, PrefixState};
use crate::model::SymbolModel;

impl Grammar {
    /// Every sentence of the language in canonical order (STOP before
    /// extensions, then vocabulary order), or `None` when the language has
    /// more than `limit` sentences.
    pub fn sentences(&self, limit: usize) -> Option<Vec<Vec<String>>> {
        fn walk(state: &PrefixState<'_>, out: &mut Vec<Vec<String>>) {
            if state.is_complete() {
                out.push(state.prefix().into_iter().map(str::to_owned).collect());
            }
            for &(w, t) in state.edges().iter() {
                walk(&state.follow(w, t), out);
            }
        }
        if self.count_language() > BigUint::from(limit) {
            return None;
        }
        let mut out = Vec::new();
        walk(&self.start(), &mut out);
        Some(out)
    }
}

/// Draw one sentence by walking the prefix automaton, choosing each option
/// with probability proportional to its model weight. Under
/// [`SymbolModel::UniformSentence`] every sentence is equally likely.
pub fn sample_sentence<R: Rng + ?Sized>(g: &Grammar, model: &SymbolModel, rng: &mut R) -> Vec<String> {
    let mut state = g.start();
    loop {
        let (branches, weights) = model.branches(&state);
        assert!(!branches.is_empty(), "prefix state with no options");
        let total: BigUint = weights.iter().sum();
        let mut r = rng.gen_biguint_below(&total);
        let mut pick = 0;
        for (i, w) in weights.iter().enumerate() {
            if r < *w {
                pick = i;
                break;
            }
            r -= w;
        }
        let b = &branches[pick];
        match (b.word, b.target) {
            (Some(w), Some(t)) => state = state.follow(w, t),
            _ => return state.prefix().into_iter().map(str::to_owned).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn toy_sentences_in_canonical_order() {
        let g = Grammar::parse(fixtures::TOY_GRAMMAR).unwrap();
        let all = g.sentences(100).unwrap();
        let text: Vec<String> = all.iter().map(|s| s.join(" ")).collect();
        assert_eq!(text, ["A", "A A", "A B", "A B C", "A C", "B", "B B", "B B C"]);
        assert!(g.sentences(7).is_none());
    }

    #[test]
    fn single_production_always_same() {
        let g = Grammar::parse(fixtures::SINGLE_GRAMMAR).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(sample_sentence(&g, &SymbolModel::UniformSentence, &mut rng), vec!["a"]);
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| sample_sentence(&g, &SymbolModel::UniformSentence, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
        assert!(draw(7).iter().all(|s| g.accepts(s)));
    }
}
