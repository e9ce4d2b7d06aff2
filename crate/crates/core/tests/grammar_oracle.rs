mod common;

use std::collections::{BTreeMap, BTreeSet};

use ariel_core::fixtures;
use ariel_core::grammar::{GrammarError, DEFAULT_TEMPLATE_CAP};
use ariel_core::Grammar;
use num_bigint::BigUint;
use proptest::prelude::*;

use common::{enumerable_fixtures, language, prefixes, words, Sentence};

/// Continuations of every prefix, read off the enumerated language.
fn oracle_continuations(lang: &BTreeSet<Sentence>) -> BTreeMap<Sentence, (bool, BTreeSet<String>)> {
    let mut out: BTreeMap<Sentence, (bool, BTreeSet<String>)> = BTreeMap::new();
    for s in lang {
        for k in 0..=s.len() {
            let entry = out.entry(s[..k].to_vec()).or_default();
            if k == s.len() {
                entry.0 = true;
            } else {
                entry.1.insert(s[k].clone());
            }
        }
    }
    out
}

#[test]
fn language_size_matches_enumeration() {
    for (name, g) in enumerable_fixtures() {
        let lang = language(&g);
        assert!(lang.len() < 1_000_000);
        assert_eq!(g.count_language(), BigUint::from(lang.len()), "{name}");
        let listed: BTreeSet<Sentence> = g.sentences(lang.len()).unwrap().into_iter().collect();
        assert_eq!(listed, lang, "{name}");
    }
}

#[test]
fn completions_match_enumeration_for_every_prefix() {
    for (name, g) in enumerable_fixtures() {
        let lang = language(&g);
        for p in prefixes(&lang) {
            let expected = lang.iter().filter(|s| s.starts_with(&p)).count();
            let state = g.prefix_state(&p).unwrap();
            assert_eq!(state.count_completions(), BigUint::from(expected), "{name}: {p:?}");
        }
    }
}

#[test]
fn continuations_are_sound_and_complete() {
    for (name, g) in enumerable_fixtures() {
        let lang = language(&g);
        for (p, (stop, next)) in oracle_continuations(&lang) {
            let state = g.prefix_state(&p).unwrap();
            assert_eq!(state.is_complete(), stop, "{name}: {p:?}");
            let c = state.continuations();
            assert_eq!(c.stop, stop);
            let got: BTreeSet<String> = c.words.iter().cloned().collect();
            assert_eq!(got, next, "{name}: {p:?}");
            // Canonical order: vocabulary order, no duplicates.
            let ids: Vec<usize> = c.words.iter().map(|w| g.word_id(w).unwrap()).collect();
            assert!(ids.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(c.iter().next().unwrap().is_none(), stop);
        }
    }
}

#[test]
fn completion_counts_add_up() {
    for (name, g) in enumerable_fixtures() {
        for p in prefixes(&language(&g)) {
            let state = g.prefix_state(&p).unwrap();
            let mut sum = BigUint::from(state.is_complete() as u32);
            for w in &state.continuations().words {
                sum += state.advance(w).unwrap().count_completions();
            }
            assert_eq!(sum, state.count_completions(), "{name}: {p:?}");
        }
    }
}

#[test]
fn recognition_matches_enumeration() {
    for (name, g) in enumerable_fixtures() {
        let lang = language(&g);
        for s in &lang {
            assert!(g.recognize(s).accepted, "{name}: {s:?}");
            let mut state = g.start();
            for w in s {
                state = state.advance(w).unwrap();
            }
            assert!(state.is_complete());
        }
        // Every one-word extension outside the continuations is rejected.
        for p in prefixes(&lang) {
            let state = g.prefix_state(&p).unwrap();
            let allowed = state.continuations().words;
            for w in g.vocabulary() {
                let mut q = p.clone();
                q.push(w.clone());
                if allowed.contains(w) {
                    assert!(state.advance(w).is_ok());
                } else {
                    assert!(matches!(
                        state.advance(w),
                        Err(GrammarError::InvalidContinuation { .. })
                    ));
                }
                assert_eq!(g.recognize(&q).accepted, lang.contains(&q), "{name}: {q:?}");
            }
        }
    }
}

#[test]
fn templates_match_expansion_oracle() {
    for (name, g) in enumerable_fixtures() {
        for cats in [BTreeSet::new(), g.lexical_categories(), g.phrase_categories()] {
            let got: BTreeSet<String> = g
                .enumerate_templates(&cats, DEFAULT_TEMPLATE_CAP)
                .unwrap()
                .iter()
                .map(|t| t.to_string())
                .collect();
            assert_eq!(got, common::templates(&g, &cats), "{name}");
        }
    }
}

#[test]
fn question_fixture_template_count() {
    let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
    let cats = g.lexical_categories();
    let got = g.enumerate_templates(&cats, DEFAULT_TEMPLATE_CAP).unwrap();
    let oracle = common::templates(&g, &cats);
    assert_eq!(got.len(), oracle.len());
    assert_eq!(got.len(), 15_396);
    let wanted = "[qword, adjective_state, 'and', adjective_relative_size, '?']";
    assert!(got.iter().any(|t| t.to_string() == wanted));
}

#[test]
fn question_fixture_recognition_examples() {
    let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
    let out = g.recognize(&words("is it blue and red ?"));
    assert!(out.accepted);
    assert_eq!(
        out.template.unwrap().to_string(),
        "[qword, adjective, 'and', adjective, '?']"
    );
    let c = g.prefix_state(&words("can it play")).unwrap().continuations();
    assert_eq!((c.stop, c.words), (false, vec!["music".to_owned()]));
}

#[test]
fn identical_sources_give_identical_grammars() {
    let a = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
    let b = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.vocabulary(), b.vocabulary());
    assert_eq!(a.content_hash(), b.content_hash());
    assert_eq!(a.count_language(), b.count_language());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_walks_stay_grammatical(choices in prop::collection::vec(any::<prop::sample::Index>(), 1..40)) {
        let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
        let mut state = g.start();
        let mut stopped = false;
        for ix in &choices {
            let c = state.continuations();
            let options: Vec<Option<&str>> = c.iter().collect();
            match options[ix.index(options.len())] {
                None => { stopped = true; break; }
                Some(w) => state = state.advance(w).unwrap(),
            }
            if state.continuations().words.is_empty() {
                stopped = true;
                break;
            }
        }
        let prefix: Vec<&str> = state.prefix();
        if stopped {
            prop_assert!(g.accepts(&prefix));
        }
        prop_assert!(state.count_completions() >= BigUint::from(1u32));
    }
}
