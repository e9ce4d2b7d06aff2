//! Brute-force oracles: plain recursive expansion of the productions, with
//! no prefix automaton, memoization or sharing.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ariel_core::fixtures;
use ariel_core::grammar::{NonterminalId, Symbol};
use ariel_core::Grammar;

pub type Sentence = Vec<String>;

/// Fixtures small enough to enumerate.
pub fn enumerable_fixtures() -> Vec<(&'static str, Grammar)> {
    vec![
        ("toy", Grammar::parse(fixtures::TOY_GRAMMAR).unwrap()),
        ("single", Grammar::parse(fixtures::SINGLE_GRAMMAR).unwrap()),
        ("mini", Grammar::parse(fixtures::MINI_GRAMMAR).unwrap()),
        ("ambiguous", Grammar::parse(AMBIGUOUS).unwrap()),
    ]
}

/// Several derivations per sentence, multi-word terminals, and prefixes
/// that are sentences themselves.
pub const AMBIGUOUS: &str = "\
s -> x | x y | 'p q' r
x -> 'p' | 'p' 'q' | a
a => 'p' | 'p q'
y -> 'q' | 'q' 'r' | r
r -> 'r' | 'q r'
";

fn expand_symbol(g: &Grammar, sym: &Symbol) -> Vec<Sentence> {
    match sym {
        Symbol::Terminal(t) => vec![g.terminal_text(*t).split(' ').map(str::to_owned).collect()],
        Symbol::Nonterminal(n) => expand(g, *n),
    }
}

fn expand(g: &Grammar, nt: NonterminalId) -> Vec<Sentence> {
    let mut out = Vec::new();
    for alt in g.alternatives(nt) {
        let mut partial: Vec<Sentence> = vec![Vec::new()];
        for sym in alt {
            let pieces = expand_symbol(g, sym);
            let mut next = Vec::new();
            for p in &partial {
                for q in &pieces {
                    let mut v = p.clone();
                    v.extend(q.iter().cloned());
                    next.push(v);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

/// Every sentence of the language, as distinct token sequences.
pub fn language(g: &Grammar) -> BTreeSet<Sentence> {
    let start = g.nonterminal_id(g.start_symbol()).unwrap();
    expand(g, start).into_iter().collect()
}

/// Every template, stopping at `categories`.
pub fn templates(g: &Grammar, categories: &BTreeSet<String>) -> BTreeSet<String> {
    fn go(g: &Grammar, nt: NonterminalId, cats: &BTreeSet<String>) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for alt in g.alternatives(nt) {
            let mut partial: Vec<Vec<String>> = vec![Vec::new()];
            for sym in alt {
                let pieces: Vec<Vec<String>> = match sym {
                    Symbol::Terminal(t) => vec![vec![format!("'{}'", g.terminal_text(*t))]],
                    Symbol::Nonterminal(m) => {
                        let name = &g.nonterminals()[*m];
                        if cats.contains(name) {
                            vec![vec![name.clone()]]
                        } else {
                            go(g, *m, cats)
                        }
                    }
                };
                partial = partial
                    .iter()
                    .flat_map(|p| {
                        pieces.iter().map(move |q| {
                            let mut v = p.clone();
                            v.extend(q.iter().cloned());
                            v
                        })
                    })
                    .collect();
            }
            out.extend(partial);
        }
        out
    }
    let start = g.nonterminal_id(g.start_symbol()).unwrap();
    go(g, start, categories)
        .into_iter()
        .map(|t| format!("[{}]", t.join(", ")))
        .collect()
}

/// Every proper and full prefix of every sentence, including the empty one.
pub fn prefixes(lang: &BTreeSet<Sentence>) -> BTreeSet<Sentence> {
    let mut out = BTreeSet::new();
    for s in lang {
        for k in 0..=s.len() {
            out.insert(s[..k].to_vec());
        }
    }
    out
}

pub fn words(s: &str) -> Sentence {
    s.split(' ').map(str::to_owned).collect()
}
