//! Canonical forms for semantic comparison.
//!
//! Two sentences are semantically identical when they differ only in the
//! order of coordinated items: "is it blue and red ?" and "is it red and
//! blue ?". Coordinations are runs `X (, X)* and X` of one nonterminal inside
//! a single rule of the canonical derivation; the canonical form sorts the
//! items of every such run by their words.

use std::ops::Range;

use crate::grammar::{Derivation, Grammar};

use super::EvalError;

const MAX_PASSES: usize = 16;

/// Sort coordinated items into a deterministic order. Idempotent, and keeps
/// the multiset of words.
pub fn canonicalize<S: AsRef<str>>(grammar: &Grammar, tokens: &[S]) -> Result<Vec<String>, EvalError> {
    let mut current: Vec<String> = tokens.iter().map(|t| t.as_ref().to_owned()).collect();
    for _ in 0..MAX_PASSES {
        let derivation = grammar
            .derivation(&current)
            .ok_or_else(|| EvalError::NotInLanguage(current.join(" ")))?;
        let next = sort_coordinations(&derivation, &current);
        if next == current {
            break;
        }
        current = next;
    }
    Ok(current)
}

fn nonterminal_name(d: &Derivation) -> Option<&str> {
    match d {
        Derivation::Nonterminal { name, .. } => Some(name),
        Derivation::Terminal { .. } => None,
    }
}

fn is_literal(d: &Derivation, word: &str) -> bool {
    matches!(d, Derivation::Terminal { text, .. } if text == word)
}

/// Item spans of every coordination run directly under `children`.
fn runs(children: &[Derivation]) -> Vec<Vec<Range<usize>>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < children.len() {
        let Some(name) = nonterminal_name(&children[i]) else {
            i += 1;
            continue;
        };
        let same = |d: &Derivation| nonterminal_name(d) == Some(name);
        let mut items = vec![children[i].span()];
        let mut j = i + 1;
        while j + 1 < children.len() && is_literal(&children[j], ",") && same(&children[j + 1]) {
            items.push(children[j + 1].span());
            j += 2;
        }
        if j + 1 < children.len() && is_literal(&children[j], "and") && same(&children[j + 1]) {
            items.push(children[j + 1].span());
            out.push(items);
            i = j + 2;
        } else {
            i += 1;
        }
    }
    out
}

fn collect(d: &Derivation, out: &mut Vec<Vec<Range<usize>>>) {
    if let Derivation::Nonterminal { children, .. } = d {
        out.extend(runs(children));
        for c in children {
            collect(c, out);
        }
    }
}

fn sort_coordinations(d: &Derivation, tokens: &[String]) -> Vec<String> {
    let mut found = Vec::new();
    collect(d, &mut found);
    // Outermost runs come first in pre-order; skip anything nested in one.
    let mut taken: Vec<Range<usize>> = Vec::new();
    let mut edits: Vec<(Range<usize>, Vec<String>)> = Vec::new();
    for items in found {
        let whole = items[0].start..items[items.len() - 1].end;
        if taken.iter().any(|r| r.start < whole.end && whole.start < r.end) {
            continue;
        }
        let mut pieces: Vec<&[String]> = items.iter().map(|r| &tokens[r.clone()]).collect();
        pieces.sort();
        let n = pieces.len();
        let mut words = Vec::with_capacity(whole.len());
        for (k, p) in pieces.into_iter().enumerate() {
            words.extend_from_slice(p);
            if k + 2 < n {
                words.push(",".to_owned());
            } else if k + 2 == n {
                words.push("and".to_owned());
            }
        }
        taken.push(whole.clone());
        edits.push((whole, words));
    }
    edits.sort_by_key(|(r, _)| std::cmp::Reverse(r.start));
    let mut out = tokens.to_vec();
    for (range, words) in edits {
        out.splice(range, words);
    }
    out
}
