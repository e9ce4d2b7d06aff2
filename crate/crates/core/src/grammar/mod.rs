//! Finite-language context-free grammars.
//!
//! A [`Grammar`] is loaded from the line-oriented grammar format, validated to
//! be acyclic, and then queried through [`PrefixState`]s: an incremental
//! recognizer that knows which words may follow a prefix and how many
//! distinct sentences complete it.

mod automaton;
mod derive;
mod parse;
mod sample;
mod templates;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ErrorCode;

pub use automaton::{Continuations, PrefixState};
pub use derive::{Derivation, ParseOutcome, Span};
pub use sample::sample_sentence;
pub use templates::{RuleTemplate, TemplateItem, DEFAULT_TEMPLATE_CAP};

pub(crate) use automaton::{Automaton, StateId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("undefined symbol `{name}` on line {line}")]
    UndefinedSymbol { name: String, line: usize },
    #[error("grammar is recursive: {}", .cycle.join(" -> "))]
    CyclicGrammar { cycle: Vec<String> },
    #[error("grammar has no productions")]
    Empty,
    #[error("`{token}` cannot follow the current prefix")]
    InvalidContinuation { token: String },
    #[error("template count exceeds the cap of {cap}")]
    ExplosionGuard { cap: usize },
    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(String),
}

impl ErrorCode for GrammarError {
    fn code(&self) -> &'static str {
        match self {
            GrammarError::Syntax { .. } => "E_GRAMMAR_SYNTAX",
            GrammarError::UndefinedSymbol { .. } => "E_UNDEFINED_SYMBOL",
            GrammarError::CyclicGrammar { .. } => "E_CYCLIC_GRAMMAR",
            GrammarError::Empty => "E_EMPTY_GRAMMAR",
            GrammarError::InvalidContinuation { .. } => "E_INVALID_CONTINUATION",
            GrammarError::ExplosionGuard { .. } => "E_EXPLOSION_GUARD",
            GrammarError::UnknownNonterminal(_) => "E_UNKNOWN_NONTERMINAL",
        }
    }
}

pub type NonterminalId = usize;
pub type TerminalId = usize;
pub type WordId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Nonterminal(NonterminalId),
    Terminal(TerminalId),
}

/// An immutable, acyclic context-free grammar.
///
/// All orders (nonterminals, terminals, alternatives, vocabulary) are the
/// order of first appearance in the source text. The codec lays out its
/// partitions in vocabulary order, so this order is part of the encoding.
pub struct Grammar {
    source: String,
    hash: String,
    nonterminals: Vec<String>,
    nonterminal_index: HashMap<String, NonterminalId>,
    terminals: Vec<Vec<WordId>>,
    terminal_index: HashMap<Vec<WordId>, TerminalId>,
    vocabulary: Vec<String>,
    word_index: HashMap<String, WordId>,
    productions: Vec<Vec<Vec<Symbol>>>,
    start: NonterminalId,
    automaton: Mutex<Automaton>,
}

impl fmt::Debug for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grammar")
            .field("start", &self.nonterminals[self.start])
            .field("nonterminals", &self.nonterminals.len())
            .field("terminals", &self.terminals.len())
            .field("vocabulary", &self.vocabulary.len())
            .field("hash", &self.hash)
            .finish()
    }
}

impl Clone for Grammar {
    fn clone(&self) -> Self {
        Grammar::parse(&self.source).expect("source of a valid grammar reparses")
    }
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.nonterminals == other.nonterminals
            && self.terminals == other.terminals
            && self.vocabulary == other.vocabulary
            && self.productions == other.productions
            && self.start == other.start
    }
}

impl Eq for Grammar {}

/// Load and validate a grammar from source text.
pub fn load_grammar(source: &str) -> Result<Grammar, GrammarError> {
    Grammar::parse(source)
}

impl Grammar {
    pub fn parse(source: &str) -> Result<Grammar, GrammarError> {
        let raw = parse::parse(source)?;
        if raw.productions.is_empty() {
            return Err(GrammarError::Empty);
        }

        let mut nonterminals = Vec::new();
        let mut nonterminal_index = HashMap::new();
        for p in &raw.productions {
            if !nonterminal_index.contains_key(&p.lhs) {
                nonterminal_index.insert(p.lhs.clone(), nonterminals.len());
                nonterminals.push(p.lhs.clone());
            }
        }
        let start_name = raw
            .start
            .clone()
            .unwrap_or_else(|| raw.productions[0].lhs.clone());
        let start = *nonterminal_index
            .get(&start_name)
            .ok_or_else(|| GrammarError::UndefinedSymbol {
                name: start_name.clone(),
                line: 0,
            })?;

        let mut terminals: Vec<Vec<WordId>> = Vec::new();
        let mut terminal_index = HashMap::new();
        let mut vocabulary = Vec::new();
        let mut word_index: HashMap<String, WordId> = HashMap::new();
        let mut productions = vec![Vec::new(); nonterminals.len()];

        for p in &raw.productions {
            let lhs = nonterminal_index[&p.lhs];
            for alt in &p.alternatives {
                let mut symbols = Vec::with_capacity(alt.len());
                for sym in alt {
                    match sym {
                        parse::RawSymbol::Name(n) => {
                            let id = *nonterminal_index.get(n).ok_or_else(|| {
                                GrammarError::UndefinedSymbol {
                                    name: n.clone(),
                                    line: p.line,
                                }
                            })?;
                            symbols.push(Symbol::Nonterminal(id));
                        }
                        parse::RawSymbol::Quoted(words) => {
                            let ids: Vec<WordId> = words
                                .iter()
                                .map(|w| {
                                    *word_index.entry(w.clone()).or_insert_with(|| {
                                        vocabulary.push(w.clone());
                                        vocabulary.len() - 1
                                    })
                                })
                                .collect();
                            let tid = *terminal_index.entry(ids.clone()).or_insert_with(|| {
                                terminals.push(ids);
                                terminals.len() - 1
                            });
                            symbols.push(Symbol::Terminal(tid));
                        }
                    }
                }
                productions[lhs].push(symbols);
            }
        }

        check_acyclic(&nonterminals, &productions)?;

        Ok(Grammar {
            hash: hex::encode(Sha256::digest(source.as_bytes())),
            source: source.to_owned(),
            nonterminals,
            nonterminal_index,
            terminals,
            terminal_index,
            vocabulary,
            word_index,
            productions,
            start,
            automaton: Mutex::new(Automaton::default()),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Hex SHA-256 of the source text.
    pub fn content_hash(&self) -> &str {
        &self.hash
    }

    pub fn start_symbol(&self) -> &str {
        &self.nonterminals[self.start]
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.vocabulary[id]
    }

    pub fn word_id(&self, word: &str) -> Option<WordId> {
        self.word_index.get(word).copied()
    }

    pub fn terminal_count(&self) -> usize {
        self.terminals.len()
    }

    /// Words of a terminal, joined by spaces.
    pub fn terminal_text(&self, id: TerminalId) -> String {
        self.words_text(&self.terminals[id])
    }

    pub fn terminal_id(&self, text: &str) -> Option<TerminalId> {
        let ids: Option<Vec<WordId>> = text.split_whitespace().map(|w| self.word_id(w)).collect();
        self.terminal_index.get(&ids?).copied()
    }

    pub fn nonterminal_id(&self, name: &str) -> Option<NonterminalId> {
        self.nonterminal_index.get(name).copied()
    }

    pub fn alternatives(&self, nt: NonterminalId) -> &[Vec<Symbol>] {
        &self.productions[nt]
    }

    pub(crate) fn start_id(&self) -> NonterminalId {
        self.start
    }

    pub(crate) fn terminal_words(&self, id: TerminalId) -> &[WordId] {
        &self.terminals[id]
    }

    pub(crate) fn automaton(&self) -> std::sync::MutexGuard<'_, Automaton> {
        self.automaton.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn words_text(&self, ids: &[WordId]) -> String {
        ids.iter()
            .map(|&w| self.vocabulary[w].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Terminal text of every alternative of `nonterminal` that consists of
    /// terminals only.
    pub fn terminals_of(&self, nonterminal: &str) -> Result<Vec<String>, GrammarError> {
        let nt = self
            .nonterminal_id(nonterminal)
            .ok_or_else(|| GrammarError::UnknownNonterminal(nonterminal.to_owned()))?;
        Ok(self.productions[nt]
            .iter()
            .filter_map(|alt| self.alternative_text(alt))
            .collect())
    }

    /// The words of an all-terminal alternative, or `None`.
    pub fn alternative_text(&self, alt: &[Symbol]) -> Option<String> {
        let mut words = Vec::new();
        for sym in alt {
            match sym {
                Symbol::Terminal(t) => words.extend_from_slice(&self.terminals[*t]),
                Symbol::Nonterminal(_) => return None,
            }
        }
        Some(self.words_text(&words))
    }

    /// An alternative rendered in the grammar file format.
    pub fn alternative_source(&self, alt: &[Symbol]) -> String {
        alt.iter()
            .map(|&s| self.symbol_source(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn symbol_source(&self, sym: Symbol) -> String {
        match sym {
            Symbol::Nonterminal(n) => self.nonterminals[n].clone(),
            Symbol::Terminal(t) => format!("'{}'", self.terminal_text(t)),
        }
    }

    /// Serialize back to the grammar file format. The result reparses to an
    /// equal grammar.
    pub fn to_source(&self) -> String {
        let mut out = format!("start: {}\n", self.start_symbol());
        for (nt, alts) in self.productions.iter().enumerate() {
            let body: Vec<String> = alts
                .iter()
                .map(|alt| {
                    alt.iter()
                        .map(|&s| self.symbol_source(s))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            out.push_str(&format!("{} -> {}\n", self.nonterminals[nt], body.join(" | ")));
        }
        out
    }

    /// Build a sub-grammar that keeps only the all-terminal alternatives
    /// accepted by `keep(nonterminal, alternative_text)`. Alternatives that
    /// reference a nonterminal left without alternatives are pruned in turn.
    /// Returns `None` when the start symbol loses every alternative.
    pub fn restrict<F>(&self, keep: F) -> Option<Grammar>
    where
        F: Fn(&str, &str) -> bool,
    {
        let mut productions: Vec<Vec<Vec<Symbol>>> = self
            .productions
            .iter()
            .enumerate()
            .map(|(nt, alts)| {
                alts.iter()
                    .filter(|alt| match self.alternative_text(alt) {
                        Some(text) => keep(&self.nonterminals[nt], &text),
                        None => true,
                    })
                    .cloned()
                    .collect()
            })
            .collect();
        loop {
            let empty: Vec<bool> = productions.iter().map(Vec::is_empty).collect();
            let mut changed = false;
            for alts in productions.iter_mut() {
                let before = alts.len();
                alts.retain(|alt| {
                    alt.iter()
                        .all(|s| !matches!(s, Symbol::Nonterminal(n) if empty[*n]))
                });
                changed |= alts.len() != before;
            }
            if !changed {
                break;
            }
        }
        if productions[self.start].is_empty() {
            return None;
        }
        let mut out = format!("start: {}\n", self.start_symbol());
        for (nt, alts) in productions.iter().enumerate() {
            if alts.is_empty() {
                continue;
            }
            let body: Vec<String> = alts
                .iter()
                .map(|alt| {
                    alt.iter()
                        .map(|&s| self.symbol_source(s))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            out.push_str(&format!("{} -> {}\n", self.nonterminals[nt], body.join(" | ")));
        }
        Some(Grammar::parse(&out).expect("restriction of a valid grammar is valid"))
    }

    /// Nonterminals (other than the start symbol) whose alternatives are all
    /// made of terminals: `qword`, `determiner`, `adjective_color`, ...
    pub fn lexical_categories(&self) -> BTreeSet<String> {
        (0..self.nonterminals.len())
            .filter(|&nt| nt != self.start)
            .filter(|&nt| {
                self.productions[nt]
                    .iter()
                    .all(|alt| alt.iter().all(|s| matches!(s, Symbol::Terminal(_))))
            })
            .map(|nt| self.nonterminals[nt].clone())
            .collect()
    }

    /// Nonterminals (other than the start symbol) that only ever rewrite to a
    /// single category or to plain terminals: `adjective`, `noun`, `qword`, ...
    /// Templates built from these stop at the outermost such category.
    pub fn phrase_categories(&self) -> BTreeSet<String> {
        fn pure(g: &Grammar, nt: NonterminalId, memo: &mut HashMap<NonterminalId, bool>) -> bool {
            if let Some(&v) = memo.get(&nt) {
                return v;
            }
            let v = nt != g.start
                && g.productions[nt].iter().all(|alt| {
                    alt.iter().all(|s| matches!(s, Symbol::Terminal(_)))
                        || matches!(alt.as_slice(), [Symbol::Nonterminal(m)] if pure(g, *m, memo))
                });
            memo.insert(nt, v);
            v
        }
        let mut memo = HashMap::new();
        (0..self.nonterminals.len())
            .filter(|&nt| pure(self, nt, &mut memo))
            .map(|nt| self.nonterminals[nt].clone())
            .collect()
    }

    /// Nonterminals reachable from the start symbol.
    pub fn reachable(&self) -> BTreeSet<NonterminalId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.start];
        while let Some(nt) = stack.pop() {
            if seen.insert(nt) {
                for alt in &self.productions[nt] {
                    for s in alt {
                        if let Symbol::Nonterminal(m) = s {
                            stack.push(*m);
                        }
                    }
                }
            }
        }
        seen
    }
}

fn check_acyclic(
    names: &[String],
    productions: &[Vec<Vec<Symbol>>],
) -> Result<(), GrammarError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(
        nt: NonterminalId,
        productions: &[Vec<Vec<Symbol>>],
        marks: &mut [Mark],
        path: &mut Vec<NonterminalId>,
    ) -> Option<Vec<NonterminalId>> {
        marks[nt] = Mark::Active;
        path.push(nt);
        for alt in &productions[nt] {
            for s in alt {
                if let Symbol::Nonterminal(m) = *s {
                    match marks[m] {
                        Mark::Active => {
                            let from = path.iter().position(|&p| p == m).unwrap();
                            let mut cycle = path[from..].to_vec();
                            cycle.push(m);
                            return Some(cycle);
                        }
                        Mark::New => {
                            if let Some(c) = visit(m, productions, marks, path) {
                                return Some(c);
                            }
                        }
                        Mark::Done => {}
                    }
                }
            }
        }
        path.pop();
        marks[nt] = Mark::Done;
        None
    }

    let mut marks = vec![Mark::New; names.len()];
    for nt in 0..names.len() {
        if marks[nt] == Mark::New {
            if let Some(cycle) = visit(nt, productions, &mut marks, &mut Vec::new()) {
                return Err(GrammarError::CyclicGrammar {
                    cycle: cycle.into_iter().map(|n| names[n].clone()).collect(),
                });
            }
        }
    }
    Ok(())
}
