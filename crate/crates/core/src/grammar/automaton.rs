//! Incremental recognition over an acyclic grammar.
//!
//! A recognizer state is the set of pending derivation items reachable after a
//! word prefix. Each item sits inside one terminal (at a word offset) and
//! carries the stack of alternatives still to be finished once that terminal
//! is done. Frames whose dot has reached the end are popped eagerly, so two
//! prefixes that leave the same work behind share one state.
//!
//! States are interned lazily into a word-level automaton owned by the
//! grammar. Because the grammar is acyclic the automaton is a DAG, and the
//! number of distinct sentences completing a state is
//! `[state is complete] + sum over outgoing edges of completions(target)`,
//! which counts token sequences, never derivations.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{Grammar, GrammarError, Symbol, WordId};

/// Items still inside a terminal, and stacks to resume.
type Successors = (Vec<Item>, Vec<Arc<[Frame]>>);

pub(crate) type StateId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Frame {
    nt: u32,
    alt: u32,
    dot: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Item {
    term: u32,
    offset: u32,
    ret: Arc<[Frame]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct ItemSet {
    items: Vec<Item>,
    complete: bool,
}

struct Node {
    set: Arc<ItemSet>,
    edges: Option<Arc<[(WordId, StateId)]>>,
    count: Option<BigUint>,
}

#[derive(Default)]
pub(crate) struct Automaton {
    nodes: Vec<Node>,
    index: HashMap<Arc<ItemSet>, StateId>,
    initial: Option<StateId>,
}

/// Push every terminal item reachable by finishing the frames in `ret`.
/// An exhausted stack means the whole sentence can end here.
fn expand(g: &Grammar, mut ret: Vec<Frame>, out: &mut Vec<Item>, complete: &mut bool) {
    let Some(top) = ret.pop() else {
        *complete = true;
        return;
    };
    let alt = &g.productions[top.nt as usize][top.alt as usize];
    let sym = alt[top.dot as usize];
    if (top.dot as usize) + 1 < alt.len() {
        ret.push(Frame {
            dot: top.dot + 1,
            ..top
        });
    }
    match sym {
        Symbol::Terminal(t) => out.push(Item {
            term: t as u32,
            offset: 0,
            ret: ret.into(),
        }),
        Symbol::Nonterminal(n) => {
            for a in 0..g.productions[n].len() {
                let mut next = ret.clone();
                next.push(Frame {
                    nt: n as u32,
                    alt: a as u32,
                    dot: 0,
                });
                expand(g, next, out, complete);
            }
        }
    }
}

impl Automaton {
    fn intern(&mut self, mut items: Vec<Item>, complete: bool) -> StateId {
        items.sort_unstable();
        items.dedup();
        let set = Arc::new(ItemSet { items, complete });
        if let Some(&id) = self.index.get(&set) {
            return id;
        }
        let id = self.nodes.len() as StateId;
        self.index.insert(set.clone(), id);
        self.nodes.push(Node {
            set,
            edges: None,
            count: None,
        });
        id
    }

    pub(crate) fn initial(&mut self, g: &Grammar) -> StateId {
        if let Some(id) = self.initial {
            return id;
        }
        let mut items = Vec::new();
        let mut complete = false;
        let start = g.start_id();
        for a in 0..g.productions[start].len() {
            let frame = Frame {
                nt: start as u32,
                alt: a as u32,
                dot: 0,
            };
            expand(g, vec![frame], &mut items, &mut complete);
        }
        let id = self.intern(items, complete);
        self.initial = Some(id);
        id
    }

    pub(crate) fn is_complete(&self, id: StateId) -> bool {
        self.nodes[id as usize].set.complete
    }

    /// Outgoing edges sorted by word id (vocabulary order).
    pub(crate) fn edges(&mut self, g: &Grammar, id: StateId) -> Arc<[(WordId, StateId)]> {
        if let Some(e) = &self.nodes[id as usize].edges {
            return e.clone();
        }
        let set = self.nodes[id as usize].set.clone();
        let mut by_word: BTreeMap<WordId, Successors> = BTreeMap::new();
        for item in &set.items {
            let words = g.terminal_words(item.term as usize);
            let word = words[item.offset as usize];
            let entry = by_word.entry(word).or_default();
            if (item.offset as usize) + 1 < words.len() {
                entry.0.push(Item {
                    offset: item.offset + 1,
                    ..item.clone()
                });
            } else {
                entry.1.push(item.ret.clone());
            }
        }
        let mut edges = Vec::with_capacity(by_word.len());
        for (word, (mut items, mut rets)) in by_word {
            rets.sort_unstable();
            rets.dedup();
            let mut complete = false;
            for ret in rets {
                expand(g, ret.to_vec(), &mut items, &mut complete);
            }
            edges.push((word, self.intern(items, complete)));
        }
        let edges: Arc<[(WordId, StateId)]> = edges.into();
        self.nodes[id as usize].edges = Some(edges.clone());
        edges
    }

    pub(crate) fn step(&mut self, g: &Grammar, id: StateId, word: WordId) -> Option<StateId> {
        let edges = self.edges(g, id);
        edges
            .binary_search_by_key(&word, |e| e.0)
            .ok()
            .map(|i| edges[i].1)
    }

    pub(crate) fn count(&mut self, g: &Grammar, id: StateId) -> BigUint {
        if let Some(c) = &self.nodes[id as usize].count {
            return c.clone();
        }
        let edges = self.edges(g, id);
        let mut total = if self.is_complete(id) {
            BigUint::one()
        } else {
            BigUint::zero()
        };
        for &(_, child) in edges.iter() {
            total += self.count(g, child);
        }
        self.nodes[id as usize].count = Some(total.clone());
        total
    }

    pub(crate) fn len(&self) -> usize {
        self.nodes.len()
    }
}

/// Words that may follow a prefix, in vocabulary order, and whether the
/// prefix may stop here. STOP is listed first wherever it applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Continuations {
    pub stop: bool,
    pub words: Vec<String>,
}

impl Continuations {
    /// `None` stands for STOP.
    pub fn iter(&self) -> impl Iterator<Item = Option<&str>> {
        self.stop
            .then_some(None)
            .into_iter()
            .chain(self.words.iter().map(|w| Some(w.as_str())))
    }

    pub fn len(&self) -> usize {
        self.words.len() + usize::from(self.stop)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Recognition state after a word prefix.
#[derive(Clone)]
pub struct PrefixState<'g> {
    grammar: &'g Grammar,
    id: StateId,
    tokens: Vec<WordId>,
}

impl std::fmt::Debug for PrefixState<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrefixState")
            .field("prefix", &self.prefix())
            .field("complete", &self.is_complete())
            .finish()
    }
}

impl PartialEq for PrefixState<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.grammar, other.grammar) && self.id == other.id && self.tokens == other.tokens
    }
}

impl Grammar {
    /// The state for the empty prefix.
    pub fn start(&self) -> PrefixState<'_> {
        let id = self.automaton().initial(self);
        PrefixState {
            grammar: self,
            id,
            tokens: Vec::new(),
        }
    }

    /// Fold `advance` over `tokens` from the empty prefix.
    pub fn prefix_state<S: AsRef<str>>(&self, tokens: &[S]) -> Result<PrefixState<'_>, GrammarError> {
        let mut state = self.start();
        for t in tokens {
            state = state.advance(t.as_ref())?;
        }
        Ok(state)
    }

    /// True iff `tokens` is a sentence of the language.
    pub fn accepts<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        self.prefix_state(tokens).is_ok_and(|s| s.is_complete())
    }

    /// Exact number of distinct sentences in the language.
    pub fn count_language(&self) -> BigUint {
        self.start().count_completions()
    }

    /// Number of automaton states built so far.
    pub fn states_built(&self) -> usize {
        self.automaton().len()
    }
}

impl<'g> PrefixState<'g> {
    pub fn grammar(&self) -> &'g Grammar {
        self.grammar
    }

    pub fn tokens_consumed(&self) -> usize {
        self.tokens.len()
    }

    pub fn prefix(&self) -> Vec<&'g str> {
        self.tokens.iter().map(|&w| self.grammar.word(w)).collect()
    }

    pub(crate) fn word_ids(&self) -> &[WordId] {
        &self.tokens
    }

    /// The consumed prefix is itself a sentence.
    pub fn is_complete(&self) -> bool {
        self.grammar.automaton().is_complete(self.id)
    }

    pub(crate) fn edges(&self) -> Arc<[(WordId, StateId)]> {
        self.grammar.automaton().edges(self.grammar, self.id)
    }

    pub fn continuations(&self) -> Continuations {
        let edges = self.edges();
        Continuations {
            stop: self.is_complete(),
            words: edges.iter().map(|&(w, _)| self.grammar.word(w).to_owned()).collect(),
        }
    }

    pub fn advance(&self, token: &str) -> Result<PrefixState<'g>, GrammarError> {
        let invalid = || GrammarError::InvalidContinuation {
            token: token.to_owned(),
        };
        let word = self.grammar.word_id(token).ok_or_else(invalid)?;
        self.advance_id(word).ok_or_else(invalid)
    }

    pub(crate) fn advance_id(&self, word: WordId) -> Option<PrefixState<'g>> {
        let next = self.grammar.automaton().step(self.grammar, self.id, word)?;
        let mut tokens = self.tokens.clone();
        tokens.push(word);
        Some(PrefixState {
            grammar: self.grammar,
            id: next,
            tokens,
        })
    }

    /// Advance to a known target state, skipping the edge lookup.
    pub(crate) fn follow(&self, word: WordId, target: StateId) -> PrefixState<'g> {
        let mut tokens = self.tokens.clone();
        tokens.push(word);
        PrefixState {
            grammar: self.grammar,
            id: target,
            tokens,
        }
    }

    /// Number of distinct sentences that extend (or equal) the prefix.
    pub fn count_completions(&self) -> BigUint {
        self.grammar.automaton().count(self.grammar, self.id)
    }

    pub(crate) fn count_of(&self, id: StateId) -> BigUint {
        self.grammar.automaton().count(self.grammar, id)
    }
}
