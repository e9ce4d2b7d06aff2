//! Full-sentence recognition with a canonical derivation.

use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use super::templates::{RuleTemplate, TemplateItem};
use super::{Grammar, NonterminalId, Symbol, WordId};

/// One node of a derivation tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Nonterminal {
        name: String,
        alternative: usize,
        span: Range<usize>,
        children: Vec<Derivation>,
    },
    Terminal {
        text: String,
        span: Range<usize>,
    },
}

impl Derivation {
    pub fn span(&self) -> Range<usize> {
        match self {
            Derivation::Nonterminal { span, .. } | Derivation::Terminal { span, .. } => span.clone(),
        }
    }

    /// Flatten, stopping at nonterminals in `categories`.
    pub fn template(&self, categories: &BTreeSet<String>) -> RuleTemplate {
        fn walk(d: &Derivation, categories: &BTreeSet<String>, out: &mut Vec<TemplateItem>) {
            match d {
                Derivation::Terminal { text, .. } => out.push(TemplateItem::Literal(text.clone())),
                Derivation::Nonterminal { name, children, .. } => {
                    if categories.contains(name) {
                        out.push(TemplateItem::Category(name.clone()));
                    } else {
                        for c in children {
                            walk(c, categories, out);
                        }
                    }
                }
            }
        }
        let mut items = Vec::new();
        walk(self, categories, &mut items);
        RuleTemplate(items)
    }

    /// Every nonterminal node as a span, outermost first.
    pub fn spans(&self) -> Vec<Span> {
        fn walk(d: &Derivation, out: &mut Vec<Span>) {
            if let Derivation::Nonterminal {
                name,
                span,
                children,
                ..
            } = d
            {
                out.push(Span {
                    range: span.clone(),
                    category: name.clone(),
                });
                for c in children {
                    walk(c, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// The first node (pre-order) for nonterminal `name`.
    pub fn find(&self, name: &str) -> Option<&Derivation> {
        match self {
            Derivation::Terminal { .. } => None,
            Derivation::Nonterminal {
                name: n, children, ..
            } => {
                if n == name {
                    return Some(self);
                }
                children.iter().find_map(|c| c.find(name))
            }
        }
    }
}

/// A token range covered by one nonterminal of the canonical derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub range: Range<usize>,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOutcome {
    pub accepted: bool,
    /// Template at phrase-category granularity.
    pub template: Option<RuleTemplate>,
    pub spans: Vec<Span>,
    pub derivation: Option<Derivation>,
}

impl ParseOutcome {
    fn rejected() -> Self {
        ParseOutcome {
            accepted: false,
            template: None,
            spans: Vec::new(),
            derivation: None,
        }
    }
}

struct SpanParser<'a> {
    g: &'a Grammar,
    tokens: &'a [WordId],
    sym: HashMap<(Symbol, usize, usize), bool>,
    seq: HashMap<(NonterminalId, usize, usize, usize, usize), bool>,
}

impl SpanParser<'_> {
    fn derives(&mut self, s: Symbol, i: usize, j: usize) -> bool {
        if let Some(&v) = self.sym.get(&(s, i, j)) {
            return v;
        }
        let v = match s {
            Symbol::Terminal(t) => self.g.terminal_words(t) == &self.tokens[i..j],
            Symbol::Nonterminal(n) => {
                (0..self.g.productions[n].len()).any(|a| self.seq_derives(n, a, 0, i, j))
            }
        };
        self.sym.insert((s, i, j), v);
        v
    }

    /// Does `alt[k..]` of nonterminal `n` derive `tokens[i..j]`?
    fn seq_derives(&mut self, n: NonterminalId, a: usize, k: usize, i: usize, j: usize) -> bool {
        let len = self.g.productions[n][a].len();
        if k == len {
            return i == j;
        }
        // Every symbol derives at least one word.
        if j - i < len - k {
            return false;
        }
        if let Some(&v) = self.seq.get(&(n, a, k, i, j)) {
            return v;
        }
        let s = self.g.productions[n][a][k];
        let v = (i + 1..=j).any(|m| self.derives(s, i, m) && self.seq_derives(n, a, k + 1, m, j));
        self.seq.insert((n, a, k, i, j), v);
        v
    }

    fn build(&mut self, s: Symbol, i: usize, j: usize) -> Derivation {
        match s {
            Symbol::Terminal(t) => Derivation::Terminal {
                text: self.g.terminal_text(t),
                span: i..j,
            },
            Symbol::Nonterminal(n) => {
                let a = (0..self.g.productions[n].len())
                    .find(|&a| self.seq_derives(n, a, 0, i, j))
                    .expect("build is only called on derivable spans");
                let mut children = Vec::new();
                let mut pos = i;
                let len = self.g.productions[n][a].len();
                for k in 0..len {
                    let sym = self.g.productions[n][a][k];
                    let end = (pos + 1..=j)
                        .find(|&m| self.derives(sym, pos, m) && self.seq_derives(n, a, k + 1, m, j))
                        .expect("split exists for a derivable sequence");
                    children.push(self.build(sym, pos, end));
                    pos = end;
                }
                Derivation::Nonterminal {
                    name: self.g.nonterminals[n].clone(),
                    alternative: a,
                    span: i..j,
                    children,
                }
            }
        }
    }
}

impl Grammar {
    /// Recognize a full sentence. When accepted, the derivation is the first
    /// one in alternative order (then leftmost-shortest splits).
    pub fn recognize<S: AsRef<str>>(&self, tokens: &[S]) -> ParseOutcome {
        let Some(derivation) = self.derivation(tokens) else {
            return ParseOutcome::rejected();
        };
        ParseOutcome {
            accepted: true,
            template: Some(derivation.template(&self.phrase_categories())),
            spans: derivation.spans(),
            derivation: Some(derivation),
        }
    }

    /// The canonical derivation, if `tokens` is a sentence.
    pub fn derivation<S: AsRef<str>>(&self, tokens: &[S]) -> Option<Derivation> {
        if !self.accepts(tokens) {
            return None;
        }
        let ids: Vec<WordId> = tokens
            .iter()
            .map(|t| self.word_id(t.as_ref()).expect("accepted tokens are in the vocabulary"))
            .collect();
        let mut parser = SpanParser {
            g: self,
            tokens: &ids,
            sym: HashMap::new(),
            seq: HashMap::new(),
        };
        let start = Symbol::Nonterminal(self.start_id());
        assert!(parser.derives(start, 0, ids.len()));
        Some(parser.build(start, 0, ids.len()))
    }
}
