//! Classes that grammar coverage counts.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::grammar::{Derivation, Grammar, GrammarError, NonterminalId, Symbol, DEFAULT_TEMPLATE_CAP};

/// Label shared by every all-terminal alternative of the root rule.
pub const FIXED_SENTENCES: &str = "<fixed sentences>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Granularity {
    /// Alternatives of the root rule (the first rule reached from the start
    /// symbol through single-nonterminal rewrites), with all fixed
    /// sentences collapsed into one class.
    #[default]
    Rules,
    /// Flattened templates down to lexical categories.
    Templates,
    /// Individual sentences.
    Sentences,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Rules => "rules",
            Granularity::Templates => "templates",
            Granularity::Sentences => "sentences",
        })
    }
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rules" => Ok(Granularity::Rules),
            "templates" => Ok(Granularity::Templates),
            "sentences" => Ok(Granularity::Sentences),
            other => Err(format!("unknown granularity `{other}` (rules, templates, sentences)")),
        }
    }
}

/// Maps grammatical sentences to coverage classes.
pub struct CoverageClasses<'g> {
    grammar: &'g Grammar,
    granularity: Granularity,
    root: NonterminalId,
    categories: BTreeSet<String>,
    total: BigUint,
}

fn root_rule(g: &Grammar) -> NonterminalId {
    let mut nt = g.nonterminal_id(g.start_symbol()).expect("start symbol exists");
    loop {
        match g.alternatives(nt) {
            [alt] => match alt.as_slice() {
                [Symbol::Nonterminal(m)] => nt = *m,
                _ => return nt,
            },
            _ => return nt,
        }
    }
}

impl<'g> CoverageClasses<'g> {
    pub fn new(grammar: &'g Grammar, granularity: Granularity) -> Result<Self, GrammarError> {
        let root = root_rule(grammar);
        let categories = grammar.lexical_categories();
        let total = match granularity {
            Granularity::Rules => {
                let labels: BTreeSet<String> = (0..grammar.alternatives(root).len())
                    .map(|a| rule_label(grammar, root, a))
                    .collect();
                BigUint::from(labels.len())
            }
            Granularity::Templates => {
                BigUint::from(grammar.enumerate_templates(&categories, DEFAULT_TEMPLATE_CAP)?.len())
            }
            Granularity::Sentences => grammar.count_language(),
        };
        Ok(CoverageClasses {
            grammar,
            granularity,
            root,
            categories,
            total,
        })
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    /// The class of a sentence, or `None` when it is ungrammatical.
    pub fn class_of<S: AsRef<str>>(&self, tokens: &[S]) -> Option<String> {
        match self.granularity {
            Granularity::Sentences => self
                .grammar
                .accepts(tokens)
                .then(|| crate::vector::format_sentence(tokens)),
            Granularity::Templates => {
                let d = self.grammar.derivation(tokens)?;
                Some(d.template(&self.categories).to_string())
            }
            Granularity::Rules => {
                let d = self.grammar.derivation(tokens)?;
                let root_name = &self.grammar.nonterminals()[self.root];
                match d.find(root_name)? {
                    Derivation::Nonterminal { alternative, .. } => {
                        Some(rule_label(self.grammar, self.root, *alternative))
                    }
                    Derivation::Terminal { .. } => None,
                }
            }
        }
    }
}

fn rule_label(g: &Grammar, nt: NonterminalId, alt: usize) -> String {
    let alt = &g.alternatives(nt)[alt];
    if g.alternative_text(alt).is_some() {
        FIXED_SENTENCES.to_owned()
    } else {
        format!("{} -> {}", g.nonterminals()[nt], g.alternative_source(alt))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn question_rules_have_seven_classes() {
        let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
        let c = CoverageClasses::new(&g, Granularity::Rules).unwrap();
        assert_eq!(c.total(), &BigUint::from(7u32));
        assert_eq!(c.class_of(&["can", "it", "speak", "?"]).unwrap(), FIXED_SENTENCES);
        assert_eq!(
            c.class_of(&["is", "it", "blue", "and", "red", "?"]).unwrap(),
            "q -> qword adjective 'and' adjective '?'"
        );
        assert!(c.class_of(&["is", "it"]).is_none());
    }

    #[test]
    fn toy_granularities() {
        let g = Grammar::parse(fixtures::TOY_GRAMMAR).unwrap();
        let rules = CoverageClasses::new(&g, Granularity::Rules).unwrap();
        assert_eq!(rules.total(), &BigUint::from(1u32));
        let sentences = CoverageClasses::new(&g, Granularity::Sentences).unwrap();
        assert_eq!(sentences.total(), &BigUint::from(8u32));
        assert_eq!(sentences.class_of(&["A", "B"]).unwrap(), "A B");
    }

    #[test]
    fn parse_granularity() {
        assert_eq!("templates".parse::<Granularity>().unwrap(), Granularity::Templates);
        assert!("words".parse::<Granularity>().is_err());
    }
}
