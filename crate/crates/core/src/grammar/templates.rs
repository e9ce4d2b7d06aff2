//! Rule templates: start-symbol expansions flattened down to categories.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use super::{Grammar, GrammarError, NonterminalId, Symbol};

/// Default cap on the number of templates [`Grammar::enumerate_templates`]
/// will materialize.
pub const DEFAULT_TEMPLATE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemplateItem {
    Category(String),
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleTemplate(pub Vec<TemplateItem>);

impl fmt::Display for TemplateItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateItem::Category(c) => f.write_str(c),
            TemplateItem::Literal(l) => write!(f, "'{l}'"),
        }
    }
}

impl fmt::Display for RuleTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{item}")?;
        }
        f.write_str("]")
    }
}

type Expansions = Arc<Vec<Vec<TemplateItem>>>;

impl Grammar {
    /// All distinct flattened expansions of the start symbol that stop at the
    /// given categories, in derivation order (first appearance).
    ///
    /// Fails with [`GrammarError::ExplosionGuard`] as soon as any
    /// intermediate expansion set would exceed `cap` candidates.
    pub fn enumerate_templates(
        &self,
        categories: &BTreeSet<String>,
        cap: usize,
    ) -> Result<Vec<RuleTemplate>, GrammarError> {
        for c in categories {
            if self.nonterminal_id(c).is_none() {
                return Err(GrammarError::UnknownNonterminal(c.clone()));
            }
        }
        let stop: HashSet<NonterminalId> = categories
            .iter()
            .filter_map(|c| self.nonterminal_id(c))
            .collect();
        let mut memo = HashMap::new();
        let out = self.expand_templates(self.start_id(), &stop, cap, &mut memo)?;
        Ok(out.iter().cloned().map(RuleTemplate).collect())
    }

    fn expand_templates(
        &self,
        nt: NonterminalId,
        stop: &HashSet<NonterminalId>,
        cap: usize,
        memo: &mut HashMap<NonterminalId, Expansions>,
    ) -> Result<Expansions, GrammarError> {
        if let Some(e) = memo.get(&nt) {
            return Ok(e.clone());
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for alt in &self.productions[nt] {
            let mut partial: Vec<Vec<TemplateItem>> = vec![Vec::new()];
            for &sym in alt {
                let pieces: Expansions = match sym {
                    Symbol::Terminal(t) => {
                        Arc::new(vec![vec![TemplateItem::Literal(self.terminal_text(t))]])
                    }
                    Symbol::Nonterminal(m) if stop.contains(&m) => {
                        Arc::new(vec![vec![TemplateItem::Category(self.nonterminals[m].clone())]])
                    }
                    Symbol::Nonterminal(m) => self.expand_templates(m, stop, cap, memo)?,
                };
                if partial.len().saturating_mul(pieces.len()) > cap {
                    return Err(GrammarError::ExplosionGuard { cap });
                }
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
            for t in partial {
                if seen.insert(t.clone()) {
                    out.push(t);
                }
            }
            if out.len() > cap {
                return Err(GrammarError::ExplosionGuard { cap });
            }
        }
        let out = Arc::new(out);
        memo.insert(nt, out.clone());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn toy_templates_without_categories_are_sentences() {
        let g = Grammar::parse(fixtures::TOY_GRAMMAR).unwrap();
        let t = g.enumerate_templates(&BTreeSet::new(), DEFAULT_TEMPLATE_CAP).unwrap();
        assert_eq!(t.len(), 8);
        assert_eq!(t[6].to_string(), "['A', 'B', 'C']");
    }

    #[test]
    fn explosion_guard_trips() {
        let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
        let err = g.enumerate_templates(&g.lexical_categories(), 1000).unwrap_err();
        assert_eq!(err, GrammarError::ExplosionGuard { cap: 1000 });
    }

    #[test]
    fn unknown_category_rejected() {
        let g = Grammar::parse(fixtures::TOY_GRAMMAR).unwrap();
        let cats: BTreeSet<String> = ["nope".to_string()].into();
        assert!(matches!(
            g.enumerate_templates(&cats, 10),
            Err(GrammarError::UnknownNonterminal(_))
        ));
    }
}
