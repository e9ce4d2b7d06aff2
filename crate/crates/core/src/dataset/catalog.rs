//! Object catalogs: which attribute values each object may carry.
//!
//! ```text
//! object: toilet
//! color: white | beige
//! material: laminate
//! acoustic: sound
//! ```
//!
//! Blocks are separated by blank lines or by the next `object:` line. `#`
//! starts a comment.

use std::collections::BTreeMap;
use std::fmt;

use crate::grammar::{Derivation, Grammar};

use super::DatasetError;

/// Annotation axis of a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Color,
    Material,
    Size,
    Mass,
    State,
    Affordance,
    Location,
    Other,
    Acoustic,
}

pub const OBJECT_CATEGORY: &str = "noun_object";

/// Fixed questions realizing each acoustic capability.
const ACOUSTIC_SENTENCES: [(&str, &str); 3] = [
    ("sound", "can it make a sound ?"),
    ("music", "can it play music ?"),
    ("speech", "can it speak ?"),
];

impl Axis {
    pub const ALL: [Axis; 9] = [
        Axis::Color,
        Axis::Material,
        Axis::Size,
        Axis::Mass,
        Axis::State,
        Axis::Affordance,
        Axis::Location,
        Axis::Other,
        Axis::Acoustic,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Axis::Color => "color",
            Axis::Material => "material",
            Axis::Size => "size",
            Axis::Mass => "mass",
            Axis::State => "state",
            Axis::Affordance => "affordance",
            Axis::Location => "location",
            Axis::Other => "other",
            Axis::Acoustic => "acoustic",
        }
    }

    pub fn from_key(key: &str) -> Option<Axis> {
        Axis::ALL.into_iter().find(|a| a.key() == key)
    }

    /// Grammar categories whose terminals realize this axis.
    pub fn categories(self) -> &'static [&'static str] {
        match self {
            Axis::Color => &["adjective_color"],
            Axis::Material => &["noun_material"],
            Axis::Size => &[
                "adjective_overall_size",
                "adjective_relative_size",
                "adjective_relative_per_dimension_size",
            ],
            Axis::Mass => &["adjective_mass"],
            Axis::State => &["adjective_state"],
            Axis::Affordance => &["adjective_affordance"],
            Axis::Location => &["noun_roomtype"],
            Axis::Other => &["adjective_other"],
            Axis::Acoustic => &[],
        }
    }

    fn for_category(category: &str) -> Option<Axis> {
        Axis::ALL
            .into_iter()
            .find(|a| a.categories().contains(&category))
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

fn acoustic_sentence(value: &str) -> Option<&'static str> {
    ACOUSTIC_SENTENCES
        .iter()
        .find(|(v, _)| *v == value)
        .map(|(_, s)| *s)
}

fn acoustic_value(sentence: &str) -> Option<&'static str> {
    ACOUSTIC_SENTENCES
        .iter()
        .find(|(_, s)| *s == sentence)
        .map(|(v, _)| *v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub object: String,
    pub values: BTreeMap<Axis, Vec<String>>,
}

impl CatalogEntry {
    pub fn allows(&self, axis: Axis, value: &str) -> bool {
        self.values
            .get(&axis)
            .is_some_and(|vs| vs.iter().any(|v| v == value))
    }
}

/// Attribute facts a sentence asserts, read off its canonical derivation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SentenceFacts {
    pub objects: Vec<String>,
    pub attributes: Vec<(Axis, String)>,
}

impl SentenceFacts {
    pub fn extract<S: AsRef<str>>(grammar: &Grammar, tokens: &[S]) -> Option<SentenceFacts> {
        let derivation: Derivation = grammar.derivation(tokens)?;
        let words: Vec<&str> = tokens.iter().map(|t| t.as_ref()).collect();
        let mut facts = SentenceFacts::default();
        for span in derivation.spans() {
            let text = words[span.range.clone()].join(" ");
            if span.category == OBJECT_CATEGORY {
                facts.objects.push(text);
            } else if let Some(axis) = Axis::for_category(&span.category) {
                facts.attributes.push((axis, text));
            }
        }
        if let Some(v) = acoustic_value(&words.join(" ")) {
            facts.attributes.push((Axis::Acoustic, v.to_owned()));
        }
        Some(facts)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ObjectCatalog {
    pub entries: Vec<CatalogEntry>,
}

impl ObjectCatalog {
    pub fn parse(text: &str) -> Result<ObjectCatalog, DatasetError> {
        let mut entries: Vec<CatalogEntry> = Vec::new();
        let mut open = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                open = false;
                continue;
            }
            let syntax = |message: String| DatasetError::CatalogSyntax {
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| syntax(format!("expected `key: value`, got `{line}`")))?;
            let key = key.trim();
            let values: Vec<String> = value
                .split('|')
                .map(|v| v.split_whitespace().collect::<Vec<_>>().join(" "))
                .collect();
            if values.iter().any(String::is_empty) {
                return Err(syntax(format!("empty value for `{key}`")));
            }
            if key == "object" {
                if values.len() != 1 {
                    return Err(syntax("an entry names exactly one object".into()));
                }
                entries.push(CatalogEntry {
                    object: values.into_iter().next().unwrap(),
                    values: BTreeMap::new(),
                });
                open = true;
                continue;
            }
            let axis = Axis::from_key(key).ok_or_else(|| syntax(format!("unknown key `{key}`")))?;
            if !open {
                return Err(syntax(format!("`{key}` outside an object block")));
            }
            let entry = entries.last_mut().expect("open block has an entry");
            let slot = entry.values.entry(axis).or_default();
            for v in values {
                if !slot.contains(&v) {
                    slot.push(v);
                }
            }
        }
        if entries.is_empty() {
            return Err(DatasetError::CatalogSyntax {
                line: 0,
                message: "catalog has no objects".into(),
            });
        }
        Ok(ObjectCatalog { entries })
    }

    /// Check every object and value against the grammar's categories.
    pub fn validate(&self, grammar: &Grammar) -> Result<(), DatasetError> {
        let objects = grammar
            .terminals_of(OBJECT_CATEGORY)
            .map_err(|_| DatasetError::CatalogMismatch(format!("grammar has no `{OBJECT_CATEGORY}`")))?;
        for e in &self.entries {
            if !objects.contains(&e.object) {
                return Err(DatasetError::CatalogMismatch(format!(
                    "`{}` is not a {OBJECT_CATEGORY} of the grammar",
                    e.object
                )));
            }
            for (&axis, values) in &e.values {
                for v in values {
                    let known = if axis == Axis::Acoustic {
                        acoustic_sentence(v).is_some_and(|s| {
                            grammar.accepts(&s.split(' ').collect::<Vec<_>>())
                        })
                    } else {
                        axis.categories().iter().any(|c| {
                            grammar
                                .terminals_of(c)
                                .is_ok_and(|ts| ts.iter().any(|t| t == v))
                        })
                    };
                    if !known {
                        return Err(DatasetError::CatalogMismatch(format!(
                            "{axis} value `{v}` of `{}` is not in the grammar",
                            e.object
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The sub-grammar whose sentences only mention `entry`'s object and
    /// attribute values, or `None` when nothing survives.
    pub fn restrict_to(&self, grammar: &Grammar, entry: &CatalogEntry) -> Option<Grammar> {
        grammar.restrict(|nt, text| {
            if nt == OBJECT_CATEGORY {
                return text == entry.object;
            }
            if let Some(axis) = Axis::for_category(nt) {
                return entry.allows(axis, text);
            }
            match acoustic_value(text) {
                Some(v) => entry.allows(Axis::Acoustic, v),
                None => true,
            }
        })
    }

    /// Whether a single entry licenses every object and attribute the
    /// sentence mentions. Ungrammatical sentences are never consistent.
    pub fn is_consistent<S: AsRef<str>>(&self, grammar: &Grammar, tokens: &[S]) -> bool {
        let Some(facts) = SentenceFacts::extract(grammar, tokens) else {
            return false;
        };
        self.entries.iter().any(|e| {
            facts.objects.iter().all(|o| *o == e.object)
                && facts.attributes.iter().all(|(a, v)| e.allows(*a, v))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn words(s: &str) -> Vec<&str> {
        s.split(' ').collect()
    }

    #[test]
    fn fixture_catalog_parses_and_validates() {
        let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
        let c = ObjectCatalog::parse(fixtures::OBJECT_CATALOG).unwrap();
        assert_eq!(c.entries.len(), 12);
        assert_eq!(c.entries[0].object, "toilet");
        assert_eq!(c.entries[0].values[&Axis::Color], ["white", "beige", "antique white"]);
        c.validate(&g).unwrap();
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            ObjectCatalog::parse("color: red\n"),
            Err(DatasetError::CatalogSyntax { line: 1, .. })
        ));
        assert!(matches!(
            ObjectCatalog::parse("object: toy\nsmell: nice\n"),
            Err(DatasetError::CatalogSyntax { line: 2, .. })
        ));
        assert!(matches!(
            ObjectCatalog::parse("object: toy\ncolor: red | \n"),
            Err(DatasetError::CatalogSyntax { line: 2, .. })
        ));
        assert!(ObjectCatalog::parse("# nothing\n").is_err());
    }

    #[test]
    fn mismatch_detected() {
        let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
        let bad_object = ObjectCatalog::parse("object: spaceship\n").unwrap();
        assert!(matches!(bad_object.validate(&g), Err(DatasetError::CatalogMismatch(_))));
        let bad_value = ObjectCatalog::parse("object: toy\ncolor: plaid\n").unwrap();
        assert!(matches!(bad_value.validate(&g), Err(DatasetError::CatalogMismatch(_))));
    }

    #[test]
    fn facts_from_spans() {
        let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
        let f = SentenceFacts::extract(&g, &words("is it a white toilet made of laminate ?")).unwrap();
        assert_eq!(f.objects, ["toilet"]);
        assert_eq!(
            f.attributes,
            [(Axis::Color, "white".into()), (Axis::Material, "laminate".into())]
        );
        let f = SentenceFacts::extract(&g, &words("can it play music ?")).unwrap();
        assert_eq!(f.attributes, [(Axis::Acoustic, "music".into())]);
    }

    #[test]
    fn consistency() {
        let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
        let c = ObjectCatalog::parse(fixtures::OBJECT_CATALOG).unwrap();
        assert!(c.is_consistent(&g, &words("is it a white toilet ?")));
        assert!(!c.is_consistent(&g, &words("is it a blue toilet ?")));
        assert!(!c.is_consistent(&g, &words("is it the toilet made of wood ?")));
        assert!(c.is_consistent(&g, &words("is it red and blue ?")));
        assert!(!c.is_consistent(&g, &words("is it closed and transparent ?")));
        assert!(!c.is_consistent(&g, &words("is it red toilet ?")));
    }

    #[test]
    fn restriction_only_uses_entry_values() {
        let g = Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap();
        let c = ObjectCatalog::parse("object: toilet\ncolor: white\n").unwrap();
        let r = c.restrict_to(&g, &c.entries[0]).unwrap();
        assert!(r.accepts(&words("is it a white toilet ?")));
        assert!(!r.accepts(&words("is it a beige toilet ?")));
        assert!(!r.accepts(&words("can it speak ?")));
        assert_eq!(r.terminals_of("noun_object").unwrap(), ["toilet"]);
    }
}
