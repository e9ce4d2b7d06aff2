//! Line-oriented grammar file reader.
//!
//! ```text
//! # comment
//! start: s
//! s -> q
//! q -> qword adjective '?' | 'can' 'it' 'speak' '?'
//!    | qword noun '?'
//! noun => 'toilet' | 'dining table'
//! ```
//!
//! `->` lines hold ordinary alternatives; every quoted token is a terminal.
//! `=>` lines are lexical: each alternative is exactly one quoted terminal,
//! which may span several words. A line starting with `|` continues the
//! previous production. Repeated left-hand sides append alternatives.

use super::GrammarError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum RawSymbol {
    Name(String),
    Quoted(Vec<String>),
}

#[derive(Debug, Clone)]
pub(crate) struct RawProduction {
    pub lhs: String,
    pub line: usize,
    pub lexical: bool,
    pub alternatives: Vec<Vec<RawSymbol>>,
}

#[derive(Debug, Default)]
pub(crate) struct RawGrammar {
    pub start: Option<String>,
    pub productions: Vec<RawProduction>,
}

#[derive(Debug, PartialEq)]
enum Tok {
    Name(String),
    Quoted(Vec<String>),
    Bar,
    Arrow { lexical: bool },
}

fn syntax(line: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Syntax {
        line,
        message: message.into(),
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '.'
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Tok>, GrammarError> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => break,
            '|' => {
                chars.next();
                toks.push(Tok::Bar);
            }
            '-' | '=' if text[i..].starts_with("->") || text[i..].starts_with("=>") => {
                chars.next();
                chars.next();
                toks.push(Tok::Arrow { lexical: c == '=' });
            }
            '\'' => {
                chars.next();
                let rest = &text[i + 1..];
                let end = rest
                    .find('\'')
                    .ok_or_else(|| syntax(line, "unbalanced quote"))?;
                let words: Vec<String> = rest[..end].split_whitespace().map(str::to_owned).collect();
                if words.is_empty() {
                    return Err(syntax(line, "empty terminal ''"));
                }
                // Skip the body and the closing quote.
                for _ in 0..rest[..end].chars().count() + 1 {
                    chars.next();
                }
                toks.push(Tok::Quoted(words));
            }
            c if is_name_char(c) => {
                let mut end = text.len();
                while let Some(&(j, c)) = chars.peek() {
                    if !is_name_char(c) || text[j..].starts_with("->") {
                        end = j;
                        break;
                    }
                    chars.next();
                }
                toks.push(Tok::Name(text[i..end].to_owned()));
            }
            other => return Err(syntax(line, format!("unexpected character {other:?}"))),
        }
    }
    Ok(toks)
}

fn split_alternatives(
    toks: Vec<Tok>,
    line: usize,
    lexical: bool,
) -> Result<Vec<Vec<RawSymbol>>, GrammarError> {
    let mut alts = vec![Vec::new()];
    for tok in toks {
        match tok {
            Tok::Bar => alts.push(Vec::new()),
            Tok::Name(n) => alts.last_mut().unwrap().push(RawSymbol::Name(n)),
            Tok::Quoted(w) => alts.last_mut().unwrap().push(RawSymbol::Quoted(w)),
            Tok::Arrow { .. } => return Err(syntax(line, "more than one arrow on a line")),
        }
    }
    if alts.iter().any(Vec::is_empty) {
        return Err(syntax(line, "empty alternative"));
    }
    if lexical
        && alts
            .iter()
            .any(|a| a.len() != 1 || !matches!(a[0], RawSymbol::Quoted(_)))
    {
        return Err(syntax(
            line,
            "lexical alternatives must be a single quoted terminal",
        ));
    }
    Ok(alts)
}

pub(crate) fn parse(source: &str) -> Result<RawGrammar, GrammarError> {
    let mut raw = RawGrammar::default();
    for (idx, text) in source.lines().enumerate() {
        let line = idx + 1;
        let trimmed = text.trim_start();
        if let Some(rest) = trimmed.strip_prefix("start:") {
            let name = rest.split('#').next().unwrap_or("").trim();
            if name.is_empty() || !name.chars().all(is_name_char) {
                return Err(syntax(line, "malformed start header"));
            }
            if raw.start.is_some() {
                return Err(syntax(line, "duplicate start header"));
            }
            raw.start = Some(name.to_owned());
            continue;
        }
        let toks = tokenize(text, line)?;
        if toks.is_empty() {
            continue;
        }
        if toks[0] == Tok::Bar {
            let prev = raw
                .productions
                .last_mut()
                .ok_or_else(|| syntax(line, "continuation line without a production"))?;
            let lexical = prev.lexical;
            let alts = split_alternatives(toks.into_iter().skip(1).collect(), line, lexical)?;
            prev.alternatives.extend(alts);
            continue;
        }
        let mut it = toks.into_iter();
        let lhs = match it.next() {
            Some(Tok::Name(n)) => n,
            _ => return Err(syntax(line, "expected a nonterminal name")),
        };
        let lexical = match it.next() {
            Some(Tok::Arrow { lexical }) => lexical,
            _ => return Err(syntax(line, "expected '->' or '=>' after the left-hand side")),
        };
        let alternatives = split_alternatives(it.collect(), line, lexical)?;
        raw.productions.push(RawProduction {
            lhs,
            line,
            lexical,
            alternatives,
        });
    }
    Ok(raw)
}
