//! Commented header block recording how an output was produced.

use std::fmt::Write;
use std::time::{SystemTime, UNIX_EPOCH};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub subcommand: String,
    pub args: Vec<String>,
    pub seed: u64,
    pub grammar: String,
    pub grammar_hash: String,
    pub timestamp: Option<u64>,
}

impl RunManifest {
    pub fn new(subcommand: &str, args: Vec<String>, seed: u64, grammar: &str, grammar_hash: &str, stamp: bool) -> Self {
        let timestamp = stamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        RunManifest {
            subcommand: subcommand.to_owned(),
            args,
            seed,
            grammar: grammar.to_owned(),
            grammar_hash: grammar_hash.to_owned(),
            timestamp,
        }
    }

    /// `# key: value` lines, newline-terminated.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# ariel-run: {VERSION}");
        let _ = writeln!(s, "# subcommand: {}", self.subcommand);
        let _ = writeln!(s, "# args: {}", quote_args(&self.args));
        let _ = writeln!(s, "# seed: {}", self.seed);
        let _ = writeln!(s, "# grammar: {}", self.grammar);
        let _ = writeln!(s, "# grammar-content-hash: {}", self.grammar_hash);
        if let Some(t) = self.timestamp {
            let _ = writeln!(s, "# timestamp: {t}");
        }
        s
    }
}

fn quote_args(args: &[String]) -> String {
    args.iter()
        .map(|a| {
            if a.is_empty() || a.chars().any(|c| c.is_whitespace() || c == '\'' || c == '"') {
                format!("'{}'", a.replace('\'', "'\\''"))
            } else {
                a.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
