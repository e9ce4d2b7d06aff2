//! Key-value text header describing a codec configuration.
//!
//! ```text
//! # ariel-codec: 1
//! # dimensions: 16
//! # model: uniform-sentence
//! # rotation: off
//! # min-cell-width: 2^-45
//! # output: float
//! # grammar-sha256: 3a7f...
//! ```

use std::fmt;

use super::{Codec, CodecError, OutputMode, RotationConfig};

const MAGIC: &str = "ariel-codec";
const VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodecHeader {
    pub dimensions: usize,
    pub model: String,
    pub rotation: String,
    pub min_cell_width: String,
    pub output: String,
    pub grammar_sha256: String,
}

impl CodecHeader {
    pub fn for_codec(codec: &Codec) -> Self {
        let cfg = codec.config();
        CodecHeader {
            dimensions: cfg.dimensions,
            model: cfg.model.name(),
            rotation: match cfg.rotation {
                RotationConfig::Disabled => "off".into(),
                RotationConfig::Seeded(s) => s.to_string(),
            },
            min_cell_width: format!("2^-{}", cfg.precision.min_cell_width_bits),
            output: match cfg.precision.output {
                OutputMode::Floating => "float".into(),
                OutputMode::ExactRational => "exact".into(),
            },
            grammar_sha256: codec.grammar().content_hash().to_owned(),
        }
    }

    fn fields(&self) -> [(&'static str, String); 6] {
        [
            ("dimensions", self.dimensions.to_string()),
            ("model", self.model.clone()),
            ("rotation", self.rotation.clone()),
            ("min-cell-width", self.min_cell_width.clone()),
            ("output", self.output.clone()),
            ("grammar-sha256", self.grammar_sha256.clone()),
        ]
    }

    /// Compare against the `# key: value` lines of another header. Returns
    /// `Ok(false)` when the lines carry no codec header at all.
    pub fn check<S: AsRef<str>>(&self, lines: &[S]) -> Result<bool, CodecError> {
        let found: Vec<(String, String)> = lines
            .iter()
            .filter_map(|l| {
                let body = l.as_ref().trim().strip_prefix('#')?.trim();
                let (k, v) = body.split_once(':')?;
                Some((k.trim().to_owned(), v.trim().to_owned()))
            })
            .collect();
        let get = |key: &str| found.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        match get(MAGIC) {
            None => return Ok(false),
            Some(VERSION) => {}
            Some(v) => {
                return Err(CodecError::ConfigMismatch {
                    field: MAGIC.into(),
                    expected: VERSION.into(),
                    found: v.into(),
                })
            }
        }
        for (key, expected) in self.fields() {
            let Some(value) = get(key) else { continue };
            if value == expected {
                continue;
            }
            if key == "dimensions" {
                if let Ok(n) = value.parse() {
                    return Err(CodecError::DimensionMismatch {
                        expected: self.dimensions,
                        found: n,
                    });
                }
            }
            return Err(CodecError::ConfigMismatch {
                field: key.into(),
                expected,
                found: value.into(),
            });
        }
        Ok(true)
    }
}

impl fmt::Display for CodecHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {MAGIC}: {VERSION}")?;
        for (k, v) in self.fields() {
            writeln!(f, "# {k}: {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, CodecConfig, Grammar};
    use std::sync::Arc;

    fn codec(src: &str, dims: usize) -> Codec {
        Codec::new(Arc::new(Grammar::parse(src).unwrap()), CodecConfig::new(dims)).unwrap()
    }

    #[test]
    fn own_header_matches() {
        let c = codec(fixtures::TOY_GRAMMAR, 2);
        let text = c.header().to_string();
        let lines: Vec<&str> = text.lines().collect();
        assert!(text.starts_with("# ariel-codec: 1\n# dimensions: 2\n"));
        assert_eq!(c.header().check(&lines), Ok(true));
    }

    #[test]
    fn grammar_hash_mismatch_is_rejected() {
        let a = codec(fixtures::TOY_GRAMMAR, 2).header().to_string();
        let b = codec(fixtures::SINGLE_GRAMMAR, 2);
        let lines: Vec<&str> = a.lines().collect();
        assert!(matches!(
            b.header().check(&lines),
            Err(CodecError::ConfigMismatch { field, .. }) if field == "grammar-sha256"
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let a = codec(fixtures::TOY_GRAMMAR, 2).header().to_string();
        let b = codec(fixtures::TOY_GRAMMAR, 3);
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(
            b.header().check(&lines),
            Err(CodecError::DimensionMismatch {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn no_header_is_not_an_error() {
        let c = codec(fixtures::TOY_GRAMMAR, 2);
        assert_eq!(c.header().check(&["# generated by hand", "0.5,0.5"]), Ok(false));
    }
}
