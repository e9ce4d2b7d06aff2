//! Text serialization of latent vectors and sentences.
//!
//! Floating vectors are comma-separated decimals in shortest round-trip form.
//! Exact vectors are comma-separated `num/den` pairs.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::ErrorCode;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VectorParseError {
    #[error("malformed coordinate `{0}`")]
    Coordinate(String),
    #[error("empty vector")]
    Empty,
}

impl ErrorCode for VectorParseError {
    fn code(&self) -> &'static str {
        "E_VECTOR_SYNTAX"
    }
}

pub fn format_vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    parts.join(",")
}

pub fn parse_vector(line: &str) -> Result<Vec<f64>, VectorParseError> {
    let line = line.trim();
    if line.is_empty() {
        return Err(VectorParseError::Empty);
    }
    line.split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<f64>()
                .map_err(|_| VectorParseError::Coordinate(p.to_owned()))
        })
        .collect()
}

pub fn format_exact(v: &[BigRational]) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|x| format!("{}/{}", x.numer(), x.denom()))
        .collect();
    parts.join(",")
}

pub fn parse_exact(line: &str) -> Result<Vec<BigRational>, VectorParseError> {
    let line = line.trim();
    if line.is_empty() {
        return Err(VectorParseError::Empty);
    }
    line.split(',')
        .map(|p| {
            let p = p.trim();
            let bad = || VectorParseError::Coordinate(p.to_owned());
            let (n, d) = p.split_once('/').ok_or_else(bad)?;
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        })
        .collect()
}

pub fn format_sentence<S: AsRef<str>>(tokens: &[S]) -> String {
    tokens
        .iter()
        .map(|t| t.as_ref())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_sentence(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_owned).collect()
}
