//! Multidimensional arithmetic coding of grammar sentences.
//!
//! The coder keeps one half-open interval per dimension, all starting at
//! `[0, 1)`. Word `i` (1-indexed) splits the interval of dimension
//! `(i - 1) mod N_d` among the options valid at the current prefix, in
//! canonical order (STOP first, then vocabulary order), with widths
//! proportional to the symbol model's weights, and keeps the chosen word's
//! piece. A complete prefix that could still be extended takes one more step
//! whose chosen option is STOP. The sentence's cell is the final box; its
//! volume is the sentence's model probability.
//!
//! All interval arithmetic is exact. Floats only appear when the cell's
//! midpoint is quantized, and encode verifies that the quantized point (after
//! rotation and back, when enabled) still lies in the cell, so decoding an
//! encoded vector always reproduces the sentence.
//!
//! With the toy grammar `S -> A | B | A A | A B | A C | B B | A B C | B B C`,
//! two dimensions and uniform branching, "A B C" goes: dimension 0 split
//! {A, B} keeps `[0, 1/2)`; dimension 1 split {STOP, A, B, C} keeps
//! `[1/2, 3/4)`; dimension 0 split {STOP, C} keeps `[1/4, 1/2)`. The vector is
//! the midpoint `[0.375, 0.625]`.

mod header;
mod rotation;

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::grammar::{Grammar, GrammarError, PrefixState};
use crate::model::SymbolModel;
use crate::ErrorCode;

pub use header::CodecHeader;
pub use rotation::Rotation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodecError {
    #[error("sentence is not in the language: {0}")]
    NotInLanguage(String),
    #[error(
        "quantized midpoint leaves the cell; bits consumed per dimension: {bits:?}; \
         use more dimensions or exact output"
    )]
    PrecisionOverflow { bits: Vec<f64> },
    #[error("expected a vector of {expected} coordinates, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid codec configuration: {0}")]
    InvalidConfig(String),
    #[error("codec header mismatch on `{field}`: expected {expected}, found {found}")]
    ConfigMismatch {
        field: String,
        expected: String,
        found: String,
    },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

impl ErrorCode for CodecError {
    fn code(&self) -> &'static str {
        match self {
            CodecError::NotInLanguage(_) => "E_NOT_IN_LANGUAGE",
            CodecError::PrecisionOverflow { .. } => "E_PRECISION_OVERFLOW",
            CodecError::DimensionMismatch { .. } => "E_DIMENSION_MISMATCH",
            CodecError::InvalidConfig(_) => "E_INVALID_CONFIG",
            CodecError::ConfigMismatch { .. } => "E_CONFIG_MISMATCH",
            CodecError::Grammar(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RotationConfig {
    #[default]
    Disabled,
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Floating,
    ExactRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    /// Cells narrower than 2^-bits in any dimension are flagged unsafe.
    pub min_cell_width_bits: u32,
    pub output: OutputMode,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            min_cell_width_bits: 45,
            output: OutputMode::Floating,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CodecConfig {
    pub dimensions: usize,
    pub model: SymbolModel,
    pub rotation: RotationConfig,
    pub precision: PrecisionPolicy,
}

impl CodecConfig {
    pub fn new(dimensions: usize) -> Self {
        CodecConfig {
            dimensions,
            ..Default::default()
        }
    }

    pub fn with_model(mut self, model: SymbolModel) -> Self {
        self.model = model;
        self
    }

    pub fn with_rotation(mut self, seed: u64) -> Self {
        self.rotation = RotationConfig::Seeded(seed);
        self
    }

    pub fn with_output(mut self, output: OutputMode) -> Self {
        self.precision.output = output;
        self
    }
}

/// A point of the latent space.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentVector(pub Vec<f64>);

impl LatentVector {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The box assigned to a sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Half-open `[lo, hi)` per dimension.
    pub bounds: Vec<(BigRational, BigRational)>,
    /// Coding steps (0-indexed) that split each dimension.
    pub steps: Vec<Vec<usize>>,
}

impl Cell {
    pub fn volume(&self) -> BigRational {
        self.bounds
            .iter()
            .map(|(lo, hi)| hi - lo)
            .fold(BigRational::one(), |acc, w| acc * w)
    }

    pub fn midpoint(&self) -> Vec<BigRational> {
        let two = BigRational::from_integer(2.into());
        self.bounds.iter().map(|(lo, hi)| (lo + hi) / &two).collect()
    }

    pub fn contains(&self, point: &[BigRational]) -> bool {
        point.len() == self.bounds.len()
            && point
                .iter()
                .zip(&self.bounds)
                .all(|(x, (lo, hi))| lo <= x && x < hi)
    }

    pub fn contains_f64(&self, point: &[f64]) -> bool {
        point.len() == self.bounds.len()
            && point.iter().zip(&self.bounds).all(|(&x, (lo, hi))| {
                BigRational::from_float(x).is_some_and(|x| lo <= &x && &x < hi)
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionUsage {
    /// −log2 of the cell width in this dimension.
    pub bits: f64,
    pub steps: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionReport {
    pub dimensions: Vec<DimensionUsage>,
    pub threshold_bits: u32,
    pub safe: bool,
}

/// Interval of one dimension as `[a / d, (a + w) / d)`. Kept unreduced so
/// narrowing is a few multiplications.
#[derive(Clone)]
struct Span {
    a: BigUint,
    w: BigUint,
    d: BigUint,
}

impl Span {
    fn unit() -> Self {
        Span {
            a: BigUint::zero(),
            w: BigUint::one(),
            d: BigUint::one(),
        }
    }

    fn bounds(&self) -> (BigRational, BigRational) {
        let d = BigInt::from(self.d.clone());
        let lo = BigRational::new(BigInt::from(self.a.clone()), d.clone());
        let hi = BigRational::new(BigInt::from(&self.a + &self.w), d);
        (lo, hi)
    }

    fn midpoint(&self) -> BigRational {
        BigRational::new(
            BigInt::from((&self.a << 1u32) + &self.w),
            BigInt::from(&self.d << 1u32),
        )
    }

    /// Does `num / den` lie in the half-open interval?
    fn contains(&self, num: &BigUint, den: &BigUint) -> bool {
        let x = num * &self.d;
        &self.a * den <= x && x < (&self.a + &self.w) * den
    }

    /// −log2 of the width.
    fn bits(&self) -> f64 {
        log2_uint(&self.d) - log2_uint(&self.w)
    }
}

fn log2_uint(n: &BigUint) -> f64 {
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    (n >> shift).to_f64().unwrap_or(f64::NAN).log2() + shift as f64
}

/// A double in `[0, 1)` as `num / den` exactly.
fn dyadic(x: f64) -> (BigUint, BigUint) {
    use num_traits::Float;
    let (mantissa, exponent, _) = x.integer_decode();
    if mantissa == 0 {
        return (BigUint::zero(), BigUint::one());
    }
    if exponent >= 0 {
        return (BigUint::from(mantissa) << exponent as u32, BigUint::one());
    }
    (BigUint::from(mantissa), BigUint::one() << (-exponent) as u32)
}

struct Walk {
    spans: Vec<Span>,
    steps: Vec<Vec<usize>>,
    step: usize,
}

impl Walk {
    fn new(dims: usize) -> Self {
        Walk {
            spans: vec![Span::unit(); dims],
            steps: vec![Vec::new(); dims],
            step: 0,
        }
    }

    fn dim(&self) -> usize {
        self.step % self.spans.len()
    }

    /// Keep option `k`'s share of the current dimension.
    fn narrow(&mut self, weights: &[BigUint], k: usize) {
        let d = self.dim();
        if weights.len() > 1 {
            let total: BigUint = weights.iter().sum();
            let before: BigUint = weights[..k].iter().sum();
            let s = &mut self.spans[d];
            s.a = &s.a * &total + &s.w * before;
            s.w = &s.w * &weights[k];
            s.d = &s.d * total;
        }
        self.steps[d].push(self.step);
        self.step += 1;
    }

    /// Option whose sub-interval of the current dimension holds `num / den`,
    /// a point inside the current interval. Boundaries belong to the upper
    /// option.
    fn locate(&self, weights: &[BigUint], num: &BigUint, den: &BigUint) -> usize {
        if weights.len() == 1 {
            return 0;
        }
        let s = &self.spans[self.dim()];
        // Option k holds the point iff cum_k <= (x - lo) / width * total,
        // i.e. cum_k <= floor(t / u) below.
        let total: BigUint = weights.iter().sum();
        let t = (num * &s.d - &s.a * den) * total;
        let u = &s.w * den;
        let q = t / u;
        let mut cum = BigUint::zero();
        for (k, w) in weights.iter().enumerate().take(weights.len() - 1) {
            cum += w;
            if cum > q {
                return k;
            }
        }
        weights.len() - 1
    }

    fn cell(&self) -> Cell {
        Cell {
            bounds: self.spans.iter().map(Span::bounds).collect(),
            steps: self.steps.clone(),
        }
    }
}

/// Largest double below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, BELOW_ONE)
    }
}

/// An AriEL encoder/decoder bound to one grammar.
#[derive(Debug, Clone)]
pub struct Codec {
    grammar: Arc<Grammar>,
    config: CodecConfig,
    rotation: Option<Rotation>,
}

impl Codec {
    pub fn new(grammar: Arc<Grammar>, config: CodecConfig) -> Result<Codec, CodecError> {
        if config.dimensions == 0 {
            return Err(CodecError::InvalidConfig("dimensions must be at least 1".into()));
        }
        if config.precision.min_cell_width_bits == 0 {
            return Err(CodecError::InvalidConfig(
                "minimum cell width must lie in (0, 1)".into(),
            ));
        }
        let rotation = match config.rotation {
            RotationConfig::Disabled => None,
            RotationConfig::Seeded(_) if config.precision.output == OutputMode::ExactRational => {
                return Err(CodecError::InvalidConfig(
                    "exact output cannot be combined with rotation".into(),
                ))
            }
            RotationConfig::Seeded(seed) => Some(Rotation::new(seed, config.dimensions)),
        };
        Ok(Codec {
            grammar,
            config,
            rotation,
        })
    }

    pub fn grammar(&self) -> &Arc<Grammar> {
        &self.grammar
    }

    pub fn config(&self) -> &CodecConfig {
        &self.config
    }

    pub fn dimensions(&self) -> usize {
        self.config.dimensions
    }

    pub fn rotation(&self) -> Option<&Rotation> {
        self.rotation.as_ref()
    }

    fn walk_encode<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Walk, CodecError> {
        let g = &*self.grammar;
        let model = &self.config.model;
        let not_in_language = || {
            CodecError::NotInLanguage(crate::vector::format_sentence(tokens))
        };
        let mut walk = Walk::new(self.config.dimensions);
        let mut state = g.start();
        for t in tokens {
            let w = g.word_id(t.as_ref()).ok_or_else(not_in_language)?;
            let (branches, weights) = model.branches(&state);
            let k = branches
                .iter()
                .position(|b| b.word == Some(w))
                .ok_or_else(not_in_language)?;
            walk.narrow(&weights, k);
            state = state.follow(w, branches[k].target.expect("word branches have targets"));
        }
        if !state.is_complete() {
            return Err(not_in_language());
        }
        let (branches, weights) = model.branches(&state);
        if branches.len() > 1 {
            debug_assert!(branches[0].word.is_none());
            walk.narrow(&weights, 0);
        }
        Ok(walk)
    }

    /// Walk the partition with pre-rotation coordinates already in `[0, 1)`,
    /// each given as an exact `num / den`.
    fn walk_decode(&self, coord: impl Fn(usize) -> (BigUint, BigUint)) -> (Vec<String>, Walk) {
        let g = &*self.grammar;
        let model = &self.config.model;
        let mut walk = Walk::new(self.config.dimensions);
        let mut cache: Vec<Option<(BigUint, BigUint)>> = vec![None; self.config.dimensions];
        let mut state: PrefixState<'_> = g.start();
        loop {
            let (branches, weights) = model.branches(&state);
            if branches.len() == 1 && branches[0].word.is_none() {
                break;
            }
            let d = walk.dim();
            let (num, den) = cache[d].get_or_insert_with(|| coord(d));
            let k = walk.locate(&weights, num, den);
            walk.narrow(&weights, k);
            match (branches[k].word, branches[k].target) {
                (Some(w), Some(t)) => state = state.follow(w, t),
                _ => break,
            }
        }
        let tokens = state.prefix().into_iter().map(str::to_owned).collect();
        (tokens, walk)
    }

    /// The exact cell of a sentence.
    pub fn cell_bounds<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Cell, CodecError> {
        Ok(self.walk_encode(tokens)?.cell())
    }

    /// Exact midpoint of the sentence's cell (never rotated).
    pub fn encode_exact<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<BigRational>, CodecError> {
        Ok(self.cell_bounds(tokens)?.midpoint())
    }

    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Result<LatentVector, CodecError> {
        let walk = self.walk_encode(tokens)?;
        let overflow = || CodecError::PrecisionOverflow {
            bits: walk.spans.iter().map(Span::bits).collect(),
        };
        let point: Vec<f64> = walk
            .spans
            .iter()
            .zip(&walk.steps)
            .map(|(span, steps)| {
                if steps.is_empty() {
                    0.5
                } else {
                    span.midpoint().to_f64().expect("midpoints lie in [0, 1]")
                }
            })
            .collect();
        let inside = |p: &[f64]| {
            p.iter().zip(&walk.spans).zip(&walk.steps).all(|((&x, span), steps)| {
                if steps.is_empty() {
                    (0.0..1.0).contains(&x)
                } else if (0.0..1.0).contains(&x) {
                    let (num, den) = dyadic(x);
                    span.contains(&num, &den)
                } else {
                    false
                }
            })
        };
        if !inside(&point) {
            return Err(overflow());
        }
        match &self.rotation {
            None => Ok(LatentVector(point)),
            Some(r) => {
                let rotated = r.apply(&point);
                if !inside(&r.invert(&rotated)) {
                    return Err(overflow());
                }
                Ok(LatentVector(rotated))
            }
        }
    }

    pub fn decode(&self, v: &[f64]) -> Result<Vec<String>, CodecError> {
        let n = self.config.dimensions;
        if v.len() != n {
            return Err(CodecError::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let unrotated = match &self.rotation {
            Some(r) => r.invert(v),
            None => v.to_vec(),
        };
        Ok(self.decode_unrotated(&unrotated))
    }

    fn decode_unrotated(&self, v: &[f64]) -> Vec<String> {
        self.walk_decode(|d| dyadic(clamp_unit(v[d]))).0
    }

    pub fn decode_exact(&self, v: &[BigRational]) -> Result<Vec<String>, CodecError> {
        let n = self.config.dimensions;
        if v.len() != n {
            return Err(CodecError::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let zero = BigRational::zero();
        let top = BigRational::from_float(BELOW_ONE).unwrap();
        Ok(self
            .walk_decode(|d| {
                let x = v[d].clone().clamp(zero.clone(), top.clone());
                let num = x.numer().to_biguint().expect("clamped to be non-negative");
                let den = x.denom().to_biguint().expect("denominators are positive");
                (num, den)
            })
            .0)
    }

    /// Which cell a (pre-rotation) point falls in, without materializing the
    /// sentence twice.
    pub fn locate_cell(&self, v: &[f64]) -> Result<(Vec<String>, Cell), CodecError> {
        let n = self.config.dimensions;
        if v.len() != n {
            return Err(CodecError::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let (tokens, walk) = self.walk_decode(|d| dyadic(clamp_unit(v[d])));
        Ok((tokens, walk.cell()))
    }

    pub fn precision_report<S: AsRef<str>>(&self, tokens: &[S]) -> Result<PrecisionReport, CodecError> {
        let walk = self.walk_encode(tokens)?;
        let k = self.config.precision.min_cell_width_bits;
        let mut safe = true;
        let dimensions = walk
            .spans
            .iter()
            .zip(&walk.steps)
            .map(|(span, steps)| {
                // width < 2^-k  <=>  w * 2^k < d
                if (&span.w << k) < span.d {
                    safe = false;
                }
                DimensionUsage {
                    bits: span.bits(),
                    steps: steps.clone(),
                }
            })
            .collect();
        Ok(PrecisionReport {
            dimensions,
            threshold_bits: k,
            safe,
        })
    }

    /// Draw a point uniformly from the (pre-rotation) unit cube and decode it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (LatentVector, Vec<String>) {
        let point: Vec<f64> = (0..self.config.dimensions).map(|_| rng.gen::<f64>()).collect();
        let tokens = self.decode_unrotated(&point);
        let v = match &self.rotation {
            Some(r) => r.apply(&point),
            None => point,
        };
        (LatentVector(v), tokens)
    }

    /// Map a pre-rotation point into the codec's output space.
    pub fn rotate(&self, point: &[f64]) -> Vec<f64> {
        match &self.rotation {
            Some(r) => r.apply(point),
            None => point.to_vec(),
        }
    }

    pub fn header(&self) -> CodecHeader {
        CodecHeader::for_codec(self)
    }
}
