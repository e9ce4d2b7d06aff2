//! The embedder abstraction shared by every evaluation.
//!
//! An [`Embedder`] maps token sequences to vectors and vectors back to token
//! sequences. [`ArielEmbedder`] wraps the in-process codec,
//! [`NoisyChannel`] corrupts another embedder at a known rate, and
//! [`ExternalEmbedder`] talks to a child process over the line protocol in
//! [`protocol`].

pub mod protocol;
mod stubs;

use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::codec::{Codec, CodecError};
use crate::grammar::{sample_sentence, Grammar};
use crate::model::SymbolModel;
use crate::ErrorCode;

pub use protocol::{serve, ExternalEmbedder, DEFAULT_TIMEOUT};
pub use stubs::{ConstantEmbedder, ScriptedEmbedder};

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("embedder does not support `{0}`")]
    Unsupported(&'static str),
    #[error("protocol error: {message}; offending line: {line}")]
    Protocol { message: String, line: String },
    #[error("no response within {0:?}")]
    Timeout(std::time::Duration),
    #[error("child process exited: {0}")]
    ChildExit(String),
    #[error("child reported an error: {0}")]
    Remote(String),
    #[error("cannot start child process: {0}")]
    Spawn(#[from] std::io::Error),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

impl ErrorCode for AdapterError {
    fn code(&self) -> &'static str {
        match self {
            AdapterError::Unsupported(_) => "E_UNSUPPORTED",
            AdapterError::Protocol { .. } => "E_PROTOCOL",
            AdapterError::Timeout(_) => "E_TIMEOUT",
            AdapterError::ChildExit(_) => "E_CHILD_EXIT",
            AdapterError::Remote(_) => "E_REMOTE",
            AdapterError::Spawn(_) => "E_SPAWN",
            AdapterError::Codec(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedderInfo {
    pub name: String,
    pub dims: usize,
    pub encode: bool,
    pub decode: bool,
}

pub trait Embedder {
    fn info(&self) -> EmbedderInfo;

    fn encode(&mut self, tokens: &[String]) -> Result<Vec<f64>, AdapterError>;

    fn decode(&mut self, vector: &[f64]) -> Result<Vec<String>, AdapterError>;

    /// A random point of the latent space. Defaults to the unit cube.
    fn sample_latent(&mut self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..self.info().dims).map(|_| rng.gen::<f64>()).collect()
    }
}

impl<E: Embedder + ?Sized> Embedder for Box<E> {
    fn info(&self) -> EmbedderInfo {
        (**self).info()
    }

    fn encode(&mut self, tokens: &[String]) -> Result<Vec<f64>, AdapterError> {
        (**self).encode(tokens)
    }

    fn decode(&mut self, vector: &[f64]) -> Result<Vec<String>, AdapterError> {
        (**self).decode(vector)
    }

    fn sample_latent(&mut self, rng: &mut dyn RngCore) -> Vec<f64> {
        (**self).sample_latent(rng)
    }
}

/// The in-process AriEL codec.
#[derive(Debug, Clone)]
pub struct ArielEmbedder {
    codec: Codec,
}

impl ArielEmbedder {
    pub fn new(codec: Codec) -> Self {
        ArielEmbedder { codec }
    }

    pub fn codec(&self) -> &Codec {
        &self.codec
    }
}

impl Embedder for ArielEmbedder {
    fn info(&self) -> EmbedderInfo {
        EmbedderInfo {
            name: "ariel".into(),
            dims: self.codec.dimensions(),
            encode: true,
            decode: true,
        }
    }

    fn encode(&mut self, tokens: &[String]) -> Result<Vec<f64>, AdapterError> {
        Ok(self.codec.encode(tokens)?.0)
    }

    fn decode(&mut self, vector: &[f64]) -> Result<Vec<String>, AdapterError> {
        Ok(self.codec.decode(vector)?)
    }

    /// Uniform over the unit cube before rotation.
    fn sample_latent(&mut self, rng: &mut dyn RngCore) -> Vec<f64> {
        let point: Vec<f64> = (0..self.codec.dimensions()).map(|_| rng.gen::<f64>()).collect();
        self.codec.rotate(&point)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    /// Replace the reconstruction by a uniformly drawn sentence.
    Resample,
    /// Add isotropic Gaussian noise of this scale to the encoding.
    Perturb(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyChannelConfig {
    pub p: f64,
    pub mode: NoiseMode,
    pub seed: u64,
}

/// Corrupts a base embedder with probability `p` per sentence.
pub struct NoisyChannel<E> {
    base: E,
    grammar: Arc<Grammar>,
    config: NoisyChannelConfig,
    rng: ChaCha8Rng,
}

impl<E: Embedder> NoisyChannel<E> {
    pub fn new(base: E, grammar: Arc<Grammar>, config: NoisyChannelConfig) -> Self {
        assert!((0.0..=1.0).contains(&config.p), "corruption probability must lie in [0, 1]");
        NoisyChannel {
            base,
            grammar,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
        }
    }
}

impl<E: Embedder> Embedder for NoisyChannel<E> {
    fn info(&self) -> EmbedderInfo {
        let base = self.base.info();
        EmbedderInfo {
            name: format!("noisy:{}({})", self.config.p, base.name),
            ..base
        }
    }

    fn encode(&mut self, tokens: &[String]) -> Result<Vec<f64>, AdapterError> {
        let mut v = self.base.encode(tokens)?;
        if let NoiseMode::Perturb(sigma) = self.config.mode {
            if self.config.p > 0.0 && self.rng.gen_bool(self.config.p) {
                let normal = Normal::new(0.0, sigma).expect("noise scale must be finite and non-negative");
                for x in &mut v {
                    *x += normal.sample(&mut self.rng);
                }
            }
        }
        Ok(v)
    }

    fn decode(&mut self, vector: &[f64]) -> Result<Vec<String>, AdapterError> {
        let out = self.base.decode(vector)?;
        if self.config.mode == NoiseMode::Resample && self.config.p > 0.0 && self.rng.gen_bool(self.config.p) {
            return Ok(sample_sentence(&self.grammar, &SymbolModel::UniformSentence, &mut self.rng));
        }
        Ok(out)
    }

    fn sample_latent(&mut self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.base.sample_latent(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, CodecConfig};

    fn ariel(dims: usize) -> (Arc<Grammar>, ArielEmbedder) {
        let g = Arc::new(Grammar::parse(fixtures::TOY_GRAMMAR).unwrap());
        let codec = Codec::new(g.clone(), CodecConfig::new(dims)).unwrap();
        (g, ArielEmbedder::new(codec))
    }

    fn toks(s: &str) -> Vec<String> {
        s.split(' ').map(str::to_owned).collect()
    }

    #[test]
    fn ariel_round_trip() {
        let (g, mut e) = ariel(2);
        for s in g.sentences(8).unwrap() {
            let v = e.encode(&s).unwrap();
            assert_eq!(e.decode(&v).unwrap(), s);
        }
        assert!(matches!(e.encode(&toks("C")), Err(AdapterError::Codec(CodecError::NotInLanguage(_)))));
    }

    #[test]
    fn zero_noise_is_identity() {
        let (g, base) = ariel(2);
        for mode in [NoiseMode::Resample, NoiseMode::Perturb(0.3)] {
            let mut noisy = NoisyChannel::new(base.clone(), g.clone(), NoisyChannelConfig { p: 0.0, mode, seed: 1 });
            let mut plain = base.clone();
            for s in g.sentences(8).unwrap() {
                let v = noisy.encode(&s).unwrap();
                assert_eq!(v, plain.encode(&s).unwrap());
                assert_eq!(noisy.decode(&v).unwrap(), s);
            }
        }
    }

    #[test]
    fn full_resampling_lands_on_chance() {
        let (g, base) = ariel(2);
        let mut noisy = NoisyChannel::new(
            base,
            g.clone(),
            NoisyChannelConfig {
                p: 1.0,
                mode: NoiseMode::Resample,
                seed: 9,
            },
        );
        let s = toks("A B C");
        let v = noisy.encode(&s).unwrap();
        let hits = (0..8000).filter(|_| noisy.decode(&v).unwrap() == s).count();
        assert!((hits as f64 / 8000.0 - 0.125).abs() < 0.02);
    }

    #[test]
    fn perturbation_moves_vectors() {
        let (g, base) = ariel(2);
        let mut noisy = NoisyChannel::new(
            base.clone(),
            g,
            NoisyChannelConfig {
                p: 1.0,
                mode: NoiseMode::Perturb(0.1),
                seed: 2,
            },
        );
        let s = toks("A B");
        assert_ne!(noisy.encode(&s).unwrap(), base.clone().encode(&s).unwrap());
    }
}
