//! Grammar-constrained continuous sentence embeddings.
//!
//! Sentences of a finite context-free language are mapped to points of the
//! unit hypercube by multidimensional arithmetic coding: each word narrows the
//! current interval of one dimension, cycling through the dimensions as the
//! sentence proceeds. The partition at every step is guided by the grammar, so
//! any point decodes to a grammatical sentence.
//!
//! Around the codec sit the pieces needed to evaluate any sentence embedder
//! against the same grammar:
//!
//! - [`grammar`]: grammar files, prefix recognition, exact language counting,
//!   rule templates and sampling.
//! - [`codec`]: the encoder/decoder itself.
//! - [`dataset`]: biased (catalog-constrained) and unbiased sentence sets.
//! - [`eval`]: generation, reconstruction and generalization metrics.
//! - [`adapter`]: the embedder abstraction, noisy test channels and the
//!   line-delimited subprocess protocol.

pub mod adapter;
pub mod codec;
pub mod dataset;
pub mod eval;
pub mod fixtures;
pub mod grammar;
pub mod model;
pub mod vector;

pub use adapter::{ArielEmbedder, Embedder, EmbedderInfo};
pub use codec::{Codec, CodecConfig, LatentVector, OutputMode, PrecisionPolicy, RotationConfig};
pub use grammar::{Grammar, GrammarError, PrefixState, RuleTemplate};
pub use model::SymbolModel;

/// Stable, machine-parseable error identifiers.
pub trait ErrorCode {
    fn code(&self) -> &'static str;
}
