//! Desk-scale text-driven performer video synthesis.
//!
//! The pipeline factors a video into two vector-quantized latent spaces — a
//! per-video appearance grid at 1/16 resolution and per-frame pose grids at
//! 1/64 resolution — then models motion with a non-causal transformer that
//! predicts continuous pose embeddings for masked frames and snaps them to the
//! pose codebook by nearest-neighbor retrieval. A procedural articulated-figure
//! dataset provides ground truth for training and for the evaluation proxies.
//!
//! Three training stages build on each other:
//!
//! 1. [`vqvae`] — the two-branch autoencoder and both codebooks,
//! 2. [`exemplar`] — a masked-index sampler producing the first frame
//!    (appearance grid + initial pose grid) from appearance text,
//! 3. [`diffuser`] — the masked-embedding motion sampler conditioned on
//!    motion text and the initial pose.
//!
//! The `motionvq` binary exposes each stage plus generation, interpolation,
//! and evaluation as subcommands; the `examples/` directory drives the same
//! library APIs directly.

pub mod config;
pub mod dataset;
pub mod error;
pub mod rng;

pub use config::RunConfig;
pub use error::{Error, Result};
