//! Emulation of an on-off-keyed free-space optical link and its
//! demodulation.
//!
//! The crate covers the full chain: Monte-Carlo synthesis of detector
//! traces under thermal noise and log-normal fading ([`channel`]), windowing
//! and labeling of training examples with bit-exact persistence
//! ([`dataset`]), a small differentiable-network engine with gradient
//! verification ([`nn`]), the two-stage detector/classifier pipeline with
//! mean-threshold baselines ([`demod`]), and scoring plus channel-statistics
//! estimation ([`metrics`]).
//!
//! Everything is deterministic given a seed. Batch-level work is
//! data-parallel behind the `parallel` feature (enabled by default); the
//! sequential fallback produces identical results.

pub mod channel;
pub mod dataset;
pub mod demod;
pub mod error;
pub mod exec;
pub mod metrics;
pub mod nn;

pub use error::{Error, FormatError, Result};
