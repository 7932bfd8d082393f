//! Lattice-coded private information retrieval over the Gaussian
//! multiple-access channel.
//!
//! A user fetches one of `M` replicated messages from `N` servers that
//! transmit simultaneously over an additive channel. Servers are split into
//! two groups that receive complementary binary queries; each group answers
//! with a modulo-lattice combination of its packets, dithers it, and
//! transmits. The channel adds the groups' signals, and the user recovers
//! `±φ(s_i)` with a modulo-lattice (MLAN) decoder. No single server's query
//! depends on the requested index.
//!
//! Modules, bottom up:
//!
//! * [`lattice`]: scaled integer lattices, quantization, `mod Λ`, dithers and
//!   checkers for the modulo identities.
//! * [`codebook`]: the nested code and the packet mapping `φ`.
//! * [`channel`]: the Gaussian MAC, with or without block fading.
//! * [`protocol`]: queries, answers, transmission and decoding.
//! * [`rates`]: closed-form rates, `σ²_eq`, optimal scaling and the gap bound.
//! * [`privacy`]: exact and sampled checks that queries hide the index.
//! * [`harness`]: configuration-driven experiments, tables and figures.

pub mod channel;
pub mod codebook;
mod error;
pub mod harness;
pub mod lattice;
pub mod privacy;
pub mod protocol;
pub mod rates;

pub use error::{Error, Result};
