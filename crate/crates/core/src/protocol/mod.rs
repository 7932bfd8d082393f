//! The retrieval scheme: queries, server answers, dithered transmission and
//! modulo-lattice decoding with sign correction.
//!
//! Indices of messages and servers are 0-based throughout.

mod decode;
mod query;
mod round;
mod server;

pub use decode::{decode_fading, decode_nonfading, lattice_decode, Decoded};
pub use query::{gen_queries, gen_queries_fading, Group, QueryPair, Rational};
pub use round::{run_round, RoundSetup, RoundTrace, Scheme};
pub use server::{encode_transmit, form_answer, Database, ServerState};
