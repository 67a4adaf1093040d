//! Secret delivery of `n` messages to `k` clients with arbitrary demand
//! subsets over a broadcast erasure channel.
//!
//! Coded packets are the *solution* of `A·P = X` over GF(2), where row `i` of
//! `A` is derived from a per-message secret key and a public regenerating
//! vector. A client holding the key for message `i` recovers `x_i` with a
//! single inner product `A_i·P`; clients without that key see packets that
//! carry no usable information about it.
//!
//! Module map:
//!
//! - [`gf2`]: packed bit vectors and matrices, elimination, sampling.
//! - [`keying`]: initial keys, regenerating vectors, coefficient rows.
//! - [`codec`]: per-round encoding at the base station and client decoding.
//! - [`channel`]: packetization and the per-client erasure channel.
//! - [`protocol`]: NACK recovery, opportunistic key sharing, full sessions.
//! - [`audit`]: exact and Monte Carlo measurement of the secrecy claims.
//!
//! Indices are zero-based throughout the Rust API. Every file format
//! (key sets, configs, reports, packet headers) is one-based.

pub mod audit;
pub mod channel;
pub mod codec;
mod error;
pub mod gf2;
pub mod keying;
pub mod par;
pub mod protocol;
pub mod seed;
pub mod table1;

pub use error::{Error, Result};
