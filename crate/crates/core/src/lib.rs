//! # bosonic-converse
//!
//! Numerics for the classical capacity and strong-converse bounds of single-mode
//! phase-insensitive bosonic Gaussian channels.
//!
//! A channel is the pair `(tau, nu)` acting on covariance matrices as
//! `Γ → tau·Γ + nu·I`. Every such channel factors into a pure-loss channel of
//! transmissivity `T` followed by a quantum-limited amplifier of gain `G`, and all
//! Fock-basis objects here are built from that factorization:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`channels`] | parameterization, loss/amplifier decomposition, capacity `g(N'_S) - g(N'_B)` |
//! | [`fock`] | photon-number transition kernels, Kraus operators, density matrices, lattice counts, sampling |
//! | [`entropy`] | `g`, `h2`, Rényi/min/smooth-min entropies, minimum-output-entropy scans |
//! | [`converse`] | rank bound, concentration tails, success-probability bounds, rate sweeps |
//! | [`io`] | CSV/JSON encodings shared with the command-line front end |
//!
//! Probability masses carry an explicit `tail_mass` for everything beyond the
//! truncation point; nothing is silently renormalized.
//!
//! ```rust
//! use bosonic_converse::channels::ChannelParams;
//!
//! let ch = ChannelParams::thermal(0.5, 1.0).unwrap();
//! let c = ch.capacity(2.0).unwrap(); // g(1.5) - g(0.5)
//! assert!(c > 0.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod converse;
pub mod entropy;
mod error;
pub mod fock;
pub mod io;
pub mod special;

pub use channels::{ChannelParams, LossAmpDecomposition};
pub use error::{Error, Result};
