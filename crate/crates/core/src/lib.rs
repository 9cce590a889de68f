//! # mubinfo
//!
//! Information that a receiver can extract about messages encoded in one of
//! several mutually unbiased bases (MUBs), when the receiver does not know
//! which basis the sender used.
//!
//! The crate is organised bottom-up:
//!
//! - [`quantum`]: dense complex operators, states, POVMs and the reverted
//!   ensemble `ρ_s = M_s / tr M_s`, `p(s) = tr M_s / d`.
//! - [`mub`]: standard MUB families for prime `d`, unbiasedness checks and the
//!   basis-family file format.
//! - [`info`]: conditional, posterior and mutual-information pipeline
//!   (all logarithms base 2, results in bits).
//! - [`bounds`]: closed-form upper bounds on `Σ_m I_m`, entropic lower bounds
//!   and the violation checker.
//! - [`sampling`]: seeded priors, Haar-type rank-one POVMs and pure states.
//! - [`explore`]: Monte Carlo scans, envelopes, the POVM optimizer and the
//!   counterexample hunt for the unequal-prior conjectures.
//! - [`qubit`]: closed-form Bloch-sphere machinery for `d = 2`.
//! - [`qkd`]: eavesdropper information caps for BB84, six-state and qudit
//!   protocols.
//!
//! Conjectured bounds are never reported as proven: every bound check carries
//! a `proven` flag that depends on the prior profile and measurement.

#![forbid(unsafe_code)]

pub mod bounds;
mod error;
pub mod explore;
pub mod format;
pub mod info;
pub mod mub;
pub mod qkd;
pub mod quantum;
pub mod qubit;
pub mod sampling;

pub use error::{Error, Result};
pub use info::{InfoBreakdown, PriorProfile};
pub use mub::{Basis, MubFamily};
pub use quantum::{ComplexMatrix, Ensemble, HermitianOperator, Povm, StateVector, C64};
