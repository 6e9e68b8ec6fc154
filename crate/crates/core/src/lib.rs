//! Intermediate modular curves `X_Δ(N)`: coset combinatorics and genus,
//! newform coefficients of rational elliptic curves, the degree-pairing
//! quadratic forms of maps `X_Δ(N) → E`, and the rule pipeline deciding which
//! `X_Δ(N)` carry infinitely many quartic points.
//!
//! Everything here is pure computation over `alloc`; file formats, the remote
//! curve lookup and the command-line tool live in the `xdelta` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod classify;
pub mod dataset;
pub mod degpairing;
pub mod ellcurve;
mod error;
pub mod modcurve;
pub mod numtheory;
pub mod qform;
pub mod units;

pub use error::{Error, Result};
