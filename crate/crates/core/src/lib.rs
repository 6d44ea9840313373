//! Certified generating pairs for finite-index subgroups of `SL(n, Z)`.
//!
//! Given a regular `g` in `SL(n, Z)` (`n >= 3`) and `m >= 1`, the pipeline
//! builds a unipotent `h` and a certificate: explicit straight-line words in
//! `g` and `h` for elementary matrices at a uniform level, from which
//! `Gamma(N) <= <g, h>` follows by the Bass-Lazard-Serre theorem. Every
//! identity the certificate relies on is checked with exact arithmetic.

#![allow(clippy::needless_range_loop)]

pub mod bruhat;
pub mod certify;
pub mod error;
pub mod exactalg;
pub mod genpair;
pub mod hypothesis;
pub mod sample;
pub mod slp;

pub use bruhat::BruhatData;
pub use certify::{Certificate, VerifyReport};
pub use error::{Error, Result};
pub use exactalg::{IntMatrix, Poly, RatMatrix};
pub use genpair::{construct, Budget, LevelReport};
pub use hypothesis::{check_hypothesis, HypothesisReport};
pub use slp::Slp;
