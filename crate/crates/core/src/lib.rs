//! Factorization invariants of additive monoids of nonnegative rationals
//! generated by finitely many geometric sequences.
//!
//! The modules build on each other bottom-up: [`qcore`] provides exact
//! rationals, [`monoid`] models generator sets, [`factorizer`] works with
//! individual factorizations (hub normal form, membership, brute-force
//! enumeration), [`lengths`] computes sets of lengths symbolically and the
//! invariants derived from them, and [`constructs`] builds the explicit
//! generator families with their witnesses.

pub mod constructs;
pub mod error;
pub mod factorizer;
pub mod lengths;
pub mod monoid;
pub mod qcore;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use factorizer::{Direction, Factorization, RewriteStep};
pub use lengths::{AapDecomposition, Extent, MapUnion};
pub use monoid::GeneratorSet;
pub use qcore::Rational;

/// Search bounds for every truncated computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest exponent `e` of an atom `b^e` considered.
    pub e_max: u32,
    /// Largest factorization length considered.
    pub len_max: u64,
    /// Upper end of truncated integer sets such as `U_k`.
    pub cap: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { e_max: 4, len_max: 64, cap: 64 }
    }
}
