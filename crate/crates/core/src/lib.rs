//! Solution sets of the power-sum congruence
//!
//! ```text
//! S_n(n) = 1^n + 2^n + ... + n^n ≡ m (mod n)
//! ```
//!
//! The crate replaces the O(n) summation by closed-form residues evaluated
//! prime-power-wise ([`powersum`]), characterizes the solutions structurally
//! ([`structure`]), builds the prime set bounding the solutions for prime `m`
//! ([`qp`]) and, when that set cannot be shown finite, bounds the solutions
//! through the catalog of weak primary pseudoperfect numbers ([`wpp`]).

pub mod arith;
mod error;
pub mod powersum;
pub mod qp;
pub mod structure;
pub mod wpp;

pub use arith::{Factorization, Nat};
pub use error::{Error, Result};
