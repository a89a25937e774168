//! Sums of digit-block powers in base b.
//!
//! A base-b k'th power is a number whose canonical base-b digit string is
//! k copies of one block (binary example: 3549 = 110111011101). This crate
//! provides exact recognition and enumeration of such numbers, their gcd
//! structure, Frobenius numbers of the scaled sets, a constructive
//! decomposition of multiples of that gcd into certified sums of binary
//! k'th powers, exhaustive bounded-count censuses, sumset uniqueness
//! checks, and the natural-density series of gcd classes.
//!
//! All core arithmetic is exact (big integers and unreduced rationals);
//! floating point appears only in report rendering.

pub mod arith;
pub mod certificate;
pub mod decompose;
pub mod density;
pub mod error;
pub mod frobenius;
pub mod gcd;
pub mod repr;
pub mod search;
pub mod selftest;
pub mod vander;

pub use error::{Error, Result};
pub use repr::{c_kb, enumerate, is_member, recognize, BlockPower, PowerSetView};
