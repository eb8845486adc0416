//! Golay complementary pair synthesis from generalized Boolean functions.
//!
//! The crate is organised bottom-up:
//!
//! - [`boolean`]: generalized Boolean functions in algebraic normal form and
//!   their association with length-`2^m` sequences.
//! - [`recursion`]: construction sequences of a two-operator polynomial
//!   recursion, with a literal symbolic unrolling used as an oracle.
//! - [`encoder`]: the closed-form pair encoder (amplitude, phase, shift and
//!   order encoders), the parameter conversion from the recursive form and
//!   the direct recursion itself.
//! - [`qam`]: `4s²`-QAM geometry, the five synthesis rules and counting.
//! - [`analysis`]: aperiodic autocorrelation, pair verification, PAPR and
//!   support diagnostics.

pub mod analysis;
pub mod boolean;
pub mod encoder;
pub mod qam;
pub mod recursion;
pub mod sequence;

mod error;

pub use error::{Error, Result};
pub use sequence::{ComplexSequence, UnitExpElement};

/// Relative tolerance used for equality, oracle and pair checks.
pub const REL_TOL: f64 = 1e-9;
