//! Command-line front end for the complementary sequence encoder.

pub mod commands;
pub mod error;
pub mod records;
pub mod simulate;
pub mod source;
