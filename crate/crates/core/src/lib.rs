//! Soundness checking and summary computation for colored workflow nets by
//! exhaustive, equivalence-preserving rule rewriting.

pub mod color;
pub mod net;
pub mod models;
pub mod rules;
pub mod oracle;
pub mod reduction;
pub mod formats;
pub mod corpus;
pub mod cli;
