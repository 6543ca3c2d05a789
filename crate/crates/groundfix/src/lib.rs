//! Text formats, instance generators and the evaluation pipeline around
//! [`groundfix_core`].

pub mod bench;
pub mod check;
pub mod corpus;
pub mod format;
pub mod generate;
pub mod parse;
pub mod pipeline;

pub use groundfix_core as core;
