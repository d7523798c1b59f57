//! Command-line front end for nicel: analysis, solving, verification,
//! extension towers and the built-in reference corpus.

pub mod commands;
pub mod corpus;
pub mod input;
pub mod report;

pub use commands::{run, Cli, Command, Outcome};
