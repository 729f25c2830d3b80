//! Quiver files, JSON reports and the command-line front end over
//! [`ginzburg_core`].

pub mod cli;
pub mod parser;
pub mod report;

pub use ginzburg_core as core;
pub use parser::{parse_quiver, ParseError};
