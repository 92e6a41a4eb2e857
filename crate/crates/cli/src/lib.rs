//! Command implementations behind the `rtbp` binary, exposed as a
//! library so the acceptance tests drive the same code paths.

pub mod commands;
pub mod config;
pub mod fixtures;
pub mod tables;
pub mod verify;
