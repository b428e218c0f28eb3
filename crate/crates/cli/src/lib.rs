//! Library side of the `drstack` command-line tool, so the commands can be
//! driven from tests without spawning a process.

pub mod args;
pub mod commands;
pub mod manifest;
pub mod reproduce;
