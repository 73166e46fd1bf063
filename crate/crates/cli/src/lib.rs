//! Experiment harness behind the `dwmgrad` binary: config parsing, the
//! run / compare / sweep commands, and the check suite.

pub mod check;
pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod presets;
