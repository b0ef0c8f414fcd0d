//! Library half of the `qfold` binary: the identity-catalog loader and the
//! subcommand implementations, exposed so integration tests can drive the
//! same code paths the binary does.

pub mod catalog;
pub mod commands;
