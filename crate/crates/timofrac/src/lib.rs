//! Configuration, scenarios, CSV output and commands for the beam solver.

pub mod config;
pub mod error;
pub mod scenario;
pub mod reference;
pub mod output;
pub mod plot;
pub mod commands;
pub mod selftest;
