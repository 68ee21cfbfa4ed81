//! Command-line front end for tripod EIT spectrum sweeps.

pub mod config;
pub mod output;
pub mod run;
