//! Command-line front end for the `amhom` binary and the acceptance suite.

pub mod cli;
pub mod fuzz;
pub mod io;
pub mod suite;
