//! Amalgamation-driven chain reductions with checkable certificates.

pub mod cert;
pub mod lemmas;
pub mod site;

pub use cert::{verify, Certificate};
pub use lemmas::*;
pub use site::{empty_base, random_functor, random_shell, random_simplex, EngineError, Obstruction, Site};
