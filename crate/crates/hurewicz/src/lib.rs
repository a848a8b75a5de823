//! ε-invariants of 2-chains on groupoid and tower sites, and the H₂ and Γ₂
//! computations built on them.

pub mod classes;
pub mod epsilon;
pub mod gamma;

pub use classes::{coherent_tuples, fill_trivial_shell, h2, realize_class, realize_class_on, witness, ClassWitness, H2Report};
pub use epsilon::{epsilon2, epsilon_simplex, intertwiners, EdgeSelection, EpsilonValue};
pub use gamma::{gamma2, gamma2_group, noncomm_check, NoncommReport};

use amalgam_engine::EngineError;

#[derive(Debug, Clone, thiserror::Error)]
pub enum HurewiczError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0} is not a coherent tuple of central elements")]
    Incoherent(EpsilonValue),
    #[error("shell has ε = {value}: {reason}")]
    NonzeroClass { value: EpsilonValue, reason: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}
