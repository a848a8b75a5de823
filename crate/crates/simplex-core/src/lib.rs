//! Functor-simplices over closed sets, chains of them, the boundary calculus,
//! and shell/fan/pocket views.

pub mod chain;
pub mod elem;
pub mod json;
pub mod mask;
pub mod simplex;
pub mod validate;
pub mod views;

pub use chain::{boundary_of, Chain, Convention};
pub use elem::{ClosedSet, Elem, Embedding};
pub use mask::Mask;
pub use simplex::{DownSet, Functor, Simplex, Transitions};
pub use validate::{functors_isomorphic, validate_simplex, Clause, IsoFamily, Report, Structure};
pub use views::{classify, FanView, Kind, PocketView, ShellView};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("support of {0} elements exceeds the cap of 16")]
    SupportTooLarge(usize),
    #[error("support {0:?} is not strictly increasing")]
    BadSupport(Vec<u32>),
    #[error("malformed simplex: {0}")]
    Shape(String),
    #[error("face index {0} out of range for a {1}-simplex")]
    FaceIndex(usize, i32),
    #[error("subset {0:#b} is not in the domain")]
    NotInDomain(Mask),
    #[error("simplices disagree on the face over {0:?}")]
    Disagree(Vec<u32>),
    #[error("chain of dimension {0} given a {1}-simplex")]
    MixedDims(i32, i32),
    #[error("not a shell or fan: {0}")]
    NotShell(String),
    #[error("not a pocket: {0}")]
    NotPocket(String),
    #[error("json: {0}")]
    Json(String),
}
