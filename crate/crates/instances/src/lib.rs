//! Concrete sites: parity hypergraphs, tetrahedron-free 3-graphs, dense
//! linear orders, finitary groupoids and towers of groupoids.

pub mod descriptor;
pub mod rel;
pub mod tower;

use simplex_core::Elem;

pub use descriptor::{SiteDescriptor, SiteHandle};
pub use rel::{parity_epsilon, random_structure, RelKind, RelSite};
pub use tower::TowerSite;

#[derive(Debug, Clone, thiserror::Error)]
pub enum InstanceError {
    #[error("bad site descriptor: {0}")]
    Descriptor(String),
    #[error("level mismatch: {0}")]
    Level(String),
}

/// A fresh point for the tetrahedron-free site: completions leave every
/// triple through it false, so faces through it always amalgamate.
pub fn tetra_apex(chain_vertices: &[u32]) -> u32 {
    rel::fresh_apex(chain_vertices)
}

/// A fresh point above every input: completions order it last.
pub fn dlo_extreme_extension(points: &[u32]) -> u32 {
    rel::fresh_apex(points)
}

/// Projects an element of level `from` down to level `to` of a tower.
pub fn tower_project(x: Elem, to: u8, site: &TowerSite) -> Result<Elem, InstanceError> {
    site.project(x, to)
}
