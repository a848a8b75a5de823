//! Exact integer linear algebra, group presentations, degree-zero homology
//! and a brute-force oracle over a bounded universe.

pub mod complex;
pub mod group;
pub mod snf;

pub use complex::{bounded_homology, find_bounding_chain, h0, BoundedComplex, H0Report, HomologyError, DEFAULT_CAP};
pub use group::{abelian_from_relations, abelian_of_subgroup, find_isomorphism, is_isomorphic, normalize_factors, FiniteGroup, GroupPresentation};
pub use snf::{smith, smith_i64, smith_normal_form, IntMatrix, Snf};
