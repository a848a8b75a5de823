use simplex_core::{Chain, Convention};

use crate::site::EngineError;

/// A chain `bounding` with ∂(bounding) = `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub target: Chain,
    pub bounding: Chain,
    pub note: String,
}

impl Certificate {
    /// Checks ∂(bounding) = target before handing the certificate out.
    pub fn new(target: Chain, bounding: Chain, note: impl Into<String>) -> Result<Certificate, EngineError> {
        let note = note.into();
        if !verify(&target, &bounding) {
            return Err(EngineError::BadCertificate(note));
        }
        Ok(Certificate { target, bounding, note })
    }

    pub fn zero(dim: i32, note: impl Into<String>) -> Certificate {
        Certificate { target: Chain::zero(dim), bounding: Chain::zero(dim + 1), note: note.into() }
    }

    pub fn check(&self) -> bool {
        verify(&self.target, &self.bounding)
    }

    /// Σ kᵢ·certᵢ, re-checked.
    pub fn combine(dim: i32, parts: &[(i64, &Certificate)], note: impl Into<String>) -> Result<Certificate, EngineError> {
        let mut target = Chain::zero(dim);
        let mut bounding = Chain::zero(dim + 1);
        for (k, c) in parts {
            target.add_scaled(&c.target, *k);
            bounding.add_scaled(&c.bounding, *k);
        }
        Certificate::new(target, bounding, note)
    }
}

/// The independent check: recompute ∂ with nothing but the chain calculus.
pub fn verify(target: &Chain, bounding: &Chain) -> bool {
    if bounding.dim() != target.dim() + 1 {
        return false;
    }
    bounding.boundary(Convention::Unreduced) == *target
}
