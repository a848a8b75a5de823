use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::simplex::Simplex;
use crate::CoreError;

/// How ∂ acts on 0-simplices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// ∂₀ f = 0.
    #[default]
    Unreduced,
    /// ∂₀ f = f(∅), a simplex with empty support.
    Reduced,
}

impl std::str::FromStr for Convention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "unreduced" => Ok(Convention::Unreduced),
            "reduced" => Ok(Convention::Reduced),
            _ => Err(format!("unknown convention {s}")),
        }
    }
}

/// A finite ℤ-combination of simplices of one dimension. Zero coefficients
/// are never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Chain {
    dim: i32,
    terms: BTreeMap<Simplex, i64>,
}

impl Chain {
    pub fn zero(dim: i32) -> Chain {
        Chain { dim, terms: BTreeMap::new() }
    }

    pub fn simplex(f: &Simplex) -> Chain {
        Chain::term(f, 1)
    }

    pub fn term(f: &Simplex, coef: i64) -> Chain {
        let mut c = Chain::zero(f.dim());
        c.add_term(f, coef);
        c
    }

    pub fn from_terms<'a>(dim: i32, it: impl IntoIterator<Item = (&'a Simplex, i64)>) -> Result<Chain, CoreError> {
        let mut c = Chain::zero(dim);
        for (f, k) in it {
            if f.dim() != dim {
                return Err(CoreError::MixedDims(dim, f.dim()));
            }
            c.add_term(f, k);
        }
        Ok(c)
    }

    pub fn dim(&self) -> i32 {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Simplex, i64)> {
        self.terms.iter().map(|(f, &k)| (f, k))
    }

    pub fn coef(&self, f: &Simplex) -> i64 {
        self.terms.get(f).copied().unwrap_or(0)
    }

    /// Adds `coef·f`. Panics on a dimension mismatch, which is always a caller bug.
    pub fn add_term(&mut self, f: &Simplex, coef: i64) {
        assert_eq!(f.dim(), self.dim, "adding a {}-simplex to a {}-chain", f.dim(), self.dim);
        if coef == 0 {
            return;
        }
        let e = self.terms.entry(f.clone()).or_insert(0);
        *e += coef;
        if *e == 0 {
            self.terms.remove(f);
        }
    }

    pub fn add_scaled(&mut self, other: &Chain, k: i64) {
        if other.is_zero() || k == 0 {
            return;
        }
        assert_eq!(other.dim, self.dim, "adding chains of different dimension");
        for (f, c) in other.terms() {
            self.add_term(f, c * k);
        }
    }

    pub fn scaled(&self, k: i64) -> Chain {
        let mut c = Chain::zero(self.dim);
        c.add_scaled(self, k);
        c
    }

    pub fn plus(&self, other: &Chain) -> Chain {
        let mut c = self.clone();
        c.add_scaled(other, 1);
        c
    }

    pub fn minus(&self, other: &Chain) -> Chain {
        let mut c = self.clone();
        c.add_scaled(other, -1);
        c
    }

    /// Union of the supports of all terms.
    pub fn support(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.terms.keys().flat_map(|f| f.support().iter().copied()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn boundary(&self, conv: Convention) -> Chain {
        let mut out = Chain::zero(self.dim - 1);
        if self.dim < 0 {
            return out;
        }
        for (f, k) in self.terms() {
            out.add_scaled(&boundary_of(f, conv), k);
        }
        out
    }
}

/// ∂f = Σ (−1)^i ∂^i f.
pub fn boundary_of(f: &Simplex, conv: Convention) -> Chain {
    let mut out = Chain::zero(f.dim() - 1);
    match f.dim() {
        d if d < 0 => {}
        0 => {
            if conv == Convention::Reduced {
                out.add_term(&Simplex::empty(f.face_set(0).clone()), 1);
            }
        }
        _ => {
            for i in 0..f.n_vertices() {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                out.add_term(&f.face(i).expect("index in range"), sign);
            }
        }
    }
    out
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chain<{}>", self.dim)?;
        f.debug_list().entries(self.terms.iter()).finish()
    }
}
