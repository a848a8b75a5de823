use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use instances::TowerSite;
use serde::{Deserialize, Serialize};
use simplex_core::{Chain, Elem, Mask, Simplex};

use crate::HurewiczError;

/// How a morphism is picked on each edge. Any choice gives the same value on
/// cycles; `Seeded` exists to test that.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgeSelection {
    /// least label among the intertwiners
    #[default]
    Least,
    /// an intertwiner chosen by hashing the edge simplex with a seed
    Seeded(u64),
}

/// One element per level of the tower, as group indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EpsilonValue {
    pub levels: Vec<usize>,
}

impl EpsilonValue {
    pub fn identity(site: &TowerSite) -> Self {
        EpsilonValue { levels: vec![0; site.n_levels()] }
    }

    /// The coherent tuple of a top-level element.
    pub fn from_top(site: &TowerSite, g: usize) -> Self {
        EpsilonValue { levels: site.phi.iter().map(|p| p[g]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.levels.iter().all(|&x| x == 0)
    }

    pub fn is_coherent(&self, site: &TowerSite) -> bool {
        self.levels.len() == site.n_levels()
            && site.maps.iter().enumerate().all(|(l, m)| self.levels[l] < m.len() && m[self.levels[l]] == self.levels[l + 1])
    }

    pub fn mul(&self, other: &Self, site: &TowerSite) -> Self {
        let levels = self.levels.iter().zip(&other.levels).enumerate().map(|(l, (&a, &b))| site.levels[l].mul(a, b)).collect();
        EpsilonValue { levels }
    }

    pub fn pow(&self, k: i64, site: &TowerSite) -> Self {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(l, &a)| {
                let g = &site.levels[l];
                let base = if k < 0 { g.inv(a) } else { a };
                (0..k.unsigned_abs()).fold(0, |acc, _| g.mul(acc, base))
            })
            .collect();
        EpsilonValue { levels }
    }
}

impl std::fmt::Display for EpsilonValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.levels.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

const EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

fn edge_mask(i: usize, j: usize) -> Mask {
    (1 << i | 1 << j) as Mask
}

fn find(f: &Simplex, u: Mask, x: &Elem) -> Result<u32, HurewiczError> {
    f.face_set(u).index_of(x).ok_or_else(|| HurewiczError::Invalid(format!("{x:?} missing from face {u:#b}")))
}

/// Object id of vertex i inside face u.
fn object_in(f: &Simplex, i: usize, u: Mask) -> Result<u32, HurewiczError> {
    let v = 1 << i;
    let vs = f.face_set(v);
    let k = vs.elems.iter().position(|e| matches!(e, Elem::Obj(0, _))).ok_or_else(|| HurewiczError::Invalid("vertex without an object".into()))?;
    match f.face_set(u).elems[f.trans(v, u).map[k] as usize] {
        Elem::Obj(0, a) => Ok(a),
        _ => Err(HurewiczError::Invalid("vertex object maps to a non-object".into())),
    }
}

/// Labels of the images in face u of vertex i's top-level loops, by loop label.
fn loops_in(site: &TowerSite, f: &Simplex, i: usize, u: Mask) -> Result<Vec<usize>, HurewiczError> {
    let v = 1 << i;
    let a = object_in(f, i, v)?;
    let (vs, us) = (f.face_set(v), f.face_set(u));
    (0..site.top_group().order())
        .map(|g| {
            let y = f.trans(v, u).map[find(f, v, &Elem::Mor(0, a, a, g as u32))? as usize];
            TowerSite::label(us, y).map(|(_, _, _, h)| h).ok_or_else(|| HurewiczError::Invalid(format!("loop in {vs:?} maps to a non-morphism")))
        })
        .collect()
}

/// Top-level labels m of morphisms a_i → a_j in the edge face with
/// m·F_i(g)·m⁻¹ = F_j(g) for every loop g.
pub fn intertwiners(site: &TowerSite, f: &Simplex, i: usize, j: usize) -> Result<Vec<usize>, HurewiczError> {
    let u = edge_mask(i, j);
    let (xi, xj) = (loops_in(site, f, i, u)?, loops_in(site, f, j, u)?);
    let g = site.top_group();
    Ok((0..g.order()).filter(|&m| xi.iter().zip(&xj).all(|(&a, &b)| g.conj(m, a) == b)).collect())
}

fn select(sel: EdgeSelection, f: &Simplex, u: Mask, cands: &[usize]) -> usize {
    match sel {
        EdgeSelection::Least => cands[0],
        EdgeSelection::Seeded(seed) => {
            let mut h = DefaultHasher::new();
            seed.hash(&mut h);
            f.restrict(u).hash(&mut h);
            cands[(h.finish() % cands.len() as u64) as usize]
        }
    }
}

/// ε of one 2-simplex: the loop (α₀₂)⁻¹∘α₁₂∘α₀₁ in the top face, at every level.
pub fn epsilon_simplex(site: &TowerSite, f: &Simplex, sel: EdgeSelection) -> Result<EpsilonValue, HurewiczError> {
    if f.dim() != 2 {
        return Err(HurewiczError::Invalid(format!("expected a 2-simplex, got dimension {}", f.dim())));
    }
    let full = f.full_mask();
    let top = f.top();
    let mut chosen = Vec::with_capacity(3);
    for &(i, j) in &EDGES {
        let cands = intertwiners(site, f, i, j)?;
        if cands.is_empty() {
            return Err(HurewiczError::Invalid(format!("edge {i}{j} has no intertwining morphism")));
        }
        let u = edge_mask(i, j);
        chosen.push((u, object_in(f, i, u)?, object_in(f, j, u)?, select(sel, f, u, &cands)));
    }
    let mut levels = Vec::with_capacity(site.n_levels());
    for (l, g) in site.levels.iter().enumerate() {
        let mut labels = Vec::with_capacity(3);
        for &(u, a, b, m) in &chosen {
            let x = site.project(Elem::Mor(0, a, b, m as u32), l as u8).map_err(|e| HurewiczError::Invalid(e.to_string()))?;
            let y = f.trans(u, full).map[find(f, u, &x)? as usize];
            let (_, _, _, h) = TowerSite::label(top, y).ok_or_else(|| HurewiczError::Invalid("edge morphism maps to a non-morphism".into()))?;
            labels.push(h);
        }
        levels.push(g.mul(g.mul(g.inv(labels[2]), labels[1]), labels[0]));
    }
    Ok(EpsilonValue { levels })
}

/// ε extended linearly (into the center, so order does not matter).
pub fn epsilon2(c: &Chain, site: &TowerSite, sel: EdgeSelection) -> Result<EpsilonValue, HurewiczError> {
    if c.dim() != 2 {
        return Err(HurewiczError::Invalid(format!("expected a 2-chain, got dimension {}", c.dim())));
    }
    let mut acc = EpsilonValue::identity(site);
    for (f, k) in c.terms() {
        acc = acc.mul(&epsilon_simplex(site, f, sel)?.pow(k, site), site);
    }
    Ok(acc)
}
