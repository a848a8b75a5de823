use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::elem::{ClosedSet, Embedding};
use crate::mask::{self, Mask};
use crate::CoreError;

pub type Transitions = BTreeMap<(Mask, Mask), Embedding>;

struct Inner {
    support: Vec<u32>,
    faces: Vec<ClosedSet>,
    trans: Transitions,
    fp: u64,
}

/// A functor from the power set of its support into closed sets. Faces are
/// indexed by position masks; transitions are stored for every pair u ⊆ v.
#[derive(Clone)]
pub struct Simplex(Arc<Inner>);

fn fingerprint(support: &[u32], faces: &[ClosedSet], trans: &Transitions) -> u64 {
    let mut h = DefaultHasher::new();
    support.hash(&mut h);
    faces.hash(&mut h);
    for (k, e) in trans {
        k.hash(&mut h);
        e.hash(&mut h);
    }
    h.finish()
}

impl Simplex {
    /// Assembles a simplex, checking only shapes (every pair present, maps in range).
    pub fn from_parts(support: Vec<u32>, faces: Vec<ClosedSet>, trans: Transitions) -> Result<Simplex, CoreError> {
        let n = support.len();
        if n > mask::MAX_SUPPORT {
            return Err(CoreError::SupportTooLarge(n));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::BadSupport(support));
        }
        if faces.len() != 1 << n {
            return Err(CoreError::Shape(format!("expected {} faces, got {}", 1 << n, faces.len())));
        }
        let full = mask::full(n);
        let mut expected = 0usize;
        for v in 0..=full {
            for u in mask::subsets(v) {
                expected += 1;
                let e = trans
                    .get(&(u, v))
                    .ok_or_else(|| CoreError::Shape(format!("missing transition {u:#b}->{v:#b}")))?;
                let (src, dst) = (&faces[u as usize], &faces[v as usize]);
                if e.map.len() != src.len() || e.map.iter().any(|&i| i as usize >= dst.len()) {
                    return Err(CoreError::Shape(format!("transition {u:#b}->{v:#b} out of range")));
                }
            }
            if v == full {
                break;
            }
        }
        if trans.len() != expected {
            return Err(CoreError::Shape("transition keys outside the power set".into()));
        }
        Ok(Simplex::from_parts_unchecked(support, faces, trans))
    }

    pub(crate) fn from_parts_unchecked(support: Vec<u32>, faces: Vec<ClosedSet>, trans: Transitions) -> Simplex {
        let fp = fingerprint(&support, &faces, &trans);
        Simplex(Arc::new(Inner { support, faces, trans, fp }))
    }

    /// Builds a simplex from its faces and an embedding of each face into the
    /// top face; transitions are obtained by factoring through the target.
    pub fn from_top(support: Vec<u32>, faces: Vec<ClosedSet>, into_top: Vec<Embedding>) -> Result<Simplex, CoreError> {
        let n = support.len();
        let full = mask::full(n);
        let top_len = faces[full as usize].len();
        let mut trans = Transitions::new();
        for v in 0..=full {
            for u in mask::subsets(v) {
                let e = if u == v {
                    Embedding::identity(faces[u as usize].len())
                } else {
                    into_top[u as usize]
                        .factor_through(&into_top[v as usize], top_len)
                        .ok_or_else(|| CoreError::Shape(format!("face {u:#b} does not land inside face {v:#b}")))?
                };
                trans.insert((u, v), e);
            }
            if v == full {
                break;
            }
        }
        Simplex::from_parts(support, faces, trans)
    }

    /// The unique simplex with empty support over the given base.
    pub fn empty(base: ClosedSet) -> Simplex {
        let mut trans = Transitions::new();
        trans.insert((0, 0), Embedding::identity(base.len()));
        Simplex::from_parts_unchecked(Vec::new(), vec![base], trans)
    }

    pub fn support(&self) -> &[u32] {
        &self.0.support
    }

    pub fn n_vertices(&self) -> usize {
        self.0.support.len()
    }

    pub fn dim(&self) -> i32 {
        self.0.support.len() as i32 - 1
    }

    pub fn full_mask(&self) -> Mask {
        mask::full(self.n_vertices())
    }

    pub fn faces(&self) -> &[ClosedSet] {
        &self.0.faces
    }

    pub fn face_set(&self, u: Mask) -> &ClosedSet {
        &self.0.faces[u as usize]
    }

    pub fn top(&self) -> &ClosedSet {
        self.face_set(self.full_mask())
    }

    pub fn transitions(&self) -> &Transitions {
        &self.0.trans
    }

    pub fn trans(&self, u: Mask, v: Mask) -> &Embedding {
        &self.0.trans[&(u, v)]
    }

    /// Mask of the positions whose support values lie in `subset`.
    pub fn mask_of(&self, subset: &[u32]) -> Option<Mask> {
        let mut m = 0;
        for x in subset {
            let i = self.0.support.binary_search(x).ok()?;
            m |= 1 << i;
        }
        Some(m)
    }

    pub fn values_of(&self, m: Mask) -> Vec<u32> {
        mask::bits(m).map(|i| self.0.support[i]).collect()
    }

    /// Restriction to the positions in `p`.
    pub fn restrict(&self, p: Mask) -> Simplex {
        let k = mask::popcount(p);
        let support = self.values_of(p);
        let faces = (0..1u32 << k).map(|c| self.face_set(mask::expand(c as Mask, p)).clone()).collect();
        let mut trans = Transitions::new();
        let full = mask::full(k);
        for v in 0..=full {
            for u in mask::subsets(v) {
                trans.insert((u, v), self.trans(mask::expand(u, p), mask::expand(v, p)).clone());
            }
            if v == full {
                break;
            }
        }
        Simplex::from_parts_unchecked(support, faces, trans)
    }

    /// The i-th boundary face: restriction to the support minus its i-th element.
    pub fn face(&self, i: usize) -> Result<Simplex, CoreError> {
        if self.n_vertices() == 0 || i >= self.n_vertices() {
            return Err(CoreError::FaceIndex(i, self.dim()));
        }
        Ok(self.restrict(self.full_mask() & !(1 << i)))
    }

    /// Same functor on a new support of equal size.
    pub fn relabel(&self, support: Vec<u32>) -> Result<Simplex, CoreError> {
        if support.len() != self.n_vertices() {
            return Err(CoreError::Shape("relabel changes the support size".into()));
        }
        Simplex::from_parts(support, self.0.faces.clone(), self.0.trans.clone())
    }

    /// Localization at the positions in `t`: u ↦ f(t ∪ u) on the remaining positions.
    pub fn localize(&self, t: Mask) -> Functor {
        let rest = self.full_mask() & !t;
        let k = mask::popcount(rest);
        let faces = (0..1u32 << k)
            .map(|c| Some(self.face_set(mask::expand(c as Mask, rest) | t).clone()))
            .collect();
        let mut trans = Transitions::new();
        let full = mask::full(k);
        for v in 0..=full {
            for u in mask::subsets(v) {
                let e = self.trans(mask::expand(u, rest) | t, mask::expand(v, rest) | t);
                trans.insert((u, v), e.clone());
            }
            if v == full {
                break;
            }
        }
        Functor { support: self.values_of(rest), faces, trans }
    }

    /// Index of the element of `face_set(v)` that vertex position `i` maps to,
    /// for sites whose vertex closed sets are single points.
    pub fn vertex_images(&self, i: usize, v: Mask) -> Vec<u32> {
        self.trans(1 << i, v).map.clone()
    }
}

impl PartialEq for Simplex {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Simplex {}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let (a, b) = (&*self.0, &*other.0);
        a.support
            .len()
            .cmp(&b.support.len())
            .then_with(|| a.support.cmp(&b.support))
            .then_with(|| a.fp.cmp(&b.fp))
            .then_with(|| a.faces.cmp(&b.faces))
            .then_with(|| a.trans.cmp(&b.trans))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Simplex {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.support.hash(state);
        self.0.fp.hash(state);
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Simplex{:?}#{:08x}", self.0.support, self.0.fp as u32)
    }
}

/// A downward-closed family of position subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownSet {
    pub n: usize,
    pub members: Vec<bool>,
}

impl DownSet {
    pub fn power_set(n: usize) -> Self {
        DownSet { n, members: vec![true; 1 << n] }
    }

    /// All subsets except the full set.
    pub fn boundary_of(n: usize) -> Self {
        let mut d = DownSet::power_set(n);
        d.members[mask::full(n) as usize] = false;
        d
    }

    /// Downward closure of the given generators.
    pub fn generated(n: usize, gens: &[Mask]) -> Self {
        let mut members = vec![false; 1 << n];
        for &g in gens {
            for u in mask::subsets(g) {
                members[u as usize] = true;
            }
        }
        members[0] = true;
        DownSet { n, members }
    }

    pub fn contains(&self, u: Mask) -> bool {
        self.members.get(u as usize).copied().unwrap_or(false)
    }

    pub fn is_downward_closed(&self) -> bool {
        self.members[0]
            && (0..self.members.len())
                .filter(|&v| self.members[v])
                .all(|v| mask::subsets(v as Mask).into_iter().all(|u| self.members[u as usize]))
    }

    pub fn maximal(&self) -> Vec<Mask> {
        let all: Vec<Mask> = (0..self.members.len() as u32).filter(|&v| self.members[v as usize]).map(|v| v as Mask).collect();
        all.iter()
            .copied()
            .filter(|&v| !all.iter().any(|&w| w != v && mask::is_subset(v, w)))
            .collect()
    }

    /// X|_t = {u ⊆ s∖t : t ∪ u ∈ X}, re-indexed on the positions outside t.
    pub fn localize(&self, t: Mask) -> Result<DownSet, CoreError> {
        if !self.contains(t) {
            return Err(CoreError::NotInDomain(t));
        }
        let rest = mask::full(self.n) & !t;
        let k = mask::popcount(rest);
        let members = (0..1u32 << k).map(|c| self.contains(mask::expand(c as Mask, rest) | t)).collect();
        Ok(DownSet { n: k, members })
    }
}

/// A functor defined on a downward-closed subfamily of P(support).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    pub support: Vec<u32>,
    pub faces: Vec<Option<ClosedSet>>,
    pub trans: Transitions,
}

impl Functor {
    pub fn n(&self) -> usize {
        self.support.len()
    }

    pub fn domain(&self) -> DownSet {
        DownSet { n: self.n(), members: self.faces.iter().map(Option::is_some).collect() }
    }

    pub fn face_set(&self, u: Mask) -> Option<&ClosedSet> {
        self.faces.get(u as usize).and_then(Option::as_ref)
    }

    pub fn from_simplex(f: &Simplex) -> Functor {
        Functor {
            support: f.support().to_vec(),
            faces: f.faces().iter().cloned().map(Some).collect(),
            trans: f.transitions().clone(),
        }
    }

    /// Union of simplices whose supports lie in `support`; they must agree on
    /// every shared face and transition.
    pub fn union(support: Vec<u32>, parts: &[Simplex]) -> Result<Functor, CoreError> {
        let n = support.len();
        if n > mask::MAX_SUPPORT {
            return Err(CoreError::SupportTooLarge(n));
        }
        let start = Functor { support, faces: vec![None; 1 << n], trans: Transitions::new() };
        let out = Functor::union_with(start, parts)?;
        if out.faces[0].is_none() {
            return Err(CoreError::Shape("union of no simplices".into()));
        }
        Ok(out)
    }

    /// Only the base face is defined.
    pub fn empty(support: Vec<u32>, base: ClosedSet) -> Functor {
        let mut faces = vec![None; 1 << support.len()];
        let mut trans = Transitions::new();
        trans.insert((0, 0), Embedding::identity(base.len()));
        faces[0] = Some(base);
        Functor { support, faces, trans }
    }

    /// Restriction to the positions in `p`, re-indexed on those positions.
    pub fn restrict(&self, p: Mask) -> Functor {
        let k = mask::popcount(p);
        let faces: Vec<Option<ClosedSet>> = (0..1u32 << k).map(|c| self.faces[mask::expand(c as Mask, p) as usize].clone()).collect();
        let mut trans = Transitions::new();
        let full = mask::full(k);
        for v in 0..=full {
            if faces[v as usize].is_some() {
                for u in mask::subsets(v) {
                    if let Some(e) = self.trans.get(&(mask::expand(u, p), mask::expand(v, p))) {
                        trans.insert((u, v), e.clone());
                    }
                }
            }
            if v == full {
                break;
            }
        }
        let support = mask::bits(p).map(|i| self.support[i]).collect();
        Functor { support, faces, trans }
    }

    /// Adds every face and transition of `f`, whose support must lie inside ours.
    pub fn insert(&mut self, f: &Simplex) -> Result<(), CoreError> {
        let merged = Functor::union_with(self.clone(), std::slice::from_ref(f))?;
        *self = merged;
        Ok(())
    }

    fn union_with(start: Functor, parts: &[Simplex]) -> Result<Functor, CoreError> {
        let Functor { support, mut faces, mut trans } = start;
        for f in parts {
            let mut p: Mask = 0;
            for x in f.support() {
                let i = support.binary_search(x).map_err(|_| CoreError::Shape(format!("support value {x} outside union")))?;
                p |= 1 << i;
            }
            for c in 0..=f.full_mask() {
                let u = mask::expand(c, p);
                let fs = f.face_set(c);
                match &faces[u as usize] {
                    Some(old) if old != fs => return Err(CoreError::Disagree(f.values_of(c))),
                    Some(_) => {}
                    None => faces[u as usize] = Some(fs.clone()),
                }
                if c == f.full_mask() {
                    break;
                }
            }
            for (&(a, b), e) in f.transitions() {
                let key = (mask::expand(a, p), mask::expand(b, p));
                match trans.get(&key) {
                    Some(old) if old != e => return Err(CoreError::Disagree(f.values_of(b))),
                    Some(_) => {}
                    None => {
                        trans.insert(key, e.clone());
                    }
                }
            }
        }
        Ok(Functor { support, faces, trans })
    }

    /// Restriction of a full functor back to a simplex, when the domain is everything.
    pub fn into_simplex(self) -> Result<Simplex, CoreError> {
        let faces: Option<Vec<ClosedSet>> = self.faces.into_iter().collect();
        let faces = faces.ok_or_else(|| CoreError::Shape("functor is not defined on the full power set".into()))?;
        Simplex::from_parts(self.support, faces, self.trans)
    }
}
