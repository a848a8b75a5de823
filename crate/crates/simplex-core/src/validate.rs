use serde::Serialize;

use crate::elem::{ClosedSet, Embedding};
use crate::mask::{self, Mask};
use crate::simplex::Simplex;

/// What a site must answer about its closed sets.
pub trait Structure {
    /// The closed set every functor is based on.
    fn base(&self) -> ClosedSet;

    /// Is `e` an injective structure-preserving map of the right kind?
    fn elementary(&self, src: &ClosedSet, dst: &ClosedSet, e: &Embedding) -> bool;

    /// Indices of the closure of `seeds` inside `ambient`, sorted.
    fn closure(&self, ambient: &ClosedSet, seeds: &[u32]) -> Vec<u32>;

    /// Independence of the element sets `a` and `b` over `over`, all inside `ambient`.
    fn independent(&self, ambient: &ClosedSet, a: &[u32], b: &[u32], over: &[u32]) -> bool;

    /// Every elementary bijection `src → dst` that agrees with `forced` where it is set.
    fn isomorphisms(&self, src: &ClosedSet, dst: &ClosedSet, forced: &[Option<u32>]) -> Vec<Embedding>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Clause {
    Functoriality,
    Elementarity,
    Base,
    Independence,
    Closure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub clause: Clause,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, c: Clause) -> bool {
        self.violations.iter().any(|v| v.clause == c)
    }

    fn push(&mut self, clause: Clause, detail: String) {
        self.violations.push(Violation { clause, detail });
    }
}

fn image(e: &Embedding) -> Vec<u32> {
    let mut v = e.map.clone();
    v.sort_unstable();
    v
}

/// Checks functoriality, elementarity of transitions, the base, pairwise
/// independence inside each face and that each face is generated by its vertices.
pub fn validate_simplex(f: &Simplex, site: &dyn Structure) -> Report {
    let mut r = Report::default();
    let full = f.full_mask();
    let pairs: Vec<(Mask, Mask)> = f.transitions().keys().copied().collect();

    for &(u, v) in &pairs {
        let e = f.trans(u, v);
        let (src, dst) = (f.face_set(u), f.face_set(v));
        if u == v && *e != Embedding::identity(src.len()) {
            r.push(Clause::Functoriality, format!("transition on {:?} is not the identity", f.values_of(u)));
        }
        if !e.is_injective(dst.len()) || !site.elementary(src, dst, e) {
            r.push(Clause::Elementarity, format!("{:?} -> {:?} is not elementary", f.values_of(u), f.values_of(v)));
        }
    }
    for &(u, v) in &pairs {
        if u == v {
            continue;
        }
        for w in (0..=full).filter(|&w| mask::is_subset(v, w) && w != v) {
            let direct = f.trans(u, w);
            let via = f.trans(u, v).then(f.trans(v, w));
            if *direct != via {
                r.push(
                    Clause::Functoriality,
                    format!("{:?} -> {:?} -> {:?} does not commute", f.values_of(u), f.values_of(v), f.values_of(w)),
                );
            }
        }
    }
    if r.has(Clause::Functoriality) {
        return r;
    }
    if *f.face_set(0) != site.base() {
        r.push(Clause::Base, "f(∅) differs from the site base".into());
    }
    for w in 0..=full {
        let amb = f.face_set(w);
        let subs = mask::subsets(w);
        let mut seeds: Vec<u32> = f.trans(0, w).map.clone();
        for i in mask::bits(w) {
            seeds.extend(&f.trans(1 << i, w).map);
        }
        let cl = site.closure(amb, &seeds);
        if cl.len() != amb.len() {
            r.push(Clause::Closure, format!("face {:?} is not generated by its vertices", f.values_of(w)));
        }
        for (a, &u) in subs.iter().enumerate() {
            for &v in &subs[a + 1..] {
                if mask::is_subset(u, v) || mask::is_subset(v, u) {
                    continue;
                }
                let iu = image(f.trans(u, w));
                let iv = image(f.trans(v, w));
                let io = image(f.trans(u & v, w));
                if !site.independent(amb, &iu, &iv, &io) {
                    r.push(
                        Clause::Independence,
                        format!("{:?} and {:?} are dependent inside {:?}", f.values_of(u), f.values_of(v), f.values_of(w)),
                    );
                }
            }
        }
        if w == full {
            break;
        }
    }
    r
}

/// A family h_u : f(u) → g(σu), one per position mask.
pub type IsoFamily = Vec<Embedding>;

/// Searches for an isomorphism family between simplices of equal dimension,
/// face by face in order of size, with every square forced to commute.
pub fn functors_isomorphic(f: &Simplex, g: &Simplex, site: &dyn Structure) -> Option<IsoFamily> {
    if f.n_vertices() != g.n_vertices() {
        return None;
    }
    let full = f.full_mask();
    let mut order: Vec<Mask> = (0..=full as u32).map(|m| m as Mask).collect();
    order.sort_by_key(|&m| (mask::popcount(m), m));
    let mut chosen: Vec<Option<Embedding>> = vec![None; 1 << f.n_vertices()];
    if search(f, g, site, &order, 0, &mut chosen) {
        Some(chosen.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}

fn search(f: &Simplex, g: &Simplex, site: &dyn Structure, order: &[Mask], k: usize, chosen: &mut Vec<Option<Embedding>>) -> bool {
    if k == order.len() {
        return true;
    }
    let u = order[k];
    let (src, dst) = (f.face_set(u), g.face_set(u));
    if src.len() != dst.len() {
        return false;
    }
    let mut forced: Vec<Option<u32>> = vec![None; src.len()];
    for v in mask::subsets(u) {
        if v == u {
            continue;
        }
        let hv = chosen[v as usize].as_ref().expect("subfaces come first");
        let fe = f.trans(v, u);
        let ge = g.trans(v, u);
        for y in 0..hv.map.len() {
            let from = fe.map[y] as usize;
            let to = ge.map[hv.map[y] as usize];
            match forced[from] {
                Some(t) if t != to => return false,
                _ => forced[from] = Some(to),
            }
        }
    }
    for h in site.isomorphisms(src, dst, &forced) {
        chosen[u as usize] = Some(h);
        if search(f, g, site, order, k + 1, chosen) {
            return true;
        }
    }
    chosen[u as usize] = None;
    false
}
