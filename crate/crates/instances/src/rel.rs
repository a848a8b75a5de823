//! Sites whose closed sets are finite point sets with one relation and
//! trivial closure: parity hypergraphs, tetrahedron-free 3-graphs and
//! linear orders.

use std::collections::BTreeMap;

use amalgam_engine::{Obstruction, Site};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use simplex_core::{mask, ClosedSet, Elem, Embedding, Functor, Mask, Simplex, Structure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelKind {
    /// Symmetric r-ary relation, even count on every (r+1)-set.
    Parity(usize),
    /// Symmetric ternary relation without an all-true 4-set.
    Tetra,
    /// Strict linear order.
    Dlo,
}

#[derive(Clone, Debug)]
pub struct RelSite {
    pub kind: RelKind,
}

impl RelSite {
    pub fn parity(arity: usize) -> Self {
        assert!(arity >= 2, "parity arity must be at least 2");
        RelSite { kind: RelKind::Parity(arity) }
    }

    pub fn tetra() -> Self {
        RelSite { kind: RelKind::Tetra }
    }

    pub fn dlo() -> Self {
        RelSite { kind: RelKind::Dlo }
    }

    /// Arity of the symmetric relation, if any.
    pub fn arity(&self) -> Option<usize> {
        match self.kind {
            RelKind::Parity(r) => Some(r),
            RelKind::Tetra => Some(3),
            RelKind::Dlo => None,
        }
    }

    /// Points labelled `labels` with relation tuples given by position.
    pub fn structure(labels: &[u32], tuples: &[Vec<u32>]) -> ClosedSet {
        let elems: Vec<Elem> = labels.iter().map(|&x| Elem::Pt(x)).collect();
        let rel = tuples.iter().map(|t| t.iter().map(|&p| elems[p as usize]).collect()).collect();
        ClosedSet::from_parts(elems, rel)
    }

    /// Every structure of this kind on k points, as relation tuples by position.
    pub fn all_structures(&self, k: usize) -> Vec<Vec<Vec<u32>>> {
        match self.kind {
            RelKind::Dlo => permutations(k)
                .into_iter()
                .map(|order| {
                    let mut rank = vec![0; k];
                    for (r, &p) in order.iter().enumerate() {
                        rank[p] = r;
                    }
                    order_pairs(&rank)
                })
                .collect(),
            RelKind::Tetra => {
                let triples = k_subsets(k, 3);
                let quads = k_subsets(k, 4);
                (0u64..1 << triples.len())
                    .filter(|bits| {
                        quads.iter().all(|q| triples.iter().enumerate().any(|(i, t)| mask::is_subset(*t, *q) && bits >> i & 1 == 0))
                    })
                    .map(|bits| (0..triples.len()).filter(|i| bits >> i & 1 == 1).map(|i| mask_tuple(triples[i])).collect())
                    .collect()
            }
            RelKind::Parity(r) => {
                let sys = ParitySystem::new(k, r, &BTreeMap::new());
                let free = sys.free_vars();
                assert!(free.len() < 24, "too many parity structures to enumerate");
                (0u64..1 << free.len())
                    .map(|bits| {
                        let choice: Vec<bool> = (0..free.len()).map(|i| bits >> i & 1 == 1).collect();
                        let sol = sys.solve_with(&free, &choice).expect("unconstrained system is consistent");
                        sys.vars.iter().zip(sol).filter(|(_, b)| *b).map(|(&m, _)| mask_tuple(m)).collect()
                    })
                    .collect()
            }
        }
    }

    /// The 0-simplex on one labelled point.
    pub fn point(label: u32) -> Simplex {
        vertex_simplex(label)
    }

    /// R-bit of the top face of an (r−1)-simplex over a parity or tetra site:
    /// whether its points form a tuple of the relation.
    pub fn top_bit(f: &Simplex) -> bool {
        let top = f.top();
        let all: Vec<u32> = (0..top.len() as u32).collect();
        top.has_tuple(&all)
    }
}

fn vertex_simplex(label: u32) -> Simplex {
    let top = ClosedSet::from_parts(vec![Elem::Pt(label)], vec![]);
    Simplex::from_top(vec![label], vec![ClosedSet::empty(), top], vec![Embedding { map: vec![] }, Embedding::identity(1)])
        .expect("vertex is well formed")
}

fn mask_tuple(m: Mask) -> Vec<u32> {
    mask::bits(m).map(|i| i as u32).collect()
}

fn k_subsets(n: usize, k: usize) -> Vec<Mask> {
    let mut v: Vec<Mask> = (0..1u32 << n).map(|m| m as Mask).filter(|&m| mask::popcount(m) == k).collect();
    v.sort_unstable();
    v
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..k).collect(), &mut Vec::new(), &mut out);
    out
}

fn order_pairs(rank: &[usize]) -> Vec<Vec<u32>> {
    let k = rank.len();
    let mut out = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if rank[i] < rank[j] {
                out.push(vec![i as u32, j as u32]);
            }
        }
    }
    out
}

/// Linear system over GF(2): one variable per r-subset of k positions whose
/// bit is unknown, one equation per (r+1)-subset.
struct ParitySystem {
    vars: Vec<Mask>,
    /// pivot variable index -> (row over vars, rhs)
    pivots: BTreeMap<usize, (Vec<bool>, bool)>,
    consistent: bool,
}

impl ParitySystem {
    fn new(k: usize, r: usize, known: &BTreeMap<Mask, bool>) -> Self {
        let vars: Vec<Mask> = k_subsets(k, r).into_iter().filter(|m| !known.contains_key(m)).collect();
        let var_of: BTreeMap<Mask, usize> = vars.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let mut sys = ParitySystem { vars, pivots: BTreeMap::new(), consistent: true };
        for q in k_subsets(k, r + 1) {
            let mut row = vec![false; sys.vars.len()];
            let mut rhs = false;
            for i in mask::bits(q) {
                let p = q & !(1 << i);
                match known.get(&p) {
                    Some(&b) => rhs ^= b,
                    None => row[var_of[&p]] ^= true,
                }
            }
            sys.add_row(row, rhs);
        }
        sys
    }

    fn add_row(&mut self, mut row: Vec<bool>, mut rhs: bool) {
        while let Some(p) = row.iter().rposition(|&b| b) {
            match self.pivots.get(&p) {
                Some((prow, prhs)) => {
                    for (x, y) in row.iter_mut().zip(prow) {
                        *x ^= *y;
                    }
                    rhs ^= prhs;
                }
                None => {
                    self.pivots.insert(p, (row, rhs));
                    return;
                }
            }
        }
        if rhs {
            self.consistent = false;
        }
    }

    fn free_vars(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|v| !self.pivots.contains_key(v)).collect()
    }

    fn solve_with(&self, free: &[usize], choice: &[bool]) -> Option<Vec<bool>> {
        if !self.consistent {
            return None;
        }
        let mut x = vec![false; self.vars.len()];
        for (&v, &b) in free.iter().zip(choice) {
            x[v] = b;
        }
        for (&p, (row, rhs)) in &self.pivots {
            let mut val = *rhs;
            for (q, &bit) in row.iter().enumerate().take(p) {
                if bit {
                    val ^= x[q];
                }
            }
            x[p] = val;
        }
        Some(x)
    }
}

/// Per-maximal-face bookkeeping: element index in f(M) -> position.
fn positions_in(f: &Functor, m: Mask) -> Vec<Option<usize>> {
    let len = f.face_set(m).map_or(0, ClosedSet::len);
    let mut pos = vec![None; len];
    for i in mask::bits(m) {
        if let Some(e) = f.trans.get(&(1 << i, m)) {
            for &y in &e.map {
                pos[y as usize] = Some(i);
            }
        }
    }
    pos
}

impl RelSite {
    fn obstruction(f: &Functor, reason: impl Into<String>) -> Obstruction {
        Obstruction { functor: f.clone(), reason: reason.into() }
    }

    /// Relation tuples on the top, by position.
    fn top_tuples(&self, f: &Functor, maxes: &[Mask], rng: Option<&mut dyn RngCore>) -> Result<Vec<Vec<u32>>, Obstruction> {
        let n = f.n();
        let in_domain = |p: Mask| maxes.iter().any(|&m| mask::is_subset(p, m));
        match self.kind {
            RelKind::Dlo => {
                // known order pairs by position
                let mut before = vec![vec![false; n]; n];
                for &m in maxes {
                    let pos = positions_in(f, m);
                    let cs = f.face_set(m).expect("maximal face is defined");
                    for t in &cs.rel {
                        if let (Some(a), Some(b)) = (pos[t[0] as usize], pos[t[1] as usize]) {
                            before[a][b] = true;
                        }
                    }
                }
                let mut indeg: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| before[i][j]).count()).collect();
                let mut done = vec![false; n];
                let mut rank = vec![0; n];
                let mut rng = rng;
                for r in 0..n {
                    let avail: Vec<usize> = (0..n).filter(|&i| !done[i] && indeg[i] == 0).collect();
                    let pick = match (&mut rng, avail.is_empty()) {
                        (_, true) => return Err(RelSite::obstruction(f, "order constraints form a cycle")),
                        (Some(g), false) => avail[g.gen_range(0..avail.len())],
                        (None, false) => avail[0],
                    };
                    done[pick] = true;
                    rank[pick] = r;
                    for j in 0..n {
                        if before[pick][j] {
                            indeg[j] -= 1;
                        }
                    }
                }
                Ok(order_pairs(&rank))
            }
            RelKind::Tetra | RelKind::Parity(_) => {
                let r = self.arity().expect("symmetric kind");
                let mut known: BTreeMap<Mask, bool> = BTreeMap::new();
                for &m in maxes {
                    let pos = positions_in(f, m);
                    let cs = f.face_set(m).expect("maximal face is defined");
                    for p in k_subsets(n, r).into_iter().filter(|&p| mask::is_subset(p, m)) {
                        known.insert(p, false);
                    }
                    for t in &cs.rel {
                        let mut p: Mask = 0;
                        for &x in t {
                            p |= 1 << pos[x as usize].expect("points come from vertices");
                        }
                        known.insert(p, true);
                    }
                }
                let mut rng = rng;
                let bits: BTreeMap<Mask, bool> = if let RelKind::Parity(_) = self.kind {
                    let sys = ParitySystem::new(n, r, &known);
                    let free = sys.free_vars();
                    let choice: Vec<bool> = match &mut rng {
                        Some(g) => free.iter().map(|_| g.gen_bool(0.5)).collect(),
                        None => vec![false; free.len()],
                    };
                    let sol = sys.solve_with(&free, &choice).ok_or_else(|| RelSite::obstruction(f, "parity condition fails on some (r+1)-set"))?;
                    let mut all = known.clone();
                    all.extend(sys.vars.iter().copied().zip(sol));
                    all
                } else {
                    let mut all = known.clone();
                    let free: Vec<Mask> = k_subsets(n, 3).into_iter().filter(|p| !in_domain(*p)).collect();
                    for &p in &free {
                        let b = match &mut rng {
                            Some(g) => g.gen_bool(0.5),
                            None => false,
                        };
                        all.insert(p, b);
                    }
                    for q in k_subsets(n, 4) {
                        let faces: Vec<Mask> = mask::bits(q).map(|i| q & !(1 << i)).collect();
                        if faces.iter().all(|p| all[p]) {
                            match faces.iter().find(|p| !in_domain(**p)) {
                                Some(&p) => {
                                    all.insert(p, false);
                                }
                                None => return Err(RelSite::obstruction(f, format!("points {:?} would span a tetrahedron", mask_tuple(q)))),
                            }
                        }
                    }
                    all
                };
                Ok(bits.into_iter().filter(|(_, b)| *b).map(|(p, _)| mask_tuple(p)).collect())
            }
        }
    }

    fn check_structure(&self, cs: &ClosedSet) -> bool {
        let k = cs.len();
        match self.kind {
            RelKind::Dlo => {
                let before = |a: usize, b: usize| cs.has_tuple(&[a as u32, b as u32]);
                (0..k).all(|a| !before(a, a))
                    && (0..k).all(|a| (0..k).all(|b| a == b || before(a, b) != before(b, a)))
                    && (0..k).all(|a| (0..k).all(|b| (0..k).all(|c| !(before(a, b) && before(b, c)) || before(a, c))))
            }
            RelKind::Tetra => k_subsets(k, 4).into_iter().all(|q| mask::bits(q).any(|i| !cs.has_tuple(&mask_tuple(q & !(1 << i))))),
            RelKind::Parity(r) => k_subsets(k, r + 1)
                .into_iter()
                .all(|q| mask::bits(q).filter(|&i| cs.has_tuple(&mask_tuple(q & !(1 << i)))).count() % 2 == 0),
        }
    }

    /// Does the structure satisfy the site's axioms?
    pub fn is_model(&self, cs: &ClosedSet) -> bool {
        cs.elems.iter().all(|e| matches!(e, Elem::Pt(_))) && self.check_structure(cs)
    }
}

fn preserves(kind: RelKind, src: &ClosedSet, dst: &ClosedSet, e: &Embedding) -> bool {
    let k = src.len();
    let img = |t: &[u32]| -> Vec<u32> { t.iter().map(|&i| e.map[i as usize]).collect() };
    match kind {
        RelKind::Dlo => (0..k as u32).all(|a| {
            (0..k as u32).all(|b| a == b || src.has_tuple(&[a, b]) == dst.has_tuple(&img(&[a, b])))
        }),
        RelKind::Tetra | RelKind::Parity(_) => {
            let r = if let RelKind::Parity(r) = kind { r } else { 3 };
            if k < r {
                return true;
            }
            k_subsets(k, r).into_iter().all(|m| {
                let t = mask_tuple(m);
                let mut it = img(&t);
                it.sort_unstable();
                src.has_tuple(&t) == dst.has_tuple(&it)
            })
        }
    }
}

impl Structure for RelSite {
    fn base(&self) -> ClosedSet {
        ClosedSet::empty()
    }

    fn elementary(&self, src: &ClosedSet, dst: &ClosedSet, e: &Embedding) -> bool {
        e.map.len() == src.len() && e.is_injective(dst.len()) && preserves(self.kind, src, dst, e)
    }

    fn closure(&self, _ambient: &ClosedSet, seeds: &[u32]) -> Vec<u32> {
        let mut v = seeds.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn independent(&self, _ambient: &ClosedSet, a: &[u32], b: &[u32], over: &[u32]) -> bool {
        a.iter().all(|x| !b.contains(x) || over.contains(x))
    }

    fn isomorphisms(&self, src: &ClosedSet, dst: &ClosedSet, forced: &[Option<u32>]) -> Vec<Embedding> {
        let n = src.len();
        if n != dst.len() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut map = vec![u32::MAX; n];
        let mut used = vec![false; n];
        fn go(
            i: usize,
            site: &RelSite,
            src: &ClosedSet,
            dst: &ClosedSet,
            forced: &[Option<u32>],
            map: &mut Vec<u32>,
            used: &mut Vec<bool>,
            out: &mut Vec<Embedding>,
        ) {
            let n = src.len();
            if i == n {
                let e = Embedding { map: map.clone() };
                if preserves(site.kind, src, dst, &e) {
                    out.push(e);
                }
                return;
            }
            let cands: Vec<u32> = match forced.get(i).copied().flatten() {
                Some(j) => vec![j],
                None => (0..n as u32).collect(),
            };
            for j in cands {
                if (j as usize) < n && !used[j as usize] {
                    used[j as usize] = true;
                    map[i] = j;
                    go(i + 1, site, src, dst, forced, map, used, out);
                    used[j as usize] = false;
                }
            }
        }
        go(0, self, src, dst, forced, &mut map, &mut used, &mut out);
        out
    }
}

impl Site for RelSite {
    fn name(&self) -> String {
        match self.kind {
            RelKind::Parity(r) => format!("parity{r}"),
            RelKind::Tetra => "tetra".into(),
            RelKind::Dlo => "dlo".into(),
        }
    }

    fn vertex(&self, index: u32) -> Simplex {
        vertex_simplex(index)
    }

    fn complete_with(&self, f: &Functor, rng: Option<&mut dyn RngCore>) -> Result<Simplex, Obstruction> {
        let n = f.n();
        let dom = f.domain();
        let maxes = dom.maximal();
        let tuples = self.top_tuples(f, &maxes, rng)?;
        let top = RelSite::structure(&f.support, &tuples);
        let full = mask::full(n);
        let mut faces = Vec::with_capacity(1 << n);
        let mut into_top = Vec::with_capacity(1 << n);
        for u in 0..=full {
            match f.face_set(u) {
                Some(cs) => {
                    let m = *maxes.iter().find(|&&m| mask::is_subset(u, m)).expect("domain member below a maximal one");
                    let pos = positions_in(f, m);
                    let via = f.trans.get(&(u, m)).expect("transition into maximal face");
                    let map = via.map.iter().map(|&y| pos[y as usize].expect("points come from vertices") as u32).collect();
                    faces.push(cs.clone());
                    into_top.push(Embedding { map });
                }
                None => {
                    let keep: Vec<u32> = mask::bits(u).map(|i| i as u32).collect();
                    let (cs, e) = top.restrict(&keep);
                    faces.push(cs);
                    into_top.push(e);
                }
            }
            if u == full {
                break;
            }
        }
        let out = Simplex::from_top(f.support.clone(), faces, into_top)
            .map_err(|e| RelSite::obstruction(f, format!("inconsistent partial functor: {e}")))?;
        // X-faces must still embed elementarily; catches inputs that were never valid
        if !self.check_structure(out.top()) {
            return Err(RelSite::obstruction(f, "completed top violates the axioms"));
        }
        Ok(out)
    }

    fn supported_ca(&self) -> usize {
        match self.kind {
            RelKind::Parity(r) => r,
            RelKind::Tetra => 3,
            RelKind::Dlo => 2,
        }
    }

    fn normalized_simplices(&self, support: &[u32]) -> Vec<Simplex> {
        let k = support.len();
        let full = mask::full(k);
        self.all_structures(k)
            .into_iter()
            .map(|tuples| {
                let top = RelSite::structure(support, &tuples);
                let mut faces = Vec::new();
                let mut into = Vec::new();
                for u in 0..=full {
                    let keep: Vec<u32> = mask::bits(u).map(|i| i as u32).collect();
                    let (cs, e) = top.restrict(&keep);
                    faces.push(cs);
                    into.push(e);
                    if u == full {
                        break;
                    }
                }
                Simplex::from_top(support.to_vec(), faces, into).expect("normalized simplex is well formed")
            })
            .collect()
    }
}

/// A vertex above every input point: completions put it last in the order
/// and leave every new triple through it false.
pub fn fresh_apex(points: &[u32]) -> u32 {
    points.iter().max().map_or(0, |m| m + 1)
}

/// Parity value of an (r−1)-chain: Σ nᵢ·R(top fᵢ) mod 2.
pub fn parity_epsilon(c: &simplex_core::Chain) -> u8 {
    let s: i64 = c.terms().filter(|(f, _)| RelSite::top_bit(f)).map(|(_, k)| k).sum();
    s.rem_euclid(2) as u8
}

/// Random structure on `k` points for fuzzing: parity sets are coboundaries
/// of random (r−1)-set bits; the other kinds draw a random model directly.
pub fn random_structure(site: &RelSite, k: usize, rng: &mut dyn RngCore) -> Vec<Vec<u32>> {
    match site.kind {
        RelKind::Parity(r) => {
            let lower: BTreeMap<Mask, bool> = k_subsets(k, r - 1).into_iter().map(|m| (m, rng.gen_bool(0.5))).collect();
            k_subsets(k, r)
                .into_iter()
                .filter(|&m| mask::bits(m).filter(|&i| lower[&(m & !(1 << i))]).count() % 2 == 1)
                .map(mask_tuple)
                .collect()
        }
        RelKind::Tetra => {
            let mut bits: BTreeMap<Mask, bool> = k_subsets(k, 3).into_iter().map(|m| (m, rng.gen_bool(0.5))).collect();
            for q in k_subsets(k, 4) {
                let faces: Vec<Mask> = mask::bits(q).map(|i| q & !(1 << i)).collect();
                if faces.iter().all(|p| bits[p]) {
                    let p = *faces.choose(rng).expect("four faces");
                    bits.insert(p, false);
                }
            }
            bits.into_iter().filter(|(_, b)| *b).map(|(m, _)| mask_tuple(m)).collect()
        }
        RelKind::Dlo => {
            let mut order: Vec<usize> = (0..k).collect();
            order.shuffle(rng);
            let mut rank = vec![0; k];
            for (r, &p) in order.iter().enumerate() {
                rank[p] = r;
            }
            order_pairs(&rank)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_counts() {
        assert_eq!(RelSite::parity(4).all_structures(5).len(), 16);
        assert_eq!(RelSite::parity(4).all_structures(4).len(), 2);
        assert_eq!(RelSite::tetra().all_structures(4).len(), 15);
        assert_eq!(RelSite::dlo().all_structures(4).len(), 24);
    }

    #[test]
    fn parity_system_forces_last_bit() {
        // three of the five 4-subsets of a 5-set known true: the last two must sum to 1
        let mut known = BTreeMap::new();
        let subs = k_subsets(5, 4);
        for (i, &m) in subs.iter().enumerate().take(3) {
            known.insert(m, i < 3);
        }
        known.insert(subs[3], false);
        let sys = ParitySystem::new(5, 4, &known);
        assert!(sys.free_vars().is_empty());
        let sol = sys.solve_with(&[], &[]).unwrap();
        assert_eq!(sol, vec![true]);
    }
}
