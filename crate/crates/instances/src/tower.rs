//! Connected finitary groupoids, one per level of a tower of finite groups
//! H₀ ↠ H₁ ↠ … linked by projection functors. A single groupoid is a tower
//! with one level.
//!
//! A closed set on objects S holds Obj(l, a) for a ∈ S and every morphism
//! Mor(l, a, b, h) : a → b with h ∈ H_l, composing as
//! (b, c, h)∘(a, b, g) = (a, c, hg). Embeddings are twists: objects move by an
//! injection σ and Mor(l, a, b, h) ↦ Mor(l, σa, σb, φ_l(t_b)·h·φ_l(t_a)⁻¹).

use std::collections::HashMap;

use amalgam_engine::{Obstruction, Site};
use homology_solver::FiniteGroup;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use simplex_core::{mask, ClosedSet, Elem, Embedding, Functor, Mask, Simplex, Structure};

use crate::InstanceError;

#[derive(Clone, Debug)]
pub struct TowerSite {
    pub name: String,
    /// levels[0] is the top group.
    pub levels: Vec<FiniteGroup>,
    /// maps[l] : H_l → H_{l+1}
    pub maps: Vec<Vec<usize>>,
    /// phi[l] : H₀ → H_l
    pub phi: Vec<Vec<usize>>,
}

impl TowerSite {
    pub fn groupoid(g: FiniteGroup) -> Self {
        let n = g.order();
        TowerSite { name: format!("groupoid({})", g.name), levels: vec![g], maps: vec![], phi: vec![(0..n).collect()] }
    }

    pub fn tower(levels: Vec<FiniteGroup>, maps: Vec<Vec<usize>>) -> Result<Self, InstanceError> {
        if levels.is_empty() || maps.len() + 1 != levels.len() {
            return Err(InstanceError::Descriptor("a tower needs one map between consecutive levels".into()));
        }
        for (l, m) in maps.iter().enumerate() {
            let (a, b) = (&levels[l], &levels[l + 1]);
            let hom = m.len() == a.order()
                && m.iter().all(|&x| x < b.order())
                && (0..a.order()).all(|x| (0..a.order()).all(|y| m[a.mul(x, y)] == b.mul(m[x], m[y])));
            let onto = (0..b.order()).all(|z| m.contains(&z));
            if !hom || !onto {
                return Err(InstanceError::Descriptor(format!("map {l} is not a surjective homomorphism")));
            }
        }
        let n0 = levels[0].order();
        let mut phi = vec![(0..n0).collect::<Vec<usize>>()];
        for m in &maps {
            let prev = phi.last().expect("nonempty");
            phi.push(prev.iter().map(|&x| m[x]).collect());
        }
        let name = format!("tower({})", levels.iter().map(|g| g.name.clone()).collect::<Vec<_>>().join(">"));
        Ok(TowerSite { name, levels, maps, phi })
    }

    /// Tower of cyclic groups with reduction maps, e.g. [8, 4, 2].
    pub fn cyclic_tower(orders: &[usize]) -> Result<Self, InstanceError> {
        let levels: Vec<FiniteGroup> = orders.iter().map(|&n| FiniteGroup::cyclic(n)).collect();
        let maps = orders.windows(2).map(|w| (0..w[0]).map(|x| x % w[1]).collect()).collect();
        TowerSite::tower(levels, maps)
    }

    pub fn top_group(&self) -> &FiniteGroup {
        &self.levels[0]
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// The closed set on the given object ids.
    pub fn closed_on(&self, ids: &[u32]) -> ClosedSet {
        let mut elems = Vec::new();
        for (l, g) in self.levels.iter().enumerate() {
            let l = l as u8;
            for &a in ids {
                elems.push(Elem::Obj(l, a));
                for &b in ids {
                    for h in 0..g.order() as u32 {
                        elems.push(Elem::Mor(l, a, b, h));
                    }
                }
            }
        }
        ClosedSet::from_parts(elems, vec![])
    }

    /// Object ids of a closed set.
    pub fn objects(cs: &ClosedSet) -> Vec<u32> {
        cs.elems.iter().filter_map(|e| if let Elem::Obj(0, a) = e { Some(*a) } else { None }).collect()
    }

    fn twist(&self, x: Elem, obj: &dyn Fn(u32) -> u32, t: &dyn Fn(u32) -> usize) -> Elem {
        match x {
            Elem::Obj(l, a) => Elem::Obj(l, obj(a)),
            Elem::Mor(l, a, b, h) => {
                let g = &self.levels[l as usize];
                let (ta, tb) = (self.phi[l as usize][t(a)], self.phi[l as usize][t(b)]);
                Elem::Mor(l, obj(a), obj(b), g.mul(g.mul(tb, h as usize), g.inv(ta)) as u32)
            }
            p => p,
        }
    }

    /// The twist embedding src → dst for object map `obj` and twists `t`.
    pub fn twist_embedding(&self, src: &ClosedSet, dst: &ClosedSet, obj: &dyn Fn(u32) -> u32, t: &dyn Fn(u32) -> usize) -> Option<Embedding> {
        let map = src.elems.iter().map(|&x| dst.index_of(&self.twist(x, obj, t))).collect::<Option<Vec<u32>>>()?;
        Some(Embedding { map })
    }

    /// χ from level l to level `to` ≥ l, on one element.
    pub fn project(&self, x: Elem, to: u8) -> Result<Elem, InstanceError> {
        let l = x.level().ok_or_else(|| InstanceError::Level("points have no level".into()))?;
        if to < l || to as usize >= self.levels.len() {
            return Err(InstanceError::Level(format!("cannot project level {l} to level {to}")));
        }
        Ok(match x {
            Elem::Obj(_, a) => Elem::Obj(to, a),
            Elem::Mor(_, a, b, h) => {
                let mut h = h as usize;
                for m in &self.maps[l as usize..to as usize] {
                    h = m[h];
                }
                Elem::Mor(to, a, b, h as u32)
            }
            Elem::Pt(_) => unreachable!(),
        })
    }

    /// Label of a morphism `Mor(level, a, b, ·)` in a closed set, by index.
    pub fn label(cs: &ClosedSet, idx: u32) -> Option<(u8, u32, u32, usize)> {
        match cs.elems[idx as usize] {
            Elem::Mor(l, a, b, h) => Some((l, a, b, h as usize)),
            _ => None,
        }
    }

    fn object_index(cs: &ClosedSet, a: u32) -> Option<u32> {
        cs.index_of(&Elem::Obj(0, a))
    }

    /// The object map an embedding induces, by id.
    pub fn object_map(src: &ClosedSet, dst: &ClosedSet, e: &Embedding) -> Option<HashMap<u32, u32>> {
        let mut m = HashMap::new();
        for a in TowerSite::objects(src) {
            let i = TowerSite::object_index(src, a)?;
            match dst.elems.get(e.map[i as usize] as usize)? {
                Elem::Obj(0, b) => {
                    m.insert(a, *b);
                }
                _ => return None,
            }
        }
        Some(m)
    }

    fn obstruction(f: &Functor, reason: impl Into<String>) -> Obstruction {
        Obstruction { functor: f.clone(), reason: reason.into() }
    }
}

/// Everything the completion search needs about one maximal face.
struct MaxFace {
    mask: Mask,
    positions: Vec<usize>,
    /// object id in f(M) -> position
    pos_of: HashMap<u32, usize>,
}

struct Search<'a> {
    site: &'a TowerSite,
    f: &'a Functor,
    faces: Vec<MaxFace>,
    first_owner: Vec<Option<usize>>,
    /// candidate orders per (face, position), over H₀
    order: Vec<Vec<Vec<usize>>>,
    fresh: Vec<Vec<usize>>,
    t: Vec<Vec<Option<usize>>>,
}

impl<'a> Search<'a> {
    fn image(&self, mi: usize, y: u32) -> Elem {
        let m = &self.faces[mi];
        let cs = self.f.face_set(m.mask).expect("maximal face is defined");
        let x = cs.elems[y as usize];
        let s = &self.f.support;
        let t = &self.t[mi];
        self.site.twist(x, &|a| s[m.pos_of[&a]], &|a| t[m.pos_of[&a]].expect("position assigned"))
    }

    fn agree(&self, mi: usize, mj: usize, j: Mask) -> bool {
        let Some(cs) = self.f.face_set(j) else { return true };
        let (ei, ej) = (&self.f.trans[&(j, self.faces[mi].mask)], &self.f.trans[&(j, self.faces[mj].mask)]);
        (0..cs.len()).all(|x| self.image(mi, ei.map[x]) == self.image(mj, ej.map[x]))
    }

    /// Values of t at position p in face mi compatible with the vertex face.
    fn candidates(&mut self, mi: usize, p: usize) -> Vec<usize> {
        let owner = self.first_owner[p].expect("position has an owner");
        let mut out = Vec::new();
        for &c in &self.order[mi][p].clone() {
            self.t[mi][p] = Some(c);
            if self.agree(mi, owner, 1 << p) {
                out.push(c);
            }
        }
        self.t[mi][p] = None;
        out
    }

    fn run(&mut self, mi: usize, k: usize) -> bool {
        if mi == self.faces.len() {
            return true;
        }
        let positions = self.faces[mi].positions.clone();
        if k == positions.len() {
            return self.run(mi + 1, 0);
        }
        let p = positions[k];
        let fresh = self.first_owner[p] == Some(mi);
        let cands = if fresh {
            vec![self.fresh[mi][p]]
        } else {
            let mut c = self.candidates(mi, p);
            let any_fresh = positions.iter().any(|&q| self.first_owner[q] == Some(mi));
            let first_seen = positions.iter().find(|&&q| self.first_owner[q] != Some(mi)) == Some(&p);
            if !any_fresh && first_seen {
                // right multiplication by a central element leaves the map unchanged
                c.sort_unstable();
                c.truncate(1);
            }
            c
        };
        for c in cands {
            self.t[mi][p] = Some(c);
            let assigned: Mask = positions[..=k].iter().fold(0, |acc, &q| acc | 1 << q);
            let ok = (0..mi).all(|mj| {
                let j = assigned & self.faces[mj].mask;
                j & (1 << p) == 0 || self.agree(mi, mj, j)
            });
            if ok && self.run(mi, k + 1) {
                return true;
            }
        }
        self.t[mi][p] = None;
        false
    }
}

impl Structure for TowerSite {
    fn base(&self) -> ClosedSet {
        ClosedSet::empty()
    }

    fn elementary(&self, src: &ClosedSet, dst: &ClosedSet, e: &Embedding) -> bool {
        if e.map.len() != src.len() || !e.is_injective(dst.len()) {
            return false;
        }
        let img = |i: usize| dst.elems[e.map[i] as usize];
        let Some(obj) = TowerSite::object_map(src, dst, e) else { return false };
        // shape: levels, endpoints
        for (i, &x) in src.elems.iter().enumerate() {
            let ok = match (x, img(i)) {
                (Elem::Obj(l, a), Elem::Obj(l2, b)) => l == l2 && obj.get(&a) == Some(&b),
                (Elem::Mor(l, a, b, _), Elem::Mor(l2, c, d, _)) => l == l2 && obj.get(&a) == Some(&c) && obj.get(&b) == Some(&d),
                _ => false,
            };
            if !ok {
                return false;
            }
        }
        let lab = |x: Elem| -> usize {
            match x {
                Elem::Mor(_, _, _, h) => h as usize,
                _ => 0,
            }
        };
        let ids = TowerSite::objects(src);
        for (l, g) in self.levels.iter().enumerate() {
            let l = l as u8;
            let idx = |a: u32, b: u32, h: usize| src.index_of(&Elem::Mor(l, a, b, h as u32)).expect("closed set has all morphisms") as usize;
            // composition
            for &a in &ids {
                for &b in &ids {
                    for &c in &ids {
                        for h in 0..g.order() {
                            for k in 0..g.order() {
                                let lhs = lab(img(idx(a, c, g.mul(h, k))));
                                let rhs = g.mul(lab(img(idx(b, c, h))), lab(img(idx(a, b, k))));
                                if lhs != rhs {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
            // projections commute
            if (l as usize) + 1 < self.levels.len() {
                for (i, &x) in src.elems.iter().enumerate() {
                    if x.level() != Some(l) {
                        continue;
                    }
                    let down = self.project(x, l + 1).expect("next level exists");
                    let Some(j) = src.index_of(&down) else { return false };
                    if self.project(img(i), l + 1).ok() != Some(img(j as usize)) {
                        return false;
                    }
                }
            }
        }
        // loops move by an inner automorphism of the top group
        let g = self.top_group();
        ids.iter().all(|&a| {
            (0..g.order()).any(|t| {
                (0..g.order()).all(|h| {
                    let i = src.index_of(&Elem::Mor(0, a, a, h as u32)).expect("loop present") as usize;
                    lab(img(i)) == g.conj(t, h)
                })
            })
        })
    }

    fn closure(&self, ambient: &ClosedSet, seeds: &[u32]) -> Vec<u32> {
        let mut objs: Vec<u32> = Vec::new();
        for &i in seeds {
            match ambient.elems[i as usize] {
                Elem::Obj(_, a) => objs.push(a),
                Elem::Mor(_, a, b, _) => objs.extend([a, b]),
                Elem::Pt(_) => {}
            }
        }
        ambient
            .elems
            .iter()
            .enumerate()
            .filter(|(_, e)| match e {
                Elem::Obj(_, a) => objs.contains(a),
                Elem::Mor(_, a, b, _) => objs.contains(a) && objs.contains(b),
                Elem::Pt(_) => false,
            })
            .map(|(i, _)| i as u32)
            .collect()
    }

    fn independent(&self, ambient: &ClosedSet, a: &[u32], b: &[u32], over: &[u32]) -> bool {
        let objs = |xs: &[u32]| -> Vec<u32> {
            xs.iter().filter_map(|&i| if let Elem::Obj(_, o) = ambient.elems[i as usize] { Some(o) } else { None }).collect()
        };
        let (oa, ob, oo) = (objs(a), objs(b), objs(over));
        oa.iter().all(|x| !ob.contains(x) || oo.contains(x))
    }

    fn isomorphisms(&self, src: &ClosedSet, dst: &ClosedSet, forced: &[Option<u32>]) -> Vec<Embedding> {
        if src.len() != dst.len() {
            return Vec::new();
        }
        let (so, dobj) = (TowerSite::objects(src), TowerSite::objects(dst));
        if so.len() != dobj.len() {
            return Vec::new();
        }
        let center = self.top_group().center();
        let mut out = Vec::new();
        let k = so.len();
        // object bijections, then twists object by object
        let mut sigma = vec![u32::MAX; k];
        let mut t = vec![usize::MAX; k];
        fn objs_rec(
            i: usize,
            site: &TowerSite,
            src: &ClosedSet,
            dst: &ClosedSet,
            forced: &[Option<u32>],
            so: &[u32],
            dobj: &[u32],
            center: &[usize],
            sigma: &mut Vec<u32>,
            t: &mut Vec<usize>,
            out: &mut Vec<Embedding>,
        ) {
            let k = so.len();
            if i == 2 * k {
                let obj = |a: u32| sigma[so.iter().position(|&x| x == a).expect("object")];
                let tw = |a: u32| t[so.iter().position(|&x| x == a).expect("object")];
                if let Some(e) = site.twist_embedding(src, dst, &obj, &tw) {
                    if e.map.iter().zip(forced).all(|(&m, fo)| fo.is_none_or(|x| x == m)) {
                        out.push(e);
                    }
                }
                return;
            }
            if i < k {
                let oi = src.index_of(&Elem::Obj(0, so[i])).expect("object present") as usize;
                for &b in dobj {
                    if sigma[..i].contains(&b) {
                        continue;
                    }
                    if let Some(Some(fx)) = forced.get(oi) {
                        if dst.elems[*fx as usize] != Elem::Obj(0, b) {
                            continue;
                        }
                    }
                    sigma[i] = b;
                    objs_rec(i + 1, site, src, dst, forced, so, dobj, center, sigma, t, out);
                }
                sigma[i] = u32::MAX;
                return;
            }
            let j = i - k;
            let g = site.top_group();
            for c in 0..g.order() {
                // first twist only up to the center
                if j == 0 && center.iter().any(|&z| g.mul(c, z) < c) {
                    continue;
                }
                t[j] = c;
                // prune with forced morphisms among assigned objects at the top level
                let ok = (0..=j).all(|q| {
                    [(so[q], so[j]), (so[j], so[q])].iter().all(|&(a, b)| {
                        (0..g.order()).all(|h| {
                            let x = src.index_of(&Elem::Mor(0, a, b, h as u32)).expect("morphism present") as usize;
                            match forced.get(x).copied().flatten() {
                                None => true,
                                Some(fx) => {
                                    let pa = so.iter().position(|&y| y == a).expect("object");
                                    let pb = so.iter().position(|&y| y == b).expect("object");
                                    let want = Elem::Mor(0, sigma[pa], sigma[pb], g.mul(g.mul(t[pb], h), g.inv(t[pa])) as u32);
                                    dst.elems[fx as usize] == want
                                }
                            }
                        })
                    })
                });
                if ok {
                    objs_rec(i + 1, site, src, dst, forced, so, dobj, center, sigma, t, out);
                }
            }
        }
        objs_rec(0, self, src, dst, forced, &so, &dobj, &center, &mut sigma, &mut t, &mut out);
        out
    }
}

impl Site for TowerSite {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn vertex(&self, index: u32) -> Simplex {
        let top = self.closed_on(&[index]);
        let n = top.len();
        Simplex::from_top(vec![index], vec![ClosedSet::empty(), top], vec![Embedding { map: vec![] }, Embedding::identity(n)])
            .expect("vertex is well formed")
    }

    fn complete_with(&self, f: &Functor, rng: Option<&mut dyn RngCore>) -> Result<Simplex, Obstruction> {
        let n = f.n();
        let maxes = f.domain().maximal();
        let g = self.top_group();
        let mut faces = Vec::new();
        let mut first_owner = vec![None; n];
        for (mi, &m) in maxes.iter().enumerate() {
            let cs = f.face_set(m).expect("maximal face is defined");
            let mut pos_of = HashMap::new();
            for i in mask::bits(m) {
                let vf = f.face_set(1 << i).ok_or_else(|| TowerSite::obstruction(f, "vertex face missing"))?;
                let ob = TowerSite::objects(vf);
                if ob.len() != 1 {
                    return Err(TowerSite::obstruction(f, "vertex face must hold exactly one object"));
                }
                let vi = TowerSite::object_index(vf, ob[0]).expect("object present");
                let y = f.trans[&(1 << i, m)].map[vi as usize];
                match cs.elems[y as usize] {
                    Elem::Obj(0, id) => {
                        pos_of.insert(id, i);
                    }
                    _ => return Err(TowerSite::obstruction(f, "vertex object does not map to an object")),
                }
                first_owner[i].get_or_insert(mi);
            }
            faces.push(MaxFace { mask: m, positions: mask::bits(m).collect(), pos_of });
        }
        let mut rng = rng;
        let mut order = Vec::new();
        let mut fresh = Vec::new();
        for _ in &maxes {
            let mut per = Vec::new();
            let mut fr = Vec::new();
            for _ in 0..n {
                let mut o: Vec<usize> = (0..g.order()).collect();
                let mut x = 0;
                if let Some(r) = rng.as_deref_mut() {
                    o.shuffle(r);
                    x = r.gen_range(0..g.order());
                }
                per.push(o);
                fr.push(x);
            }
            order.push(per);
            fresh.push(fr);
        }
        let mut search = Search { site: self, f, faces, first_owner, order, fresh, t: vec![vec![None; n]; maxes.len()] };
        if !search.run(0, 0) {
            return Err(TowerSite::obstruction(f, "no choice of morphism labels is compatible on every overlap"));
        }
        let top = self.closed_on(&f.support);
        let full = mask::full(n);
        let mut out_faces = Vec::with_capacity(1 << n);
        let mut into_top = Vec::with_capacity(1 << n);
        for u in 0..=full {
            match f.face_set(u) {
                Some(cs) => {
                    let mi = search.faces.iter().position(|m| mask::is_subset(u, m.mask)).expect("domain member below a maximal one");
                    let via = &f.trans[&(u, search.faces[mi].mask)];
                    let map = via
                        .map
                        .iter()
                        .map(|&y| top.index_of(&search.image(mi, y)).ok_or_else(|| TowerSite::obstruction(f, "element outside the top")))
                        .collect::<Result<Vec<u32>, _>>()?;
                    out_faces.push(cs.clone());
                    into_top.push(Embedding { map });
                }
                None => {
                    let ids: Vec<u32> = mask::bits(u).map(|i| f.support[i]).collect();
                    let keep: Vec<u32> = (0..top.len() as u32)
                        .filter(|&i| match top.elems[i as usize] {
                            Elem::Obj(_, a) => ids.contains(&a),
                            Elem::Mor(_, a, b, _) => ids.contains(&a) && ids.contains(&b),
                            Elem::Pt(_) => false,
                        })
                        .collect();
                    let (cs, e) = top.restrict(&keep);
                    out_faces.push(cs);
                    into_top.push(e);
                }
            }
            if u == full {
                break;
            }
        }
        Simplex::from_top(f.support.clone(), out_faces, into_top).map_err(|e| TowerSite::obstruction(f, format!("inconsistent partial functor: {e}")))
    }

    fn supported_ca(&self) -> usize {
        3
    }

    fn normalized_simplices(&self, support: &[u32]) -> Vec<Simplex> {
        let k = support.len();
        let full = mask::full(k);
        let top = self.closed_on(support);
        let center = self.top_group().center();
        let z = center.len();
        let restrict = |u: Mask| -> (ClosedSet, Embedding) {
            let ids: Vec<u32> = mask::bits(u).map(|i| support[i]).collect();
            let keep: Vec<u32> = (0..top.len() as u32)
                .filter(|&i| match top.elems[i as usize] {
                    Elem::Obj(_, a) => ids.contains(&a),
                    Elem::Mor(_, a, b, _) => ids.contains(&a) && ids.contains(&b),
                    Elem::Pt(_) => false,
                })
                .collect();
            top.restrict(&keep)
        };
        let base: Vec<(ClosedSet, Embedding)> = (0..=full as u32).map(|u| restrict(u as Mask)).collect();
        // free twists: every proper face with ≥ 2 positions, all but its first position
        let slots: Vec<(Mask, usize)> = (0..full)
            .filter(|&u| mask::popcount(u) >= 2)
            .flat_map(|u| mask::bits(u).skip(1).map(move |i| (u, i)))
            .collect();
        let total = z.checked_pow(slots.len() as u32).expect("count overflows");
        assert!(total <= 1 << 22, "{total} normalized simplices on {k} points is beyond the enumeration limit");
        let mut out = Vec::with_capacity(total);
        for code in 0..total {
            let mut c = code;
            let mut tw: HashMap<(Mask, usize), usize> = HashMap::new();
            for &s in &slots {
                tw.insert(s, center[c % z]);
                c /= z;
            }
            let mut faces = Vec::with_capacity(base.len());
            let mut into = Vec::with_capacity(base.len());
            for (u, (cs, incl)) in base.iter().enumerate() {
                let u = u as Mask;
                let e = if mask::popcount(u) >= 2 && u != full {
                    let pos = |a: u32| support.iter().position(|&x| x == a).expect("support value");
                    self.twist_embedding(cs, &top, &|a| a, &|a| tw.get(&(u, pos(a))).copied().unwrap_or(0)).expect("twist lands in the top")
                } else {
                    incl.clone()
                };
                faces.push(cs.clone());
                into.push(e);
            }
            out.push(Simplex::from_top(support.to_vec(), faces, into).expect("normalized simplex is well formed"));
        }
        out
    }
}
