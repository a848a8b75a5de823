use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::snf::{smith, IntMatrix};

/// Either an abelian group by invariant factors (0 marks a free summand) or a
/// finite group by its Cayley table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupPresentation {
    AbelianInvariantFactors { invariant_factors: Vec<u64> },
    FiniteTable { table: Vec<Vec<usize>> },
}

impl GroupPresentation {
    pub fn trivial() -> Self {
        GroupPresentation::AbelianInvariantFactors { invariant_factors: vec![] }
    }

    pub fn integers() -> Self {
        GroupPresentation::AbelianInvariantFactors { invariant_factors: vec![0] }
    }

    /// Normalizes any list of cyclic orders into a divisibility chain.
    pub fn abelian(orders: &[u64]) -> Self {
        GroupPresentation::AbelianInvariantFactors { invariant_factors: normalize_factors(orders) }
    }

    pub fn invariant_factors(&self) -> Option<&[u64]> {
        match self {
            GroupPresentation::AbelianInvariantFactors { invariant_factors } => Some(invariant_factors),
            GroupPresentation::FiniteTable { .. } => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            GroupPresentation::AbelianInvariantFactors { invariant_factors } => invariant_factors.is_empty(),
            GroupPresentation::FiniteTable { table } => table.len() == 1,
        }
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupPresentation::AbelianInvariantFactors { invariant_factors } => {
                if invariant_factors.is_empty() {
                    return write!(f, "0");
                }
                let parts: Vec<String> =
                    invariant_factors.iter().map(|&d| if d == 0 { "ℤ".to_string() } else { format!("ℤ_{d}") }).collect();
                write!(f, "{}", parts.join(" × "))
            }
            GroupPresentation::FiniteTable { table } => write!(f, "finite group of order {}", table.len()),
        }
    }
}

/// Divisibility chain d₁ | d₂ | … from arbitrary cyclic orders, dropping 1s;
/// zeros (free summands) go last.
pub fn normalize_factors(orders: &[u64]) -> Vec<u64> {
    let free = orders.iter().filter(|&&d| d == 0).count();
    let mut t: Vec<u64> = orders.iter().copied().filter(|&d| d > 1).collect();
    // repeatedly replace pairs by gcd/lcm until the chain divides
    let mut changed = true;
    while changed {
        changed = false;
        t.sort_unstable();
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                if !t[j].is_multiple_of(t[i]) {
                    let (g, l) = (t[i].gcd(&t[j]), t[i].lcm(&t[j]));
                    t[i] = g;
                    t[j] = l;
                    changed = true;
                }
            }
        }
        t.retain(|&d| d > 1);
    }
    t.extend(std::iter::repeat_n(0, free));
    t
}

/// ℤ^gens modulo the row span of `relations`, as invariant factors.
pub fn abelian_from_relations(gens: usize, relations: &[Vec<i64>]) -> GroupPresentation {
    if relations.is_empty() {
        return GroupPresentation::abelian(&vec![0; gens]);
    }
    let s = smith(&IntMatrix::from_rows(relations));
    let mut orders: Vec<u64> = s.diag.iter().map(|d| d.to_u64().expect("invariant factor fits in u64")).collect();
    orders.extend(std::iter::repeat_n(0, gens - s.rank()));
    GroupPresentation::abelian(&orders)
}

/// Finite group as a Cayley table; element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    pub name: String,
    pub table: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// Builds from any closed set of elements with a product, putting the
    /// identity first.
    pub fn from_elements<T: Clone + Eq + Ord>(name: &str, elems: Vec<T>, mul: impl Fn(&T, &T) -> T) -> Self {
        let n = elems.len();
        let idx = |x: &T| elems.iter().position(|y| y == x).expect("product closed");
        let mut table = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                table[i][j] = idx(&mul(&elems[i], &elems[j]));
            }
        }
        let e = (0..n).find(|&i| (0..n).all(|j| table[i][j] == j)).expect("identity exists");
        let mut g = FiniteGroup { name: name.to_string(), table };
        if e != 0 {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(0, e);
            g = g.relabel(&perm);
        }
        g
    }

    /// Same group with element i renamed perm[i].
    fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.order();
        let mut table = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                table[perm[i]][perm[j]] = perm[self.table[i][j]];
            }
        }
        FiniteGroup { name: self.name.clone(), table }
    }

    pub fn cyclic(n: usize) -> Self {
        let elems: Vec<usize> = (0..n).collect();
        FiniteGroup::from_elements(&format!("Z{n}"), elems, |a, b| (a + b) % n)
    }

    pub fn product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let elems: Vec<(usize, usize)> = (0..a.order()).flat_map(|x| (0..b.order()).map(move |y| (x, y))).collect();
        FiniteGroup::from_elements(&format!("{}x{}", a.name, b.name), elems, |p, q| (a.mul(p.0, q.0), b.mul(p.1, q.1)))
    }

    fn perm_group(name: &str, gens: &[Vec<usize>]) -> Self {
        let n = gens[0].len();
        let id: Vec<usize> = (0..n).collect();
        let compose = |p: &Vec<usize>, q: &Vec<usize>| -> Vec<usize> { (0..n).map(|i| p[q[i]]).collect() };
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([id.clone()]);
        let mut queue = VecDeque::from([id.clone()]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = compose(g, &x);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        let mut elems: Vec<Vec<usize>> = seen.into_iter().collect();
        elems.retain(|x| *x != id);
        elems.insert(0, id);
        FiniteGroup::from_elements(name, elems, compose)
    }

    pub fn s3() -> Self {
        FiniteGroup::perm_group("S3", &[vec![1, 0, 2], vec![1, 2, 0]])
    }

    /// Symmetries of a square.
    pub fn d4() -> Self {
        FiniteGroup::perm_group("D4", &[vec![1, 2, 3, 0], vec![3, 2, 1, 0]])
    }

    /// Unit quaternions ±1, ±i, ±j, ±k.
    pub fn q8() -> Self {
        // (sign, unit) with unit 0=1, 1=i, 2=j, 3=k
        let elems: Vec<(i8, u8)> = [1i8, -1].iter().flat_map(|&s| (0..4u8).map(move |u| (s, u))).collect();
        FiniteGroup::from_elements("Q8", elems, |&(s, a), &(t, b)| {
            let (sign, unit) = match (a, b) {
                (0, x) | (x, 0) => (1, x),
                (x, y) if x == y => (-1, 0),
                (1, 2) => (1, 3),
                (2, 3) => (1, 1),
                (3, 1) => (1, 2),
                (2, 1) => (-1, 3),
                (3, 2) => (-1, 1),
                (1, 3) => (-1, 2),
                _ => unreachable!(),
            };
            (s * t * sign, unit)
        })
    }

    /// Looks up a group by a short name: Z4, Z2xZ3, S3, D4, Q8.
    pub fn by_name(name: &str) -> Option<Self> {
        let parts: Vec<&str> = name.split(['x', '×']).collect();
        if parts.len() > 1 {
            let mut g = FiniteGroup::by_name(parts[0])?;
            for p in &parts[1..] {
                g = FiniteGroup::product(&g, &FiniteGroup::by_name(p)?);
            }
            g.name = name.to_string();
            return Some(g);
        }
        match name.to_ascii_uppercase().as_str() {
            "S3" => Some(FiniteGroup::s3()),
            "D4" => Some(FiniteGroup::d4()),
            "Q8" => Some(FiniteGroup::q8()),
            s => s.strip_prefix('Z').and_then(|n| n.parse().ok()).filter(|&n: &usize| n > 0).map(FiniteGroup::cyclic),
        }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == 0).expect("inverse exists")
    }

    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    pub fn center(&self) -> Vec<usize> {
        let n = self.order();
        (0..n).filter(|&z| (0..n).all(|g| self.table[z][g] == self.table[g][z])).collect()
    }

    pub fn is_central(&self, z: usize) -> bool {
        (0..self.order()).all(|g| self.table[z][g] == self.table[g][z])
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Checks closure, associativity, identity and inverses.
    pub fn is_group(&self) -> bool {
        let n = self.order();
        if n == 0 || self.table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return false;
        }
        let assoc = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c)))));
        let ident = (0..n).all(|a| self.mul(0, a) == a && self.mul(a, 0) == a);
        let inv = (0..n).all(|a| (0..n).any(|b| self.mul(a, b) == 0));
        assoc && ident && inv
    }

    pub fn presentation(&self) -> GroupPresentation {
        if self.is_abelian() {
            abelian_of_subgroup(self, &(0..self.order()).collect::<Vec<_>>())
        } else {
            GroupPresentation::FiniteTable { table: self.table.clone() }
        }
    }

    /// The subgroup on `elems` (must be closed) as a group in its own right.
    pub fn subgroup(&self, elems: &[usize], name: &str) -> FiniteGroup {
        let mut e = elems.to_vec();
        e.sort_unstable();
        FiniteGroup::from_elements(name, e, |&a, &b| self.mul(a, b))
    }

    /// Small generating set, greedily.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = BTreeSet::from([0usize]);
        for a in 1..self.order() {
            if !span.contains(&a) {
                gens.push(a);
                span = self.closure(&gens);
            }
        }
        gens
    }

    pub fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut span = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if span.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        span
    }
}

/// Invariant factors of an abelian subgroup: relations e_a + e_b − e_{ab}
/// and e_1 over the generators e_x.
pub fn abelian_of_subgroup(g: &FiniteGroup, elems: &[usize]) -> GroupPresentation {
    let k = elems.len();
    let pos = |x: usize| elems.iter().position(|&y| y == x).expect("subgroup is closed");
    let mut rels = Vec::new();
    let mut id = vec![0i64; k];
    id[pos(0)] = 1;
    rels.push(id);
    for (i, &a) in elems.iter().enumerate() {
        for (j, &b) in elems.iter().enumerate() {
            let mut r = vec![0i64; k];
            r[i] += 1;
            r[j] += 1;
            r[pos(g.mul(a, b))] -= 1;
            rels.push(r);
        }
    }
    abelian_from_relations(k, &rels)
}

/// A bijective homomorphism g → h by search over images of a generating set.
pub fn find_isomorphism(g: &FiniteGroup, h: &FiniteGroup) -> Option<Vec<usize>> {
    let n = g.order();
    if n != h.order() {
        return None;
    }
    let gens = g.generators();
    // each element as a word in the generators, via BFS
    let mut word: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut order = vec![0usize];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut q = VecDeque::from([0usize]);
    while let Some(x) = q.pop_front() {
        for (gi, &s) in gens.iter().enumerate() {
            let y = g.mul(x, s);
            if !seen[y] {
                seen[y] = true;
                word[y] = Some((x, gi));
                order.push(y);
                q.push_back(y);
            }
        }
    }
    let mut images = vec![0usize; gens.len()];
    fn search(
        k: usize,
        g: &FiniteGroup,
        h: &FiniteGroup,
        gens: &[usize],
        images: &mut Vec<usize>,
        order: &[usize],
        word: &[Option<(usize, usize)>],
    ) -> Option<Vec<usize>> {
        if k == gens.len() {
            let n = g.order();
            let mut phi = vec![usize::MAX; n];
            phi[0] = 0;
            for &y in &order[1..] {
                let (x, gi) = word[y].expect("reached by BFS");
                phi[y] = h.mul(phi[x], images[gi]);
            }
            let mut hit = vec![false; n];
            for &p in &phi {
                if hit[p] {
                    return None;
                }
                hit[p] = true;
            }
            let hom = (0..n).all(|a| (0..n).all(|b| phi[g.mul(a, b)] == h.mul(phi[a], phi[b])));
            return hom.then_some(phi);
        }
        let want = g.element_order(gens[k]);
        for cand in 1..h.order() {
            if h.element_order(cand) != want {
                continue;
            }
            images[k] = cand;
            if let Some(phi) = search(k + 1, g, h, gens, images, order, word) {
                return Some(phi);
            }
        }
        None
    }
    if n == 1 {
        return Some(vec![0]);
    }
    search(0, g, h, &gens, &mut images, &order, &word)
}

pub fn is_isomorphic(g: &FiniteGroup, h: &FiniteGroup) -> bool {
    find_isomorphism(g, h).is_some()
}

/// Order of a finite abelian presentation, if finite.
pub fn finite_order(p: &GroupPresentation) -> Option<BigInt> {
    let f = p.invariant_factors()?;
    if f.contains(&0) {
        return None;
    }
    Some(f.iter().fold(BigInt::one(), |acc, &d| acc * d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_groups_are_groups() {
        for g in [FiniteGroup::s3(), FiniteGroup::d4(), FiniteGroup::q8(), FiniteGroup::cyclic(6)] {
            assert!(g.is_group(), "{}", g.name);
        }
        assert_eq!(FiniteGroup::s3().order(), 6);
        assert_eq!(FiniteGroup::d4().order(), 8);
        assert_eq!(FiniteGroup::q8().center().len(), 2);
        assert_eq!(FiniteGroup::d4().center().len(), 2);
        assert_eq!(FiniteGroup::s3().center().len(), 1);
    }

    #[test]
    fn z2_times_z3_is_z6() {
        let g = FiniteGroup::by_name("Z2xZ3").unwrap();
        assert!(is_isomorphic(&g, &FiniteGroup::cyclic(6)));
        assert_eq!(g.presentation(), GroupPresentation::abelian(&[6]));
        assert!(!is_isomorphic(&FiniteGroup::d4(), &FiniteGroup::q8()));
    }

    #[test]
    fn factor_chain() {
        assert_eq!(normalize_factors(&[2, 3]), vec![6]);
        assert_eq!(normalize_factors(&[4, 2, 1, 0]), vec![2, 4, 0]);
    }
}
