use serde::{Deserialize, Serialize};

/// An element of the ambient model. Points carry a label, groupoid objects
/// and morphisms carry their level in the tower (0 is the top level).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Elem {
    Pt(u32),
    Obj(u8, u32),
    /// level, source object, target object, group label
    Mor(u8, u32, u32, u32),
}

impl Elem {
    pub fn level(&self) -> Option<u8> {
        match *self {
            Elem::Pt(_) => None,
            Elem::Obj(l, _) | Elem::Mor(l, ..) => Some(l),
        }
    }
}

/// A finite closed set: elements in canonical (sorted) order plus the tuples
/// of element indices where the site relation holds.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClosedSet {
    pub elems: Vec<Elem>,
    #[serde(default)]
    pub rel: Vec<Vec<u32>>,
}

impl ClosedSet {
    pub fn empty() -> Self {
        ClosedSet { elems: Vec::new(), rel: Vec::new() }
    }

    /// Builds a set from unsorted elements; relation tuples are given in
    /// terms of elements and translated to indices.
    pub fn from_parts(mut elems: Vec<Elem>, rel: Vec<Vec<Elem>>) -> Self {
        elems.sort();
        elems.dedup();
        let mut out: Vec<Vec<u32>> = rel
            .into_iter()
            .map(|t| t.iter().map(|e| elems.binary_search(e).expect("relation element missing") as u32).collect())
            .collect();
        out.sort();
        out.dedup();
        ClosedSet { elems, rel: out }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn index_of(&self, e: &Elem) -> Option<u32> {
        self.elems.binary_search(e).ok().map(|i| i as u32)
    }

    pub fn has_tuple(&self, t: &[u32]) -> bool {
        self.rel.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
    }

    /// Substructure on the given element indices, with its inclusion.
    pub fn restrict(&self, keep: &[u32]) -> (ClosedSet, Embedding) {
        let mut keep: Vec<u32> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut back = vec![u32::MAX; self.elems.len()];
        for (new, &old) in keep.iter().enumerate() {
            back[old as usize] = new as u32;
        }
        let elems = keep.iter().map(|&i| self.elems[i as usize]).collect();
        let mut rel: Vec<Vec<u32>> = self
            .rel
            .iter()
            .filter(|t| t.iter().all(|&i| back[i as usize] != u32::MAX))
            .map(|t| t.iter().map(|&i| back[i as usize]).collect())
            .collect();
        rel.sort();
        (ClosedSet { elems, rel }, Embedding { map: keep })
    }
}

/// An element-wise map between closed sets, by index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding {
    pub map: Vec<u32>,
}

impl Embedding {
    pub fn identity(n: usize) -> Self {
        Embedding { map: (0..n as u32).collect() }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Embedding) -> Embedding {
        Embedding { map: self.map.iter().map(|&i| next.map[i as usize]).collect() }
    }

    pub fn is_injective(&self, target_len: usize) -> bool {
        let mut seen = vec![false; target_len];
        for &i in &self.map {
            let i = i as usize;
            if i >= target_len || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }

    /// Left inverse on the image: `inv[j] = i` when `map[i] = j`.
    pub fn preimage_table(&self, target_len: usize) -> Vec<u32> {
        let mut inv = vec![u32::MAX; target_len];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        inv
    }

    /// Factors `self` through `outer`, assuming image(self) ⊆ image(outer).
    pub fn factor_through(&self, outer: &Embedding, target_len: usize) -> Option<Embedding> {
        let inv = outer.preimage_table(target_len);
        let mut map = Vec::with_capacity(self.map.len());
        for &j in &self.map {
            let i = inv[j as usize];
            if i == u32::MAX {
                return None;
            }
            map.push(i);
        }
        Some(Embedding { map })
    }
}
