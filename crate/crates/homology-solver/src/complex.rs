use std::collections::{BTreeMap, HashMap};

use amalgam_engine::{Certificate, EngineError, Site};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use simplex_core::{boundary_of, Chain, Convention, CoreError, Simplex};

use crate::group::GroupPresentation;
use crate::snf::{smith_i64, Snf};

pub const DEFAULT_CAP: usize = 200_000;

#[derive(Debug, Clone, thiserror::Error)]
pub enum HomologyError {
    #[error("dimension {dim} has {count} simplices, over the cap of {cap}")]
    CapExceeded { dim: i32, count: usize, cap: usize },
    #[error("chain is not supported in the universe of {0} points")]
    OutsideUniverse(usize),
    #[error("expected a chain of dimension {expected}, got {got}")]
    WrongDim { expected: i32, got: i32 },
    #[error("coefficient too large for a chain")]
    Coefficient,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Normalized simplices on subsets of {0, …, universe−1}, closed under faces,
/// with their boundary matrices.
pub struct BoundedComplex {
    pub universe: usize,
    pub convention: Convention,
    pub simplices_by_dim: BTreeMap<i32, Vec<Simplex>>,
    index: BTreeMap<i32, HashMap<Simplex, usize>>,
    snf: BTreeMap<i32, (Snf, Vec<usize>)>,
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<u32>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x as u32);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl BoundedComplex {
    /// Enumerates dimensions `low..=top` (low may be −1 for the reduced complex).
    pub fn new(site: &dyn Site, universe: usize, low: i32, top: i32, convention: Convention, cap: usize) -> Result<Self, HomologyError> {
        let mut simplices_by_dim = BTreeMap::new();
        let mut index: BTreeMap<i32, HashMap<Simplex, usize>> = BTreeMap::new();
        let mut carry: Vec<Simplex> = Vec::new();
        for d in (low.max(-1)..=top).rev() {
            let mut list: Vec<Simplex> = Vec::new();
            let mut idx: HashMap<Simplex, usize> = HashMap::new();
            let mut push = |f: Simplex, list: &mut Vec<Simplex>| -> Result<(), HomologyError> {
                if !idx.contains_key(&f) {
                    idx.insert(f.clone(), list.len());
                    list.push(f);
                    if list.len() > cap {
                        return Err(HomologyError::CapExceeded { dim: d, count: list.len(), cap });
                    }
                }
                Ok(())
            };
            if d < 0 {
                push(Simplex::empty(site.base()), &mut list)?;
            } else if (d as usize) < universe {
                for s in subsets_of_size(universe, d as usize + 1) {
                    for f in site.normalized_simplices(&s) {
                        push(f, &mut list)?;
                    }
                }
            }
            for f in carry.drain(..) {
                push(f, &mut list)?;
            }
            if d > low {
                for f in &list {
                    for i in 0..f.n_vertices() {
                        carry.push(f.face(i)?);
                    }
                }
            }
            simplices_by_dim.insert(d, list);
            index.insert(d, idx);
        }
        Ok(BoundedComplex { universe, convention, simplices_by_dim, index, snf: BTreeMap::new() })
    }

    pub fn count(&self, d: i32) -> usize {
        self.simplices_by_dim.get(&d).map_or(0, Vec::len)
    }

    pub fn index_of(&self, f: &Simplex) -> Option<usize> {
        self.index.get(&f.dim())?.get(f).copied()
    }

    /// Coordinates of a chain, or `None` if a term lies outside the complex.
    pub fn vector(&self, c: &Chain) -> Option<Vec<i64>> {
        let mut v = vec![0; self.count(c.dim())];
        for (f, k) in c.terms() {
            v[self.index_of(f)?] += k;
        }
        Some(v)
    }

    /// ∂_d as dense rows (rows: dimension d−1, columns: dimension d).
    pub fn boundary_matrix(&self, d: i32) -> Vec<Vec<i64>> {
        let rows = self.count(d - 1);
        let cols = self.simplices_by_dim.get(&d).map_or(&[][..], Vec::as_slice);
        let mut m = vec![vec![0i64; cols.len()]; rows];
        if rows == 0 {
            return m;
        }
        for (j, f) in cols.iter().enumerate() {
            for (g, k) in boundary_of(f, self.convention).terms() {
                let i = self.index.get(&(d - 1)).and_then(|x| x.get(g)).copied().expect("complex is closed under faces");
                m[i][j] += k;
            }
        }
        m
    }

    /// SNF of ∂_d after dropping zero and repeated columns; the vector maps
    /// kept columns back to simplices of dimension d.
    pub fn reduced_snf(&mut self, d: i32) -> &(Snf, Vec<usize>) {
        if !self.snf.contains_key(&d) {
            let m = self.boundary_matrix(d);
            let rows = m.len();
            let cols = self.count(d);
            let mut seen: HashMap<Vec<(usize, i64)>, usize> = HashMap::new();
            let mut keep = Vec::new();
            for j in 0..cols {
                let col: Vec<(usize, i64)> = (0..rows).filter(|&i| m[i][j] != 0).map(|i| (i, m[i][j])).collect();
                if col.is_empty() || seen.contains_key(&col) {
                    continue;
                }
                seen.insert(col, j);
                keep.push(j);
            }
            let dense: Vec<Vec<i64>> = m.iter().map(|r| keep.iter().map(|&j| r[j]).collect()).collect();
            let snf = smith_i64(rows, keep.len(), dense);
            self.snf.insert(d, (snf, keep));
        }
        &self.snf[&d]
    }

    /// Some d+1-chain x in the complex with ∂x = c.
    pub fn solve(&mut self, c: &Chain) -> Result<Option<Chain>, HomologyError> {
        let d = c.dim();
        let Some(v) = self.vector(c) else {
            return Ok(None);
        };
        if self.count(d + 1) == 0 {
            return Ok(if c.is_zero() { Some(Chain::zero(d + 1)) } else { None });
        }
        self.reduced_snf(d + 1);
        let (snf, keep) = &self.snf[&(d + 1)];
        let rhs: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let Some(x) = snf.solve(&rhs) else {
            return Ok(None);
        };
        let gens = &self.simplices_by_dim[&(d + 1)];
        let mut out = Chain::zero(d + 1);
        for (col, k) in keep.iter().zip(&x) {
            if !k.is_zero() {
                out.add_term(&gens[*col], k.to_i64().ok_or(HomologyError::Coefficient)?);
            }
        }
        debug_assert_eq!(out.boundary(self.convention), *c);
        Ok(Some(out))
    }

    /// H_n of the enumerated complex; needs dimensions n−1 ..= n+1.
    pub fn homology(&mut self, n: i32) -> GroupPresentation {
        let cn = self.count(n);
        let rank_out = if self.count(n - 1) == 0 { 0 } else { self.reduced_snf(n).0.rank() };
        let (rank_in, torsion) = if self.count(n + 1) == 0 {
            (0, Vec::new())
        } else {
            let s = &self.reduced_snf(n + 1).0;
            (s.rank(), s.torsion())
        };
        let mut orders: Vec<u64> = torsion.iter().map(|t| t.to_u64().expect("torsion fits in u64")).collect();
        orders.extend(std::iter::repeat_n(0, cn - rank_out - rank_in));
        GroupPresentation::abelian(&orders)
    }
}

pub fn bounded_homology(site: &dyn Site, universe: usize, n: i32, convention: Convention, cap: usize) -> Result<GroupPresentation, HomologyError> {
    let low = if convention == Convention::Reduced { (n - 1).max(-1) } else { (n - 1).max(0) };
    let mut cx = BoundedComplex::new(site, universe, low, n + 1, convention, cap)?;
    Ok(cx.homology(n))
}

/// Solves ∂x = c inside the complex on {0, …, universe−1}.
pub fn find_bounding_chain(site: &dyn Site, c: &Chain, universe: usize, cap: usize) -> Result<Option<Chain>, HomologyError> {
    if c.support().iter().any(|&x| x as usize >= universe) {
        return Err(HomologyError::OutsideUniverse(universe));
    }
    let d = c.dim();
    let mut cx = BoundedComplex::new(site, universe, d, d + 1, Convention::Unreduced, cap)?;
    cx.solve(c)
}

/// Answer of the degree-zero computation.
#[derive(Clone, Debug)]
pub struct H0Report {
    pub group: GroupPresentation,
    /// Sum of coefficients.
    pub epsilon: i64,
    pub is_boundary: bool,
    pub certificate: Option<Certificate>,
}

/// Degree-zero homology with the augmentation as membership test. A
/// bounding chain is built from edges to one fresh vertex.
pub fn h0(site: &dyn Site, convention: Convention, sample: &Chain) -> Result<H0Report, HomologyError> {
    if sample.dim() != 0 {
        return Err(HomologyError::WrongDim { expected: 0, got: sample.dim() });
    }
    let epsilon: i64 = sample.terms().map(|(_, k)| k).sum();
    let group = match convention {
        Convention::Unreduced => GroupPresentation::integers(),
        Convention::Reduced => GroupPresentation::trivial(),
    };
    let certificate = if epsilon == 0 {
        let apex = site.fresh_vertex(&sample.support());
        let mut bounding = Chain::zero(1);
        for (f, k) in sample.terms() {
            let g = site.strong2(f, &apex)?;
            bounding.add_term(&g, -k);
        }
        Some(Certificate::new(sample.clone(), bounding, "h0")?)
    } else {
        None
    };
    Ok(H0Report { group, epsilon, is_boundary: certificate.is_some(), certificate })
}
