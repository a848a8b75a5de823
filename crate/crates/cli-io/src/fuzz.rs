//! Seeded generators for chains, shells and pockets, plus an independent
//! boundary recomputation used to re-check certificates.

use std::collections::BTreeMap;

use amalgam_engine::{random_shell, random_simplex, Certificate, EngineError, Site};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use simplex_core::{Chain, Functor, Mask, PocketView, ShellView, Simplex};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64, stream: u64) -> Rng8 {
    use rand::SeedableRng;
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// `k` distinct sorted points from 0..n.
pub fn support(rng: &mut Rng8, k: usize, n: u32) -> Vec<u32> {
    let mut pts: Vec<u32> = (0..n).collect();
    pts.shuffle(rng);
    pts.truncate(k);
    pts.sort_unstable();
    pts
}

/// ∂ recomputed face by face from restrictions, without the chain module's
/// boundary code.
pub fn oracle_boundary(c: &Chain) -> BTreeMap<Simplex, i64> {
    let mut acc: BTreeMap<Simplex, i64> = BTreeMap::new();
    for (f, k) in c.terms() {
        let full = f.full_mask();
        for i in 0..f.n_vertices() {
            let g = f.restrict(full & !((1 as Mask) << i));
            let s = if i % 2 == 0 { k } else { -k };
            *acc.entry(g).or_insert(0) += s;
        }
    }
    acc.retain(|_, v| *v != 0);
    acc
}

pub fn oracle_check(cert: &Certificate) -> bool {
    if cert.bounding.dim() != cert.target.dim() + 1 {
        return false;
    }
    let want: BTreeMap<Simplex, i64> = cert.target.terms().map(|(f, k)| (f.clone(), k)).collect();
    // dimension-0 bounding chains have empty faces in the reduced sense only
    if cert.bounding.dim() == 0 {
        return want.is_empty() && cert.bounding.is_zero();
    }
    oracle_boundary(&cert.bounding) == want
}

/// Another completion of the boundary of `f`, drawn at random.
pub fn recomplete(site: &dyn Site, f: &Simplex, rng: &mut Rng8) -> Result<Simplex, EngineError> {
    let faces: Vec<Simplex> = (0..f.n_vertices()).map(|i| f.face(i).expect("face in range")).collect();
    let u = Functor::union(f.support().to_vec(), &faces)?;
    Ok(site.complete_with(&u, Some(rng))?)
}

pub fn random_pocket(site: &dyn Site, sup: &[u32], rng: &mut Rng8) -> Result<PocketView, EngineError> {
    let f = random_simplex(site, sup, rng)?;
    let g = recomplete(site, &f, rng)?;
    Ok(PocketView::new(f, g)?)
}

pub fn maybe_negated(s: ShellView, rng: &mut Rng8) -> ShellView {
    if rng.gen_bool(0.5) {
        s.negated()
    } else {
        s
    }
}

/// A dim-n cycle on points below `n_pts`: a few shells and simplex
/// boundaries with small coefficients.
pub fn random_cycle(site: &dyn Site, dim: usize, n_pts: u32, rng: &mut Rng8) -> Result<Chain, EngineError> {
    let mut c = Chain::zero(dim as i32);
    let pieces = rng.gen_range(1..=3);
    for _ in 0..pieces {
        let k = [-2i64, -1, 1, 2][rng.gen_range(0..4)];
        let sup = support(rng, dim + 2, n_pts);
        if rng.gen_bool(0.5) {
            c.add_scaled(&random_shell(site, &sup, rng)?.chain(), k);
        } else {
            let f = random_simplex(site, &sup, rng)?;
            c.add_scaled(&ShellView::of_boundary(&f)?.chain(), k);
        }
    }
    Ok(c)
}
