use rand::RngCore;
use simplex_core::{mask, ClosedSet, CoreError, Functor, Mask, ShellView, Simplex, Structure};

/// A partial functor the site could not extend, with the reason.
#[derive(Clone, Debug)]
pub struct Obstruction {
    pub functor: Functor,
    pub reason: String,
}

impl std::fmt::Display for Obstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cannot amalgamate over {:?}: {}", self.functor.support, self.reason)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum EngineError {
    #[error("{0}")]
    Obstruction(Box<Obstruction>),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("certificate does not check: {0}")]
    BadCertificate(String),
}

impl From<Obstruction> for EngineError {
    fn from(o: Obstruction) -> Self {
        EngineError::Obstruction(Box::new(o))
    }
}

impl EngineError {
    pub fn obstruction(&self) -> Option<&Obstruction> {
        match self {
            EngineError::Obstruction(o) => Some(o),
            _ => None,
        }
    }
}

/// A family of closed sets with an amalgamation oracle.
///
/// `complete` extends a functor on any downward-closed domain to the full
/// power set of its support. With `rng` absent the choice is canonical, so
/// equal inputs give structurally equal outputs.
pub trait Site: Structure + Send + Sync {
    fn name(&self) -> String;

    /// The 0-simplex whose single vertex is labelled `index`.
    fn vertex(&self, index: u32) -> Simplex;

    fn complete_with(&self, f: &Functor, rng: Option<&mut dyn RngCore>) -> Result<Simplex, Obstruction>;

    /// Largest k with k-complete amalgamation.
    fn supported_ca(&self) -> usize;

    /// Every simplex on `support` whose labels are the support values and whose
    /// transitions fix labels on vertices. Used by the bounded oracle.
    fn normalized_simplices(&self, support: &[u32]) -> Vec<Simplex>;

    fn complete(&self, f: &Functor) -> Result<Simplex, Obstruction> {
        self.complete_with(f, None)
    }

    /// A vertex independent from everything in `avoid`.
    fn fresh_vertex(&self, avoid: &[u32]) -> Simplex {
        self.vertex(avoid.iter().max().map_or(0, |m| m + 1))
    }

    /// The k-amalgamation oracle: `partial` is defined on all proper subsets.
    fn amalgamate(&self, partial: &Functor) -> Result<Simplex, Obstruction> {
        self.complete(partial)
    }

    /// Joint extension of two simplices that agree on their common face.
    fn strong2(&self, f: &Simplex, g: &Simplex) -> Result<Simplex, EngineError> {
        let mut s: Vec<u32> = f.support().iter().chain(g.support()).copied().collect();
        s.sort_unstable();
        s.dedup();
        let u = Functor::union(s, &[f.clone(), g.clone()])?;
        Ok(self.complete(&u)?)
    }
}

/// Builds a functor on `support` face by face, extending each new face from
/// its proper subfaces with random free choices. `include` must be downward closed.
pub fn random_functor(
    site: &dyn Site,
    support: &[u32],
    include: &dyn Fn(Mask) -> bool,
    rng: &mut dyn RngCore,
) -> Result<Functor, EngineError> {
    let n = support.len();
    let mut f = Functor::empty(support.to_vec(), site.base());
    let mut order: Vec<Mask> = (1..1u32 << n).map(|m| m as Mask).filter(|&m| include(m)).collect();
    order.sort_by_key(|&m| (mask::popcount(m), m));
    for u in order {
        let piece = if mask::popcount(u) == 1 {
            site.vertex(support[u.trailing_zeros() as usize])
        } else {
            let mut sub = f.restrict(u);
            let top = sub.faces.len() - 1;
            sub.faces[top] = None;
            site.complete_with(&sub, Some(&mut *rng))?
        };
        f.insert(&piece)?;
    }
    Ok(f)
}

/// Random completion of the bare vertices, so it never hits an obstruction
/// on sites with full amalgamation.
pub fn random_simplex(site: &dyn Site, support: &[u32], rng: &mut dyn RngCore) -> Result<Simplex, EngineError> {
    let f = random_functor(site, support, &|m| mask::popcount(m) == 1, rng)?;
    Ok(site.complete_with(&f, Some(rng))?)
}

/// A random shell on `support`: random data on every proper face.
pub fn random_shell(site: &dyn Site, support: &[u32], rng: &mut dyn RngCore) -> Result<ShellView, EngineError> {
    let full = mask::full(support.len());
    let mut tries = 0;
    let f = loop {
        match random_functor(site, support, &|m| m != full, rng) {
            Ok(f) => break f,
            Err(EngineError::Obstruction(_)) if tries < 16 => tries += 1,
            Err(EngineError::Obstruction(_)) => break Functor::from_simplex(&random_simplex(site, support, rng)?),
            Err(e) => return Err(e),
        }
    };
    let faces = (0..support.len())
        .map(|i| f.restrict(full & !(1 << i)).into_simplex())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ShellView::new(1, faces)?)
}

/// The closed set every site uses as its base.
pub fn empty_base() -> ClosedSet {
    ClosedSet::empty()
}
