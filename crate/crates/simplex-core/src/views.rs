//! Shells, fans and pockets as validated views over chains.

use serde::Serialize;

use crate::chain::{Chain, Convention};
use crate::simplex::Simplex;
use crate::CoreError;

fn alt(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Checks ∂^i f_j = ∂^{j-1} f_i for every pair of present terms i < j.
fn compatible(terms: &[Option<Simplex>]) -> Result<(), CoreError> {
    for j in 0..terms.len() {
        for i in 0..j {
            if let (Some(fi), Some(fj)) = (&terms[i], &terms[j]) {
                if fj.face(i)? != fi.face(j - 1)? {
                    return Err(CoreError::NotShell(format!("terms {i} and {j} disagree on their shared face")));
                }
            }
        }
    }
    Ok(())
}

fn check_supports(terms: &[Option<Simplex>]) -> Result<Vec<u32>, CoreError> {
    let mut s: Vec<u32> = terms.iter().flatten().flat_map(|f| f.support().iter().copied()).collect();
    s.sort_unstable();
    s.dedup();
    if s.len() != terms.len() {
        return Err(CoreError::NotShell(format!("union support has {} elements, expected {}", s.len(), terms.len())));
    }
    for (i, t) in terms.iter().enumerate() {
        if let Some(f) = t {
            let want: Vec<u32> = s.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x).collect();
            if f.support() != want.as_slice() {
                return Err(CoreError::NotShell(format!("term {i} has support {:?}, expected {:?}", f.support(), want)));
            }
        }
    }
    Ok(s)
}

/// `sign · Σ (−1)^i f_i` with `supp f_i = s ∖ {s_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellView {
    pub sign: i64,
    pub faces: Vec<Simplex>,
}

impl ShellView {
    pub fn new(sign: i64, faces: Vec<Simplex>) -> Result<ShellView, CoreError> {
        if sign.abs() != 1 || faces.len() < 2 {
            return Err(CoreError::NotShell("bad sign or too few terms".into()));
        }
        let dim = faces[0].dim();
        if dim < 0 || faces.iter().any(|f| f.dim() != dim) || faces.len() as i32 != dim + 2 {
            return Err(CoreError::NotShell("term count does not match dimension".into()));
        }
        let opt: Vec<Option<Simplex>> = faces.iter().cloned().map(Some).collect();
        check_supports(&opt)?;
        compatible(&opt)?;
        Ok(ShellView { sign, faces })
    }

    /// ∂ of a simplex of dimension ≥ 1.
    pub fn of_boundary(f: &Simplex) -> Result<ShellView, CoreError> {
        let faces = (0..f.n_vertices()).map(|i| f.face(i)).collect::<Result<Vec<_>, _>>()?;
        ShellView::new(1, faces)
    }

    pub fn dim(&self) -> i32 {
        self.faces[0].dim()
    }

    pub fn support(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.faces.iter().flat_map(|f| f.support().iter().copied()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn chain(&self) -> Chain {
        let mut c = Chain::zero(self.dim());
        for (i, f) in self.faces.iter().enumerate() {
            c.add_term(f, self.sign * alt(i));
        }
        c
    }

    pub fn negated(&self) -> ShellView {
        ShellView { sign: -self.sign, faces: self.faces.clone() }
    }

    /// Drops term k.
    pub fn without(&self, k: usize) -> FanView {
        let mut faces: Vec<Option<Simplex>> = self.faces.iter().cloned().map(Some).collect();
        faces[k] = None;
        FanView { sign: self.sign, missing: k, faces }
    }

    /// The same shell with every term moved to a new support of equal size.
    pub fn relabel(&self, support: &[u32]) -> Result<ShellView, CoreError> {
        let faces = self
            .faces
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let s: Vec<u32> = support.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x).collect();
                f.relabel(s)
            })
            .collect::<Result<Vec<_>, _>>()?;
        ShellView::new(self.sign, faces)
    }

    pub fn from_chain(c: &Chain) -> Option<ShellView> {
        let d = c.dim();
        if d < 0 || c.len() as i32 != d + 2 {
            return None;
        }
        let support = c.support();
        if support.len() as i32 != d + 2 {
            return None;
        }
        let mut faces = vec![None; support.len()];
        let mut sign = 0;
        for (f, k) in c.terms() {
            let missing = support.iter().position(|x| f.support().binary_search(x).is_err())?;
            let s = k * alt(missing);
            if s.abs() != 1 || (sign != 0 && s != sign) || faces[missing].is_some() {
                return None;
            }
            sign = s;
            faces[missing] = Some(f.clone());
        }
        ShellView::new(sign, faces.into_iter().collect::<Option<Vec<_>>>()?).ok()
    }
}

/// A shell missing term `missing`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanView {
    pub sign: i64,
    pub missing: usize,
    pub faces: Vec<Option<Simplex>>,
}

impl FanView {
    pub fn new(sign: i64, missing: usize, faces: Vec<Option<Simplex>>) -> Result<FanView, CoreError> {
        if sign.abs() != 1 || missing >= faces.len() || faces[missing].is_some() {
            return Err(CoreError::NotShell("bad fan layout".into()));
        }
        if faces.iter().enumerate().any(|(i, f)| i != missing && f.is_none()) {
            return Err(CoreError::NotShell("fan is missing more than one term".into()));
        }
        let dim = faces.iter().flatten().next().map(|f| f.dim()).unwrap_or(-1);
        if dim < 1 || faces.iter().flatten().any(|f| f.dim() != dim) || faces.len() as i32 != dim + 2 {
            return Err(CoreError::NotShell("fan term count does not match dimension".into()));
        }
        check_supports(&faces)?;
        compatible(&faces)?;
        Ok(FanView { sign, missing, faces })
    }

    pub fn dim(&self) -> i32 {
        self.faces.iter().flatten().next().map(|f| f.dim()).unwrap_or(-1)
    }

    pub fn support(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.faces.iter().flatten().flat_map(|f| f.support().iter().copied()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn present(&self) -> Vec<Simplex> {
        self.faces.iter().flatten().cloned().collect()
    }

    pub fn chain(&self) -> Chain {
        let mut c = Chain::zero(self.dim());
        for (i, f) in self.faces.iter().enumerate() {
            if let Some(f) = f {
                c.add_term(f, self.sign * alt(i));
            }
        }
        c
    }

    /// Fills the missing slot.
    pub fn complete_with(&self, f: Simplex) -> Result<ShellView, CoreError> {
        let mut faces = self.faces.clone();
        faces[self.missing] = Some(f);
        ShellView::new(self.sign, faces.into_iter().map(Option::unwrap).collect())
    }

    pub fn from_chain(c: &Chain) -> Option<FanView> {
        let d = c.dim();
        if d < 1 || c.len() as i32 != d + 1 {
            return None;
        }
        let support = c.support();
        if support.len() as i32 != d + 2 {
            return None;
        }
        let mut faces = vec![None; support.len()];
        let mut sign = 0;
        for (f, k) in c.terms() {
            let missing = support.iter().position(|x| f.support().binary_search(x).is_err())?;
            let s = k * alt(missing);
            if s.abs() != 1 || (sign != 0 && s != sign) || faces[missing].is_some() {
                return None;
            }
            sign = s;
            faces[missing] = Some(f.clone());
        }
        let missing = faces.iter().position(Option::is_none)?;
        FanView::new(sign, missing, faces).ok()
    }
}

/// `pos − neg`, two simplices on one support with equal boundary. The
/// degenerate case `pos == neg` is allowed as an engine output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PocketView {
    pub pos: Simplex,
    pub neg: Simplex,
}

impl PocketView {
    pub fn new(pos: Simplex, neg: Simplex) -> Result<PocketView, CoreError> {
        if pos.support() != neg.support() || pos.dim() < 1 {
            return Err(CoreError::NotPocket("supports differ or dimension is 0".into()));
        }
        for i in 0..pos.n_vertices() {
            if pos.face(i)? != neg.face(i)? {
                return Err(CoreError::NotPocket(format!("face {i} differs")));
            }
        }
        Ok(PocketView { pos, neg })
    }

    pub fn is_degenerate(&self) -> bool {
        self.pos == self.neg
    }

    pub fn dim(&self) -> i32 {
        self.pos.dim()
    }

    pub fn chain(&self) -> Chain {
        let mut c = Chain::simplex(&self.pos);
        c.add_term(&self.neg, -1);
        c
    }

    pub fn swapped(&self) -> PocketView {
        PocketView { pos: self.neg.clone(), neg: self.pos.clone() }
    }

    pub fn from_chain(c: &Chain) -> Option<PocketView> {
        if c.len() != 2 {
            return None;
        }
        let mut pos = None;
        let mut neg = None;
        for (f, k) in c.terms() {
            match k {
                1 => pos = Some(f.clone()),
                -1 => neg = Some(f.clone()),
                _ => return None,
            }
        }
        PocketView::new(pos?, neg?).ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Shell,
    Fan,
    Pocket,
    Cycle,
    /// ∂c is a shell, e.g. a single simplex.
    BoundaryCandidate,
    General,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Kind::Shell => "shell",
            Kind::Fan => "fan",
            Kind::Pocket => "pocket",
            Kind::Cycle => "cycle",
            Kind::BoundaryCandidate => "boundary-candidate",
            Kind::General => "general",
        };
        f.write_str(s)
    }
}

/// The strongest view that applies to `c`.
pub fn classify(c: &Chain, conv: Convention) -> Kind {
    if ShellView::from_chain(c).is_some() {
        return Kind::Shell;
    }
    if FanView::from_chain(c).is_some() {
        return Kind::Fan;
    }
    if PocketView::from_chain(c).is_some() {
        return Kind::Pocket;
    }
    let b = c.boundary(conv);
    if !c.is_zero() && b.is_zero() {
        return Kind::Cycle;
    }
    if ShellView::from_chain(&b).is_some() {
        return Kind::BoundaryCandidate;
    }
    Kind::General
}
