use amalgam_engine::{fill_shell, pocket_to_shell, Certificate, Site};
use homology_solver::{FiniteGroup, GroupPresentation};
use instances::TowerSite;
use simplex_core::{mask, ClosedSet, Embedding, Mask, PocketView, ShellView, Simplex};

use crate::epsilon::{epsilon2, EdgeSelection, EpsilonValue};
use crate::HurewiczError;

fn twisted_simplex(site: &TowerSite, support: &[u32], twist: Option<(Mask, u32, usize)>) -> Result<Simplex, HurewiczError> {
    let top = site.closed_on(support);
    let full = mask::full(support.len());
    let mut faces = Vec::new();
    let mut into = Vec::new();
    for u in 0..=full {
        let ids: Vec<u32> = mask::bits(u).map(|i| support[i]).collect();
        let cs = if ids.is_empty() { ClosedSet::empty() } else { site.closed_on(&ids) };
        let t = |a: u32| match twist {
            Some((w, b, z)) if w == u && b == a => z,
            _ => 0,
        };
        let e = if ids.is_empty() { Embedding { map: vec![] } } else { site.twist_embedding(&cs, &top, &|a| a, &t).expect("twist lands in the top") };
        faces.push(cs);
        into.push(e);
    }
    Simplex::from_top(support.to_vec(), faces, into).map_err(|e| HurewiczError::Invalid(e.to_string()))
}

/// Pocket f − h on `support` with ε(f − h) = g: f has identity transitions,
/// h differs only in the {0,2} edge, whose end 2 is twisted by g.
pub fn realize_class_on(site: &TowerSite, g: &EpsilonValue, support: [u32; 3]) -> Result<PocketView, HurewiczError> {
    if !g.is_coherent(site) || !site.top_group().is_central(g.levels[0]) {
        return Err(HurewiczError::Incoherent(g.clone()));
    }
    let f = twisted_simplex(site, &support, None)?;
    let h = twisted_simplex(site, &support, Some((0b101, support[2], g.levels[0])))?;
    PocketView::new(f, h).map_err(|e| HurewiczError::Invalid(e.to_string()))
}

pub fn realize_class(site: &TowerSite, g: &EpsilonValue) -> Result<PocketView, HurewiczError> {
    realize_class_on(site, g, [0, 1, 2])
}

/// Fills a 2-shell whose ε is trivial at every level.
pub fn fill_trivial_shell(site: &TowerSite, s: &ShellView) -> Result<(Simplex, Certificate), HurewiczError> {
    if s.dim() != 2 {
        return Err(HurewiczError::Invalid(format!("expected a 2-shell, got dimension {}", s.dim())));
    }
    let eps = epsilon2(&s.chain(), site, EdgeSelection::Least)?;
    if !eps.is_identity() {
        let u = simplex_core::Functor::union(s.support(), &s.faces).map_err(|e| HurewiczError::Invalid(e.to_string()))?;
        let reason = match site.complete(&u) {
            Err(o) => o.reason,
            Ok(_) => return Err(HurewiczError::Invalid(format!("shell with ε = {eps} was filled"))),
        };
        return Err(HurewiczError::NonzeroClass { value: eps, reason });
    }
    fill_shell(site, s).map_err(HurewiczError::from)
}

/// Evidence gathered for one element of H₂.
#[derive(Clone, Debug)]
pub struct ClassWitness {
    pub value: EpsilonValue,
    pub pocket: PocketView,
    pub pocket_epsilon: EpsilonValue,
    pub shell: ShellView,
    pub shell_epsilon: EpsilonValue,
    /// pocket − shell is a boundary
    pub shell_cert: Certificate,
    /// Some(filler certificate) iff the shell bounds
    pub fill: Option<Certificate>,
    pub obstruction: Option<String>,
}

impl ClassWitness {
    pub fn is_consistent(&self) -> bool {
        self.pocket_epsilon == self.value
            && self.shell_epsilon == self.value
            && self.shell_cert.check()
            && self.fill.as_ref().is_none_or(Certificate::check)
            && self.fill.is_some() == self.value.is_identity()
            && self.obstruction.is_some() != self.value.is_identity()
    }
}

#[derive(Clone, Debug)]
pub struct H2Report {
    pub group: GroupPresentation,
    /// the limit as a finite group on coherent tuples
    pub table: FiniteGroup,
    pub elements: Vec<EpsilonValue>,
    pub witnesses: Vec<ClassWitness>,
}

impl H2Report {
    pub fn all_consistent(&self) -> bool {
        self.witnesses.len() == self.elements.len() && self.witnesses.iter().all(ClassWitness::is_consistent)
    }
}

/// Coherent tuples (g_l) with g_l central in H_l, by brute force over the
/// product of the centers.
pub fn coherent_tuples(site: &TowerSite) -> Vec<EpsilonValue> {
    let centers: Vec<Vec<usize>> = site.levels.iter().map(FiniteGroup::center).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(l: usize, centers: &[Vec<usize>], site: &TowerSite, cur: &mut Vec<usize>, out: &mut Vec<EpsilonValue>) {
        if l == centers.len() {
            let v = EpsilonValue { levels: cur.clone() };
            if v.is_coherent(site) {
                out.push(v);
            }
            return;
        }
        for &z in &centers[l] {
            cur.push(z);
            go(l + 1, centers, site, cur, out);
            cur.pop();
        }
    }
    go(0, &centers, site, &mut cur, &mut out);
    out
}

pub fn witness(site: &TowerSite, value: &EpsilonValue) -> Result<ClassWitness, HurewiczError> {
    let pocket = realize_class(site, value)?;
    let pocket_epsilon = epsilon2(&pocket.chain(), site, EdgeSelection::Least)?;
    let (shell, shell_cert) = pocket_to_shell(site, &pocket)?;
    let shell_epsilon = epsilon2(&shell.chain(), site, EdgeSelection::Least)?;
    let (fill, obstruction) = match fill_trivial_shell(site, &shell) {
        Ok((_, c)) => (Some(c), None),
        Err(HurewiczError::NonzeroClass { reason, .. }) => (None, Some(reason)),
        Err(HurewiczError::Engine(e)) if e.obstruction().is_some() => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(ClassWitness { value: value.clone(), pocket, pocket_epsilon, shell, shell_epsilon, shell_cert, fill, obstruction })
}

/// H₂ of a groupoid or tower site: the limit of the centers, with a
/// realize/fill witness for every element.
pub fn h2(site: &TowerSite) -> Result<H2Report, HurewiczError> {
    let elements = coherent_tuples(site);
    let table = FiniteGroup::from_elements("H2", elements.iter().map(|v| v.levels.clone()).collect(), |a, b| {
        a.iter().zip(b).enumerate().map(|(l, (&x, &y))| site.levels[l].mul(x, y)).collect()
    });
    let group = table.presentation();
    let witnesses = elements.iter().map(|v| witness(site, v)).collect::<Result<Vec<_>, _>>()?;
    Ok(H2Report { group, table, elements, witnesses })
}
