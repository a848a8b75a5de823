//! Automorphisms of a hom-set Mor(a, b) over the loops at its ends.
//!
//! Composition in the groupoid is (b, c, h)∘(a, b, g) = (a, c, hg), so a loop
//! h at a acts on Mor(a, b) by m ↦ m·h and a loop g at b by m ↦ g·m.

use homology_solver::{find_isomorphism, FiniteGroup, GroupPresentation};
use instances::TowerSite;
use serde::Serialize;

use crate::HurewiczError;

/// A permutation of the hom-set bundle: one permutation of labels per level.
type BundlePerm = Vec<Vec<usize>>;

/// Permutations of Mor(a, b) at every level that commute with the right
/// action of loops at a and with the projections; with `both_ends`, also with
/// the left action of loops at b.
fn equivariant_perms(site: &TowerSite, both_ends: bool) -> Vec<BundlePerm> {
    let g0 = site.top_group();
    let n = g0.order();
    let mut out = Vec::new();
    for y in 0..n {
        // the right action is transitive, so π(m₀) = y decides π on level 0
        let p0: Vec<usize> = (0..n).map(|h| g0.mul(y, h)).collect();
        let right = (0..n).all(|m| (0..n).all(|h| p0[g0.mul(m, h)] == g0.mul(p0[m], h)));
        let left = !both_ends || (0..n).all(|m| (0..n).all(|g| p0[g0.mul(g, m)] == g0.mul(g, p0[m])));
        if !right || !left {
            continue;
        }
        let mut perm = vec![p0.clone()];
        let mut ok = true;
        for l in 1..site.n_levels() {
            let gl = &site.levels[l];
            let mut pl = vec![usize::MAX; gl.order()];
            for m in 0..n {
                let (x, px) = (site.phi[l][m], site.phi[l][p0[m]]);
                if pl[x] != usize::MAX && pl[x] != px {
                    ok = false;
                }
                pl[x] = px;
            }
            let left_l = !both_ends || (0..gl.order()).all(|m| (0..gl.order()).all(|g| pl[gl.mul(g, m)] == gl.mul(g, pl[m])));
            ok &= left_l;
            perm.push(pl);
        }
        if ok {
            out.push(perm);
        }
    }
    out
}

fn perm_group(name: &str, perms: Vec<BundlePerm>) -> FiniteGroup {
    FiniteGroup::from_elements(name, perms, |p, q| p.iter().zip(q).map(|(a, b)| b.iter().map(|&x| a[x]).collect()).collect())
}

fn check_objects(a: u32, b: u32) -> Result<(), HurewiczError> {
    if a == b {
        return Err(HurewiczError::Invalid("gamma2 needs two distinct objects".into()));
    }
    Ok(())
}

/// Γ₂ as a permutation group: automorphisms of the hom-set bundle fixing
/// both vertex closures pointwise.
pub fn gamma2_group(site: &TowerSite, a: u32, b: u32) -> Result<FiniteGroup, HurewiczError> {
    check_objects(a, b)?;
    Ok(perm_group("Gamma2", equivariant_perms(site, true)))
}

pub fn gamma2(site: &TowerSite, a: u32, b: u32) -> Result<GroupPresentation, HurewiczError> {
    Ok(gamma2_group(site, a, b)?.presentation())
}

#[derive(Clone, Debug, Serialize)]
pub struct NoncommReport {
    pub group: String,
    pub order: usize,
    pub center_order: usize,
    pub f_order: usize,
    pub f_iso_g: bool,
    pub binding_order: usize,
    pub binding_iso_center: bool,
    pub binding_in_center_of_f: bool,
    /// labels x with m₀·x intertwining the loops at a and b
    pub x_set: Vec<usize>,
    pub orbit_matches: bool,
}

impl NoncommReport {
    pub fn passes(&self) -> bool {
        self.f_iso_g && self.binding_iso_center && self.binding_in_center_of_f && self.orbit_matches
    }
}

impl std::fmt::Display for NoncommReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:<6} |G|={:<2} |Z(G)|={:<2} |F|={:<2} F≅G:{:<5} |bind|={:<2} bind≅Z(G):{:<5} bind≤Z(F):{:<5} X={:?} orbit:{}",
            self.group,
            self.order,
            self.center_order,
            self.f_order,
            self.f_iso_g,
            self.binding_order,
            self.binding_iso_center,
            self.binding_in_center_of_f,
            self.x_set,
            self.orbit_matches
        )
    }
}

/// F_ab = Aut(Mor(a, b) / loops at a), the copy of the binding group in it,
/// and the orbit description of the intertwiners, on the top level.
pub fn noncomm_check(site: &TowerSite, a: u32, b: u32) -> Result<NoncommReport, HurewiczError> {
    check_objects(a, b)?;
    let g = site.top_group();
    let n = g.order();
    let f_perms: Vec<Vec<usize>> = equivariant_perms(site, false).into_iter().map(|p| p[0].clone()).collect();
    let f_group = perm_group("F", f_perms.iter().map(|p| vec![p.clone()]).collect());
    let f_iso_g = find_isomorphism(&f_group, g).is_some();

    let binding: Vec<&Vec<usize>> = f_perms.iter().filter(|p| (0..n).all(|m| (0..n).all(|x| p[g.mul(x, m)] == g.mul(x, p[m])))).collect();
    let bind_group = perm_group("binding", binding.iter().map(|p| vec![(*p).clone()]).collect());
    let center = g.center();
    let center_group = g.subgroup(&center, "Z(G)");
    let binding_iso_center = find_isomorphism(&bind_group, &center_group).is_some();
    let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&x| p[x]).collect() };
    let binding_in_center_of_f = binding.iter().all(|p| f_perms.iter().all(|q| compose(p, q) == compose(q, p)));

    // m₀ = identity label; m₀·x intertwines loop g at a with loop g at b
    let x_set: Vec<usize> = (0..n).filter(|&x| (0..n).all(|h| g.conj(x, h) == h)).collect();
    let mut orbit: Vec<usize> = binding.iter().map(|p| p[0]).collect();
    orbit.sort_unstable();
    let orbit_matches = x_set == center && orbit == x_set;

    Ok(NoncommReport {
        group: g.name.clone(),
        order: n,
        center_order: center.len(),
        f_order: f_perms.len(),
        f_iso_g,
        binding_order: binding.len(),
        binding_iso_center,
        binding_in_center_of_f,
        x_set,
        orbit_matches,
    })
}
