//! Certificate-producing reductions: fans to shells, pockets along paths,
//! shells to a single representative on {0, …, n+1}.

use std::collections::BTreeMap;

use simplex_core::{mask, Chain, Convention, FanView, Functor, PocketView, ShellView, Simplex};

use crate::cert::Certificate;
use crate::site::{EngineError, Site};

fn alt(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn precondition(msg: impl Into<String>) -> EngineError {
    EngineError::Precondition(msg.into())
}

fn face(f: &Simplex, i: usize) -> Simplex {
    f.face(i).expect("face index in range")
}

/// An (n+1)-simplex on supp(f) ∪ {m} whose last face is f.
pub fn add_vertex(site: &dyn Site, f: &Simplex, m: u32) -> Result<Simplex, EngineError> {
    if f.support().last().is_some_and(|&x| x >= m) {
        return Err(precondition(format!("new vertex {m} must exceed the support {:?}", f.support())));
    }
    site.strong2(f, &site.vertex(m))
}

/// Fills a fan; returns the missing term, the filler and a certificate whose
/// bounding chain is the filler alone.
pub fn complete_fan(site: &dyn Site, fan: &FanView) -> Result<(Simplex, Simplex, Certificate), EngineError> {
    let u = Functor::union(fan.support(), &fan.present())?;
    let filler = site.complete(&u)?;
    let missing = face(&filler, fan.missing);
    let shell = fan.complete_with(missing.clone())?;
    let cert = Certificate::new(shell.chain(), Chain::term(&filler, fan.sign), "complete_fan")?;
    Ok((missing, filler, cert))
}

/// Fills a whole shell with one simplex, if the site allows it.
pub fn fill_shell(site: &dyn Site, s: &ShellView) -> Result<(Simplex, Certificate), EngineError> {
    let u = Functor::union(s.support(), &s.faces)?;
    let filler = site.complete(&u)?;
    let cert = Certificate::new(s.chain(), Chain::term(&filler, s.sign), "fill_shell")?;
    Ok((filler, cert))
}

/// Legs h_0..h_n of an (n+1)-path; leg k has origin face ∂^{n+1} and
/// destination face ∂^0, the other faces are walls.
#[derive(Clone, Debug)]
pub struct PathView {
    pub n: usize,
    pub legs: Vec<Simplex>,
}

impl PathView {
    pub fn sign(&self, k: usize) -> i64 {
        alt(self.n * (k + 1))
    }

    pub fn chain(&self) -> Chain {
        let mut c = Chain::zero(self.n as i32 + 1);
        for (k, h) in self.legs.iter().enumerate() {
            c.add_term(h, self.sign(k));
        }
        c
    }

    pub fn origin(&self) -> Simplex {
        face(&self.legs[0], self.n + 1)
    }

    pub fn destination(&self) -> Simplex {
        face(&self.legs[self.n], 0)
    }

    /// Wall faces ∂^i h_k for i = 1..n, leg by leg.
    pub fn walls(&self) -> Vec<Vec<Simplex>> {
        self.legs.iter().map(|h| (1..=self.n).map(|i| face(h, i)).collect()).collect()
    }

    /// Checks the path conditions: consecutive legs share origin/destination faces.
    pub fn is_valid(&self) -> bool {
        self.legs.len() == self.n + 1
            && self.legs.iter().all(|h| h.dim() as usize == self.n + 1)
            && (0..self.n).all(|k| face(&self.legs[k], 0) == face(&self.legs[k + 1], self.n + 1))
    }
}

/// A path from f to g, leg by leg with strong 2-amalgamation. Requires
/// every support element of f to lie below every element of g.
pub fn build_path(site: &dyn Site, f: &Simplex, g: &Simplex) -> Result<PathView, EngineError> {
    let n = f.dim();
    if n < 0 || g.dim() != n {
        return Err(precondition("path ends must be simplices of one dimension"));
    }
    if f.support().last() >= g.support().first() {
        return Err(precondition("path needs supp(f) entirely below supp(g)"));
    }
    let n = n as usize;
    let mut legs = Vec::with_capacity(n + 1);
    let mut origin = f.clone();
    for k in 0..=n {
        let part = g.restrict(mask::full(k + 1));
        let h = site.strong2(&origin, &part)?;
        origin = face(&h, 0);
        legs.push(h);
    }
    Ok(PathView { n, legs })
}

/// Re-runs a path with a new end face, keeping every wall. `forward` starts
/// from the origin of the first leg; otherwise from the destination of the last.
fn parallel_path(site: &dyn Site, p: &PathView, start: &Simplex, forward: bool) -> Result<PathView, EngineError> {
    let n = p.n;
    let mut legs: Vec<Option<Simplex>> = vec![None; n + 1];
    let mut carry = start.clone();
    let order: Vec<usize> = if forward { (0..=n).collect() } else { (0..=n).rev().collect() };
    for k in order {
        let h = &p.legs[k];
        let mut parts: Vec<Simplex> = (1..=n).map(|i| face(h, i)).collect();
        parts.push(carry.clone());
        let u = Functor::union(h.support().to_vec(), &parts)?;
        let leg = site.complete(&u)?;
        carry = if forward { face(&leg, 0) } else { face(&leg, n + 1) };
        legs[k] = Some(leg);
    }
    Ok(PathView { n, legs: legs.into_iter().map(Option::unwrap).collect() })
}

/// Moves the pocket `pocket` to a pocket `g − g′` with the given `g`.
/// The certificate bounds `pocket − (g − g′)`.
pub fn transport_pocket(site: &dyn Site, pocket: &PocketView, g: &Simplex) -> Result<(Simplex, Certificate), EngineError> {
    let s = pocket.pos.support();
    let t = g.support();
    if g.dim() != pocket.dim() {
        return Err(precondition("transport target has the wrong dimension"));
    }
    if s.iter().any(|x| t.binary_search(x).is_ok()) {
        return Err(precondition("transport needs disjoint supports"));
    }
    let (f, f2) = (&pocket.pos, &pocket.neg);
    let target_of = |g2: &Simplex| pocket.chain().minus(&PocketView { pos: g.clone(), neg: g2.clone() }.chain());
    if s.last() < t.first() {
        let p = build_path(site, f, g)?;
        let q = parallel_path(site, &p, f2, true)?;
        let g2 = q.destination();
        let cert = Certificate::new(target_of(&g2), q.chain().minus(&p.chain()), "transport_pocket")?;
        Ok((g2, cert))
    } else if t.last() < s.first() {
        let p = build_path(site, g, f)?;
        let q = parallel_path(site, &p, f2, false)?;
        let g2 = q.origin();
        let cert = Certificate::new(target_of(&g2), p.chain().minus(&q.chain()), "transport_pocket")?;
        Ok((g2, cert))
    } else {
        let top = s.last().max(t.last()).copied().unwrap_or(0);
        let w: Vec<u32> = (top + 1..top + 1 + s.len() as u32).collect();
        let gw = g.relabel(w)?;
        let (gw2, c1) = transport_pocket(site, pocket, &gw)?;
        let mid = PocketView::new(gw, gw2)?;
        let (g2, c2) = transport_pocket(site, &mid, g)?;
        let cert = Certificate::combine(pocket.dim(), &[(1, &c1), (1, &c2)], "transport_pocket")?;
        Ok((g2, cert))
    }
}

/// Shell on n+2 points to a pocket on its last facet; certificate bounds
/// `shell − pocket`.
pub fn shell_to_pocket(site: &dyn Site, s: &ShellView) -> Result<(PocketView, Certificate), EngineError> {
    let last = s.faces.len() - 1;
    let (f2, filler, _) = complete_fan(site, &s.without(last))?;
    let f = s.faces[last].clone();
    let pocket = if s.sign * alt(last) == 1 { PocketView { pos: f, neg: f2 } } else { PocketView { pos: f2, neg: f } };
    let target = s.chain().minus(&pocket.chain());
    let cert = Certificate::new(target, Chain::term(&filler, s.sign), "shell_to_pocket")?;
    Ok((pocket, cert))
}

/// Pocket to a shell on its support plus one new top vertex; certificate
/// bounds `pocket − shell`.
pub fn pocket_to_shell(site: &dyn Site, p: &PocketView) -> Result<(ShellView, Certificate), EngineError> {
    let n = p.dim() as usize;
    let m = p.pos.support().last().copied().unwrap_or(0) + 1;
    let h = add_vertex(site, &p.pos, m)?;
    let mut faces: Vec<Simplex> = (0..=n).map(|i| face(&h, i)).collect();
    faces.push(p.neg.clone());
    let shell = ShellView::new(alt(n), faces)?;
    let target = p.chain().minus(&shell.chain());
    let cert = Certificate::new(target, Chain::term(&h, alt(n + 1)), "pocket_to_shell")?;
    Ok((shell, cert))
}

/// Completes the fan `fan` (support disjoint from the shell's) to a shell
/// equivalent to `s`; certificate bounds `s − result`.
pub fn shell_prism(site: &dyn Site, s: &ShellView, fan: &FanView) -> Result<(Simplex, ShellView, Certificate), EngineError> {
    if s.dim() != fan.dim() {
        return Err(precondition("shell and fan have different dimensions"));
    }
    let ss = s.support();
    let ts = fan.support();
    if ss.iter().any(|x| ts.binary_search(x).is_ok()) {
        return Err(precondition("shell prism needs disjoint supports"));
    }
    let k = fan.missing;
    let (sigma, tau) = (s.sign, fan.sign);
    let fk = s.faces[k].clone();
    let (fk2, c, _) = complete_fan(site, &s.without(k))?;
    let (gk2, d, _) = complete_fan(site, fan)?;
    let pocket = if sigma * tau == 1 { PocketView::new(fk2, fk)? } else { PocketView::new(fk, fk2)? };
    let (gk, q) = transport_pocket(site, &pocket, &gk2)?;
    let result = fan.complete_with(gk.clone())?;
    let mut bounding = Chain::term(&c, sigma);
    bounding.add_term(&d, -tau);
    bounding.add_scaled(&q.bounding, -tau * alt(k));
    let cert = Certificate::new(s.chain().minus(&result.chain()), bounding, "shell_prism")?;
    Ok((gk, result, cert))
}

/// Moves a shell onto the support `target` (same size) through shell prisms,
/// completing the relabelled copy of itself minus its last term.
pub fn move_shell(site: &dyn Site, s: &ShellView, target: &[u32]) -> Result<(ShellView, Certificate), EngineError> {
    let src = s.support();
    if src == target {
        return Ok((s.clone(), Certificate::zero(s.dim(), "move_shell")));
    }
    let last = src.len() - 1;
    if src.iter().all(|x| target.binary_search(x).is_err()) {
        let fan = s.relabel(target)?.without(last);
        let (_, out, cert) = shell_prism(site, s, &fan)?;
        return Ok((out, cert));
    }
    let top = src.last().max(target.last()).copied().unwrap_or(0);
    let far: Vec<u32> = (top + 1..top + 1 + src.len() as u32).collect();
    let (mid, c1) = move_shell(site, s, &far)?;
    let (out, c2) = move_shell(site, &mid, target)?;
    let cert = Certificate::combine(s.dim(), &[(1, &c1), (1, &c2)], "move_shell")?;
    Ok((out, cert))
}

/// Replaces two shells on one support by a single shell on that support;
/// certificate bounds `d + e − result`.
pub fn add_shells(site: &dyn Site, d: &ShellView, e: &ShellView) -> Result<(ShellView, Certificate), EngineError> {
    let sup = d.support();
    if e.support() != sup || d.dim() < 1 {
        return Err(precondition("add_shells needs two shells of dimension ≥ 1 on one support"));
    }
    let n = d.dim() as usize;
    let last = n + 1;
    let base = ShellView { sign: 1, faces: d.faces.clone() };
    let fan = base.without(last);
    let to_fan_form = |x: &ShellView| -> Result<(Simplex, Certificate), EngineError> {
        if x.sign == 1 && x.faces[..last] == d.faces[..last] {
            return Ok((x.faces[last].clone(), Certificate::zero(x.dim(), "add_shells")));
        }
        let top = sup[last];
        let far: Vec<u32> = (top + 1..top + 2 + last as u32).collect();
        let (mid, c1) = move_shell(site, x, &far)?;
        let (g, _, c2) = shell_prism(site, &mid, &fan)?;
        Ok((g, Certificate::combine(x.dim(), &[(1, &c1), (1, &c2)], "add_shells")?))
    };
    let (g, cd) = to_fan_form(d)?;
    let (h, ce) = to_fan_form(e)?;
    let fhat: Vec<Simplex> = d.faces[..last].to_vec();
    let (f_last, phi0, _) = complete_fan(site, &fan)?;

    let mut t1: Vec<Option<Simplex>> = fhat.iter().cloned().map(Some).collect();
    t1.push(Some(g));
    t1[0] = None;
    let (k0, phi1, _) = complete_fan(site, &FanView::new(1, 0, t1)?)?;

    let mut t2: Vec<Option<Simplex>> = fhat.iter().cloned().map(Some).collect();
    t2.push(Some(h));
    t2[1] = None;
    let (k1, phi2, _) = complete_fan(site, &FanView::new(1, 1, t2)?)?;

    let mut faces3 = vec![k0, k1];
    faces3.extend(fhat[2..].iter().cloned());
    faces3.push(f_last);
    let d3 = ShellView::new(-1, faces3)?;

    let mut bounding = cd.bounding.plus(&ce.bounding);
    for phi in [&phi0, &phi1, &phi2] {
        bounding.add_term(phi, 1);
    }
    let target = d.chain().plus(&e.chain()).minus(&d3.chain());
    let cert = Certificate::new(target, bounding, "add_shells")?;
    Ok((d3, cert))
}

/// Cones with apex `m` built by amalgamation from the cones of the faces;
/// equal inputs share one cone.
pub struct Coner<'a> {
    site: &'a dyn Site,
    apex: u32,
    memo: BTreeMap<Simplex, Simplex>,
}

impl<'a> Coner<'a> {
    pub fn new(site: &'a dyn Site, apex: u32) -> Self {
        Coner { site, apex, memo: BTreeMap::new() }
    }

    pub fn cone(&mut self, g: &Simplex) -> Result<Simplex, EngineError> {
        if let Some(h) = self.memo.get(g) {
            return Ok(h.clone());
        }
        if g.support().last().is_some_and(|&x| x >= self.apex) {
            return Err(precondition("apex must lie above the support"));
        }
        let h = if g.dim() <= 0 {
            self.site.strong2(g, &self.site.vertex(self.apex))?
        } else {
            let mut parts = vec![g.clone()];
            for i in 0..g.n_vertices() {
                parts.push(self.cone(&face(g, i))?);
            }
            let mut s = g.support().to_vec();
            s.push(self.apex);
            self.site.complete(&Functor::union(s, &parts)?)?
        };
        self.memo.insert(g.clone(), h.clone());
        Ok(h)
    }

    /// Linear extension to chains.
    pub fn cone_chain(&mut self, c: &Chain) -> Result<Chain, EngineError> {
        let mut out = Chain::zero(c.dim() + 1);
        for (f, k) in c.terms() {
            out.add_term(&self.cone(f)?, k);
        }
        Ok(out)
    }
}

/// Writes a d-cycle (d ≥ 1) as Σ kᵢ·shellᵢ using cones over its faces.
/// The certificate has zero target and checks the identity exactly.
pub fn cycle_to_shell_sum(site: &dyn Site, c: &Chain, m: u32) -> Result<(Vec<(i64, ShellView)>, Certificate), EngineError> {
    let d = c.dim();
    if d < 1 {
        return Err(precondition("cycle_to_shell_sum needs dimension ≥ 1"));
    }
    if !c.boundary(Convention::Unreduced).is_zero() {
        return Err(precondition("input is not a cycle"));
    }
    if c.support().last().is_some_and(|&x| x >= m) {
        return Err(precondition("apex must lie above the support of the cycle"));
    }
    let mut coner = Coner::new(site, m);
    let mut out = Vec::with_capacity(c.len());
    let mut residual = c.clone();
    for (f, a) in c.terms() {
        let mut faces = Vec::with_capacity(f.n_vertices() + 1);
        for j in 0..f.n_vertices() {
            faces.push(coner.cone(&face(f, j))?);
        }
        faces.push(f.clone());
        let shell = ShellView::new(1, faces)?;
        let k = alt(d as usize + 1) * a;
        residual.add_scaled(&shell.chain(), -k);
        out.push((k, shell));
    }
    let cert = Certificate::new(residual, Chain::zero(d + 1), "cycle_to_shell_sum")?;
    Ok((out, cert))
}

/// Result of reducing a cycle: one shell on {0..n+1}, or nothing when the
/// input is zero.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub shell: Option<ShellView>,
    /// Bounds `input − shell`.
    pub cert: Certificate,
}

impl Reduced {
    pub fn chain(&self, dim: i32) -> Chain {
        self.shell.as_ref().map_or(Chain::zero(dim), ShellView::chain)
    }
}

/// Cycle of dimension n ≥ 1 to a single shell with support {0, …, n+1}.
pub fn reduce_cycle(site: &dyn Site, c: &Chain) -> Result<Reduced, EngineError> {
    let n = c.dim();
    if n < 1 {
        return Err(precondition("reduce_cycle handles dimension ≥ 1; use the augmentation for dimension 0"));
    }
    if c.is_zero() {
        return Ok(Reduced { shell: None, cert: Certificate::zero(n, "trivial class") });
    }
    let m = c.support().last().copied().unwrap_or(0) + 1;
    let (pieces, c0) = cycle_to_shell_sum(site, c, m)?;
    let canon: Vec<u32> = (0..n as u32 + 2).collect();
    let mut bounding = c0.bounding.clone();
    let mut signed: Vec<ShellView> = Vec::new();
    for (k, s) in &pieces {
        let (moved, cert) = move_shell(site, s, &canon)?;
        bounding.add_scaled(&cert.bounding, *k);
        let unit = if *k > 0 { moved } else { moved.negated() };
        for _ in 0..k.abs() {
            signed.push(unit.clone());
        }
    }
    let mut acc = signed[0].clone();
    for s in &signed[1..] {
        let (next, cert) = add_shells(site, &acc, s)?;
        bounding.add_scaled(&cert.bounding, 1);
        acc = next;
    }
    let cert = Certificate::new(c.minus(&acc.chain()), bounding, "reduce_cycle")?;
    Ok(Reduced { shell: Some(acc), cert })
}

/// `f − g` with equal boundary and tops isomorphic over that boundary bounds
/// (−1)^{n+1}(f̂ − ĝ), where ĝ is f̂ with its last face swapped for g.
pub fn fill_isomorphic_pocket(site: &dyn Site, p: &PocketView) -> Result<Certificate, EngineError> {
    let n = p.dim() as usize;
    if p.is_degenerate() {
        return Ok(Certificate::zero(n as i32, "fill_isomorphic_pocket"));
    }
    let (f, g) = (&p.pos, &p.neg);
    let top = f.full_mask();
    let mut forced: Vec<Option<u32>> = vec![None; g.top().len()];
    for u in 0..top {
        let (ge, fe) = (g.trans(u, top), f.trans(u, top));
        for (y, &gy) in ge.map.iter().enumerate() {
            forced[gy as usize] = Some(fe.map[y]);
        }
    }
    let alpha = site
        .isomorphisms(g.top(), f.top(), &forced)
        .into_iter()
        .next()
        .ok_or_else(|| precondition("the two tops are not isomorphic over their common boundary"))?;
    let m = f.support().last().copied().unwrap_or(0) + 1;
    let hf = add_vertex(site, f, m)?;
    let big = hf.full_mask();
    let mut faces = hf.faces().to_vec();
    faces[top as usize] = g.top().clone();
    let mut trans = hf.transitions().clone();
    for (&(u, v), e) in trans.iter_mut() {
        if v == top {
            *e = g.trans(u, top).clone();
        } else if u == top && v == big {
            *e = alpha.then(hf.trans(top, big));
        }
    }
    let hg = Simplex::from_parts(hf.support().to_vec(), faces, trans)?;
    let mut bounding = Chain::term(&hf, alt(n + 1));
    bounding.add_term(&hg, -alt(n + 1));
    Certificate::new(p.chain(), bounding, "fill_isomorphic_pocket")
}

/// Bounds a cycle of dimension ≥ 1 by coning it off a new top vertex; fails
/// when some cone cannot be amalgamated.
pub fn bound_via_apex(site: &dyn Site, c: &Chain) -> Result<Certificate, EngineError> {
    let d = c.dim();
    if !c.boundary(Convention::Unreduced).is_zero() {
        return Err(precondition("input is not a cycle"));
    }
    let m = c.support().last().copied().unwrap_or(0) + 1;
    let mut coner = Coner::new(site, m);
    let cone = coner.cone_chain(c)?;
    Certificate::new(c.clone(), cone.scaled(alt(d as usize + 1)), "bound_via_apex")
}

/// The engine's answer to "is this cycle a boundary": a certificate, or the
/// shell representative that no simplex fills.
pub fn boundary_verdict(site: &dyn Site, c: &Chain) -> Result<Certificate, EngineError> {
    match bound_via_apex(site, c) {
        Ok(cert) => return Ok(cert),
        Err(EngineError::Obstruction(_)) => {}
        Err(e) => return Err(e),
    }
    let r = reduce_cycle(site, c)?;
    let Some(shell) = &r.shell else { return Ok(r.cert) };
    let (_, fill) = fill_shell(site, shell)?;
    Certificate::combine(c.dim(), &[(1, &r.cert), (1, &fill)], "boundary_verdict")
}

/// Outcome of fuzzing k-amalgamation.
#[derive(Clone, Debug)]
pub struct AmalgReport {
    pub k: usize,
    pub trials: usize,
    pub filled: usize,
    pub counterexample: Option<ShellView>,
}

impl AmalgReport {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.filled as f64 / self.trials as f64
        }
    }
}

/// Random (k−2)-shells on {0..k−1}, each handed to the filler.
pub fn check_amalgamation(site: &dyn Site, k: usize, trials: usize, rng: &mut dyn rand::RngCore) -> Result<AmalgReport, EngineError> {
    if k < 2 {
        return Err(precondition("k-amalgamation is checked for k ≥ 2"));
    }
    let support: Vec<u32> = (0..k as u32).collect();
    let mut filled = 0;
    let mut counterexample = None;
    for _ in 0..trials {
        let s = crate::site::random_shell(site, &support, rng)?;
        match fill_shell(site, &s) {
            Ok(_) => filled += 1,
            Err(EngineError::Obstruction(_)) => {
                counterexample.get_or_insert(s);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(AmalgReport { k, trials, filled, counterexample })
}
