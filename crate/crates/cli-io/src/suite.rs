//! The acceptance matrix, criterion by criterion. Each row runs on its own
//! site instances and seeded stream, so rows are independent.

use std::time::Instant;

use amalgam_engine::*;
use homology_solver::{h0, is_isomorphic, BoundedComplex, FiniteGroup, GroupPresentation, DEFAULT_CAP};
use hurewicz::{gamma2_group, h2, noncomm_check, realize_class, EpsilonValue};
use instances::{dlo_extreme_extension, parity_epsilon, tetra_apex, RelSite, SiteDescriptor, SiteHandle, TowerSite};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use simplex_core::{boundary_of, Chain, Convention, FanView, ShellView, Simplex};

use crate::fuzz::{self, oracle_boundary, oracle_check, Rng8};

pub const H0_CHAINS_PER_SITE: usize = 1000;
pub const H0_UNIVERSE: u32 = 10;
pub const BOUNDARY_CHAINS: usize = 10_000;
pub const CERTS_PER_LEMMA: usize = 500;
pub const H2_GROUPS: [&str; 6] = ["Z2", "Z4", "Z2xZ3", "S3", "D4", "Q8"];
pub const TOWERS: [(&str, u64); 2] = [("tower:Z8>Z4>Z2", 8), ("tower:Z6>Z2", 6)];
pub const PARITY_UNIVERSE: usize = 10;
pub const PARITY_BOUNDARIES: usize = 1000;
pub const TETRA_SHELLS: usize = 500;
pub const TETRA_AMALG_TRIALS: usize = 400;
pub const DLO_SHELLS: usize = 200;
pub const ORACLE_CYCLES_PER_SITE: usize = 200;
pub const NONCOMM_GROUPS: [&str; 3] = ["S3", "Q8", "D4"];

/// Sites every fuzzing row runs over.
pub const SHIPPED_SITES: [&str; 11] = [
    "parity:4",
    "tetra",
    "dlo",
    "groupoid:Z2",
    "groupoid:Z4",
    "groupoid:Z2xZ3",
    "groupoid:S3",
    "groupoid:D4",
    "groupoid:Q8",
    "tower:Z8>Z4>Z2",
    "tower:Z6>Z2",
];

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub tags: &'static [&'static str],
    run: fn(u64) -> Result<String, String>,
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "h0 augmentation", tags: &["h0"], run: c1_h0 },
    Criterion { id: 2, name: "boundary squares to zero", tags: &["boundary"], run: c2_boundary },
    Criterion { id: 3, name: "lemma certificates", tags: &["certificates", "engine"], run: c3_certificates },
    Criterion { id: 4, name: "groupoid H2 = Z(G)", tags: &["h2", "groupoid"], run: c4_groupoid_h2 },
    Criterion { id: 5, name: "tower H2", tags: &["h2", "tower"], run: c5_tower_h2 },
    Criterion { id: 6, name: "parity U4", tags: &["parity"], run: c6_parity },
    Criterion { id: 7, name: "tetra-free", tags: &["tetra"], run: c7_tetra },
    Criterion { id: 8, name: "DLO", tags: &["dlo"], run: c8_dlo },
    Criterion { id: 9, name: "engine vs SNF", tags: &["oracle", "snf"], run: c9_oracle },
    Criterion { id: 10, name: "non-commutative report", tags: &["noncomm"], run: c10_noncomm },
];

impl Criterion {
    pub fn matches(&self, only: &[String]) -> bool {
        only.is_empty() || only.iter().any(|o| o == &self.id.to_string() || self.tags.contains(&o.as_str()))
    }

    pub fn run(&self, seed: u64) -> Row {
        let t = Instant::now();
        let out = std::panic::catch_unwind(|| (self.run)(seed)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let (pass, detail) = match out {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        Row { id: self.id, name: self.name, pass, detail, millis: t.elapsed().as_millis() }
    }
}

/// Runs the selected rows in parallel; rows come back in criterion order.
pub fn run_suite(seed: u64, only: &[String]) -> Vec<Row> {
    let picked: Vec<&Criterion> = CRITERIA.iter().filter(|c| c.matches(only)).collect();
    picked.par_iter().map(|c| c.run(seed)).collect()
}

pub fn format_row(r: &Row) -> String {
    format!("criterion {:>2} [{}] {}: {} ({} ms)", r.id, if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail, r.millis)
}

fn site(desc: &str) -> SiteHandle {
    SiteDescriptor::parse(desc).and_then(|d| d.build()).expect("shipped site descriptor")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// 1 ---------------------------------------------------------------------

fn c1_h0(seed: u64) -> Result<String, String> {
    let mut checked = 0;
    for (si, desc) in SHIPPED_SITES.iter().enumerate() {
        let h = site(desc);
        let s = h.site();
        let mut rng = fuzz::rng(seed, 100 + si as u64);
        let mut cx = BoundedComplex::new(s, H0_UNIVERSE as usize, 0, 1, Convention::Unreduced, DEFAULT_CAP).map_err(e2s)?;
        for i in 0..H0_CHAINS_PER_SITE {
            let mut c = Chain::zero(0);
            for _ in 0..rng.gen_range(1..=4) {
                c.add_term(&s.vertex(rng.gen_range(0..H0_UNIVERSE)), rng.gen_range(-3..=3));
            }
            // half the samples are forced into the augmentation kernel
            if i % 2 == 0 {
                let eps: i64 = c.terms().map(|(_, k)| k).sum();
                c.add_term(&s.vertex(rng.gen_range(0..H0_UNIVERSE)), -eps);
            }
            let eps: i64 = c.terms().map(|(_, k)| k).sum();
            let un = h0(s, Convention::Unreduced, &c).map_err(e2s)?;
            ensure(un.group == GroupPresentation::integers(), || format!("{desc}: unreduced H0 is {}", un.group))?;
            ensure(un.is_boundary == (eps == 0), || format!("{desc}: membership disagrees with ε = {eps}"))?;
            let snf = cx.solve(&c).map_err(e2s)?.is_some();
            ensure(snf == (eps == 0), || format!("{desc}: SNF disagrees with ε = {eps}"))?;
            if let Some(cert) = &un.certificate {
                ensure(oracle_check(cert), || format!("{desc}: h0 certificate fails the checker"))?;
            }
            let re = h0(s, Convention::Reduced, &c).map_err(e2s)?;
            ensure(re.group.is_trivial(), || format!("{desc}: reduced H0 is {}", re.group))?;
            let reduced_cycle = c.boundary(Convention::Reduced).is_zero();
            if reduced_cycle {
                let ok = re.certificate.as_ref().is_some_and(oracle_check);
                ensure(ok, || format!("{desc}: reduced 0-cycle left unbounded"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} 0-chains over {} sites", SHIPPED_SITES.len()))
}

// 2 ---------------------------------------------------------------------

fn c2_boundary(seed: u64) -> Result<String, String> {
    let per_site = BOUNDARY_CHAINS.div_ceil(SHIPPED_SITES.len());
    let results: Vec<Result<usize, String>> = SHIPPED_SITES
        .par_iter()
        .enumerate()
        .map(|(si, desc)| {
            let h = site(desc);
            let s = h.site();
            let mut rng = fuzz::rng(seed, 200 + si as u64);
            // a pool per dimension, combined into many chains
            let mut pools: Vec<Vec<Simplex>> = Vec::new();
            for d in 2..=4usize {
                let mut pool = Vec::new();
                for _ in 0..24 {
                    let sup = fuzz::support(&mut rng, d + 1, 8);
                    pool.push(random_simplex(s, &sup, &mut rng).map_err(e2s)?);
                }
                pools.push(pool);
            }
            for i in 0..per_site {
                let pool = &pools[i % 3];
                let mut c = Chain::zero(pool[0].dim());
                for _ in 0..rng.gen_range(1..=4) {
                    c.add_term(&pool[rng.gen_range(0..pool.len())], rng.gen_range(-3..=3));
                }
                for conv in [Convention::Unreduced, Convention::Reduced] {
                    ensure(c.boundary(conv).boundary(conv).is_zero(), || format!("{desc}: ∂∂ ≠ 0 ({conv:?})"))?;
                }
                let once = oracle_boundary(&c);
                let mid = Chain::from_terms(c.dim() - 1, once.iter().map(|(f, k)| (f, *k))).map_err(e2s)?;
                ensure(oracle_boundary(&mid).is_empty(), || format!("{desc}: oracle ∂∂ ≠ 0"))?;
                ensure(mid == c.boundary(Convention::Unreduced), || format!("{desc}: oracle and chain boundary differ"))?;
            }
            Ok(per_site)
        })
        .collect();
    let mut total = 0;
    for r in results {
        total += r?;
    }
    Ok(format!("{total} chains of dim 2-4, zero failures"))
}

// 3 ---------------------------------------------------------------------

const CERT_SITES: [&str; 6] = ["parity:4", "tetra", "dlo", "groupoid:Z2", "groupoid:S3", "tower:Z4>Z2"];

type Gen = fn(&dyn Site, &mut Rng8) -> Result<Option<Vec<Certificate>>, EngineError>;

fn shell_dim(s: &dyn Site, rng: &mut Rng8) -> usize {
    if s.name().starts_with("parity") && rng.gen_bool(0.3) {
        3
    } else {
        rng.gen_range(1..=2)
    }
}

fn g_complete_fan(s: &dyn Site, rng: &mut Rng8) -> Result<Option<Vec<Certificate>>, EngineError> {
    let n = shell_dim(s, rng);
    let sup = fuzz::support(rng, n + 2, 8);
    let sh = fuzz::maybe_negated(random_shell(s, &sup, rng)?, rng);
    let fan = sh.without(rng.gen_range(0..n + 2));
    let (_, _, c) = complete_fan(s, &fan)?;
    Ok(Some(vec![c]))
}

fn g_transport(s: &dyn Site, rng: &mut Rng8) -> Result<Option<Vec<Certificate>>, EngineError> {
    let n = rng.gen_range(1..=2usize);
    let (a, b): (Vec<u32>, Vec<u32>) = match rng.gen_range(0..3) {
        0 => ((0..=n as u32).collect(), (10..=10 + n as u32).collect()),
        1 => ((10..=10 + n as u32).collect(), (0..=n as u32).collect()),
        _ => ((0..=n as u32).map(|x| 2 * x).collect(), (0..=n as u32).map(|x| 2 * x + 1).collect()),
    };
    let p = fuzz::random_pocket(s, &a, rng)?;
    let g = random_simplex(s, &b, rng)?;
    let (_, c) = transport_pocket(s, &p, &g)?;
    Ok(Some(vec![c]))
}

fn g_shell_to_pocket(s: &dyn Site, rng: &mut Rng8) -> Result<Option<Vec<Certificate>>, EngineError> {
    let n = shell_dim(s, rng);
    let sup = fuzz::support(rng, n + 2, 8);
    let sh = fuzz::maybe_negated(random_shell(s, &sup, rng)?, rng);
    let (_, c) = shell_to_pocket(s, &sh)?;
    Ok(Some(vec![c]))
}

fn g_shell_prism(s: &dyn Site, rng: &mut Rng8) -> Result<Option<Vec<Certificate>>, EngineError> {
    let n = rng.gen_range(1..=2usize);
    let sup: Vec<u32> = (0..n as u32 + 2).collect();
    let other: Vec<u32> = (10..10 + n as u32 + 2).collect();
    let sh = fuzz::maybe_negated(random_shell(s, &sup, rng)?, rng);
    let fan_src = fuzz::maybe_negated(random_shell(s, &other, rng)?, rng);
    let fan: FanView = fan_src.without(rng.gen_range(0..n + 2));
    let (_, _, c) = shell_prism(s, &sh, &fan)?;
    Ok(Some(vec![c]))
}

fn g_add_shells(s: &dyn Site, rng: &mut Rng8) -> Result<Option<Vec<Certificate>>, EngineError> {
    let n = rng.gen_range(1..=2usize);
    let sup = fuzz::support(rng, n + 2, 6);
    let d = fuzz::maybe_negated(random_shell(s, &sup, rng)?, rng);
    let e = fuzz::maybe_negated(random_shell(s, &sup, rng)?, rng);
    let (_, c) = add_shells(s, &d, &e)?;
    Ok(Some(vec![c]))
}

fn g_cycle_to_shell_sum(s: &dyn Site, rng: &mut Rng8) -> Result<Option<Vec<Certificate>>, EngineError> {
    let n = rng.gen_range(1..=2usize);
    let c = fuzz::random_cycle(s, n, 7, rng)?;
    let m = c.support().last().copied().unwrap_or(0) + 1 + rng.gen_range(0..3);
    let (pieces, cert) = cycle_to_shell_sum(s, &c, m)?;
    // the pieces re-add to the cycle
    let mut sum = Chain::zero(c.dim());
    for (k, sh) in &pieces {
        sum.add_scaled(&sh.chain(), *k);
    }
    if sum != c {
        return Err(EngineError::BadCertificate("shell sum does not recover the cycle".into()));
    }
    Ok(Some(vec![cert]))
}

fn g_reduce_cycle(s: &dyn Site, rng: &mut Rng8) -> Result<Option<Vec<Certificate>>, EngineError> {
    let n = rng.gen_range(1..=2usize);
    let c = fuzz::random_cycle(s, n, 6, rng)?;
    let r = reduce_cycle(s, &c)?;
    if let Some(sh) = &r.shell {
        let canon: Vec<u32> = (0..n as u32 + 2).collect();
        if sh.support() != canon {
            return Err(EngineError::BadCertificate("reduced shell is off the canonical support".into()));
        }
    }
    Ok(Some(vec![r.cert]))
}

fn g_fill_iso_pocket(s: &dyn Site, rng: &mut Rng8) -> Result<Option<Vec<Certificate>>, EngineError> {
    let n = rng.gen_range(1..=2usize);
    let sup = fuzz::support(rng, n + 1, 8);
    let p = fuzz::random_pocket(s, &sup, rng)?;
    match fill_isomorphic_pocket(s, &p) {
        Ok(c) => Ok(Some(vec![c])),
        Err(EngineError::Precondition(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

const LEMMAS: [(&str, Gen); 8] = [
    ("complete_fan", g_complete_fan),
    ("transport_pocket", g_transport),
    ("shell_to_pocket", g_shell_to_pocket),
    ("shell_prism", g_shell_prism),
    ("add_shells", g_add_shells),
    ("cycle_to_shell_sum", g_cycle_to_shell_sum),
    ("reduce_cycle", g_reduce_cycle),
    ("fill_isomorphic_pocket", g_fill_iso_pocket),
];

fn c3_certificates(seed: u64) -> Result<String, String> {
    let results: Vec<Result<(usize, usize), String>> = LEMMAS
        .par_iter()
        .enumerate()
        .map(|(li, (name, gen))| {
            let sites: Vec<SiteHandle> = CERT_SITES.iter().map(|d| site(d)).collect();
            let mut rng = fuzz::rng(seed, 300 + li as u64);
            let (mut verified, mut skipped, mut i) = (0, 0, 0);
            while verified < CERTS_PER_LEMMA {
                let s = sites[i % sites.len()].site();
                i += 1;
                match gen(s, &mut rng) {
                    Ok(Some(certs)) => {
                        for c in &certs {
                            ensure(oracle_check(c) && c.check(), || format!("{name} on {}: certificate fails", s.name()))?;
                        }
                        verified += 1;
                    }
                    Ok(None) => skipped += 1,
                    Err(e) => return Err(format!("{name} on {}: {e}", s.name())),
                }
                if skipped > 20 * CERTS_PER_LEMMA {
                    return Err(format!("{name}: too many inputs outside the precondition"));
                }
            }
            Ok((verified, skipped))
        })
        .collect();
    let mut parts = Vec::new();
    for ((name, _), r) in LEMMAS.iter().zip(results) {
        let (v, _) = r?;
        parts.push(format!("{name} {v}"));
    }
    Ok(parts.join(", "))
}

// 4, 5 ------------------------------------------------------------------

fn h2_row(t: &TowerSite, want: &FiniteGroup) -> Result<GroupPresentation, String> {
    let r = h2(t).map_err(e2s)?;
    ensure(is_isomorphic(&r.table, want), || format!("{}: H2 = {} but expected {}", t.name, r.group, want.presentation()))?;
    ensure(r.all_consistent(), || format!("{}: realize/fill witnesses disagree", t.name))?;
    for w in &r.witnesses {
        ensure(oracle_check(&w.shell_cert), || format!("{}: pocket-to-shell certificate fails", t.name))?;
        if let Some(c) = &w.fill {
            ensure(oracle_check(c), || format!("{}: fill certificate fails", t.name))?;
        }
    }
    let gam = gamma2_group(t, 0, 1).map_err(e2s)?;
    ensure(is_isomorphic(&gam, &r.table), || format!("{}: gamma2 has order {} vs {}", t.name, gam.order(), r.table.order()))?;
    Ok(r.group)
}

fn c4_groupoid_h2(_seed: u64) -> Result<String, String> {
    let mut parts = Vec::new();
    for name in H2_GROUPS {
        let g = FiniteGroup::by_name(name).ok_or("unknown group")?;
        let z = g.subgroup(&g.center(), "Z");
        parts.push(format!("{name}={}", h2_row(&TowerSite::groupoid(g), &z)?));
    }
    Ok(format!("H2: {}", parts.join(", ")))
}

fn c5_tower_h2(_seed: u64) -> Result<String, String> {
    let mut parts = Vec::new();
    for (desc, want) in TOWERS {
        let h = site(desc);
        let t = h.tower().ok_or("tower descriptor")?;
        let g = h2_row(t, &FiniteGroup::cyclic(want as usize))?;
        ensure(g == GroupPresentation::abelian(&[want]), || format!("{desc}: {g}"))?;
        parts.push(format!("{desc} -> {g}"));
    }
    Ok(parts.join(", "))
}

// 6 ---------------------------------------------------------------------

/// 3-shell on {0..4} whose only related face is {0,1,2,3}.
pub fn parity_odd_shell(site: &RelSite) -> ShellView {
    let faces: Vec<Simplex> = (0..5u32)
        .map(|skip| {
            let sup: Vec<u32> = (0..5).filter(|&x| x != skip).collect();
            let want = skip == 4;
            site.normalized_simplices(&sup).into_iter().find(|f| RelSite::top_bit(f) == want).expect("both parity structures exist")
        })
        .collect();
    ShellView::new(1, faces).expect("faces agree on overlaps")
}

fn c6_parity(seed: u64) -> Result<String, String> {
    let site = RelSite::parity(4);
    let d = parity_odd_shell(&site);
    ensure(parity_epsilon(&d.chain()) == 1, || "explicit shell has ε = 0".into())?;
    let none = homology_solver::find_bounding_chain(&site, &d.chain(), PARITY_UNIVERSE, DEFAULT_CAP).map_err(e2s)?;
    ensure(none.is_none(), || "SNF found a bounding chain for the odd shell".into())?;
    ensure(matches!(boundary_verdict(&site, &d.chain()), Err(EngineError::Obstruction(_))), || "engine bounded the odd shell".into())?;

    let mut rng = fuzz::rng(seed, 600);
    for _ in 0..PARITY_BOUNDARIES {
        let sup = fuzz::support(&mut rng, 5, 12);
        let g = random_simplex(&site, &sup, &mut rng).map_err(e2s)?;
        let b = ShellView::of_boundary(&g).map_err(e2s)?;
        ensure(parity_epsilon(&b.chain()) == 0, || "a 4-simplex boundary has ε = 1".into())?;
    }

    let (d3, cert) = add_shells(&site, &d, &d).map_err(e2s)?;
    ensure(oracle_check(&cert), || "add_shells certificate fails".into())?;
    ensure(parity_epsilon(&d3.chain()) == 0, || "d + d has odd ε".into())?;
    let fill = boundary_verdict(&site, &d3.chain()).map_err(|e| format!("d + d was not bounded: {e}"))?;
    ensure(oracle_check(&fill), || "fill certificate for d + d fails".into())?;
    Ok(format!("odd shell unbounded in universe {PARITY_UNIVERSE}; {PARITY_BOUNDARIES} boundaries even; d+d bounded by {} simplices", fill.bounding.len()))
}

// 7 ---------------------------------------------------------------------

fn c7_tetra(seed: u64) -> Result<String, String> {
    let site = RelSite::tetra();
    let mut rng = fuzz::rng(seed, 700);
    for _ in 0..TETRA_SHELLS {
        let sh = fuzz::maybe_negated(random_shell(&site, &[0, 1, 2, 3], &mut rng).map_err(e2s)?, &mut rng);
        let apex = tetra_apex(&sh.support());
        let mut coner = Coner::new(&site, apex);
        let cone = coner.cone_chain(&sh.chain()).map_err(e2s)?;
        let cert = Certificate::new(sh.chain(), cone.scaled(-1), "tetra apex").map_err(e2s)?;
        ensure(oracle_check(&cert), || "apex certificate fails".into())?;
    }
    let rep = check_amalgamation(&site, 4, TETRA_AMALG_TRIALS, &mut rng).map_err(e2s)?;
    let bad = rep.counterexample.ok_or("no unfillable 2-shell found")?;
    ensure(bad.faces.iter().all(RelSite::top_bit), || "counterexample is not all-R".into())?;
    // exhaustive search: no 3-simplex on the same 4 points has this boundary
    let sup = bad.support();
    let fillers = site.normalized_simplices(&sup).into_iter().filter(|f| boundary_of(f, Convention::Unreduced).scaled(bad.sign) == bad.chain()).count();
    ensure(fillers == 0, || format!("{fillers} simplices on {sup:?} fill the all-R shell"))?;
    // as a class it still dies inside those 4 points
    let snf = homology_solver::find_bounding_chain(&site, &bad.chain(), 4, DEFAULT_CAP).map_err(e2s)?;
    ensure(snf.is_some(), || "SNF finds no bounding chain over 4 points".into())?;
    Ok(format!(
        "{TETRA_SHELLS} shells bounded via apex; 4-amalgamation filled {}/{}; the all-R shell has no single filler among {} simplices on {sup:?}",
        rep.filled,
        rep.trials,
        site.normalized_simplices(&sup).len()
    ))
}

// 8 ---------------------------------------------------------------------

fn c8_dlo(seed: u64) -> Result<String, String> {
    let site = RelSite::dlo();
    let mut rng = fuzz::rng(seed, 800);
    let mut cyclic = 0;
    for _ in 0..DLO_SHELLS {
        let sup = fuzz::support(&mut rng, 3, 8);
        let sh = random_shell(&site, &sup, &mut rng).map_err(e2s)?;
        if fill_shell(&site, &sh).is_err() {
            cyclic += 1;
        }
        let apex = dlo_extreme_extension(&sup);
        let mut coner = Coner::new(&site, apex);
        let cone = coner.cone_chain(&sh.chain()).map_err(e2s)?;
        let cert = Certificate::new(sh.chain(), cone, "dlo apex").map_err(e2s)?;
        ensure(oracle_check(&cert), || "apex certificate fails".into())?;
    }
    Ok(format!("{DLO_SHELLS} 1-shells bounded via the top apex ({cyclic} of them cyclic)"))
}

// 9 ---------------------------------------------------------------------

struct OracleSite {
    desc: &'static str,
    universe: usize,
    dim: i32,
}

const ORACLE_SITES: [OracleSite; 6] = [
    OracleSite { desc: "parity:4", universe: 7, dim: 3 },
    OracleSite { desc: "tetra", universe: 6, dim: 2 },
    OracleSite { desc: "dlo", universe: 6, dim: 1 },
    OracleSite { desc: "groupoid:Z2", universe: 4, dim: 2 },
    OracleSite { desc: "groupoid:Q8", universe: 4, dim: 2 },
    OracleSite { desc: "groupoid:S3", universe: 6, dim: 2 },
];

/// A cycle in the normalized complex that no single simplex fills.
fn known_cycle(h: &SiteHandle, cx: &BoundedComplex, dim: i32) -> Result<Chain, String> {
    if let Some(t) = h.tower() {
        let z = t.top_group().center().last().copied().unwrap_or(0);
        let p = realize_class(t, &EpsilonValue::from_top(t, z)).map_err(e2s)?;
        return Ok(p.chain());
    }
    let rel = h.rel().ok_or("unknown site")?;
    let list = &cx.simplices_by_dim[&dim];
    let pick = |sup: &[u32], want: &dyn Fn(&Simplex) -> bool| -> Result<Simplex, String> {
        list.iter().find(|f| f.support() == sup && want(f)).cloned().ok_or_else(|| format!("no normalized simplex on {sup:?}"))
    };
    let shell_on = |n: u32, want: &dyn Fn(u32, &Simplex) -> bool| -> Result<Chain, String> {
        let faces = (0..n)
            .map(|skip| {
                let sup: Vec<u32> = (0..n).filter(|&x| x != skip).collect();
                pick(&sup, &|f| want(skip, f))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ShellView::new(1, faces).map_err(e2s)?.chain())
    };
    match rel.kind {
        instances::RelKind::Parity(_) => shell_on(5, &|skip, f| RelSite::top_bit(f) == (skip == 4)),
        instances::RelKind::Tetra => shell_on(4, &|_, f| RelSite::top_bit(f)),
        // 0 < 1 < 2 < 0
        instances::RelKind::Dlo => shell_on(3, &|skip, f| {
            let rel = &f.top().rel;
            let lower_first = rel.first().is_some_and(|t| t[0] == 0);
            lower_first != (skip == 1)
        }),
    }
}

fn c9_oracle(seed: u64) -> Result<String, String> {
    let results: Vec<Result<String, String>> = ORACLE_SITES
        .par_iter()
        .enumerate()
        .map(|(si, os)| {
            let h = site(os.desc);
            let s = h.site();
            let mut cx = BoundedComplex::new(s, os.universe, os.dim, os.dim + 1, Convention::Unreduced, DEFAULT_CAP).map_err(e2s)?;
            let known = known_cycle(&h, &cx, os.dim)?;
            ensure(known.boundary(Convention::Unreduced).is_zero(), || format!("{}: known cycle is not a cycle", os.desc))?;
            ensure(cx.vector(&known).is_some(), || format!("{}: known cycle is outside the normalized complex", os.desc))?;
            let uppers = cx.simplices_by_dim[&(os.dim + 1)].clone();
            let mut rng = fuzz::rng(seed, 900 + si as u64);
            let (mut yes, mut no) = (0, 0);
            for _ in 0..ORACLE_CYCLES_PER_SITE {
                let mut c = Chain::zero(os.dim);
                for _ in 0..rng.gen_range(0..=2) {
                    let g = &uppers[rng.gen_range(0..uppers.len())];
                    c.add_scaled(&boundary_of(g, Convention::Unreduced), rng.gen_range(-2..=2));
                }
                c.add_scaled(&known, rng.gen_range(-2..=2));
                let snf = cx.solve(&c).map_err(e2s)?;
                if let Some(b) = &snf {
                    let cert = Certificate::new(c.clone(), b.clone(), "snf").map_err(e2s)?;
                    ensure(oracle_check(&cert), || format!("{}: SNF solution fails the checker", os.desc))?;
                }
                let engine = match boundary_verdict(s, &c) {
                    Ok(cert) => {
                        ensure(oracle_check(&cert), || format!("{}: engine certificate fails", os.desc))?;
                        true
                    }
                    Err(EngineError::Obstruction(_)) => false,
                    Err(e) => return Err(format!("{}: {e}", os.desc)),
                };
                ensure(engine == snf.is_some(), || format!("{}: engine says {engine}, SNF says {}", os.desc, snf.is_some()))?;
                if engine {
                    yes += 1;
                } else {
                    no += 1;
                }
            }
            Ok(format!("{} {yes}/{no}", os.desc))
        })
        .collect();
    let mut parts = Vec::new();
    for r in results {
        parts.push(r?);
    }
    Ok(format!("bounded/unbounded agree: {}", parts.join(", ")))
}

// 10 --------------------------------------------------------------------

fn c10_noncomm(_seed: u64) -> Result<String, String> {
    let mut parts = Vec::new();
    for name in NONCOMM_GROUPS {
        let t = TowerSite::groupoid(FiniteGroup::by_name(name).ok_or("unknown group")?);
        let r = noncomm_check(&t, 0, 1).map_err(e2s)?;
        ensure(r.passes(), || format!("{r}"))?;
        parts.push(format!("{name}: |F|={} |bind|={}", r.f_order, r.binding_order));
    }
    Ok(parts.join(", "))
}
