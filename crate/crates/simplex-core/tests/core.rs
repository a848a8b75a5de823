use amalgam_engine::{random_simplex, Site};
use instances::{SiteDescriptor, SiteHandle, TowerSite};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simplex_core::json::{chain_from_str, chain_to_string, simplex_from_str, simplex_to_string};
use simplex_core::*;

fn site(desc: &str) -> SiteHandle {
    SiteDescriptor::parse(desc).unwrap().build().unwrap()
}

fn rnd(s: &dyn Site, sup: &[u32], seed: u64) -> Simplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_simplex(s, sup, &mut rng).unwrap()
}

fn members(d: &DownSet) -> Vec<Mask> {
    (0..d.members.len() as Mask).filter(|&m| d.contains(m)).collect()
}

#[test]
fn downset_localize_examples() {
    let p = DownSet::power_set(3);
    assert_eq!(p.localize(0b001).unwrap(), DownSet::power_set(2));

    let b = DownSet::boundary_of(2);
    assert_eq!(members(&b.localize(0b01).unwrap()), vec![0]);

    // brute force: u ⊆ {0,1} is in the localization iff u ∪ {2} is not everything
    let b3 = DownSet::boundary_of(3);
    let loc = b3.localize(0b100).unwrap();
    for u in 0..4 as Mask {
        assert_eq!(loc.contains(u), b3.contains(u | 0b100), "u = {u:#b}");
    }
    assert!(loc.is_downward_closed());
    assert_eq!(members(&loc), vec![0, 1, 2]);

    assert!(b.localize(0b11).is_err());
}

#[test]
fn simplex_localize_examples() {
    let h = site("groupoid:Z2");
    let f = rnd(h.site(), &[0, 1, 2], 1);
    assert_eq!(f.localize(0), Functor::from_simplex(&f));
    let loc = f.localize(0b100);
    assert_eq!(loc.support, vec![0, 1]);
    assert_eq!(loc.faces[1].as_ref(), Some(f.face_set(0b101)));
    assert_eq!(loc.faces[2].as_ref(), Some(f.face_set(0b110)));
    assert_eq!(loc.faces[0].as_ref(), Some(f.face_set(0b100)));
}

#[test]
fn face_examples() {
    let h = site("dlo");
    let e = rnd(h.site(), &[3, 7], 0);
    assert_eq!(e.face(0).unwrap().support(), &[7]);
    assert_eq!(e.face(1).unwrap().support(), &[3]);
    assert!(e.face(2).is_err());
    let f = rnd(h.site(), &[0, 1, 2], 0);
    assert_eq!(f.face(1).unwrap().support(), &[0, 2]);
}

#[test]
fn boundary_of_two_simplex() {
    let h = site("tetra");
    let f = rnd(h.site(), &[0, 1, 2], 4);
    let want = Chain::simplex(&f.face(0).unwrap())
        .minus(&Chain::simplex(&f.face(1).unwrap()))
        .plus(&Chain::simplex(&f.face(2).unwrap()));
    assert_eq!(Chain::simplex(&f).boundary(Convention::Unreduced), want);
    assert_eq!(f.face(0).unwrap().support(), &[1, 2]);
}

#[test]
fn dim_zero_conventions() {
    let h = site("parity:4");
    let v = h.site().vertex(3);
    let c = Chain::simplex(&v);
    assert!(c.boundary(Convention::Unreduced).is_zero());
    let r = c.boundary(Convention::Reduced);
    assert_eq!(r.dim(), -1);
    assert_eq!(r.len(), 1);
}

#[test]
fn classify_examples() {
    let h = site("dlo");
    let f = rnd(h.site(), &[0, 1, 2, 3], 2);
    let shell = Chain::simplex(&f).boundary(Convention::Unreduced);
    assert_eq!(classify(&shell, Convention::Unreduced), Kind::Shell);

    let face = f.face(1).unwrap();
    let fan = shell.plus(&Chain::simplex(&face));
    assert_eq!(classify(&fan, Convention::Unreduced), Kind::Fan);
    assert_eq!(classify(&fan.boundary(Convention::Unreduced), Convention::Unreduced), Kind::Shell);

    assert_eq!(classify(&Chain::simplex(&f), Convention::Unreduced), Kind::BoundaryCandidate);

    // two parity 2-simplices on the same 3 points are always different tops
    let p = site("parity:4");
    let g = rnd(p.site(), &[0, 1, 2, 3], 0);
    let pocket = Chain::simplex(&g).minus(&Chain::simplex(&recomplete_other(p.site(), &g)));
    assert_eq!(classify(&pocket, Convention::Unreduced), Kind::Pocket);
}

/// The other structure on the same points with the same boundary.
fn recomplete_other(s: &dyn Site, g: &Simplex) -> Simplex {
    s.normalized_simplices(g.support())
        .into_iter()
        .find(|x| x != g && Chain::simplex(x).boundary(Convention::Unreduced) == Chain::simplex(g).boundary(Convention::Unreduced))
        .expect("a second top exists")
}

#[test]
fn validate_examples() {
    let h = site("groupoid:S3");
    let s = h.site();
    let f = rnd(s, &[0, 1], 3);
    assert!(validate_simplex(&f, s).ok());

    // both vertices sent into the same object
    let t = h.tower().unwrap();
    let a = t.closed_on(&[0]);
    let n = a.len();
    let bad = Simplex::from_top(
        vec![0, 1],
        vec![ClosedSet::empty(), a.clone(), a.clone(), a],
        vec![Embedding { map: vec![] }, Embedding::identity(n), Embedding::identity(n), Embedding::identity(n)],
    )
    .unwrap();
    let rep = validate_simplex(&bad, s);
    assert!(rep.has(Clause::Independence), "{rep:?}");

    // a transition that does not commute with the composite through an edge
    let p = site("parity:4");
    let g = rnd(p.site(), &[0, 1, 2], 0);
    let mut trans = g.transitions().clone();
    let e = trans.get_mut(&(0b001, 0b111)).unwrap();
    e.map[0] = (e.map[0] + 1) % 3;
    let broken = Simplex::from_parts(g.support().to_vec(), g.faces().to_vec(), trans).unwrap();
    assert!(validate_simplex(&broken, p.site()).has(Clause::Functoriality));
}

#[test]
fn isomorphism_examples() {
    let p = site("parity:4");
    let tops = p.site().normalized_simplices(&[0, 1, 2, 3]);
    assert_eq!(tops.len(), 2);
    assert!(functors_isomorphic(&tops[0], &tops[0], p.site()).is_some());
    assert!(functors_isomorphic(&tops[0], &tops[1], p.site()).is_none());

    // groupoid edges with different connecting morphisms are isomorphic
    let g = site("groupoid:Z4");
    let edges: Vec<Simplex> = (0..6).map(|k| rnd(g.site(), &[0, 1], k)).collect();
    for a in &edges {
        for b in &edges {
            assert!(functors_isomorphic(a, b, g.site()).is_some());
        }
    }
}

#[test]
fn chain_group_laws() {
    let h = site("dlo");
    let f = rnd(h.site(), &[0, 1], 0);
    let g = rnd(h.site(), &[0, 2], 0);
    let c = Chain::term(&f, 3).plus(&Chain::term(&g, -1));
    let d = Chain::term(&f, -3);
    assert_eq!(c.plus(&d).minus(&d), c);
    let s = c.plus(&d);
    assert_eq!(s.len(), 1);
    assert!(s.terms().all(|(_, k)| k != 0));
    assert!(Chain::from_terms(1, [(&rnd(h.site(), &[0, 1, 2], 0), 1)]).is_err());
}

fn groupoid_sites() -> Vec<SiteHandle> {
    vec![site("groupoid:Z2"), site("groupoid:S3"), site("tower:Z4>Z2")]
}

fn all_sites() -> Vec<SiteHandle> {
    ["parity:4", "tetra", "dlo", "groupoid:Z3", "groupoid:Q8", "tower:Z4>Z2"].iter().map(|d| site(d)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boundary_squares_to_zero(seed in any::<u64>(), which in 0usize..6, dim in 2usize..=3) {
        let hs = all_sites();
        let s = hs[which].site();
        let sup: Vec<u32> = (0..=dim as u32).map(|i| i * 2 + (seed % 3) as u32).collect();
        let a = rnd(s, &sup, seed);
        let b = rnd(s, &sup, seed ^ 0xabc);
        let c = Chain::term(&a, 2).plus(&Chain::term(&b, -5));
        prop_assert!(c.boundary(Convention::Unreduced).boundary(Convention::Unreduced).is_zero());
    }

    #[test]
    fn faces_anticommute(seed in any::<u64>(), which in 0usize..6) {
        let hs = all_sites();
        let f = rnd(hs[which].site(), &[1, 2, 4, 5], seed);
        for j in 0..4 {
            for i in 0..j {
                let l = f.face(j).unwrap().face(i).unwrap();
                let r = f.face(i).unwrap().face(j - 1).unwrap();
                prop_assert_eq!(l, r);
            }
        }
    }

    #[test]
    fn localize_composes(seed in any::<u64>(), which in 0usize..3, t in 0u32..16, t2 in 0u32..16) {
        let hs = groupoid_sites();
        let f = rnd(hs[which].site(), &[0, 1, 2, 3], seed);
        let t = t as Mask;
        let once = f.localize(t).into_simplex().unwrap();
        let rest = f.full_mask() & !t;
        let t2 = (t2 as Mask) & mask::full(mask::popcount(rest));
        let twice = once.localize(t2);
        let union = t | mask::expand(t2, rest);
        prop_assert_eq!(twice, f.localize(union));
    }

    #[test]
    fn fan_boundary_is_shell(seed in any::<u64>(), which in 0usize..6, k in 0usize..4) {
        let hs = all_sites();
        let f = rnd(hs[which].site(), &[0, 1, 2, 3], seed);
        let fan = ShellView::of_boundary(&f).unwrap().without(k);
        prop_assert_eq!(classify(&fan.chain().boundary(Convention::Unreduced), Convention::Unreduced), Kind::Shell);
    }

    #[test]
    fn isomorphism_is_an_equivalence(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let h = site("groupoid:S3");
        let s = h.site();
        let xs = [rnd(s, &[0, 1, 2], s1), rnd(s, &[0, 1, 2], s2), rnd(s, &[0, 1, 2], s3)];
        let iso = |a: &Simplex, b: &Simplex| functors_isomorphic(a, b, s).is_some();
        for a in &xs {
            prop_assert!(iso(a, a));
            for b in &xs {
                prop_assert_eq!(iso(a, b), iso(b, a));
                for c in &xs {
                    if iso(a, b) && iso(b, c) {
                        prop_assert!(iso(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), which in 0usize..6, dim in 0usize..=3) {
        let hs = all_sites();
        let s = hs[which].site();
        let sup: Vec<u32> = (0..=dim as u32).map(|i| 3 * i + 1).collect();
        let f = rnd(s, &sup, seed);
        let text = simplex_to_string(&f);
        let back = simplex_from_str(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(simplex_to_string(&back), text);

        let c = Chain::term(&f, -2).plus(&Chain::term(&rnd(s, &sup, seed + 1), 7));
        let ct = chain_to_string(&c);
        let cb = chain_from_str(&ct).unwrap();
        prop_assert_eq!(&cb, &c);
        prop_assert_eq!(chain_to_string(&cb), ct);
    }
}

#[test]
fn tower_vertex_sets_have_every_hom_set() {
    let t = TowerSite::groupoid(homology_solver::FiniteGroup::q8());
    let cs = t.closed_on(&[0, 1]);
    let mors = cs.elems.iter().filter(|e| matches!(e, Elem::Mor(..))).count();
    assert_eq!(mors, 4 * 8);
}
