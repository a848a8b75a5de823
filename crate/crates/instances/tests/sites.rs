use amalgam_engine::*;
use hurewicz::{epsilon2, EdgeSelection};
use instances::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplex_core::*;

fn site(desc: &str) -> SiteHandle {
    SiteDescriptor::parse(desc).unwrap().build().unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn with_bit(s: &dyn Site, sub: &[u32], bit: bool) -> Simplex {
    s.normalized_simplices(sub).into_iter().find(|f| RelSite::top_bit(f) == bit).unwrap()
}

fn without(pts: &[u32], skip: u32) -> Vec<u32> {
    pts.iter().copied().filter(|&x| x != skip).collect()
}

#[test]
fn descriptors() {
    for d in ["parity:4", "parity:6", "tetra", "dlo", "groupoid:Z2", "groupoid:Z2xZ3", "groupoid:D4", "tower:Z8>Z4>Z2"] {
        let h = site(d);
        assert!(!h.site().name().is_empty(), "{d}");
    }
    let j = site(r#"{"kind":"groupoid","params":{"group":"Q8"}}"#);
    assert_eq!(j.tower().unwrap().top_group().order(), 8);
    let t = site(r#"{"kind":"groupoid","params":{"table":[[0,1],[1,0]]}}"#);
    assert_eq!(t.tower().unwrap().top_group().order(), 2);

    for bad in ["nope", "groupoid:W7", "tower:Z4>Z3", r#"{"kind":"groupoid","params":{"table":[[0,1],[0,1]]}}"#, "parity:1"] {
        assert!(SiteDescriptor::parse(bad).and_then(|d| d.build()).is_err(), "{bad}");
    }
}

#[test]
fn groupoid_closed_sets() {
    let h = site("groupoid:S3");
    let t = h.tower().unwrap();
    let cs = t.closed_on(&[0, 1, 2]);
    for a in 0..3 {
        for b in 0..3 {
            let n = cs.elems.iter().filter(|e| matches!(e, Elem::Mor(0, x, y, _) if *x == a && *y == b)).count();
            assert_eq!(n, 6);
        }
    }
    assert!(t.top_group().is_group());

    // closure: idempotent and monotone
    let all: Vec<u32> = (0..cs.len() as u32).collect();
    let mut r = rng(1);
    for _ in 0..50 {
        let mut seeds = all.clone();
        seeds.shuffle(&mut r);
        seeds.truncate(r.gen_range(0..4));
        let c = t.closure(&cs, &seeds);
        assert_eq!(t.closure(&cs, &c), c);
        assert!(seeds.iter().all(|s| c.contains(s)));
        let mut more = seeds.clone();
        more.push(*all.choose(&mut r).unwrap());
        let c2 = t.closure(&cs, &more);
        assert!(c.iter().all(|x| c2.contains(x)));
    }
}

#[test]
fn groupoid_two_and_four_amalgamation() {
    let h = site("groupoid:Z3");
    let s = h.site();
    let e = s.strong2(&s.vertex(0), &s.vertex(1)).unwrap();
    assert_eq!(e.top(), &h.tower().unwrap().closed_on(&[0, 1]));
    assert!(validate_simplex(&e, s).ok());

    // 4-amalgamation succeeds exactly on shells of trivial class
    let z2 = site("groupoid:Z2");
    let t = z2.tower().unwrap();
    let mut r = rng(2);
    let (mut filled, mut stuck) = (0, 0);
    for _ in 0..80 {
        let sh = random_shell(t, &[0, 1, 2, 3], &mut r).unwrap();
        let triv = epsilon2(&sh.chain(), t, EdgeSelection::Least).unwrap().is_identity();
        match fill_shell(t, &sh) {
            Ok((_, cert)) => {
                assert!(triv);
                assert!(cert.check());
                filled += 1;
            }
            Err(EngineError::Obstruction(o)) => {
                assert!(!triv);
                assert!(!o.reason.is_empty());
                stuck += 1;
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!(filled > 0 && stuck > 0, "{filled} {stuck}");
}

#[test]
fn parity_amalgamation() {
    let h = site("parity:4");
    let s = h.site();
    let e = s.strong2(&s.vertex(0), &s.vertex(1)).unwrap();
    assert!(e.top().rel.is_empty());

    // an odd count on four faces forces the fifth bit on
    let pts = [0, 1, 2, 3, 4];
    for ones in 0..4usize {
        let faces: Vec<Option<Simplex>> = (0..5)
            .map(|i| if i == 4 { None } else { Some(with_bit(s, &without(&pts, i as u32), i < ones)) })
            .collect();
        let fan = FanView::new(1, 4, faces).unwrap();
        let (missing, filler, _) = complete_fan(s, &fan).unwrap();
        assert_eq!(RelSite::top_bit(&missing), ones % 2 == 1);
        assert!(h.rel().unwrap().is_model(filler.top()));
    }

    // an odd shell cannot be filled
    let faces: Vec<Simplex> = (0..5).map(|i| with_bit(s, &without(&pts, i), i == 0)).collect();
    let odd = ShellView::new(1, faces).unwrap();
    assert_eq!(parity_epsilon(&odd.chain()), 1);
    assert!(matches!(fill_shell(s, &odd), Err(EngineError::Obstruction(_))));
}

#[test]
fn tetra_apex_keeps_sides_free() {
    let h = site("tetra");
    let s = h.site();
    assert_eq!(tetra_apex(&[]), 0);
    let tri = with_bit(s, &[0, 1, 2], true);
    let a = tetra_apex(tri.support());
    assert_eq!(a, 3);
    let t = add_vertex(s, &tri, a).unwrap();
    let top = t.top();
    assert!(top.has_tuple(&[0, 1, 2]));
    for side in [[0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        assert!(!top.has_tuple(&side));
    }
    assert!(h.rel().unwrap().is_model(top));
}

#[test]
fn dlo_extension_and_shells() {
    assert!(dlo_extreme_extension(&[1, 7]) > 7);
    let h = site("dlo");
    let s = h.site();
    let mut r = rng(3);
    for _ in 0..200 {
        let mut pts: Vec<u32> = (0..8).collect();
        pts.shuffle(&mut r);
        pts.truncate(3);
        pts.sort_unstable();
        let sh = random_shell(s, &pts, &mut r).unwrap();
        let cert = bound_via_apex(s, &sh.chain()).unwrap();
        assert!(cert.check());
        assert!(cert.bounding.support().contains(&dlo_extreme_extension(&pts)));
    }
}

#[test]
fn dlo_elementary_is_order_preserving() {
    let site = RelSite::dlo();
    let structs = site.all_structures(3);
    assert_eq!(structs.len(), 6);
    let rank = |tuples: &Vec<Vec<u32>>, k: usize| -> Vec<usize> {
        (0..k).map(|i| tuples.iter().filter(|t| t[1] == i as u32).count()).collect()
    };
    let maps: Vec<Vec<u32>> = vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]];
    for a in &structs {
        for b in &structs {
            let (sa, sb) = (RelSite::structure(&[0, 1, 2], a), RelSite::structure(&[5, 6, 7], b));
            let (ra, rb) = (rank(a, 3), rank(b, 3));
            for m in &maps {
                let e = Embedding { map: m.clone() };
                let by_ranks = (0..3).all(|i| (0..3).all(|j| (ra[i] < ra[j]) == (rb[m[i] as usize] < rb[m[j] as usize])));
                assert_eq!(site.elementary(&sa, &sb, &e), by_ranks);
            }
        }
    }
}

#[test]
fn tower_projection_laws() {
    let h = site("tower:Z8>Z4>Z2");
    let t = h.tower().unwrap();
    assert_eq!(t.n_levels(), 3);
    for l in 0..3u8 {
        assert_eq!(tower_project(Elem::Mor(0, 1, 1, 0), l, t).unwrap(), Elem::Mor(l, 1, 1, 0));
    }
    for x in 0..8 {
        let m = Elem::Mor(0, 0, 2, x);
        let via = tower_project(tower_project(m, 1, t).unwrap(), 2, t).unwrap();
        assert_eq!(via, tower_project(m, 2, t).unwrap());
    }
    for (to, size) in [(1u8, 2), (2, 4)] {
        let order = t.levels[to as usize].order() as u32;
        for y in 0..order {
            let fiber = (0..8).filter(|&x| tower_project(Elem::Mor(0, 3, 3, x), to, t).unwrap() == Elem::Mor(to, 3, 3, y)).count();
            assert_eq!(fiber, size);
        }
    }
    assert_eq!(tower_project(Elem::Obj(0, 4), 2, t).unwrap(), Elem::Obj(2, 4));
    assert!(tower_project(Elem::Mor(1, 0, 0, 0), 0, t).is_err());
    assert!(tower_project(Elem::Pt(0), 1, t).is_err());
    assert!(tower_project(Elem::Obj(0, 0), 3, t).is_err());
}

#[test]
fn supported_amalgamation_levels() {
    assert_eq!(site("groupoid:S3").site().supported_ca(), 3);
    assert_eq!(site("parity:4").site().supported_ca(), 4);
}

fn subset(r: &mut ChaCha8Rng, all: &[u32]) -> Vec<u32> {
    all.iter().copied().filter(|_| r.gen_bool(0.4)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn relational_models_survive_amalgamation(seed in any::<u64>(), which in 0usize..3, k in 3usize..7) {
        let h = site(["parity:4", "tetra", "dlo"][which]);
        let s = h.site();
        let sup: Vec<u32> = (0..k as u32).collect();
        let f = random_simplex(s, &sup, &mut rng(seed)).unwrap();
        let rel = h.rel().unwrap();
        prop_assert!(f.faces().iter().all(|cs| rel.is_model(cs)));
        prop_assert!(validate_simplex(&f, s).ok());
    }

    #[test]
    fn independence_symmetric_and_monotone(seed in any::<u64>(), which in 0usize..3) {
        let h = site(["groupoid:Z2", "tetra", "tower:Z4>Z2"][which]);
        let s = h.site();
        let f = random_simplex(s, &[0, 1, 2, 3], &mut rng(seed)).unwrap();
        let amb = f.top();
        let all: Vec<u32> = (0..amb.len() as u32).collect();
        let mut r = rng(seed ^ 77);
        for _ in 0..20 {
            let (a, b, o) = (subset(&mut r, &all), subset(&mut r, &all), subset(&mut r, &all));
            let ind = s.independent(amb, &a, &b, &o);
            prop_assert_eq!(ind, s.independent(amb, &b, &a, &o));
            if ind {
                let smaller: Vec<u32> = a.iter().copied().filter(|_| r.gen_bool(0.5)).collect();
                prop_assert!(s.independent(amb, &smaller, &b, &o));
            }
        }
    }
}
