use amalgam_engine::{add_shells, fill_shell, random_shell, random_simplex, reduce_cycle};
use homology_solver::{is_isomorphic, FiniteGroup, GroupPresentation};
use hurewicz::*;
use instances::TowerSite;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simplex_core::{boundary_of, Chain, Convention, ShellView};

fn groupoid(name: &str) -> TowerSite {
    TowerSite::groupoid(FiniteGroup::by_name(name).unwrap())
}

const GROUPS: [&str; 6] = ["Z2", "Z4", "Z2xZ3", "S3", "D4", "Q8"];

#[test]
fn compatible_edges_give_identity() {
    let site = groupoid("S3");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let f = random_simplex(&site, &[0, 1, 2], &mut rng).unwrap();
        // any simplex built by completion composes its edges in one top
        assert!(epsilon_simplex(&site, &f, EdgeSelection::Least).unwrap().is_identity());
    }
}

#[test]
fn epsilon_kills_boundaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for name in GROUPS {
        let site = groupoid(name);
        for _ in 0..10 {
            let g = random_simplex(&site, &[0, 1, 2, 3], &mut rng).unwrap();
            let c = boundary_of(&g, Convention::Unreduced);
            assert!(epsilon2(&c, &site, EdgeSelection::Least).unwrap().is_identity(), "{name}");
        }
    }
}

#[test]
fn realize_class_z4_two() {
    let site = groupoid("Z4");
    let v = EpsilonValue::from_top(&site, 2);
    let p = realize_class(&site, &v).unwrap();
    assert_eq!(epsilon2(&p.chain(), &site, EdgeSelection::Least).unwrap(), v);
    // independent loop evaluation: the only difference between f and h is the
    // {0,2} edge, twisted by 2, and (−2) + 0 + 0 negated is 2 in ℤ₄
    let top = p.neg.top();
    let e = p.neg.trans(0b101, 0b111);
    let src = p.neg.face_set(0b101);
    let idx = src.index_of(&simplex_core::Elem::Mor(0, 0, 2, 0)).unwrap();
    assert_eq!(top.elems[e.map[idx as usize] as usize], simplex_core::Elem::Mor(0, 0, 2, 2));
}

#[test]
fn realize_identity_is_degenerate() {
    let site = groupoid("Q8");
    let p = realize_class(&site, &EpsilonValue::identity(&site)).unwrap();
    assert_eq!(p.pos, p.neg);
}

#[test]
fn z2_class_is_unfillable() {
    let site = groupoid("Z2");
    let w = witness(&site, &EpsilonValue::from_top(&site, 1)).unwrap();
    assert!(w.is_consistent());
    assert!(w.fill.is_none());
    assert!(fill_shell(&site, &w.shell).is_err());
}

#[test]
fn tower_realize_recomputes() {
    let site = TowerSite::cyclic_tower(&[4, 2]).unwrap();
    let v = EpsilonValue { levels: vec![2, 0] };
    let p = realize_class(&site, &v).unwrap();
    assert_eq!(epsilon2(&p.chain(), &site, EdgeSelection::Least).unwrap(), v);
    assert!(realize_class(&site, &EpsilonValue { levels: vec![1, 0] }).is_err());
}

#[test]
fn h2_is_the_center() {
    for name in GROUPS {
        let site = groupoid(name);
        let g = site.top_group().clone();
        let r = h2(&site).unwrap();
        let z = g.subgroup(&g.center(), "Z");
        assert!(is_isomorphic(&r.table, &z), "{name}");
        assert_eq!(r.group, z.presentation(), "{name}");
        assert!(r.all_consistent(), "{name}");
        let gam = gamma2_group(&site, 0, 1).unwrap();
        assert!(is_isomorphic(&gam, &r.table), "{name}");
    }
}

#[test]
fn h2_examples() {
    assert_eq!(h2(&groupoid("Z2")).unwrap().group, GroupPresentation::abelian(&[2]));
    assert!(h2(&groupoid("S3")).unwrap().group.is_trivial());
    assert_eq!(gamma2(&groupoid("S3"), 0, 1).unwrap(), GroupPresentation::trivial());
    assert_eq!(gamma2(&groupoid("Z4"), 0, 1).unwrap(), GroupPresentation::abelian(&[4]));
}

#[test]
fn tower_h2() {
    for (orders, want) in [(vec![8, 4, 2], 8u64), (vec![6, 2], 6)] {
        let site = TowerSite::cyclic_tower(&orders).unwrap();
        let r = h2(&site).unwrap();
        assert_eq!(r.group, GroupPresentation::abelian(&[want]));
        assert_eq!(r.elements.len() as u64, want);
        assert!(r.all_consistent());
        assert_eq!(gamma2(&site, 0, 1).unwrap(), r.group);
    }
}

#[test]
fn noncomm_reports() {
    for (name, z) in [("S3", 1), ("Q8", 2), ("D4", 2), ("Z4", 4)] {
        let r = noncomm_check(&groupoid(name), 0, 1).unwrap();
        assert!(r.passes(), "{r}");
        assert_eq!(r.binding_order, z);
        assert_eq!(r.f_order, r.order);
    }
    assert!(noncomm_check(&groupoid("S3"), 1, 1).is_err());
}

#[test]
fn add_shells_multiplies() {
    let site = groupoid("Z4");
    let a = witness(&site, &EpsilonValue::from_top(&site, 1)).unwrap();
    let b = witness(&site, &EpsilonValue::from_top(&site, 2)).unwrap();
    let (d3, cert) = add_shells(&site, &a.shell, &b.shell).unwrap();
    assert!(cert.check());
    let e = epsilon2(&d3.chain(), &site, EdgeSelection::Least).unwrap();
    assert_eq!(e, EpsilonValue::from_top(&site, 3));
}

#[test]
fn shell_plus_inverse_fills() {
    let site = groupoid("Q8");
    let z = site.top_group().center()[1];
    let a = witness(&site, &EpsilonValue::from_top(&site, z)).unwrap();
    let inv = site.top_group().inv(z);
    let b = witness(&site, &EpsilonValue::from_top(&site, inv)).unwrap();
    let (d3, _) = add_shells(&site, &a.shell, &b.shell).unwrap();
    let (g, cert) = fill_trivial_shell(&site, &d3).unwrap();
    assert!(cert.check());
    assert_eq!(boundary_of(&g, Convention::Unreduced).scaled(d3.sign), d3.chain());
    assert!(matches!(fill_trivial_shell(&site, &a.shell), Err(HurewiczError::NonzeroClass { .. })));
}

#[test]
fn reduce_cycle_of_boundary_has_trivial_shell() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let site = groupoid("D4");
    for _ in 0..5 {
        let g = random_simplex(&site, &[0, 1, 2, 3], &mut rng).unwrap();
        let r = reduce_cycle(&site, &boundary_of(&g, Convention::Unreduced)).unwrap();
        assert!(r.cert.check());
        if let Some(s) = r.shell {
            assert!(epsilon2(&s.chain(), &site, EdgeSelection::Least).unwrap().is_identity());
        }
    }
}

fn small_sites() -> Vec<TowerSite> {
    let mut v: Vec<TowerSite> = ["Z2", "Z4", "S3", "Q8"].iter().map(|n| groupoid(n)).collect();
    v.push(TowerSite::cyclic_tower(&[4, 2]).unwrap());
    v.push(TowerSite::cyclic_tower(&[8, 4, 2]).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // fill succeeds exactly when ε is trivial, on random 2-shells
    #[test]
    fn fill_dichotomy(seed in any::<u64>(), which in 0usize..6) {
        let site = &small_sites()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_shell(site, &[0, 1, 2, 3], &mut rng).unwrap();
        let eps = epsilon2(&s.chain(), site, EdgeSelection::Least).unwrap();
        prop_assert_eq!(eps.is_identity(), fill_shell(site, &s).is_ok());
        prop_assert_eq!(eps.is_identity(), fill_trivial_shell(site, &s).is_ok());
    }

    #[test]
    fn level_coherence(seed in any::<u64>(), which in 0usize..6) {
        let site = &small_sites()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_shell(site, &[0, 1, 2, 3], &mut rng).unwrap();
        for f in &s.faces {
            let e = epsilon_simplex(site, f, EdgeSelection::Least).unwrap();
            prop_assert!(e.is_coherent(site));
        }
    }

    #[test]
    fn selection_independent_on_cycles(seed in any::<u64>(), sel in any::<u64>(), which in 0usize..6) {
        let site = &small_sites()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_shell(site, &[0, 1, 2, 3], &mut rng).unwrap();
        let a = epsilon2(&s.chain(), site, EdgeSelection::Least).unwrap();
        let b = epsilon2(&s.chain(), site, EdgeSelection::Seeded(sel)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn realize_then_epsilon(which in 0usize..6, k in 0usize..64) {
        let site = &small_sites()[which];
        let tuples = coherent_tuples(site);
        let v = &tuples[k % tuples.len()];
        let p = realize_class(site, v).unwrap();
        prop_assert_eq!(&epsilon2(&p.chain(), site, EdgeSelection::Least).unwrap(), v);
    }

    #[test]
    fn epsilon_linear(seed in any::<u64>(), a in -3i64..4, b in -3i64..4) {
        let site = groupoid("Z4");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_shell(&site, &[0, 1, 2, 3], &mut rng).unwrap();
        let t = random_shell(&site, &[0, 1, 2, 4], &mut rng).unwrap();
        let c: Chain = s.chain().scaled(a).plus(&t.chain().scaled(b));
        let lhs = epsilon2(&c, &site, EdgeSelection::Least).unwrap();
        let rhs = epsilon2(&s.chain(), &site, EdgeSelection::Least).unwrap().pow(a, &site)
            .mul(&epsilon2(&t.chain(), &site, EdgeSelection::Least).unwrap().pow(b, &site), &site);
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn shell_view_sign_respected() {
    let site = groupoid("Z2");
    let w = witness(&site, &EpsilonValue::from_top(&site, 1)).unwrap();
    let neg: ShellView = w.shell.negated();
    assert_eq!(epsilon2(&neg.chain(), &site, EdgeSelection::Least).unwrap(), EpsilonValue::from_top(&site, 1));
}
