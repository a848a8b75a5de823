use amalgam_engine::{random_shell, random_simplex};
use homology_solver::*;
use instances::{parity_epsilon, RelSite, SiteDescriptor, SiteHandle};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simplex_core::{Chain, Convention, ShellView, Simplex};

fn site(desc: &str) -> SiteHandle {
    SiteDescriptor::parse(desc).unwrap().build().unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn big(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows)
}

fn det(m: &[Vec<i64>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0] as i128,
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] as i128 * det(&minor)
            })
            .sum(),
    }
}

fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|last| combos(last, k - 1).into_iter().map(move |mut c| {
            c.push(last);
            c
        }))
        .collect()
}

/// Invariant factors from determinantal divisors: d_k = gcd of k×k minors.
fn factors_by_minors(a: &[Vec<i64>]) -> Vec<i128> {
    let (r, c) = (a.len(), a.first().map_or(0, Vec::len));
    let mut prev = 1i128;
    let mut out = Vec::new();
    for k in 1..=r.min(c) {
        let mut g = 0i128;
        for rs in combos(r, k) {
            for cs in combos(c, k) {
                let sub: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j]).collect()).collect();
                g = g.gcd(&det(&sub));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}

fn is_diagonal_chain(s: &IntMatrix) -> bool {
    let mut last: Option<BigInt> = None;
    for i in 0..s.rows {
        for j in 0..s.cols {
            if i != j && !s.get(i, j).is_zero() {
                return false;
            }
        }
        if i < s.cols {
            let d = s.get(i, i).clone();
            if let Some(p) = &last {
                if p.is_zero() && !d.is_zero() {
                    return false;
                }
                if !p.is_zero() && !(&d % p).is_zero() {
                    return false;
                }
            }
            last = Some(d);
        }
    }
    true
}

#[test]
fn snf_examples() {
    let (s, u, v) = smith_normal_form(&big(&[vec![2, 0], vec![0, 3]]));
    assert_eq!(s, big(&[vec![1, 0], vec![0, 6]]));
    assert_eq!(u.mul(&big(&[vec![2, 0], vec![0, 3]])).mul(&v), s);

    let z = IntMatrix::zeros(3, 2);
    let (s, u, v) = smith_normal_form(&z);
    assert!(s.is_zero());
    assert_eq!(u, IntMatrix::identity(3));
    assert_eq!(v, IntMatrix::identity(2));
}

#[test]
fn snf_survives_big_entries() {
    let huge = i64::MAX / 3;
    let a = vec![vec![huge, huge - 1, 7], vec![huge - 5, huge, 11], vec![3, 5, huge]];
    let m = big(&a);
    let (s, u, v) = smith_normal_form(&m);
    assert_eq!(u.mul(&m).mul(&v), s);
    assert!(u.determinant().abs().is_one() && v.determinant().abs().is_one());
    assert!(is_diagonal_chain(&s));
}

#[test]
fn group_presentations() {
    assert_eq!(GroupPresentation::abelian(&[2, 3]), GroupPresentation::abelian(&[6]));
    assert_eq!(GroupPresentation::abelian(&[4, 2, 1, 0]).invariant_factors(), Some(&[2, 4, 0][..]));
    assert_eq!(GroupPresentation::abelian(&[2, 2]).to_string(), "ℤ_2 × ℤ_2");
    assert_eq!(GroupPresentation::trivial().to_string(), "0");
    assert_eq!(abelian_from_relations(2, &[vec![2, 0], vec![0, 3]]), GroupPresentation::abelian(&[6]));
    assert_eq!(abelian_from_relations(3, &[vec![2, 4, 0]]), GroupPresentation::abelian(&[2, 0, 0]));

    for (name, order, center) in [("S3", 6, 1), ("D4", 8, 2), ("Q8", 8, 2), ("Z4", 4, 4)] {
        let g = FiniteGroup::by_name(name).unwrap();
        assert!(g.is_group());
        assert_eq!(g.order(), order);
        assert_eq!(g.center().len(), center, "{name}");
    }
    assert!(!is_isomorphic(&FiniteGroup::d4(), &FiniteGroup::q8()));
    assert!(is_isomorphic(&FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(3)), &FiniteGroup::cyclic(6)));
    let json = serde_json::to_value(GroupPresentation::abelian(&[2, 4])).unwrap();
    assert_eq!(json["kind"], "abelian-invariant-factors");
}

#[test]
fn h0_examples() {
    let h = site("groupoid:S3");
    let s = h.site();
    let (f, g) = (s.vertex(0), s.vertex(4));
    let c = Chain::simplex(&f).minus(&Chain::simplex(&g));
    let r = h0(s, Convention::Unreduced, &c).unwrap();
    assert_eq!(r.group, GroupPresentation::integers());
    assert_eq!(r.epsilon, 0);
    let cert = r.certificate.unwrap();
    assert_eq!(cert.bounding.boundary(Convention::Unreduced), c);

    let r = h0(s, Convention::Unreduced, &Chain::simplex(&f)).unwrap();
    assert_eq!(r.epsilon, 1);
    assert!(!r.is_boundary);
    assert!(r.certificate.is_none());

    let r = h0(s, Convention::Reduced, &Chain::simplex(&f)).unwrap();
    assert!(r.group.is_trivial());
    assert!(h0(s, Convention::Unreduced, &Chain::zero(1)).is_err());
}

#[test]
fn bounded_homology_values() {
    let cases = [
        ("dlo", 3, 0, GroupPresentation::integers()),
        ("dlo", 4, 1, GroupPresentation::trivial()),
        ("groupoid:Z2", 3, 1, GroupPresentation::trivial()),
        ("groupoid:S3", 3, 1, GroupPresentation::trivial()),
        ("tetra", 5, 2, GroupPresentation::trivial()),
        ("groupoid:Z2", 4, 2, GroupPresentation::abelian(&[2])),
        ("parity:4", 5, 3, GroupPresentation::abelian(&[2])),
    ];
    for (d, u, n, want) in cases {
        let h = site(d);
        assert_eq!(bounded_homology(h.site(), u, n, Convention::Unreduced, DEFAULT_CAP).unwrap(), want, "{d} u={u} n={n}");
    }
    let h = site("dlo");
    assert!(bounded_homology(h.site(), 3, 0, Convention::Reduced, DEFAULT_CAP).unwrap().is_trivial());
    assert!(matches!(
        bounded_homology(h.site(), 6, 2, Convention::Unreduced, 10),
        Err(HomologyError::CapExceeded { .. })
    ));
}

#[test]
fn boundary_matrices_compose_to_zero() {
    for d in ["parity:4", "tetra", "dlo", "groupoid:Z2"] {
        let h = site(d);
        let cx = BoundedComplex::new(h.site(), 4, 0, 3, Convention::Unreduced, DEFAULT_CAP).unwrap();
        for n in 1..3 {
            let a = cx.boundary_matrix(n);
            let b = cx.boundary_matrix(n + 1);
            for row in &a {
                for j in 0..cx.count(n + 1) {
                    let v: i64 = row.iter().enumerate().map(|(k, x)| x * b[k][j]).sum();
                    assert_eq!(v, 0, "{d} n={n}");
                }
            }
        }
    }
}

#[test]
fn bounding_chain_examples() {
    let h = site("groupoid:Z2");
    let s = h.site();
    let t = random_simplex(s, &[0, 1, 2], &mut rng(0)).unwrap();
    let c = Chain::simplex(&t).boundary(Convention::Unreduced);
    let x = find_bounding_chain(s, &c, 3, DEFAULT_CAP).unwrap().unwrap();
    assert_eq!(x.boundary(Convention::Unreduced), c);
    assert!(matches!(find_bounding_chain(s, &c, 2, DEFAULT_CAP), Err(HomologyError::OutsideUniverse(2))));

    // the odd parity shell stays a cycle on six points
    let p = site("parity:4");
    let faces: Vec<Simplex> = (0..5u32)
        .map(|skip| {
            let sub: Vec<u32> = (0..5).filter(|&x| x != skip).collect();
            p.site().normalized_simplices(&sub).into_iter().find(|f| RelSite::top_bit(f) == (skip == 0)).unwrap()
        })
        .collect();
    let odd = ShellView::new(1, faces).unwrap();
    assert_eq!(parity_epsilon(&odd.chain()), 1);
    assert!(find_bounding_chain(p.site(), &odd.chain(), 6, DEFAULT_CAP).unwrap().is_none());
}

#[test]
fn tetra_all_r_shell_dies_in_homology() {
    // no single simplex fills it, but an integer 3-chain on the same points does
    let h = site("tetra");
    let s = h.site();
    let faces: Vec<Simplex> = (0..4u32)
        .map(|skip| {
            let sub: Vec<u32> = (0..4).filter(|&x| x != skip).collect();
            s.normalized_simplices(&sub).into_iter().find(RelSite::top_bit).unwrap()
        })
        .collect();
    let shell = ShellView::new(1, faces).unwrap();
    let fillers = s
        .normalized_simplices(&[0, 1, 2, 3])
        .into_iter()
        .filter(|f| Chain::simplex(f).boundary(Convention::Unreduced) == shell.chain())
        .count();
    assert_eq!(fillers, 0);
    let x = find_bounding_chain(s, &shell.chain(), 4, DEFAULT_CAP).unwrap().unwrap();
    assert_eq!(x.boundary(Convention::Unreduced), shell.chain());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_reconstructs(rows in prop::collection::vec(prop::collection::vec(-9i64..10, 7), 5)) {
        let a = big(&rows);
        let (s, u, v) = smith_normal_form(&a);
        prop_assert_eq!(u.mul(&a).mul(&v), s.clone());
        prop_assert!(u.determinant().abs().is_one());
        prop_assert!(v.determinant().abs().is_one());
        prop_assert!(is_diagonal_chain(&s));
    }

    #[test]
    fn snf_matches_minors(rows in prop::collection::vec(prop::collection::vec(-6i64..7, 4), 3)) {
        let got: Vec<i128> = smith(&big(&rows)).diag.iter().map(|d| i128::try_from(d.clone()).unwrap()).collect();
        prop_assert_eq!(got, factors_by_minors(&rows));
    }

    #[test]
    fn snf_ignores_permutations(rows in prop::collection::vec(prop::collection::vec(-9i64..10, 5), 4), k in 0usize..4, l in 0usize..5) {
        let mut p = rows.clone();
        p.swap(0, k);
        for r in p.iter_mut() {
            r.swap(0, l);
        }
        prop_assert_eq!(smith(&big(&rows)).diag, smith(&big(&p)).diag);
    }

    #[test]
    fn found_chains_bound(seed in any::<u64>(), which in 0usize..4) {
        let h = site(["parity:4", "tetra", "dlo", "groupoid:Z2"][which]);
        let s = h.site();
        let mut r = rng(seed);
        let sh = random_shell(s, &[0, 1, 2], &mut r).unwrap();
        if let Some(x) = find_bounding_chain(s, &sh.chain(), 4, DEFAULT_CAP).unwrap() {
            prop_assert_eq!(x.boundary(Convention::Unreduced), sh.chain());
        }
    }

    #[test]
    fn augmentation_is_additive(a in -5i64..6, b in -5i64..6, seed in any::<u64>()) {
        let h = site("tetra");
        let s = h.site();
        let (f, g) = (s.vertex((seed % 7) as u32), s.vertex(7 + (seed % 5) as u32));
        let c = Chain::term(&f, a);
        let d = Chain::term(&g, b);
        let e = |x: &Chain| h0(s, Convention::Unreduced, x).unwrap().epsilon;
        prop_assert_eq!(e(&c.plus(&d)), e(&c) + e(&d));
        let edge = s.strong2(&f, &g).unwrap();
        prop_assert_eq!(e(&Chain::term(&edge, a).boundary(Convention::Unreduced)), 0);
    }
}
