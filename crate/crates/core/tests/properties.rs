use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use markoff_bm::arith::{reduce_z, surface_equal, TowerElement, TowerParams, TowerPoly};
use markoff_bm::brauer::{
    joint_profile, standard_classes, BrauerClass, Caps, LocalClass, ProfileStatus,
};
use markoff_bm::cohomology::{
    catalog_entry, h1_bicyclic, order_four_family, BicyclicComplex, FiniteGroupAction,
};
use markoff_bm::geometry::{line_on_surface, lines_catalog};
use markoff_bm::padic::{
    candidate_places, fp_points, hilbert, hilbert_product_check, legendre, lift_point,
    square_class_int, surface_residue, Invariant, Place,
};
use markoff_bm::report::random_commuting_involutions;
use markoff_bm::search::{box_search, on_surface, vieta_orbit};

fn rational() -> impl Strategy<Value = BigRational> {
    (-500i64..=500, 1i64..=60)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn place() -> impl Strategy<Value = Place> {
    prop_oneof![
        Just(Place::Infinite),
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]).prop_map(Place::Prime)
    ]
}

fn params() -> impl Strategy<Value = (i64, i64)> {
    (-12i64..=12, -40i64..=40)
        .prop_filter("non-degenerate", |&(a, m)| a != 0 && m != 0 && m != 4 * a)
}

fn element(p: TowerParams) -> impl Strategy<Value = TowerElement> {
    prop::array::uniform8((-6i64..=6, 1i64..=3)).prop_map(move |c| {
        TowerElement::from_coords(p, c.map(|(n, d)| BigRational::new(n.into(), d.into())))
    })
}

fn small_poly(p: TowerParams) -> impl Strategy<Value = TowerPoly> {
    prop::collection::vec(((0u32..=2, 0u32..=2, 0u32..=3), -4i64..=4), 1..5).prop_map(
        move |terms| {
            terms
                .into_iter()
                .fold(TowerPoly::zero(p), |acc, ((i, j, k), c)| {
                    acc.add(&TowerPoly::monomial(
                        TowerElement::from_int(p, c),
                        [i, j, k],
                    ))
                })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tower_ring_axioms((x, y, z) in params().prop_flat_map(|(a, m)| {
        let p = TowerParams::new(a, m);
        (element(p), element(p), element(p))
    })) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        if let Ok(inv) = x.inverse() {
            prop_assert!((&x * &inv).is_one());
        }
    }

    #[test]
    fn reduce_z_is_idempotent_and_multiplicative((f, g) in (1i64..=5, 1i64..=9)
        .prop_filter("non-degenerate", |&(a, m)| m != 4 * a)
        .prop_flat_map(|(a, m)| {
            let p = TowerParams::new(a, m);
            (small_poly(p), small_poly(p))
        })) {
        let rf = reduce_z(&f);
        prop_assert_eq!(reduce_z(rf.poly()), rf.clone());
        let lhs = reduce_z(&f.mul(&g));
        let rhs = reduce_z(&rf.poly().mul(reduce_z(&g).poly()));
        prop_assert!(surface_equal(&lhs, &rhs));
    }

    #[test]
    fn hilbert_symmetric_and_bimultiplicative(u in rational(), v in rational(), w in rational(), pl in place()) {
        prop_assert_eq!(hilbert(&u, &v, pl).unwrap(), hilbert(&v, &u, pl).unwrap());
        prop_assert_eq!(
            hilbert(&(&u * &w), &v, pl).unwrap(),
            hilbert(&u, &v, pl).unwrap() + hilbert(&w, &v, pl).unwrap()
        );
    }

    #[test]
    fn steinberg_relations(u in rational(), pl in place()) {
        prop_assert_eq!(hilbert(&u, &(-&u), pl).unwrap(), Invariant::Zero);
        if !u.is_one() {
            prop_assert_eq!(hilbert(&u, &(BigRational::one() - &u), pl).unwrap(), Invariant::Zero);
        }
    }

    #[test]
    fn product_formula(u in rational(), v in rational()) {
        prop_assert!(hilbert_product_check(&u, &v).unwrap());
        let total: Invariant = candidate_places(&u, &v).into_iter().map(|pl| hilbert(&u, &v, pl).unwrap()).sum();
        prop_assert_eq!(total, Invariant::Zero);
    }

    #[test]
    fn legendre_matches_square_class(n in -2000i128..=2000, p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 101])) {
        prop_assume!(n % p as i128 != 0);
        let square = square_class_int(n, Place::Prime(p)).unwrap().is_square();
        prop_assert_eq!(legendre(n, p).unwrap() == 1, square);
    }

    #[test]
    fn lifted_points_satisfy_the_congruence((a, m) in params(), p in prop::sample::select(vec![3u64, 5, 7]),
                                            level in 1u32..10, pick in any::<prop::sample::Index>()) {
        let smooth: Vec<_> = fp_points(a, m, p).unwrap().into_iter().filter(|q| !q.singular).collect();
        prop_assume!(!smooth.is_empty());
        let base = smooth[pick.index(smooth.len())].coords.map(|c| c as i128);
        let pt = lift_point(base, a, m, p, level).unwrap();
        let modulus = (p as i128).pow(level);
        prop_assert_eq!(surface_residue(a, m, pt.coords, modulus), 0);
    }

    /// Where two representations of a class are both determined they agree.
    #[test]
    fn representation_coherence((a, m) in params(), p in prop::sample::select(vec![2u64, 3, 5, 7]),
                                pick in any::<prop::sample::Index>()) {
        let pts: Vec<_> = fp_points(a, m, p).unwrap().into_iter().filter(|q| !q.singular).collect();
        prop_assume!(!pts.is_empty());
        let base = pts[pick.index(pts.len())].coords.map(|c| c as i128);
        let Ok(pt) = lift_point(base, a, m, p, 12) else { return Ok(()) };
        for class in standard_classes(a, m).unwrap() {
            let values: BTreeSet<Invariant> = class
                .representations
                .iter()
                .filter_map(|rep| {
                    let single = BrauerClass {
                        label: class.label.clone(),
                        representations: vec![rep.clone()],
                        vanishes_off_constant: class.vanishes_off_constant,
                    };
                    LocalClass::compile(&single, p).unwrap().eval(&pt)
                })
                .collect();
            prop_assert!(values.len() <= 1, "{} at {:?}: {:?}", class.label, pt, values);
        }
    }

    /// `ord_p(m − 4a)` even, `m − 4a` not a `p`-adic square, `p ∤ a`: the pairs
    /// `((x² − 4, c), (x + 2, c))` lie in `{(0,0), (1/2,1/2), (1/2,0)}`, and only
    /// `(0,0)` occurs when `a` is a nonresidue.
    #[test]
    fn even_order_pairs_are_contained(p in prop::sample::select(vec![3u64, 5, 7]), a in -30i64..=30,
                                      t in -3i64..=3, u_pick in any::<prop::sample::Index>()) {
        let pi = p as i64;
        prop_assume!(a % pi != 0);
        let nonres: Vec<i64> = (1..pi).filter(|&u| legendre(u as i128, p).unwrap() == -1).collect();
        let u = nonres[u_pick.index(nonres.len())];
        let c = pi * pi * (u + pi * t);
        let m = 4 * a + c;
        prop_assume!(m != 0 && c != 0);
        let all = standard_classes(a, m).unwrap();
        let classes = [all[2].clone(), all[1].clone()];
        let profile = joint_profile(&classes, a, m, Place::Prime(p), &Caps::default()).unwrap();
        let allowed: BTreeSet<Vec<Invariant>> = [
            vec![Invariant::Zero, Invariant::Zero],
            vec![Invariant::Half, Invariant::Half],
            vec![Invariant::Half, Invariant::Zero],
        ]
        .into_iter()
        .collect();
        for t in profile.achieved.keys() {
            prop_assert!(allowed.contains(t), "({a},{m}) at {p}: {t:?}");
        }
        if legendre(a as i128, p).unwrap() == -1 && profile.status == ProfileStatus::Exhaustive {
            prop_assert_eq!(profile.achieved.keys().cloned().collect::<Vec<_>>(), vec![vec![Invariant::Zero, Invariant::Zero]]);
        }
    }

    #[test]
    fn bicyclic_matches_finite_group(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, t) = random_commuting_involutions(&mut rng, 8);
        let cx = BicyclicComplex::new(&t, 2, &s, 2).unwrap();
        prop_assert!(cx.d1.mul(&cx.d0).is_zero());
        prop_assert!(cx.d2.mul(&cx.d1).is_zero());
        let finite = FiniteGroupAction::abelian(&[(t.clone(), 2), (s.clone(), 2)]).unwrap().h1().unwrap();
        prop_assert_eq!(h1_bicyclic(&t, 2, &s, 2).unwrap(), finite);
    }

    #[test]
    fn class_order_divides_exponent(x1 in -5i128..=5, x2 in -5i128..=5, y1 in -5i128..=5, y2 in -5i128..=5) {
        let entry = catalog_entry("lemma5.1").unwrap();
        let cx = entry.bicyclic().unwrap();
        let exponent = entry.h1().unwrap().exponent().unwrap();
        let (a, b) = order_four_family(x1, x2, y1, y2);
        prop_assert!(cx.is_cocycle(&a, &b));
        let order = cx.class_order(&a, &b).unwrap() as i128;
        prop_assert_eq!(exponent % order, 0);
        prop_assert_eq!(order == 4, y2 % 2 != 0);
    }

    #[test]
    fn box_search_symmetries((a, m) in params(), bound in 0u64..=12) {
        let pts = box_search(a, m, bound);
        let set: BTreeSet<_> = pts.iter().copied().collect();
        for &[x, y, z] in &pts {
            prop_assert!(on_surface(a, m, [x, y, z]));
            prop_assert!(set.contains(&[x, z, y]));
            prop_assert!(set.contains(&[x, -y, -z]));
        }
    }

    #[test]
    fn orbits_stay_on_surface((a, m) in params(), depth in 0u32..=5) {
        if let Some(&seed) = box_search(a, m, 8).first() {
            let orbit = vieta_orbit(seed, a, m, depth, 5000).unwrap();
            prop_assert!(orbit.triples.contains(&seed));
            prop_assert!(orbit.triples.iter().all(|&t| on_surface(a, m, t)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn catalog_lines_lie_on_surface((a, m) in params()) {
        for line in lines_catalog(a, m).unwrap() {
            prop_assert!(line_on_surface(&line, a, m).unwrap(), "{} at ({a},{m})", line.label);
        }
    }
}
