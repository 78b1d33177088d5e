//! Property tests for the algebraic invariants the modules promise.

use masurelab_core::gk_series::{CoweightSeries, QLaurent};
use masurelab_core::rational::{rat, rat_int};
use masurelab_core::rootdata::{presets, DominanceFlavor};
use masurelab_core::tree_masure::{TreeMasure, Vertex};
use masurelab_core::weylgeom::{dominant_representative, reflect};
use masurelab_core::CoweightVector;
use proptest::prelude::*;

fn coweight2() -> impl Strategy<Value = CoweightVector> {
    (-8i64..=8, 1i64..=4, -8i64..=8, 1i64..=4)
        .prop_map(|(a, b, c, d)| CoweightVector::new(vec![rat(a, b), rat(c, d)]))
}

proptest! {
    #[test]
    fn height_is_additive(x in coweight2(), y in coweight2()) {
        let sys = presets::a2_simply_connected();
        let hx = sys.height(&x).unwrap();
        let hy = sys.height(&y).unwrap();
        let hxy = sys.height(&x.add(&y)).unwrap();
        prop_assert_eq!(hxy, hx + hy);
    }

    #[test]
    fn dominance_is_reflexive_and_translation_invariant(
        x in coweight2(),
        y in coweight2(),
        z in coweight2(),
    ) {
        let sys = presets::a2_simply_connected();
        for flavor in [DominanceFlavor::IntegerCone, DominanceFlavor::RationalCone] {
            prop_assert!(sys.qvee_leq(&x, &x, flavor));
            let before = sys.qvee_leq(&x, &y, flavor);
            let after = sys.qvee_leq(&x.add(&z), &y.add(&z), flavor);
            prop_assert_eq!(before, after);
        }
    }

    #[test]
    fn simple_reflections_are_involutions(x in coweight2(), i in 0usize..2) {
        let sys = presets::a2_simply_connected();
        let once = reflect(&sys, i, &x);
        let twice = reflect(&sys, i, &once);
        prop_assert_eq!(twice, x);
    }

    #[test]
    fn dominant_representative_is_idempotent(a in -6i64..=6, b in -6i64..=6) {
        let sys = presets::a2_simply_connected();
        let v = CoweightVector::from_ints(&[a, b]);
        let (dom, _) = dominant_representative(&sys, &v, 100).unwrap();
        prop_assert!(sys.is_dominant(&dom));
        let (dom2, word2) = dominant_representative(&sys, &dom, 100).unwrap();
        prop_assert_eq!(dom, dom2);
        prop_assert!(word2.is_empty());
    }

    #[test]
    fn inessential_split_recomposes(a in -5i64..=5, b in -5i64..=5, c in -9i64..=9, den in 1i64..=3) {
        let sys = presets::sl2_affine_canonical();
        let lam = CoweightVector::new(vec![rat_int(a), rat_int(b), rat(c, den), rat_int(0)]);
        if sys.in_y_plus_vin(&lam) {
            let (lin, big) = sys.inessential_decompose(&lam).unwrap();
            prop_assert_eq!(lin.add(&big), lam);
            prop_assert!(big.is_integral());
        }
    }
}

fn laurent() -> impl Strategy<Value = QLaurent> {
    proptest::collection::vec((-3i64..=3, -4i64..=4), 0..4).prop_map(|terms| {
        terms.into_iter().fold(QLaurent::zero(), |acc, (e, c)| {
            acc.add(&QLaurent::monomial(e, rat_int(c)))
        })
    })
}

fn series(rank: usize, truncation: u32) -> impl Strategy<Value = CoweightSeries> {
    let keys = masurelab_core::gk_series::nonpositive_keys(rank, truncation);
    proptest::collection::vec(laurent(), keys.len()).prop_map(move |coeffs| {
        let mut s = CoweightSeries::zero(rank, truncation);
        for (k, c) in keys.iter().zip(coeffs) {
            s.set(k.clone(), c);
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_product_commutes_and_associates(
        a in series(2, 3),
        b in series(2, 3),
        c in series(2, 3),
    ) {
        let ab = a.mul(&b).unwrap();
        let ba = b.mul(&a).unwrap();
        prop_assert!(ab.compare(&ba, None).unwrap().is_empty());
        let abc1 = ab.mul(&c).unwrap();
        let abc2 = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(abc1.compare(&abc2, None).unwrap().is_empty());
    }

    #[test]
    fn series_addition_distributes(
        a in series(1, 4),
        b in series(1, 4),
        c in series(1, 4),
    ) {
        let lhs = a.add(&b).unwrap().mul(&c).unwrap();
        let rhs = a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(lhs.compare(&rhs, None).unwrap().is_empty());
    }

    #[test]
    fn laurent_eval_is_a_ring_map(x in laurent(), y in laurent(), num in 1i64..=5) {
        let q = rat_int(num);
        prop_assert_eq!(x.add(&y).eval(&q), x.eval(&q) + y.eval(&q));
        prop_assert_eq!(x.mul(&y).eval(&q), x.eval(&q) * y.eval(&q));
    }
}

fn vertex(q: u64, depth: i64) -> impl Strategy<Value = Vertex> {
    let d = depth;
    (
        -d..=d,
        proptest::collection::vec(0u8..(q as u8), 0..=(depth as usize)),
    )
        .prop_map(move |(gate, mut branch)| {
            if let Some(first) = branch.first_mut() {
                *first %= (q - 1) as u8;
            }
            Vertex { gate, branch }
        })
}

proptest! {
    #[test]
    fn tree_retraction_order_and_distance(
        x in vertex(3, 6),
        y in vertex(3, 6),
    ) {
        let t = TreeMasure::build(3, 6).unwrap();
        prop_assert!(t.contains(&x) && t.contains(&y));
        // rho_plus <= rho_minus with even gap
        let gap = t.rho_minus(&x) - t.rho_plus(&x);
        prop_assert!(gap >= 0 && gap % 2 == 0);
        // distance symmetry and identity
        prop_assert_eq!(t.dist(&x, &y), t.dist(&y, &x));
        prop_assert_eq!(t.dist(&x, &x), 0);
        // retractions are 1-Lipschitz for the graph distance
        prop_assert!((t.rho_minus(&x) - t.rho_minus(&y)).abs() <= t.dist(&x, &y));
        prop_assert!((t.rho_plus(&x) - t.rho_plus(&y)).abs() <= t.dist(&x, &y));
    }
}
