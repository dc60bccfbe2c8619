//! Random amalgams of cyclic groups over a common cyclic subgroup.

mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use rfring::amalgam::{make_amalgam, oracle::check_against_oracle, torsion_classes, Amalgam};
use rfring::group::{cyclic, direct_product, hom, hom_by_labels, DEFAULT_CAP};
use rfring::ktheory::k_ranks;
use rfring::repring::compute;

/// `C_{d·x} *_{C_d} C_{d·y}`.
fn cyclic_amalgam(d: usize, x: usize, y: usize) -> Amalgam {
    let c = |n| Arc::new(cyclic(n, DEFAULT_CAP).unwrap());
    let (l, r, e) = (c(d * x), c(d * y), c(d));
    let gen = |k: usize| if d > 1 { vec![k] } else { vec![] };
    let el = hom(e.clone(), l.clone(), &gen(x)).unwrap();
    let er = hom(e.clone(), r.clone(), &gen(y)).unwrap();
    make_amalgam(l, r, e, el, er).unwrap()
}

/// Fused classes of `C_{dx} *_{C_d} C_{dy}`: the `d` edge classes are shared.
fn expected_n(d: usize, x: usize, y: usize) -> usize {
    d * x + d * y - d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rank_equals_class_count(d in 1usize..4, x in 1usize..4, y in 1usize..4) {
        let a = cyclic_amalgam(d, x, y);
        let ar = compute(&a).unwrap();
        prop_assert_eq!(ar.classes.len(), expected_n(d, x, y));
        prop_assert_eq!(ar.ring.rank(), ar.classes.len());
        let mut rng = StdRng::seed_from_u64((d * 100 + x * 10 + y) as u64);
        common::check_ring(&ar, &ar.ring, &mut rng).unwrap();
        for p in common::torsion_primes(&a) {
            let k = k_ranks(&ar, p, true).unwrap();
            prop_assert_eq!(k.rank_k0, k.lattice_rank);
            // abelian factors: every element is its own class, and v_p = 0
            prop_assert_eq!(k.v_p, 0);
        }
    }

    #[test]
    fn oracle_agrees(d in 1usize..3, x in 1usize..4, y in 2usize..4) {
        let a = cyclic_amalgam(d, x, y);
        let t = torsion_classes(&a);
        let (_, bad) = check_against_oracle(&a, &t, 4);
        prop_assert!(bad.is_empty(), "{:?}", bad);
    }
}

#[test]
fn v_p_invariant_under_relabeling() {
    // C6 built as C2 x C3 instead of the cyclic table
    let c = |n| Arc::new(cyclic(n, DEFAULT_CAP).unwrap());
    let (c4, c2, c3) = (c(4), c(2), c(3));
    let c6 = Arc::new(direct_product(&c2, &c3, DEFAULT_CAP).unwrap());
    let e1 = hom_by_labels(c2.clone(), c4.clone(), &[("g".into(), "g^2".into())]).unwrap();
    let e2 = hom_by_labels(c2.clone(), c6.clone(), &[("g".into(), "(g,e)".into())]).unwrap();
    let relabeled = compute(&make_amalgam(c4, c6, c2, e1, e2).unwrap()).unwrap();
    let standard = compute(&cyclic_amalgam(2, 2, 3)).unwrap();
    for p in [2, 3, 5] {
        let a = k_ranks(&relabeled, p, true).unwrap();
        let b = k_ranks(&standard, p, true).unwrap();
        assert_eq!((a.v_p, a.rank_k0), (b.v_p, b.rank_k0));
    }
}
