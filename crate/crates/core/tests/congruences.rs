mod common;

use common::{arb_algebra, arb_pair};
use findef::algebra::{product, FiniteStructure};
use findef::congruences::*;
use proptest::prelude::*;

fn lattice(a: &FiniteStructure) -> Vec<Congruence> {
    congruence_lattice(a, LatticeBounds::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn principal_is_least_in_lattice(a in arb_algebra(4, 2)) {
        let con = lattice(&a);
        for c in &con {
            prop_assert!(c.is_compatible(&a));
        }
        for x in 0..a.size() {
            for y in 0..a.size() {
                let p = principal_congruence(&a, x, y);
                prop_assert!(con.contains(&p));
                for c in con.iter().filter(|c| c.related(x, y)) {
                    prop_assert!(p.le(c));
                }
            }
        }
    }

    #[test]
    fn fraser_horn_matches_skew_brute_force(a in arb_algebra(3, 2)) {
        let found = check_fraser_horn(std::slice::from_ref(&a)).unwrap();
        let skew = skew_congruences(&a, &a, LatticeBounds::default()).unwrap();
        prop_assert_eq!(found.is_some(), !skew.is_empty());
    }

    #[test]
    fn relative_principal_via_quotients((a, b) in arb_pair(3, 2)) {
        let ctx = RelContext::new(vec![a.clone(), b.clone()]).unwrap();
        let host = product(&[&a, &b]).unwrap();
        prop_assume!(quasivariety_membership(&ctx, &host).unwrap());
        let relative: Vec<Congruence> = lattice(&host)
            .into_iter()
            .filter(|c| quasivariety_membership(&ctx, &quotient(&host, c).unwrap()).unwrap())
            .collect();
        for x in 0..host.size() {
            for y in 0..x {
                let expected = relative
                    .iter()
                    .filter(|c| c.related(x, y))
                    .fold(Congruence::full(host.size()), |acc, c| acc.meet(c));
                prop_assert_eq!(relative_principal_congruence(&ctx, &host, x, y).unwrap(), expected);
            }
        }
    }
}
