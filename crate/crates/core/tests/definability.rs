mod common;

use common::arb_pair;
use findef::algebra::{tuples, FiniteStructure};
use findef::definability::{check, verify_counterexample, Query, Verdict};
use findef::formula::{contains, defines, is_member, parse_formula, ALL_CLASSES};
use findef::target::Target;
use proptest::prelude::*;

/// An algebra expanded by a relation `r` whose tuples are chosen by `mask`.
fn with_relation(a: &FiniteStructure, arity: usize, mask: u64) -> FiniteStructure {
    let rel = tuples(a.size(), arity).enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t).collect();
    a.with_relation("r", arity, rel).unwrap()
}

fn certified_and_monotone(class: Vec<FiniteStructure>) -> Result<(), TestCaseError> {
    let target = Target::relation("r");
    let lang = Query::complement_language(&class, &target).unwrap();
    let mut definable = Vec::new();
    for &c in ALL_CLASSES.iter() {
        let q = Query::new(class.clone(), lang.clone(), target.clone(), c);
        let v = check(&q).unwrap();
        match &v {
            Verdict::Definable { witness, verified } => {
                prop_assert!(*verified);
                prop_assert!(is_member(witness, c));
                prop_assert!(defines(&q.class, witness, &q.target).unwrap());
                let text = witness.to_string();
                let back = parse_formula(&text, class[0].signature()).unwrap();
                prop_assert_eq!(back.to_string(), text);
            }
            Verdict::NotDefinable { counterexample } => verify_counterexample(&q, counterexample).unwrap(),
            Verdict::ResourceExceeded { .. } => {}
        }
        prop_assert_eq!(&check(&q).unwrap(), &v);
        definable.push((c, v.is_definable()));
    }
    for &(big, b) in &definable {
        for &(small, s) in &definable {
            prop_assert!(!(contains(big, small) && s && !b), "{} but not {}", small, big);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn single_algebra(pair in arb_pair(3, 2), arity in 1..=2usize, mask in any::<u64>()) {
        certified_and_monotone(vec![with_relation(&pair.0, arity, mask)])?;
    }

    #[test]
    fn two_member_class(pair in arb_pair(3, 2), arity in 1..=2usize, m1 in any::<u64>(), m2 in any::<u64>()) {
        let a = with_relation(&pair.0, arity, m1);
        let b = with_relation(&pair.1, arity, m2).renamed("B");
        certified_and_monotone(vec![a, b])?;
    }
}
