#![allow(dead_code)]

use findef::algebra::{FiniteStructure, Signature, Symbol};
use proptest::prelude::*;

const OP_NAMES: [&str; 3] = ["f", "g", "h"];

/// Algebras with `1..=max_size` elements and up to `max_ops` operations of
/// arity at most 2.
pub fn arb_algebra(max_size: usize, max_ops: usize) -> impl Strategy<Value = FiniteStructure> {
    (1..=max_size, proptest::collection::vec(0..=2usize, 0..=max_ops)).prop_flat_map(|(n, arities)| {
        let tables: Vec<_> = arities
            .iter()
            .map(|&k| proptest::collection::vec(0..n, n.pow(k as u32)))
            .collect();
        (Just(n), Just(arities), tables).prop_map(|(n, arities, tables)| algebra(n, &arities, tables))
    })
}

pub fn algebra(n: usize, arities: &[usize], tables: Vec<Vec<usize>>) -> FiniteStructure {
    let ops = arities.iter().enumerate().map(|(i, &k)| Symbol::new(OP_NAMES[i], k)).collect();
    FiniteStructure::new("A", Signature::new(ops, vec![]).unwrap(), n, tables, vec![]).unwrap()
}

/// Two algebras over one signature.
pub fn arb_pair(max_size: usize, max_ops: usize) -> impl Strategy<Value = (FiniteStructure, FiniteStructure)> {
    arb_algebra(max_size, max_ops).prop_flat_map(move |a| {
        let arities: Vec<usize> = a.signature().ops().iter().map(|s| s.arity).collect();
        (1..=max_size).prop_flat_map(move |n| {
            let tables: Vec<_> = arities
                .iter()
                .map(|&k| proptest::collection::vec(0..n, n.pow(k as u32)))
                .collect();
            (Just(a.clone()), Just(n), Just(arities.clone()), tables)
                .prop_map(|(a, n, arities, tables)| (a, algebra(n, &arities, tables)))
        })
    })
}
