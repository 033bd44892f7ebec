use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::columns::{falsity, greedy_cover, Eqn, Problem, View};
use super::Outcome;
use crate::error::Result;
use crate::formula::Formula;
use crate::subpowers::MapKind;

/// Definability by a conjunction of equations: every column outside the
/// relation is separated by an equation holding on the subpower generated
/// by the relation's columns.
pub(crate) fn atomic_conj(p: &Problem) -> Result<Outcome> {
    let r = p.r_cols();
    if r.is_empty() {
        return Ok(match p.refute_all()? {
            Ok(eqns) => Outcome::Formula(conjunction(p, &eqns)),
            Err(d) => Outcome::Counter(p.trivial_counterexample(d, MapKind::Hom)),
        });
    }
    let scope: Vec<usize> = (0..p.width()).collect();
    let views: Vec<View> = r.par_iter().map(|&c| p.view(c, &scope)).collect::<Result<_>>()?;
    let bad = p.bad();
    for v in &views {
        if let Some(d) = v.hom.intersection(&bad).next() {
            return Ok(Outcome::Counter(p.view_counterexample(v, d, MapKind::Hom)?));
        }
    }
    let key = p.minimal(&r, |a, b| views[r.binary_search(&a).unwrap()].hom.contains(b));
    let targets: Vec<usize> = bad.ones().collect();
    match p.separate_all(&key, &targets)? {
        Ok(eqns) => Ok(Outcome::Formula(conjunction(p, &eqns))),
        Err((d, s)) => Ok(Outcome::Counter(p.separation_counterexample(&key, &s, d, MapKind::Hom)?)),
    }
}

/// Smallest-first greedy selection of equations excluding every column
/// outside the relation.
pub(crate) fn conjunction(p: &Problem, eqns: &[Eqn]) -> Formula {
    let mut pool: Vec<&Eqn> = eqns.iter().collect();
    pool.sort_by_key(|e| e.size());
    let mut seen = std::collections::HashSet::new();
    pool.retain(|e| seen.insert((&e.lhs, &e.rhs)));
    let bad = p.bad();
    let kills: Vec<FixedBitSet> = pool.iter().map(|e| falsity(&e.truth, &bad)).collect();
    match greedy_cover(&bad, &kills) {
        Some(pick) if !pick.is_empty() => Formula::and(pick.into_iter().map(|i| pool[i].atom()).collect()),
        _ => Formula::verum(&p.vars[0]),
    }
}
