use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::columns::{falsity, greedy_cover, Problem, View};
use super::Outcome;
use crate::error::Result;
use crate::formula::Formula;
use crate::subpowers::MapKind;

/// Quantifier-free definability: no homomorphism (positive) or isomorphism
/// (open) from a column in the relation to one outside it.
pub(crate) fn open_class(p: &Problem, positive: bool) -> Result<Outcome> {
    let r = p.r_cols();
    if r.is_empty() {
        return Ok(if positive {
            match p.refute_all()? {
                Ok(eqns) => Outcome::Formula(Formula::and(eqns.iter().map(|e| e.atom()).collect())),
                Err(d) => Outcome::Counter(p.trivial_counterexample(d, MapKind::Hom)),
            }
        } else {
            Outcome::Formula(Formula::falsum(&p.vars[0]))
        });
    }
    let scope: Vec<usize> = (0..p.width()).collect();
    let views: Vec<View> = r.par_iter().map(|&c| p.view(c, &scope)).collect::<Result<_>>()?;
    let bad = p.bad();
    let reach = |v: &View| if positive { v.hom.clone() } else { v.iso.clone() };
    for v in &views {
        if let Some(d) = reach(v).intersection(&bad).next() {
            let kind = if positive { MapKind::Hom } else { MapKind::Isomorphism };
            return Ok(Outcome::Counter(p.view_counterexample(v, d, kind)?));
        }
    }
    Ok(Outcome::Formula(cover_by_diagrams(p, &views, positive, reach)))
}

/// Disjunction of minimized diagrams covering the relation.
fn cover_by_diagrams(p: &Problem, views: &[View], positive: bool, reach: impl Fn(&View) -> FixedBitSet) -> Formula {
    let all = p.all();
    let bad = p.bad();
    let mut order: Vec<usize> = (0..views.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(reach(&views[i]).intersection_count(&p.in_r)));
    let mut left = p.in_r.clone();
    let mut disjuncts = Vec::new();
    for i in order {
        let v = &views[i];
        if !left.contains(v.col) {
            continue;
        }
        let mut lits: Vec<(Formula, FixedBitSet)> = v.eqns.iter().map(|e| (e.atom(), e.truth.clone())).collect();
        if !positive {
            lits.extend(
                v.distinct
                    .iter()
                    .map(|e| (Formula::not(e.atom()), falsity(&e.truth, &all))),
            );
            lits.sort_by_key(|(f, _)| formula_size(f));
        }
        let kills: Vec<FixedBitSet> = lits.iter().map(|(_, t)| falsity(t, &bad)).collect();
        let pick = greedy_cover(&bad, &kills).expect("diagram excludes the complement");
        let mut ext = all.clone();
        for &j in &pick {
            ext.intersect_with(&lits[j].1);
        }
        left.difference_with(&ext);
        if pick.is_empty() {
            return Formula::verum(&p.vars[0]);
        }
        disjuncts.push(Formula::and(pick.into_iter().map(|j| lits[j].0.clone()).collect()));
    }
    Formula::or(disjuncts)
}

pub(crate) fn formula_size(f: &Formula) -> usize {
    match f {
        Formula::Eq(l, r) => l.size() + r.size(),
        Formula::Rel(_, ts) => ts.iter().map(|t| t.size()).sum(),
        Formula::Not(g) => formula_size(g),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().map(formula_size).sum(),
        Formula::Implies(a, b) => formula_size(a) + formula_size(b),
        Formula::Exists(_, b) | Formula::Forall(_, b) => formula_size(b),
    }
}
