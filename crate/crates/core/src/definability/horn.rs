use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::columns::{falsity, greedy_cover, Eqn, Problem, View};
use super::conj::conjunction;
use super::Outcome;
use crate::error::Result;
use crate::formula::Formula;
use crate::subpowers::MapKind;

/// `⋀premise → conclusion`, or `¬⋀premise` without a conclusion.
struct Clause {
    premise: Vec<Eqn>,
    conclusion: Option<Eqn>,
}

impl Clause {
    fn formula(&self) -> Formula {
        let premise = || Formula::and(self.premise.iter().map(Eqn::atom).collect());
        match (&self.conclusion, self.premise.is_empty()) {
            (Some(c), true) => c.atom(),
            (Some(c), false) => Formula::implies(premise(), c.atom()),
            (None, _) => Formula::not(premise()),
        }
    }

    /// Columns where the clause fails.
    fn falsity(&self, all: &FixedBitSet) -> FixedBitSet {
        let mut f = all.clone();
        for e in &self.premise {
            f.intersect_with(&e.truth);
        }
        if let Some(c) = &self.conclusion {
            f.difference_with(&c.truth);
        }
        f
    }
}

/// Open Horn definability. For each column `d` outside the relation, the
/// columns of the relation receiving a homomorphism from `d` generate a
/// subpower; an equation true there and false on `d` yields the clause
/// `D⁺(d) → α`. If there is none, `Sg(d)` is isomorphic to that subpower.
pub(crate) fn open_horn(p: &Problem, strict: bool) -> Result<Outcome> {
    let r = p.r_cols();
    if r.is_empty() {
        if !strict {
            return Ok(Outcome::Formula(Formula::falsum(&p.vars[0])));
        }
        return Ok(match p.refute_all()? {
            Ok(eqns) => Outcome::Formula(conjunction(p, &eqns)),
            Err(d) => Outcome::Counter(p.trivial_counterexample(d, MapKind::Isomorphism)),
        });
    }
    if strict {
        if let Some(d) = (0..p.width()).find(|&d| !p.in_r.contains(d) && p.trivial(d)) {
            return Ok(Outcome::Counter(p.trivial_counterexample(d, MapKind::Isomorphism)));
        }
    }
    let bad: Vec<usize> = p.bad().ones().collect();
    if bad.is_empty() {
        return Ok(Outcome::Formula(Formula::verum(&p.vars[0])));
    }
    let r_views: Vec<View> = r.par_iter().map(|&c| p.view(c, &r)).collect::<Result<_>>()?;
    let bad_views: Vec<View> = bad.par_iter().map(|&d| p.view(d, &r)).collect::<Result<_>>()?;
    let hom_in_r = |a: usize, b: usize| r_views[r.binary_search(&a).unwrap()].hom.contains(b);
    let all = p.all();
    let in_r = &p.in_r;
    let mut clauses = Vec::new();
    for v in &bad_views {
        let d = v.col;
        let up: Vec<usize> = v.hom.ones().collect();
        let (conclusion, need) = if up.is_empty() && !strict {
            (None, in_r.clone())
        } else {
            let key = p.minimal(&up, hom_in_r);
            let s = p.separate(&key, &[d])?;
            let Some((deriv, row)) = &s.found[0] else {
                return Ok(Outcome::Counter(p.separation_counterexample(&key, &s, d, MapKind::Isomorphism)?));
            };
            let vars = p.var_terms();
            let alpha = p.eqn(s.closure.deriv_to_term(deriv, &vars), s.closure.term(*row, &vars))?;
            let need = falsity(&alpha.truth, in_r);
            (Some(alpha), need)
        };
        let kills: Vec<FixedBitSet> = v.eqns.iter().map(|e| falsity(&e.truth, in_r)).collect();
        let pick = greedy_cover(&need, &kills).expect("premise fails wherever the conclusion does");
        let premise = pick
            .into_iter()
            .map(|i| p.eqn(v.eqns[i].lhs.clone(), v.eqns[i].rhs.clone()))
            .collect::<Result<Vec<_>>>()?;
        clauses.push(Clause { premise, conclusion });
    }
    let mut seen = HashSet::new();
    clauses.retain(|c| seen.insert(c.formula()));
    let bad_set = p.bad();
    let kills: Vec<FixedBitSet> = clauses.iter().map(|c| c.falsity(&all)).collect();
    let pick = greedy_cover(&bad_set, &kills).expect("every outside column falsifies its clause");
    Ok(Outcome::Formula(Formula::and(
        pick.into_iter().map(|i| clauses[i].formula()).collect(),
    )))
}
