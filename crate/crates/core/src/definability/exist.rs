use crate::algebra::{product, tuples, FiniteStructure, MixedRadix};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::subpowers::{find_maps, MapKind, Subuniverse};
use crate::term::{var_name, Term};

use super::columns::Problem;
use super::{conj, horn, open, Counterexample, Outcome};

/// Existential (`positive = false`) or existential positive definability:
/// embeddings (homomorphisms) between members preserve the relation.
pub(crate) fn existential(p: &Problem, positive: bool) -> Result<Outcome> {
    if p.in_r.is_clear() {
        return open::open_class(p, positive);
    }
    let kind = if positive { MapKind::Hom } else { MapKind::Embedding };
    if let Some(c) = member_maps(p, kind)? {
        return Ok(Outcome::Counter(c));
    }
    if let Some(f) = attempt(open::open_class(p, positive))? {
        return Ok(Outcome::Formula(f));
    }
    Ok(Outcome::Formula(diagram_formula(p, positive)))
}

pub(crate) fn primitive_positive(p: &Problem) -> Result<Outcome> {
    bounded_search(p, MapKind::Hom, conj::atomic_conj)
}

pub(crate) fn exist_horn(p: &Problem) -> Result<Outcome> {
    bounded_search(p, MapKind::Embedding, |q| horn::open_horn(q, false))
}

/// Maps between members settle the negative side exactly for one factor;
/// witnesses come from the quantifier-free route or from the member-map
/// route; maps from larger products are searched up to the bound.
fn bounded_search(p: &Problem, kind: MapKind, open_route: impl Fn(&Problem) -> Result<Outcome>) -> Result<Outcome> {
    if p.in_r.is_clear() {
        return open_route(p);
    }
    if let Some(c) = member_maps(p, kind)? {
        return Ok(Outcome::Counter(c));
    }
    if let Some(f) = attempt(open_route(p))? {
        return Ok(Outcome::Formula(f));
    }
    if let Some(f) = member_map_route(p, kind, &open_route)? {
        return Ok(Outcome::Formula(f));
    }
    if let Some(c) = product_maps(p, kind)? {
        return Ok(Outcome::Counter(c));
    }
    Ok(Outcome::Bounded(format!(
        "bounded: no witness found and no counterexample among maps from products of at most {} members",
        p.bounds.max_poly_arity
    )))
}

/// A formula from a route, treating counterexamples and resource limits of
/// that route as failure.
fn attempt(r: Result<Outcome>) -> Result<Option<Formula>> {
    match r {
        Ok(Outcome::Formula(f)) => Ok(Some(f)),
        Ok(_) | Err(Error::Resource(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn full_elements(a: &FiniteStructure) -> Vec<Vec<usize>> {
    (0..a.size()).map(|e| vec![e]).collect()
}

/// First map of `kind` from a member to a member taking a tuple of the
/// relation outside it.
fn member_maps(p: &Problem, kind: MapKind) -> Result<Option<Counterexample>> {
    for (i, a) in p.k.iter().enumerate() {
        let tuples_a = p.member_tuples(i);
        for (j, b) in p.k.iter().enumerate() {
            for m in find_maps(a, &Subuniverse::full(a), b, &Subuniverse::full(b), kind)? {
                for t in &tuples_a {
                    let image: Vec<usize> = t.iter().map(|&x| m.images[x]).collect();
                    if !p.in_rel(j, &image) {
                        return Ok(Some(Counterexample {
                            kind,
                            source_factors: vec![i],
                            source: full_elements(a),
                            target_member: j,
                            target: (0..b.size()).collect(),
                            map: m.images.clone(),
                            tuple: t.iter().map(|&x| vec![x]).collect(),
                            image,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Maps of `kind` from products of 2..=max_poly_arity members into members.
fn product_maps(p: &Problem, kind: MapKind) -> Result<Option<Counterexample>> {
    let m = p.k.len();
    let r = p.arity();
    for k in 2..=p.bounds.max_poly_arity {
        for combo in tuples(m, k) {
            let factors: Vec<&FiniteStructure> = combo.iter().map(|&i| &p.k[i]).collect();
            let size = factors
                .iter()
                .try_fold(1usize, |acc, f| acc.checked_mul(f.size()))
                .unwrap_or(usize::MAX);
            if size > p.bounds.max_poly_elements {
                continue;
            }
            let prod = product(&factors)?;
            let radix = MixedRadix::new(factors.iter().map(|f| f.size()).collect());
            let rel: Vec<Vec<Vec<usize>>> = combo.iter().map(|&i| p.member_tuples(i)).collect();
            if rel.iter().any(Vec::is_empty) {
                continue;
            }
            for (j, b) in p.k.iter().enumerate() {
                let maps = find_maps(&prod, &Subuniverse::full(&prod), b, &Subuniverse::full(b), kind)?;
                for h in maps {
                    for pick in tuples_of_lists(&rel) {
                        let coords: Vec<Vec<usize>> = (0..r).map(|pos| pick.iter().map(|t| t[pos]).collect()).collect();
                        let image: Vec<usize> = coords.iter().map(|c| h.images[radix.encode(c)]).collect();
                        if !p.in_rel(j, &image) {
                            return Ok(Some(Counterexample {
                                kind,
                                source_factors: combo.clone(),
                                source: (0..size).map(|e| radix.decode(e)).collect(),
                                target_member: j,
                                target: (0..b.size()).collect(),
                                map: h.images.clone(),
                                tuple: coords,
                                image,
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// All choices of one entry per list, lexicographically.
fn tuples_of_lists<'a, T>(lists: &'a [Vec<T>]) -> impl Iterator<Item = Vec<&'a T>> + 'a {
    let radix = MixedRadix::new(lists.iter().map(Vec::len).collect());
    (0..radix.size()).map(move |i| {
        radix
            .decode(i)
            .into_iter()
            .zip(lists)
            .map(|(j, l)| &l[j])
            .collect()
    })
}

/// The relation `Θ = {(σā, σē_A)}` on each member `B`, with `σ` ranging
/// over maps `A → B` of `kind`, `ā` over the relation on `A` and `ē_A`
/// enumerating `A`, padded by its last element to the largest member size.
/// A quantifier-free definition `χ(x̄, w̄)` of `Θ` gives `∃w̄ χ`.
fn member_map_route(p: &Problem, kind: MapKind, open_route: &impl Fn(&Problem) -> Result<Outcome>) -> Result<Option<Formula>> {
    let len = p.k.iter().map(FiniteStructure::size).max().unwrap_or(0);
    let width = p.arity() + len;
    let mut cells = Vec::new();
    for b in p.k {
        match crate::algebra::checked_pow(b.size(), width) {
            Some(c) => cells.push(c),
            None => return Ok(None),
        }
    }
    if cells.iter().sum::<usize>() > p.bounds.max_product_coords * 64 {
        return Ok(None);
    }
    let mut ext: Vec<Vec<bool>> = cells.iter().map(|&c| vec![false; c]).collect();
    for (i, a) in p.k.iter().enumerate() {
        let tuples_a = p.member_tuples(i);
        let enumeration: Vec<usize> = (0..len).map(|e| e.min(a.size() - 1)).collect();
        for (j, b) in p.k.iter().enumerate() {
            let radix = MixedRadix::new(vec![b.size(); width]);
            for s in find_maps(a, &Subuniverse::full(a), b, &Subuniverse::full(b), kind)? {
                for t in &tuples_a {
                    let row: Vec<usize> = t.iter().chain(&enumeration).map(|&x| s.images[x]).collect();
                    ext[j][radix.encode(&row)] = true;
                }
            }
        }
    }
    let ws: Vec<String> = (0..len).map(|i| var_name("w", i)).collect();
    let mut vars = p.vars.clone();
    vars.extend(ws.iter().cloned());
    let theta = Problem::new(p.k, p.lang, vars, &ext, p.bounds);
    Ok(attempt(open_route(&theta))?.map(|chi| Formula::exists(ws, chi)))
}

/// `⋁_A ∃w̄ (Diag(A)(w̄) ∧ ⋁_{ā ∈ R^A} x̄ = w_ā)` with one block of
/// variables per member; positive diagrams omit the inequalities.
fn diagram_formula(p: &Problem, positive: bool) -> Formula {
    let mut bound = Vec::new();
    let mut bodies = Vec::new();
    for (m, a) in p.k.iter().enumerate() {
        let points = p.member_tuples(m);
        if points.is_empty() {
            continue;
        }
        let base = bound.len();
        let w = |e: usize| Term::var(var_name("w", base + e));
        bound.extend((0..a.size()).map(|e| var_name("w", base + e)));
        let mut conj = Vec::new();
        for (op, sym) in a.signature().ops().iter().enumerate() {
            for args in tuples(a.size(), sym.arity) {
                let lhs = Term::app(sym.name.clone(), args.iter().map(|&x| w(x)).collect());
                conj.push(Formula::eq(lhs, w(a.apply(op, &args))));
            }
        }
        if !positive {
            for x in 0..a.size() {
                for y in x + 1..a.size() {
                    conj.push(Formula::not(Formula::eq(w(x), w(y))));
                }
            }
        }
        conj.push(Formula::or(
            points
                .iter()
                .map(|t| {
                    Formula::and(
                        t.iter()
                            .zip(&p.vars)
                            .map(|(&x, v)| Formula::eq(Term::var(v), w(x)))
                            .collect(),
                    )
                })
                .collect(),
        ));
        bodies.push(Formula::and(conj));
    }
    Formula::exists(bound, Formula::or(bodies))
}
