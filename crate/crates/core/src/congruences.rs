//! Congruences: principal and relative principal congruences, congruence
//! lattices, quasivariety membership, and the extension, Fraser–Horn and
//! definable principal congruence checks built on them.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{product, tuples, FiniteStructure, MixedRadix};
use crate::definability::{check, Bounds, Query, Verdict};
use crate::error::{Error, Result};
use crate::formula::{defines, SyntacticClass};
use crate::subpowers::{all_subuniverses, find_maps, induced, MapKind, Subuniverse};
use crate::target::Target;

/// An equivalence relation on `0..n`, stored as block labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Congruence {
    /// `labels[x]` is the least element of the block of `x`.
    labels: Vec<usize>,
}

impl Congruence {
    pub fn identity(n: usize) -> Congruence {
        Congruence { labels: (0..n).collect() }
    }

    pub fn full(n: usize) -> Congruence {
        Congruence { labels: vec![0; n] }
    }

    fn from_union_find(uf: &UnionFind<usize>, n: usize) -> Congruence {
        let mut least: HashMap<usize, usize> = HashMap::new();
        let labels = (0..n).map(|x| *least.entry(uf.find(x)).or_insert(x)).collect();
        Congruence { labels }
    }

    /// Equivalence relation generated by `pairs`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Congruence {
        let mut uf = UnionFind::new(n);
        for &(x, y) in pairs {
            uf.union(x, y);
        }
        Congruence::from_union_find(&uf, n)
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Congruence> {
        let mut seen = vec![false; n];
        for &x in blocks.iter().flatten() {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Query(format!("blocks do not partition 0..{n}")));
            }
        }
        if seen.contains(&false) {
            return Err(Error::Query(format!("blocks do not cover 0..{n}")));
        }
        let pairs: Vec<(usize, usize)> = blocks.iter().flat_map(|b| b.iter().map(move |&x| (b[0], x))).collect();
        Ok(Congruence::from_pairs(n, &pairs))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.labels[x] == self.labels[y]
    }

    /// Blocks in order of their least elements.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index = HashMap::new();
        for (x, &l) in self.labels.iter().enumerate() {
            let i = *index.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[i].push(x);
        }
        blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().enumerate().filter(|&(x, &l)| x == l).count()
    }

    pub fn is_identity(&self) -> bool {
        self.num_blocks() == self.size()
    }

    pub fn is_full(&self) -> bool {
        self.num_blocks() <= 1
    }

    /// `self ⊆ other`.
    pub fn le(&self, other: &Congruence) -> bool {
        self.labels.iter().enumerate().all(|(x, &l)| other.related(x, l))
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let mut least: HashMap<(usize, usize), usize> = HashMap::new();
        let labels = (0..self.size())
            .map(|x| *least.entry((self.labels[x], other.labels[x])).or_insert(x))
            .collect();
        Congruence { labels }
    }

    pub fn join(&self, other: &Congruence) -> Congruence {
        let n = self.size();
        let mut uf = UnionFind::new(n);
        for x in 0..n {
            uf.union(x, self.labels[x]);
            uf.union(x, other.labels[x]);
        }
        Congruence::from_union_find(&uf, n)
    }

    /// `self × other` on the product encoded by `MixedRadix::new([n, m])`.
    pub fn product(&self, other: &Congruence) -> Congruence {
        let m = other.size();
        let labels = (0..self.size() * m)
            .map(|c| self.labels[c / m] * m + other.labels[c % m])
            .collect();
        Congruence { labels }
    }

    /// Restriction to `elements`, renumbered by position.
    pub fn restrict(&self, elements: &[usize]) -> Congruence {
        let pairs: Vec<(usize, usize)> = (0..elements.len())
            .flat_map(|i| (0..i).map(move |j| (j, i)))
            .filter(|&(j, i)| self.related(elements[j], elements[i]))
            .collect();
        Congruence::from_pairs(elements.len(), &pairs)
    }

    /// Whether every operation of `a` respects the relation.
    pub fn is_compatible(&self, a: &FiniteStructure) -> bool {
        self.size() == a.size()
            && a.signature().ops().iter().enumerate().all(|(op, sym)| {
                tuples(a.size(), sym.arity).all(|t| {
                    let v = a.apply(op, &t);
                    (0..sym.arity).all(|i| {
                        let mut s = t.clone();
                        s[i] = self.labels[t[i]];
                        self.related(v, a.apply(op, &s))
                    })
                })
            })
    }
}

/// Least congruence containing `pairs`: each merged pair is pushed through
/// every basic translation until nothing new merges.
pub fn generate(a: &FiniteStructure, pairs: &[(usize, usize)]) -> Congruence {
    let n = a.size();
    let mut uf = UnionFind::new(n);
    let mut queue: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(x, y)| uf.union(x, y)).collect();
    let ops: Vec<(usize, usize)> = a
        .signature()
        .ops()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.arity > 0)
        .map(|(i, s)| (i, s.arity))
        .collect();
    while let Some((x, y)) = queue.pop() {
        for &(op, arity) in &ops {
            for rest in tuples(n, arity - 1) {
                for i in 0..arity {
                    let mut args = rest.clone();
                    args.insert(i, x);
                    let u = a.apply(op, &args);
                    args[i] = y;
                    let v = a.apply(op, &args);
                    if uf.union(u, v) {
                        queue.push((u, v));
                    }
                }
            }
        }
    }
    Congruence::from_union_find(&uf, n)
}

pub fn principal_congruence(a: &FiniteStructure, x: usize, y: usize) -> Congruence {
    generate(a, &[(x, y)])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBounds {
    pub max_universe: usize,
    pub max_congruences: usize,
}

impl Default for LatticeBounds {
    fn default() -> Self {
        LatticeBounds {
            max_universe: 36,
            max_congruences: 100_000,
        }
    }
}

fn sort_lattice(cons: &mut [Congruence]) {
    cons.sort_by(|s, t| (t.num_blocks(), &s.labels).cmp(&(s.num_blocks(), &t.labels)));
}

/// All congruences as joins of principal ones, finest first.
pub fn congruence_lattice(a: &FiniteStructure, bounds: LatticeBounds) -> Result<Vec<Congruence>> {
    let n = a.size();
    if n > bounds.max_universe {
        return Err(Error::Resource(format!(
            "congruence lattice of a {n}-element algebra (bound {})",
            bounds.max_universe
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|y| (0..y).map(move |x| (x, y))).collect();
    let principal: BTreeSet<Congruence> = pairs.par_iter().map(|&(x, y)| principal_congruence(a, x, y)).collect();
    let principal: Vec<Congruence> = principal.into_iter().collect();
    let mut all: BTreeSet<Congruence> = principal.iter().cloned().collect();
    all.insert(Congruence::identity(n));
    let mut frontier = principal.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for c in &frontier {
            for p in &principal {
                let j = c.join(p);
                if all.insert(j.clone()) {
                    if all.len() > bounds.max_congruences {
                        return Err(Error::Resource(format!("more than {} congruences", bounds.max_congruences)));
                    }
                    next.push(j);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Congruence> = all.into_iter().collect();
    sort_lattice(&mut out);
    Ok(out)
}

/// `A/θ`, with blocks numbered in order of their least elements.
pub fn quotient(a: &FiniteStructure, theta: &Congruence) -> Result<FiniteStructure> {
    if !theta.is_compatible(a) {
        return Err(Error::Query("not a congruence".into()));
    }
    let blocks = theta.blocks();
    let mut class = vec![0; a.size()];
    for (i, b) in blocks.iter().enumerate() {
        for &x in b {
            class[x] = i;
        }
    }
    let reps: Vec<usize> = blocks.iter().map(|b| b[0]).collect();
    let m = reps.len();
    let sig = a.signature();
    let ops = (0..sig.ops().len())
        .map(|op| {
            tuples(m, sig.ops()[op].arity)
                .map(|t| class[a.apply(op, &t.iter().map(|&i| reps[i]).collect::<Vec<_>>())])
                .collect()
        })
        .collect();
    let rels = (0..sig.rels().len())
        .map(|r| {
            let image: BTreeSet<Vec<usize>> = a
                .relation(r)
                .tuples()
                .iter()
                .map(|t| t.iter().map(|&x| class[x]).collect())
                .collect();
            image.into_iter().collect()
        })
        .collect();
    FiniteStructure::new(format!("{}/θ", a.name()), sig.clone(), m, ops, rels)
}

/// The class `K` generating a quasivariety, with the kernels of maps into
/// `K` cached per algebra.
#[derive(Debug)]
pub struct RelContext {
    class: Vec<FiniteStructure>,
    cache: Mutex<Vec<(FiniteStructure, Arc<Vec<Congruence>>)>>,
}

impl RelContext {
    pub fn new(class: Vec<FiniteStructure>) -> Result<RelContext> {
        let first = class.first().ok_or_else(|| Error::Query("empty class".into()))?;
        if let Some(b) = class.iter().find(|b| b.signature() != first.signature()) {
            return Err(Error::SignatureMismatch(b.name().to_string()));
        }
        Ok(RelContext {
            class,
            cache: Mutex::new(Vec::new()),
        })
    }

    pub fn class(&self) -> &[FiniteStructure] {
        &self.class
    }

    /// Distinct kernels of homomorphisms from `a` into members, sorted.
    pub fn kernels(&self, a: &FiniteStructure) -> Result<Arc<Vec<Congruence>>> {
        if let Some((_, k)) = self.cache.lock().unwrap().iter().find(|(b, _)| b == a) {
            return Ok(k.clone());
        }
        let mut found = BTreeSet::new();
        for b in &self.class {
            for h in find_maps(a, &Subuniverse::full(a), b, &Subuniverse::full(b), MapKind::Hom)? {
                let pairs: Vec<(usize, usize)> = (0..a.size())
                    .flat_map(|y| (0..y).map(move |x| (x, y)))
                    .filter(|&(x, y)| h.images[x] == h.images[y])
                    .collect();
                found.insert(Congruence::from_pairs(a.size(), &pairs));
            }
        }
        let k = Arc::new(found.into_iter().collect::<Vec<_>>());
        self.cache.lock().unwrap().push((a.clone(), k.clone()));
        Ok(k)
    }
}

/// `A ∈ ISP(K)`: homomorphisms into members separate every pair.
pub fn quasivariety_membership(ctx: &RelContext, a: &FiniteStructure) -> Result<bool> {
    let kernels = ctx.kernels(a)?;
    Ok(kernels
        .iter()
        .fold(Congruence::full(a.size()), |acc, k| acc.meet(k))
        .is_identity())
}

/// Least congruence `ψ ∋ (x, y)` with `A/ψ ∈ Q(K)`: the meet of the
/// kernels of maps into members that identify `x` and `y`.
pub fn relative_principal_congruence(ctx: &RelContext, a: &FiniteStructure, x: usize, y: usize) -> Result<Congruence> {
    if !quasivariety_membership(ctx, a)? {
        return Err(Error::Query(format!("{} is not in the quasivariety generated by the class", a.name())));
    }
    Ok(ctx
        .kernels(a)?
        .iter()
        .filter(|k| k.related(x, y))
        .fold(Congruence::full(a.size()), |acc, k| acc.meet(k)))
}

/// A subalgebra whose relative principal congruence is not the restriction
/// of the one in the member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CepFailure {
    pub member: usize,
    pub subuniverse: Vec<usize>,
    pub pair: (usize, usize),
    /// Blocks of `θ(a, b)` computed in the subalgebra, as member elements.
    pub in_subalgebra: Vec<Vec<usize>>,
    /// Blocks of `θ(a, b)` computed in the member, restricted.
    pub restricted: Vec<Vec<usize>>,
}

fn blocks_in_host(c: &Congruence, elements: &[usize]) -> Vec<Vec<usize>> {
    c.blocks()
        .into_iter()
        .map(|b| b.into_iter().map(|i| elements[i]).collect())
        .collect()
}

/// Relative congruence extension: `θ_Q^S(a, b) = θ_Q^B(a, b) ∩ S²` for every
/// member `B`, proper subalgebra `S` and pair of `S`.
pub fn check_cep(ctx: &RelContext, max_subuniverses: usize) -> Result<Option<CepFailure>> {
    for (m, b) in ctx.class().iter().enumerate() {
        for sub in all_subuniverses(b, max_subuniverses)? {
            if sub.len() == b.size() {
                continue;
            }
            let s = induced(b, &sub.elements, format!("{}[{:?}]", b.name(), sub.elements))?;
            for j in 0..s.size() {
                for i in 0..j {
                    let inner = relative_principal_congruence(ctx, &s, i, j)?;
                    let (x, y) = (sub.elements[i], sub.elements[j]);
                    let outer = relative_principal_congruence(ctx, b, x, y)?.restrict(&sub.elements);
                    if inner != outer {
                        return Ok(Some(CepFailure {
                            member: m,
                            subuniverse: sub.elements.clone(),
                            pair: (x, y),
                            in_subalgebra: blocks_in_host(&inner, &sub.elements),
                            restricted: blocks_in_host(&outer, &sub.elements),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// A principal congruence of a binary product that is not the product of
/// the principal congruences of the factors; it is skew.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkewCongruence {
    pub factors: (usize, usize),
    pub pair: (Vec<usize>, Vec<usize>),
    /// Blocks of `θ(p, q)` in the product, as coordinate pairs.
    pub blocks: Vec<Vec<Vec<usize>>>,
    /// Blocks of `θ(p1, q1) × θ(p2, q2)`.
    pub product_blocks: Vec<Vec<Vec<usize>>>,
}

fn coordinate_blocks(c: &Congruence, radix: &MixedRadix) -> Vec<Vec<Vec<usize>>> {
    c.blocks()
        .into_iter()
        .map(|b| b.into_iter().map(|e| radix.decode(e)).collect())
        .collect()
}

/// Principal congruences of `A × B`, over pairs of members including
/// squares, against products of principal congruences of the factors.
pub fn check_fraser_horn(class: &[FiniteStructure]) -> Result<Option<SkewCongruence>> {
    for j in 0..class.len() {
        for i in 0..=j {
            let (a, b) = (&class[i], &class[j]);
            let p = product(&[a, b])?;
            let radix = MixedRadix::new(vec![a.size(), b.size()]);
            for v in 0..p.size() {
                for u in 0..v {
                    let (pu, pv) = (radix.decode(u), radix.decode(v));
                    let lhs = principal_congruence(&p, u, v);
                    let rhs = principal_congruence(a, pu[0], pv[0]).product(&principal_congruence(b, pu[1], pv[1]));
                    if lhs != rhs {
                        return Ok(Some(SkewCongruence {
                            factors: (i, j),
                            pair: (pu, pv),
                            blocks: coordinate_blocks(&lhs, &radix),
                            product_blocks: coordinate_blocks(&rhs, &radix),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Congruences of `A × B` that are not products of congruences.
pub fn skew_congruences(a: &FiniteStructure, b: &FiniteStructure, bounds: LatticeBounds) -> Result<Vec<Congruence>> {
    let p = product(&[a, b])?;
    let products: BTreeSet<Congruence> = congruence_lattice(a, bounds)?
        .iter()
        .flat_map(|x| congruence_lattice(b, bounds).map(|ys| ys.iter().map(|y| x.product(y)).collect::<Vec<_>>()))
        .flatten()
        .collect();
    Ok(congruence_lattice(&p, bounds)?
        .into_iter()
        .filter(|c| !products.contains(c))
        .collect())
}

/// Name of the relation `{(a, b, c, d) : (c, d) ∈ θ_Q(a, b)}`.
pub const PRINCIPAL_RELATION: &str = "cg";

/// Member expanded by the relative principal congruence relation.
pub fn with_principal_relation(ctx: &RelContext, a: &FiniteStructure) -> Result<FiniteStructure> {
    if a.signature().contains(PRINCIPAL_RELATION) {
        return Err(Error::DuplicateSymbol(PRINCIPAL_RELATION.into()));
    }
    let n = a.size();
    let mut rel = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let theta = relative_principal_congruence(ctx, a, x, y)?;
            for z in 0..n {
                for w in 0..n {
                    if theta.related(z, w) {
                        rel.push(vec![x, y, z, w]);
                    }
                }
            }
        }
    }
    a.with_relation(PRINCIPAL_RELATION, 4, rel)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpcReport {
    pub verdict: Verdict,
    /// Algebras on which a definable verdict's witness was checked against
    /// the congruence closure.
    pub verified_on: Vec<String>,
    /// First product where the witness fails.
    pub failed_on: Option<String>,
}

/// A formula of `class` defining `(z, w) ∈ θ_Q(x, y)` on the members, checked
/// on their binary and ternary products. A witness failing there is replaced
/// by a conjunction of equations when the class contains one that passes. Positive open formulas
/// require relative congruence extension, conjunctions of equations require
/// it and the Fraser–Horn property, primitive positive formulas the latter.
pub fn synthesize_dpc_formula(ctx: &RelContext, class: SyntacticClass, bounds: Bounds) -> Result<DpcReport> {
    use SyntacticClass::*;
    let needs_cep = matches!(class, PositiveOpen | AtomicConj);
    let needs_fhp = matches!(class, AtomicConj | PP);
    if needs_cep {
        if let Some(f) = check_cep(ctx, 4096)? {
            return Err(Error::Query(format!(
                "precondition failed: congruence extension fails in member {} on subuniverse {:?} at {:?}",
                f.member, f.subuniverse, f.pair
            )));
        }
    }
    if needs_fhp {
        if let Some(s) = check_fraser_horn(ctx.class())? {
            return Err(Error::Query(format!(
                "precondition failed: Fraser–Horn fails on members {:?} at {:?}",
                s.factors, s.pair
            )));
        }
    }
    let k = ctx.class();
    let members: Vec<FiniteStructure> = k.iter().map(|a| with_principal_relation(ctx, a)).collect::<Result<_>>()?;
    let target = Target::relation(PRINCIPAL_RELATION);
    let run = |class: SyntacticClass| -> Result<Verdict> {
        let mut query = Query::new(members.clone(), k[0].signature().clone(), target.clone(), class);
        query.bounds = bounds;
        check(&query)
    };
    let mut report = verify_dpc(ctx, &members, run(class)?)?;
    if report.failed_on.is_some() && class != AtomicConj && crate::formula::contains(class, AtomicConj) {
        let conj = verify_dpc(ctx, &members, run(AtomicConj)?)?;
        if conj.verdict.is_definable() && conj.failed_on.is_none() {
            report = conj;
        }
    }
    Ok(report)
}

/// Checks a definable verdict's witness on the binary and ternary products
/// of members.
fn verify_dpc(ctx: &RelContext, members: &[FiniteStructure], verdict: Verdict) -> Result<DpcReport> {
    let mut report = DpcReport {
        verdict,
        verified_on: Vec::new(),
        failed_on: None,
    };
    let Some(witness) = report.verdict.witness().cloned() else {
        return Ok(report);
    };
    let target = Target::relation(PRINCIPAL_RELATION);
    report.verified_on = members.iter().map(|a| a.name().to_string()).collect();
    let k = ctx.class();
    let mut products = Vec::new();
    for j in 0..k.len() {
        for i in 0..=j {
            products.push(vec![i, j]);
        }
    }
    for l in 0..k.len() {
        for j in 0..=l {
            for i in 0..=j {
                products.push(vec![i, j, l]);
            }
        }
    }
    for factors in products {
        let f: Vec<&FiniteStructure> = factors.iter().map(|&i| &k[i]).collect();
        let p = with_principal_relation(ctx, &product(&f)?)?;
        if !defines(std::slice::from_ref(&p), &witness, &target)? {
            report.failed_on = Some(p.name().to_string());
            return Ok(report);
        }
        report.verified_on.push(p.name().to_string());
    }
    Ok(report)
}
